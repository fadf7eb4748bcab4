// Acceptance run: one PASS/FAIL line per criterion, with the measured
// quantity and wall time. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rabigeom/dynamics.hpp"
#include "rabigeom/geometry.hpp"
#include "rabigeom/model.hpp"
#include "rabigeom/numerics.hpp"

using namespace rabigeom;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> grid(double a, double b, std::size_t n) { return linspace(a, b, n); }

// 1. closed-form phases of every RWA block eigenstate against 2 pi <N>
Outcome oracle_identity() {
    double worst = 0.0;
    std::size_t count = 0;
    const auto deltas = grid(-0.5, 0.5, 20);
    for (double delta : deltas)
        for (int ig = 1; ig <= 20; ++ig) {
            const double g = 0.3 * ig / 20.0;
            const RabiParams cases[] = {RabiParams::homogeneous(delta, g),
                                        {1.0, 1.0 + delta, 1.0 - 0.5 * delta, g, 0.6 * g}};
            for (const auto& two : cases)
                for (int k = 0; k <= 6; ++k)
                    for (const auto& e : solve_block(two, k)) {
                        const double closed = berry_phase_closed_form(two, TwoQubitLabel{k, e.l}).gamma;
                        worst = std::max(worst, std::abs(closed - berry_phase_eigenstate(e).gamma));
                        ++count;
                    }
            const auto hom = RabiParams::homogeneous(delta, g);
            const auto ef = equal_frequency_k1(hom);
            for (int l = 1; l <= 3; ++l) {
                const auto& st = ef.states[l - 1];
                const double photon = st[2] * st[2];
                worst = std::max(worst,
                                 std::abs(berry_phase_closed_form(hom, EqualFrequencyLabel{l}).gamma - 2 * pi * photon));
                ++count;
            }
            const auto jc = RabiParams::jc(delta, g);
            for (int k = 1; k <= 6; ++k) {
                const auto es = jc_eigensystem(jc, k);
                const std::vector<double> n{k - 1.0, static_cast<double>(k)};
                for (int br : {1, -1}) {
                    const auto& v = br > 0 ? es.plus : es.minus;
                    const double num = berry_phase_eigenstate(std::vector<double>{v[0], v[1]}, n).gamma;
                    worst = std::max(worst, std::abs(berry_phase_closed_form(jc, JcLabel{k, br}).gamma - num));
                    ++count;
                }
            }
        }
    return {worst <= 1e-9, fmt("%zu states, max |closed - 2pi<N>| = %.2e (tol 1e-9)", count, worst)};
}

// Surface integral of the differenced curvature from the pole to theta.
double stokes(StateFamily f, double theta, double alpha, double pole_offset) {
    const auto n = static_cast<std::size_t>(2001);
    const auto thetas = linspace(0.0, theta, n);
    const std::vector<double> phis{0.0};
    const auto field = curvature_from_connection(connection_field(f, thetas, phis, alpha));
    return phase_by_surface_integral(field.samples, pole_offset).gamma;
}

// 2. Stokes: integrated curvature against the closed forms
Outcome stokes_suite() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    std::uniform_real_distribution<double> gd(0.005, 0.3);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double delta = d(rng);
        const double g1 = gd(rng);
        const double g2 = gd(rng);
        double err = 0.0;
        switch (trial % 6) {
            case 0: {
                const auto p = RabiParams::jc(delta, g1);
                const double th = jc_eigensystem(p, 1).theta;
                err = std::abs(stokes(StateFamily::jc_plus, th, 0.0, 0.0) -
                               berry_phase_closed_form(p, JcLabel{1, 1}).gamma);
                break;
            }
            case 1: {
                const auto p = RabiParams::jc(delta, g1);
                const double th = jc_eigensystem(p, 1).theta;
                err = std::abs(stokes(StateFamily::jc_minus, th, 0.0, 2 * pi) -
                               berry_phase_closed_form(p, JcLabel{1, -1}).gamma);
                break;
            }
            case 2:
            case 3: {
                const RabiParams p{1.0, 1.0 + delta, 1.0 + delta, g1, g2};
                const auto ef = equal_frequency_k1(p);
                const int l = trial % 6 == 2 ? 2 : 3;
                const auto fam = l == 2 ? StateFamily::two_qubit_2 : StateFamily::two_qubit_3;
                err = std::abs(stokes(fam, ef.theta[1], ef.alpha, l == 2 ? 0.0 : 2 * pi) -
                               berry_phase_closed_form(p, EqualFrequencyLabel{l}).gamma);
                break;
            }
            case 4: {
                const auto p = RabiParams::jc(delta, g1);
                const double th = jc_eigensystem(p, 1).theta;
                err = std::abs(stokes(StateFamily::noneigen_jc, th, 0.0, 0.0) - noneigen_phase_jc_closed(p));
                break;
            }
            default: {
                const RabiParams p{1.0, 1.0 + delta, 1.0 + delta, g1, g2};
                const auto ef = equal_frequency_k1(p);
                err = std::abs(stokes(StateFamily::noneigen_two_qubit, ef.theta[1], ef.alpha, 0.0) -
                               noneigen_phase_two_qubit_closed(p));
                break;
            }
        }
        worst = std::max(worst, err);
    }
    return {worst <= 1e-5, fmt("100 points, max |surface - closed| = %.2e (tol 1e-5)", worst)};
}

// 3. the worked two-qubit case
Outcome worked_case() {
    const auto p = RabiParams::homogeneous(0.01, 0.01);
    const auto r = cyclic_evolution_two_qubit(p);
    const auto ef = equal_frequency_k1(p);
    const double T = 2 * pi / ef.energy[1];
    const double ratio = static_cast<double>(r.p) / static_cast<double>(r.q);
    const bool ok = ratio == -0.5 && std::abs(r.period - T) <= 1e-9 * T && r.fidelity >= 1 - 1e-8;
    return {ok, fmt("p/q = %ld/%ld, T = %.10g (2pi/E = %.10g), fidelity = %.15f", r.p, r.q, r.period, T,
                    r.fidelity)};
}

// 4. time-averaged photon number equals gamma / 2 pi
Outcome photon_relation() {
    double worst = 0.0;
    for (double delta : {0.0, 0.2, -0.2}) {
        const auto p = RabiParams::jc(delta, 0.05);
        const auto r = cyclic_evolution_jc(p);
        const auto avg = average_photon_number(p, CyclicInitial::jc_10, r.period);
        worst = std::max(worst, std::abs(avg.P - noneigen_phase_jc_closed(p) / (2 * pi)));
    }
    // Delta = +-0.05 at g = 0.05 give E^2/E^3 = -1/2 and -2.
    for (double delta : {0.0, 0.05, -0.05}) {
        const auto p = RabiParams::homogeneous(delta, 0.05);
        const auto r = cyclic_evolution_two_qubit(p);
        const auto avg = average_photon_number(p, CyclicInitial::two_qubit_10, r.period);
        worst = std::max(worst, std::abs(avg.P - noneigen_phase_two_qubit_closed(p) / (2 * pi)));
    }
    const auto jc0 = RabiParams::jc(0.0, 0.05);
    const double P_jc = average_photon_number(jc0, CyclicInitial::jc_10, cyclic_evolution_jc(jc0).period).P;
    const auto two0 = RabiParams::homogeneous(0.0, 0.05);
    const double P_two =
        average_photon_number(two0, CyclicInitial::two_qubit_10, cyclic_evolution_two_qubit(two0).period).P;
    const bool ok = worst <= 1e-6 && std::abs(P_jc - 0.5) <= 1e-6 && std::abs(P_two - 0.25) <= 1e-6;
    return {ok, fmt("max |P - gamma/2pi| = %.2e, resonance P = %.9f (JC), %.9f (two qubits)", worst, P_jc, P_two)};
}

// 5. extremum of the noneigenstate curvature
Outcome curvature_extremum() {
    const double delta = 0.05;
    const double h = 1e-4;
    double best_g = 0.0;
    double best = 0.0;
    for (int i = 1; i * h <= 0.1 + 1e-12; ++i) {
        const double g = i * h;
        const double F = noneigen_curvature_two_qubit(RabiParams::homogeneous(delta, g));
        if (std::abs(F) > std::abs(best)) {
            best = F;
            best_g = g;
        }
    }
    const double target = delta / std::sqrt(8.0);
    return {std::abs(best_g - target) <= h,
            fmt("extremum F = %.6f at g = %.4f, Delta/sqrt(8) = %.6f (grid 1e-4)", best, best_g, target)};
}

// Lowest `count` levels of both parity sectors.
std::vector<double> lowest(std::vector<double> e, std::size_t count) {
    std::sort(e.begin(), e.end());
    e.resize(count);
    return e;
}

// 6. adiabatic energies at weak coupling against plain Fock diagonalization
Outcome weak_coupling() {
    double worst = 0.0;
    for (double g : {0.0, 0.005, 0.01, 0.015, 0.02}) {
        const RabiParams p{1.0, 0.5, 0.5, g, g};
        std::vector<double> adiabatic;
        for (int n = 0; n < 6; ++n)
            for (int kappa : {1, -1})
                for (const auto& s : adiabatic_eigensystem(p, n, kappa)) adiabatic.push_back(s.energy);
        const auto full = build_full_rabi(p, 40);
        std::vector<double> exact;
        for (int kappa : {1, -1})
            for (const auto& e : solve_full_rabi_sector(full, kappa).pairs) exact.push_back(e.energy);
        const auto a = lowest(adiabatic, 4);
        const auto b = lowest(exact, 4);
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return {worst <= 1e-3, fmt("g <= 0.02, max |E_adiabatic - E_exact| over 4 levels = %.2e (tol 1e-3)", worst)};
}

// 7. exceptional solutions beyond the RWA
Outcome exceptional() {
    double worst_e = 0.0;
    double worst_gamma = 0.0;
    int found = 0;
    const int N = 60;
    for (double g : {0.05, 0.1, 0.2}) {
        const RabiParams cases[] = {{1.0, 1.5, 0.5, g, g}, {1.0, 1.3, 0.7, g, g}, {1.0, 2.6, 0.6, g, g}};
        for (const auto& p : cases) {
            const auto full = build_full_rabi(p, N);
            std::vector<double> spectrum;
            for (int kappa : {1, -1})
                for (const auto& e : solve_full_rabi_sector(full, kappa).pairs) spectrum.push_back(e.energy);
            for (const auto& s : exceptional_states(p, N)) {
                if (s.kind == ExceptionalKind::singlet) continue;
                ++found;
                if (s.kind == ExceptionalKind::even) worst_e = std::max(worst_e, std::abs(s.energy - p.omega_c));
                double nearest = 1e300;
                for (double e : spectrum) nearest = std::min(nearest, std::abs(e - s.energy));
                worst_e = std::max(worst_e, nearest);
                const double gamma = berry_phase_closed_form(p, ExceptionalLabel{s.kind}).gamma;
                worst_gamma = std::max(worst_gamma, std::abs(gamma - berry_phase_eigenstate(s.state, N).gamma));
            }
        }
    }
    const bool ok = found == 9 && worst_e <= 1e-8 && worst_gamma <= 1e-8;
    return {ok, fmt("%d even/odd states, max energy miss = %.2e, max |gamma - 2pi<N>| = %.2e (tol 1e-8)", found,
                    worst_e, worst_gamma)};
}

// 8. even-sector anti-crossing against the noneigenstate phase jump
Outcome anticrossing() {
    AnticrossingRequest req;
    req.base = RabiParams::homogeneous(0.5, 0.0);
    req.kappa = 1;
    req.g_min = 0.2;
    req.g_max = 0.32;
    req.points = 241;
    req.M = 50;
    const auto [ac, pair] = find_anticrossing(req, 6);

    const auto gs = grid(0.2, 0.32, 241);
    std::vector<double> gamma;
    for (double g : gs) {
        const auto p = RabiParams::homogeneous(0.5, g);
        gamma.push_back(noneigen_phase_beyond_rwa(p, DisplacedBasis::for_params(p, 50)).phase.gamma);
    }
    const double jump = locate_phase_jump(gs, gamma);
    std::size_t at = 0;
    for (std::size_t i = 1; i + 1 < gs.size(); ++i)
        if (std::abs(gamma[i + 1] - gamma[i]) > std::abs(gamma[at + 1] - gamma[at])) at = i;
    const double size = gamma[at + 1] - gamma[at];

    const bool in = [](double g) { return g >= 0.245 && g <= 0.285; }(ac.g_star) && jump >= 0.245 && jump <= 0.285;
    const bool ok = in && std::abs(ac.g_star - jump) <= 0.005;
    return {ok, fmt("levels (%d,%d) gap %.5f at g* = %.5f; phase jump at %.5f (step %.4f); |diff| = %.4f (tol 0.005)",
                    pair.first, pair.second, ac.min_gap, ac.g_star, jump, size, std::abs(ac.g_star - jump))};
}

// 9. truncation convergence of beyond-RWA phases
Outcome convergence() {
    double worst = 0.0;
    std::size_t count = 0;
    for (double delta : {-0.5, 0.0, 0.2, 0.5})
        for (double g : grid(0.0, 0.35, 15)) {
            const auto p = RabiParams::homogeneous(delta, g);
            const auto b50 = DisplacedBasis::for_params(p, 50);
            const auto b60 = DisplacedBasis::for_params(p, 60);
            for (auto frame : {InitialFrame::displaced_frame, InitialFrame::bare}) {
                worst = std::max(worst, std::abs(noneigen_phase_beyond_rwa(p, b50, frame).phase.gamma -
                                                 noneigen_phase_beyond_rwa(p, b60, frame).phase.gamma));
                ++count;
            }
            for (int kappa : {1, -1}) {
                const auto a = truncated_parity_solve(p, b50, kappa);
                const auto b = truncated_parity_solve(p, b60, kappa);
                for (std::size_t i = 0; i < 8; ++i) {
                    worst = std::max(worst, std::abs(berry_phase_eigenstate(a.pairs[i], b50).gamma -
                                                     berry_phase_eigenstate(b.pairs[i], b60).gamma));
                    ++count;
                }
            }
        }
    return {worst < 1e-6, fmt("%zu phases, max change M 50 -> 60 = %.2e (tol 1e-6)", count, worst)};
}

// 10. displaced and plain Fock sector eigenvalues
Outcome dual_basis() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> w(0.5, 1.5);
    std::uniform_real_distribution<double> gd(0.0, 0.3);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const RabiParams p{1.0, w(rng), w(rng), gd(rng), gd(rng)};
        const auto basis = DisplacedBasis::for_params(p, 50);
        const auto full = build_full_rabi(p, 120);
        for (int kappa : {1, -1}) {
            const auto a = truncated_parity_solve(p, basis, kappa);
            const auto b = solve_full_rabi_sector(full, kappa);
            for (std::size_t i = 0; i < 10; ++i) worst = std::max(worst, std::abs(a.pairs[i].energy - b.pairs[i].energy));
        }
    }
    return {worst <= 1e-8, fmt("20 sets x 2 sectors x 10 levels, max |E_displaced - E_fock| = %.2e (tol 1e-8)", worst)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"oracle identity", 10, oracle_identity},
        {"Stokes surface integral", 30, stokes_suite},
        {"worked two-qubit case", 1, worked_case},
        {"photon-number relation", 30, photon_relation},
        {"curvature extremum", 5, curvature_extremum},
        {"weak-coupling adiabatic energies", 60, weak_coupling},
        {"exceptional solutions", 60, exceptional},
        {"anti-crossing and phase jump", 600, anticrossing},
        {"truncation convergence", 600, convergence},
        {"dual-basis equivalence", 300, dual_basis},
    };
    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && dt < c.limit_s;
        if (!pass) ++failures;
        std::printf("%s %2d %s: %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                    dt, c.limit_s);
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", index - failures, index);
    return failures;
}
