#include "rabigeom/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>

#include "rabigeom/errors.hpp"
#include "rabigeom/geometry.hpp"

namespace rabigeom {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Wraps into (-pi, pi].
double wrap(double x) {
    double r = std::remainder(x, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

struct Setup {
    EigenDecomposition decomp;
    std::vector<double> photons;
    std::vector<double> initial;
    std::vector<double> excitations;
};

Setup setup(const RabiParams& p, CyclicInitial initial) {
    Setup s;
    if (initial == CyclicInitial::jc_10) {
        if (p.omega2 != 0.0 || p.g2 != 0.0) throw NotJCReduction("omega2 and g2 must vanish");
        s.decomp = eigh(jc_block(p, 1));
        s.photons = {0.0, 1.0};
        s.initial = {1.0, 0.0};
        s.excitations = {1.0, 1.0};
    } else {
        s.decomp = eigh(build_block(p, 1));
        s.photons = block_photon_numbers(1);
        s.initial = {1.0, 0.0, 0.0};
        s.excitations = {1.0, 1.0, 1.0};
    }
    return s;
}

double expectation(std::span<const cplx> psi, std::span<const double> diag) {
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += diag[i] * std::norm(psi[i]);
    return s;
}

// Fills the numerical fields of `r` from exact propagation over r.period, and
// Gamma on the branch of the reference energy.
void finish(CyclicResult& r, const Setup& s, double reference_energy, const Decomposition& dec) {
    const auto psi = propagate(s.decomp, std::span<const double>(s.initial), r.period);
    cplx overlap{0.0, 0.0};
    for (std::size_t i = 0; i < psi.size(); ++i) overlap += s.initial[i] * psi[i];
    r.fidelity = std::abs(overlap);

    const double branch = -reference_energy * r.period;
    const double offset = wrap(std::arg(overlap) - branch);
    r.total_phase = branch + offset;
    r.branch_mismatch = std::abs(offset);

    double energy_term = 0.0;
    double berry_term = 0.0;
    for (std::size_t j = 0; j < dec.weights.size(); ++j) {
        energy_term += dec.weights[j] * dec.energies[j] * r.period;
        berry_term += dec.weights[j] * dec.gammas[j];
    }
    r.geometric_phase = berry_term;
    r.dynamical_phase = -energy_term - berry_term;
    r.aa_phase = r.total_phase - r.dynamical_phase;
    r.aa_phase_reduced = reduce_mod_2pi(r.aa_phase);
}

long gcd_abs(long a, long b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

}  // namespace

CyclicResult cyclic_evolution_jc(const RabiParams& p, int cycles) {
    p.validate();
    if (cycles < 1) throw InvalidParams("need at least one cycle");
    const auto es = jc_eigensystem(p, 1);
    const auto dec = noneigen_decomposition_jc(p);

    CyclicResult r;
    r.q = cycles;
    r.p = cycles;
    r.period = cycles * two_pi / es.Omega;
    finish(r, setup(p, CyclicInitial::jc_10), es.energy_minus, dec);
    const double c2 = std::pow(std::cos(es.theta / 2.0), 2);
    const double s2 = std::pow(std::sin(es.theta / 2.0), 2);
    r.aa_phase_formula = c2 * (dec.gammas[0] + two_pi * cycles) + s2 * dec.gammas[1];
    return r;
}

Rational rationalize(double ratio, double tolerance, long max_denominator) {
    if (!std::isfinite(ratio)) throw NoRational("ratio is not finite");
    if (max_denominator < 1) throw InvalidParams("max_denominator must be positive");

    // Convergents h_n / k_n of the continued fraction of ratio.
    long h_prev = 1, h = static_cast<long>(std::floor(ratio));
    long k_prev = 0, k = 1;
    double x = ratio - std::floor(ratio);
    for (int iter = 0; iter < 64; ++iter) {
        if (std::abs(ratio - static_cast<double>(h) / static_cast<double>(k)) <= tolerance) {
            const long g = gcd_abs(h, k);
            return {h / g, k / g};
        }
        if (x == 0.0) break;
        const double inv = 1.0 / x;
        const double a_real = std::floor(inv);
        if (a_real > 1e12) break;
        const long a = static_cast<long>(a_real);
        x = inv - a_real;
        const long h_next = a * h + h_prev;
        const long k_next = a * k + k_prev;
        if (k_next > max_denominator) break;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "no p/q with q <= %ld within %.3g of %.17g", max_denominator, tolerance, ratio);
    throw NoRational(buf);
}

CyclicResult cyclic_evolution_two_qubit(const RabiParams& p, double tolerance, long max_denominator) {
    const auto ef = equal_frequency_k1(p);
    const double e2 = ef.energy[1];
    const double e3 = ef.energy[2];
    if (e2 == 0.0 || e3 == 0.0) throw NoRational("a k = 1 level sits at zero energy");
    auto rq = rationalize(e2 / e3, tolerance, max_denominator);
    if (rq.p == 0) throw NoRational("E_1^2 / E_1^3 rounds to zero");
    if (e2 / rq.p < 0.0) {
        rq.p = -rq.p;
        rq.q = -rq.q;
    }

    const auto dec = noneigen_decomposition_two_qubit(p);

    CyclicResult r;
    r.p = rq.p;
    r.q = rq.q;
    r.period = two_pi * static_cast<double>(rq.p) / e2;
    finish(r, setup(p, CyclicInitial::two_qubit_10), 0.0, dec);

    const double ca2 = std::pow(std::cos(ef.alpha), 2);
    const double c2 = std::pow(std::cos(ef.theta[1] / 2.0), 2);
    const double s2 = std::pow(std::sin(ef.theta[1] / 2.0), 2);
    const double g2 = berry_phase_closed_form(p, EqualFrequencyLabel{2}).gamma;
    const double g3 = berry_phase_closed_form(p, EqualFrequencyLabel{3}).gamma;
    r.aa_phase_formula = ca2 * c2 * (g2 + two_pi * static_cast<double>(rq.p)) +
                         ca2 * s2 * (g3 + two_pi * static_cast<double>(rq.q));
    return r;
}

double average_photon_number(const EigenDecomposition& decomp, std::span<const double> photons,
                             std::span<const double> initial, double T, int n_time_steps) {
    if (n_time_steps < 1000) throw InvalidGrid("time average needs at least 1000 steps");
    if (!(T > 0.0)) throw InvalidGrid("period must be positive");
    const auto t = linspace(0.0, T, static_cast<std::size_t>(n_time_steps) + 1);
    std::vector<double> n(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) n[i] = expectation(propagate(decomp, initial, t[i]), photons);
    return trapezoid_integral(t, n) / T;
}

PhotonAverage average_photon_number(const RabiParams& p, CyclicInitial initial, double T,
                                    int n_time_steps) {
    p.validate();
    const auto s = setup(p, initial);
    PhotonAverage out;
    out.P = average_photon_number(s.decomp, s.photons, s.initial, T, n_time_steps);
    const auto dec = initial == CyclicInitial::jc_10 ? noneigen_decomposition_jc(p)
                                                    : noneigen_decomposition_two_qubit(p);
    out.gamma_over_2pi = noneigen_geometric_phase(dec.weights, dec.gammas).gamma / two_pi;
    return out;
}

std::vector<TrajectorySample> evolve_trajectory(const RabiParams& p, CyclicInitial initial,
                                                double T, int n_time_steps) {
    p.validate();
    if (n_time_steps < 1) throw InvalidGrid("need at least one time step");
    const auto s = setup(p, initial);
    const auto t = linspace(0.0, T, static_cast<std::size_t>(n_time_steps) + 1);
    std::vector<TrajectorySample> out;
    out.reserve(t.size());
    for (double ti : t) {
        const auto psi = propagate(s.decomp, std::span<const double>(s.initial), ti);
        cplx overlap{0.0, 0.0};
        for (std::size_t i = 0; i < psi.size(); ++i) overlap += s.initial[i] * psi[i];
        out.push_back({ti, expectation(psi, s.photons), std::abs(overlap), norm(psi),
                       expectation(psi, s.excitations)});
    }
    return out;
}

double loop_term(const std::function<double(double)>& phi, double T, double photon_number,
                 int n_time_steps) {
    if (n_time_steps < 2) throw InvalidGrid("need at least two time steps");
    const auto t = linspace(0.0, T, static_cast<std::size_t>(n_time_steps) + 1);
    const double h = 1e-6 * T;
    std::vector<double> rate(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double lo = std::max(0.0, t[i] - h);
        const double hi = std::min(T, t[i] + h);
        rate[i] = (phi(hi) - phi(lo)) / (hi - lo) * photon_number;
    }
    return trapezoid_integral(t, rate);
}

}  // namespace rabigeom
