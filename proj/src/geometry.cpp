#include "rabigeom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rabigeom/errors.hpp"

namespace rabigeom {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool same(double a, double b) { return std::abs(a - b) <= 1e-12; }

void require_normalized(double norm2, const char* what) {
    if (std::abs(norm2 - 1.0) > 1e-10) {
        throw NotNormalized(std::string(what) + " has squared norm " + std::to_string(norm2));
    }
}

}  // namespace

std::string_view to_string(PhaseMethod m) noexcept {
    switch (m) {
        case PhaseMethod::closed_form: return "closed_form";
        case PhaseMethod::photon_expectation: return "photon_expectation";
        case PhaseMethod::curvature_integral: return "curvature_integral";
        case PhaseMethod::weighted_sum: return "weighted_sum";
        case PhaseMethod::loop_integral: return "loop_integral";
    }
    return "unknown";
}

double reduce_mod_2pi(double x) noexcept {
    double r = std::fmod(x, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

// ---------------------------------------------------------------------------

PhaseResult berry_phase_eigenstate(std::span<const double> amplitudes,
                                   std::span<const double> photon_numbers) {
    if (amplitudes.size() != photon_numbers.size()) {
        throw DimensionError("amplitudes and photon numbers differ in length");
    }
    double norm2 = 0.0;
    double n = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double w = amplitudes[i] * amplitudes[i];
        norm2 += w;
        n += photon_numbers[i] * w;
    }
    require_normalized(norm2, "state");
    return {two_pi * n, PhaseMethod::photon_expectation};
}

PhaseResult berry_phase_eigenstate(std::span<const double> fock_state, int n_photons) {
    const std::size_t L = static_cast<std::size_t>(n_photons + 1);
    if (fock_state.size() != 4 * L) {
        throw DimensionError("expected " + std::to_string(4 * L) + " amplitudes");
    }
    std::vector<double> photons(fock_state.size());
    for (std::size_t i = 0; i < photons.size(); ++i) photons[i] = static_cast<double>(i % L);
    return berry_phase_eigenstate(fock_state, photons);
}

PhaseResult berry_phase_eigenstate(const BlockEigenpair& pair) {
    const auto v = pair.block_vector();
    const auto n = block_photon_numbers(pair.k);
    return berry_phase_eigenstate(v, n);
}

PhaseResult berry_phase_eigenstate(const TruncatedEigenpair& pair, const DisplacedBasis& basis) {
    double norm2 = 0.0;
    for (std::size_t n = 0; n < pair.d1.size(); ++n) {
        norm2 += 2.0 * (pair.d1[n] * pair.d1[n] + pair.d2[n] * pair.d2[n]);
    }
    require_normalized(norm2, "displaced expansion");
    return {two_pi * photon_matrix_element(pair, pair, basis), PhaseMethod::photon_expectation};
}

PhaseResult berry_phase_loop(std::span<const cplx> amplitudes,
                             std::span<const double> photon_numbers, const LoopSpec& loop) {
    if (loop.n_steps < 64) throw InvalidGrid("loop needs at least 64 steps");
    if (amplitudes.size() != photon_numbers.size()) {
        throw DimensionError("amplitudes and photon numbers differ in length");
    }
    require_normalized(std::pow(norm(amplitudes), 2), "state");
    for (double n : photon_numbers) {
        if (n != std::round(n)) throw InvalidGrid("R(2 pi) closes only on integer photon numbers");
    }

    const auto phis = linspace(0.0, two_pi, static_cast<std::size_t>(loop.n_steps) + 1);
    std::vector<double> integrand(phis.size());
    CVector rotated(amplitudes.size());
    CVector derivative(amplitudes.size());
    for (std::size_t s = 0; s < phis.size(); ++s) {
        for (std::size_t i = 0; i < amplitudes.size(); ++i) {
            rotated[i] = std::polar(1.0, -phis[s] * photon_numbers[i]) * amplitudes[i];
            derivative[i] = cplx{0.0, -photon_numbers[i]} * rotated[i];   // dR/dphi = -i N R
        }
        cplx overlap{0.0, 0.0};
        for (std::size_t i = 0; i < rotated.size(); ++i) overlap += std::conj(rotated[i]) * derivative[i];
        integrand[s] = (cplx{0.0, 1.0} * overlap).real();
    }
    return {trapezoid_integral(phis, integrand), PhaseMethod::loop_integral};
}

// ---------------------------------------------------------------------------

namespace {

PhaseResult closed(double g) { return {g, PhaseMethod::closed_form}; }

PhaseResult closed_jc(const RabiParams& p, const JcLabel& label) {
    if (label.k < 0 || (label.branch != 1 && label.branch != -1)) {
        throw LabelError("JC label needs k >= 0 and branch +-1");
    }
    JcEigensystem es;
    try {
        es = jc_eigensystem(p, label.k);
    } catch (const NotJCReduction& e) {
        throw LabelError(e.what());
    }
    if (label.k == 0) return closed(0.0);
    const double c = std::cos(es.theta);
    if (label.branch > 0) return closed(std::numbers::pi * (1.0 - c) + two_pi * (label.k - 1));
    return closed(-std::numbers::pi * (1.0 - c) + two_pi * label.k);
}

PhaseResult closed_two_qubit(const RabiParams& p, const TwoQubitLabel& label) {
    if (label.k < 0) throw LabelError("excitation number must be non-negative");
    const int size = label.k == 0 ? 1 : (label.k == 1 ? 3 : 4);
    if (label.l < 1 || label.l > size) {
        throw LabelError("block k=" + std::to_string(label.k) + " has no state l=" +
                         std::to_string(label.l));
    }
    if (label.k == 0) return closed(0.0);
    const auto pair = solve_block(p, label.k)[label.l - 1];
    if (label.k == 1) {
        const double d = pair.coeffs[3];
        const double cos_theta = 1.0 - 2.0 * d * d;
        return closed(std::numbers::pi * (1.0 - cos_theta));
    }
    const double s = pair.s_k();
    const double cos_theta = 1.0 - 2.0 * std::abs(s);
    const double sgn = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
    return closed(sgn * std::numbers::pi * (1.0 - cos_theta) + two_pi * (label.k - 1));
}

PhaseResult closed_equal_frequency(const RabiParams& p, const EqualFrequencyLabel& label) {
    if (label.l < 1 || label.l > 3) throw LabelError("equal-frequency label needs l in 1..3");
    EqualFrequencyK1 ef;
    try {
        ef = equal_frequency_k1(p);
    } catch (const NotEqualFrequency& e) {
        throw LabelError(e.what());
    }
    const double c = std::cos(ef.theta[1]);
    switch (label.l) {
        case 1: return closed(0.0);
        case 2: return closed(std::numbers::pi * (1.0 - c));
        default: return closed(std::numbers::pi * (1.0 + c));
    }
}

PhaseResult closed_adiabatic(const RabiParams& p, const AdiabaticLabel& label) {
    if (label.n < 0 || (label.kappa != 1 && label.kappa != -1) ||
        (label.branch != 1 && label.branch != -1)) {
        throw LabelError("adiabatic label needs n >= 0, kappa +-1, branch +-1");
    }
    const auto sol = adiabatic_eigensystem(p, label.n, label.kappa)[label.branch > 0 ? 0 : 1];
    const auto basis = DisplacedBasis::for_params(p, label.n);
    const double b1 = basis.betas[0];
    const double b2 = basis.betas[1];
    const double s2 = b1 * b1 * sol.d1 * sol.d1 + b2 * b2 * sol.d2 * sol.d2;
    // theta = 2 arcsin(sqrt(s2)), so 1 - cos(theta) = 2 s2; the identity also
    // covers s2 > 1 where the arcsin leaves its domain.
    const double one_minus_cos =
        s2 <= 1.0 ? 1.0 - std::cos(2.0 * std::asin(std::sqrt(s2))) : 2.0 * s2;
    return closed(std::numbers::pi * one_minus_cos + two_pi * label.n);
}

PhaseResult closed_exceptional(const RabiParams& p, const ExceptionalLabel& label) {
    const auto states = exceptional_states(p, std::max(label.n, 1));
    for (const auto& s : states) {
        if (s.kind != label.kind) continue;
        if (s.kind == ExceptionalKind::singlet) {
            if (s.n != label.n) continue;
            return closed(two_pi * label.n);
        }
        const double q2 = s.q * s.q;
        const double cos_theta = (1.0 - 2.0 * q2) / (1.0 + 2.0 * q2);
        return closed(std::numbers::pi * (1.0 - cos_theta));
    }
    throw LabelError("exceptional state does not exist for these parameters");
}

}  // namespace

PhaseResult berry_phase_closed_form(const RabiParams& p, const StateLabel& label) {
    p.validate();
    return std::visit(
        [&](const auto& l) -> PhaseResult {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, JcLabel>) return closed_jc(p, l);
            else if constexpr (std::is_same_v<T, TwoQubitLabel>) return closed_two_qubit(p, l);
            else if constexpr (std::is_same_v<T, EqualFrequencyLabel>) return closed_equal_frequency(p, l);
            else if constexpr (std::is_same_v<T, AdiabaticLabel>) return closed_adiabatic(p, l);
            else return closed_exceptional(p, l);
        },
        label);
}

// ---------------------------------------------------------------------------

namespace {

double analytic_connection(StateFamily family, double theta, double alpha) {
    const double s2 = std::pow(std::sin(theta / 2.0), 2);
    const double c2 = std::pow(std::cos(theta / 2.0), 2);
    switch (family) {
        case StateFamily::jc_plus: return s2;
        case StateFamily::jc_minus: return c2;
        case StateFamily::two_qubit_1: return 0.0;
        case StateFamily::two_qubit_2: return s2;
        case StateFamily::two_qubit_3: return c2;
        case StateFamily::noneigen_jc: return 0.5 * std::pow(std::sin(theta), 2);
        case StateFamily::noneigen_two_qubit:
            return 0.5 * std::pow(std::sin(theta), 2) * std::pow(std::cos(alpha), 2);
    }
    return 0.0;
}

struct FamilyState {
    std::vector<double> amplitudes;
    std::vector<double> photons;
};

// Eigenstates as printed, on {|1,0>, |0,1>} or {|10,0>, |01,0>, |00,1>}.
FamilyState eigen_state(StateFamily family, double theta, double alpha) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    switch (family) {
        case StateFamily::jc_plus: return {{c, s}, {0.0, 1.0}};
        case StateFamily::jc_minus: return {{s, -c}, {0.0, 1.0}};
        case StateFamily::two_qubit_1: return {{sa, -ca, 0.0}, {0.0, 0.0, 1.0}};
        case StateFamily::two_qubit_2: return {{c * ca, c * sa, s}, {0.0, 0.0, 1.0}};
        case StateFamily::two_qubit_3: return {{s * ca, s * sa, -c}, {0.0, 0.0, 1.0}};
        default: break;
    }
    throw LabelError("not an eigenstate family");
}

double point_connection(const FamilyState& st, double phi, double shift) {
    cplx a{0.0, 0.0};
    for (std::size_t i = 0; i < st.amplitudes.size(); ++i) {
        // Psi(phi) = exp(i shift phi) R(phi) Psi, dPsi/dphi = -i (N - shift) Psi(phi)
        const cplx v = std::polar(1.0, phi * (shift - st.photons[i])) * st.amplitudes[i];
        const cplx dv = cplx{0.0, -(st.photons[i] - shift)} * v;
        a += std::conj(v) * dv;
    }
    return (cplx{0.0, 1.0} * a).real();
}

}  // namespace

std::vector<ConnectionSample> connection_field(StateFamily family, std::span<const double> thetas,
                                               std::span<const double> phis, double alpha,
                                               Gauge gauge) {
    const double shift = gauge == Gauge::shifted ? 1.0 : 0.0;
    std::vector<ConnectionSample> out;
    out.reserve(thetas.size() * phis.size());
    for (double phi : phis) {
        for (double theta : thetas) {
            out.push_back({theta, phi, 0.0, analytic_connection(family, theta, alpha) - shift, gauge});
        }
    }
    return out;
}

double connection_numeric(StateFamily family, double theta, double phi, double alpha, Gauge gauge) {
    const double shift = gauge == Gauge::shifted ? 1.0 : 0.0;
    const double c2 = std::pow(std::cos(theta / 2.0), 2);
    const double s2 = std::pow(std::sin(theta / 2.0), 2);
    if (family == StateFamily::noneigen_jc) {
        return c2 * point_connection(eigen_state(StateFamily::jc_plus, theta, alpha), phi, shift) +
               s2 * point_connection(eigen_state(StateFamily::jc_minus, theta, alpha), phi, shift);
    }
    if (family == StateFamily::noneigen_two_qubit) {
        const double ca2 = std::pow(std::cos(alpha), 2);
        const double sa2 = 1.0 - ca2;
        return sa2 * point_connection(eigen_state(StateFamily::two_qubit_1, theta, alpha), phi, shift) +
               ca2 * c2 * point_connection(eigen_state(StateFamily::two_qubit_2, theta, alpha), phi, shift) +
               ca2 * s2 * point_connection(eigen_state(StateFamily::two_qubit_3, theta, alpha), phi, shift);
    }
    return point_connection(eigen_state(family, theta, alpha), phi, shift);
}

CurvatureField curvature_from_connection(std::span<const ConnectionSample> samples) {
    const std::size_t n = samples.size();
    if (n < 3) throw InvalidGrid("curvature needs at least three theta samples");
    const double h = samples[1].theta - samples[0].theta;
    if (!(h > 0.0)) throw InvalidGrid("theta must increase");
    for (std::size_t i = 1; i < n; ++i) {
        const double hi = samples[i].theta - samples[i - 1].theta;
        if (std::abs(hi - h) > 1e-9 * std::max(1.0, std::abs(h)) + 1e-12) {
            throw InvalidGrid("theta grid must be uniform");
        }
        if (samples[i].phi != samples[0].phi) throw InvalidGrid("samples must share one phi");
    }

    CurvatureField out;
    out.accuracy_warning = h > 1e-2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d;
        if (i == 0) {
            d = (-3.0 * samples[0].A_phi + 4.0 * samples[1].A_phi - samples[2].A_phi) / (2.0 * h);
        } else if (i == n - 1) {
            d = (3.0 * samples[n - 1].A_phi - 4.0 * samples[n - 2].A_phi + samples[n - 3].A_phi) / (2.0 * h);
        } else {
            d = (samples[i + 1].A_phi - samples[i - 1].A_phi) / (2.0 * h);
        }
        // A_theta is phi-independent, so d_phi A_theta drops out.
        out.samples[i] = {samples[i].theta, samples[i].phi, d, 0.0};
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = out.samples[i];
        const double st = std::sin(s.theta);
        if (std::abs(st) > 1e-8) {
            s.F_radial = s.F_theta_phi / st;
        } else {
            // F / sin(theta) -> F'(theta) / cos(theta) at a pole.
            const std::size_t j = i == 0 ? 1 : i - 1;
            const double dF = (out.samples[j].F_theta_phi - s.F_theta_phi) /
                              (out.samples[j].theta - s.theta);
            s.F_radial = dF / std::cos(s.theta);
        }
    }
    return out;
}

PhaseResult phase_by_surface_integral(std::span<const CurvatureSample> samples, double pole_offset) {
    std::vector<double> x(samples.size());
    std::vector<double> f(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        x[i] = samples[i].theta;
        f[i] = samples[i].F_theta_phi;
    }
    return {two_pi * trapezoid_integral(x, f) + pole_offset, PhaseMethod::curvature_integral};
}

std::vector<CurvatureSample> radial_field(FieldLabel label, std::span<const double> thetas,
                                          std::span<const double> phis, double alpha) {
    std::vector<CurvatureSample> out;
    out.reserve(thetas.size() * phis.size());
    const double ca2 = std::pow(std::cos(alpha), 2);
    double peak = 0.0;
    for (double phi : phis) {
        for (double theta : thetas) {
            double F = 0.0;
            double radial = 0.0;
            switch (label) {
                case FieldLabel::eigen_jc:
                case FieldLabel::eigen_two_qubit:
                    F = 0.5 * std::sin(theta);
                    radial = 0.5;
                    break;
                case FieldLabel::noneigen_jc:
                    F = 0.5 * std::sin(2.0 * theta);
                    radial = std::cos(theta);
                    break;
                case FieldLabel::noneigen_two_qubit:
                    F = 0.5 * std::sin(2.0 * theta) * ca2;
                    radial = ca2 * std::cos(theta);
                    break;
            }
            peak = std::max(peak, std::abs(radial));
            out.push_back({theta, phi, F, radial});
        }
    }
    if (peak > 0.0) {
        for (auto& s : out) s.F_radial /= peak;
    }
    return out;
}

// ---------------------------------------------------------------------------

PhaseResult noneigen_geometric_phase(std::span<const double> weights,
                                     std::span<const double> gammas) {
    if (weights.size() != gammas.size()) throw WeightError("weights and phases differ in length");
    double total = 0.0;
    double gamma = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw WeightError("negative weight");
        total += weights[i];
        gamma += weights[i] * gammas[i];
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw WeightError("weights sum to " + std::to_string(total));
    }
    return {gamma, PhaseMethod::weighted_sum};
}

Decomposition noneigen_decomposition_jc(const RabiParams& p) {
    const auto es = jc_eigensystem(p, 1);
    Decomposition d;
    d.weights = {es.plus[0] * es.plus[0], es.minus[0] * es.minus[0]};
    d.gammas = {berry_phase_closed_form(p, JcLabel{1, +1}).gamma,
                berry_phase_closed_form(p, JcLabel{1, -1}).gamma};
    d.energies = {es.energy_plus, es.energy_minus};
    return d;
}

Decomposition noneigen_decomposition_two_qubit(const RabiParams& p) {
    Decomposition d;
    for (const auto& pair : solve_block(p, 1)) {
        d.weights.push_back(pair.coeffs[1] * pair.coeffs[1]);
        d.gammas.push_back(berry_phase_closed_form(p, TwoQubitLabel{1, pair.l}).gamma);
        d.energies.push_back(pair.energy);
    }
    return d;
}

double noneigen_phase_jc_closed(const RabiParams& p) {
    const auto s = spectral_angles(p, 1);
    return 0.5 * std::numbers::pi * (1.0 - std::cos(2.0 * s.theta_k));
}

double noneigen_phase_two_qubit_closed(const RabiParams& p) {
    const auto ef = equal_frequency_k1(p);
    return 0.5 * std::numbers::pi * std::pow(std::cos(ef.alpha), 2) * (1.0 - std::cos(2.0 * ef.theta[1]));
}

double noneigen_curvature_jc(const RabiParams& p) {
    jc_eigensystem(p, 1);
    return 0.5 * std::sin(2.0 * spectral_angles(p, 1).theta_k);
}

double noneigen_curvature_two_qubit(const RabiParams& p) {
    const auto ef = equal_frequency_k1(p);
    return 0.5 * std::sin(2.0 * ef.theta[1]) * std::pow(std::cos(ef.alpha), 2);
}

BeyondRwaPhase noneigen_phase_beyond_rwa(const RabiParams& p, const DisplacedBasis& basis,
                                         InitialFrame frame) {
    BeyondRwaPhase out;
    std::vector<double> weights;
    std::vector<double> gammas;
    for (int kappa : {1, -1}) {
        const auto sol = truncated_parity_solve(p, basis, kappa);
        out.truncation_warning = out.truncation_warning || sol.truncation_warning;
        for (const auto& pair : sol.pairs) {
            const double amp = vacuum_amplitudes(pair, basis, frame)[static_cast<int>(Qubits::q10)];
            const double w = amp * amp;
            out.weight_sum += w;
            if (w < 1e-12) continue;
            weights.push_back(w);
            gammas.push_back(berry_phase_eigenstate(pair, basis).gamma);
        }
    }
    if (std::abs(out.weight_sum - 1.0) > 1e-8) {
        throw WeightError("truncated basis captures weight " + std::to_string(out.weight_sum));
    }
    double gamma = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) gamma += weights[i] * gammas[i];
    out.components = weights.size();
    out.phase = {gamma, PhaseMethod::weighted_sum};
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Level {
    double energy;
    int k;   // excitation block in RWA mode, -1 otherwise
};

bool homogeneous(const RabiParams& p) { return same(p.omega1, p.omega2) && same(p.g1, p.g2); }

std::vector<Level> levels_at(const AnticrossingRequest& req, double g) {
    RabiParams p = req.base;
    p.g1 = p.g2 = g;
    const bool drop = req.drop_singlets && homogeneous(p);
    std::vector<Level> out;
    if (req.mode == SpectrumMode::rwa) {
        // Block k carries parity (-1)^k.
        for (int k = 0; k <= req.k_max; ++k) {
            if (((k % 2 == 0) ? 1 : -1) != req.kappa) continue;
            const auto pairs = solve_block(p, k);
            const auto singlet = drop ? block_singlet(p, pairs) : std::nullopt;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (singlet && *singlet == i) continue;
                out.push_back({pairs[i].energy, k});
            }
        }
        std::stable_sort(out.begin(), out.end(),
                         [](const Level& a, const Level& b) { return a.energy < b.energy; });
    } else {
        const auto sol = truncated_parity_solve(p, DisplacedBasis::for_params(p, req.M), req.kappa);
        for (const auto& e : sol.pairs) {
            if (drop && e.is_singlet()) continue;
            out.push_back({e.energy, -1});
        }
    }
    return out;
}

double gap_at(const AnticrossingRequest& req, double g) {
    const auto lv = levels_at(req, g);
    const auto [i, j] = req.levels;
    if (static_cast<std::size_t>(std::max(i, j)) >= lv.size()) {
        throw LabelError("requested level beyond the sector spectrum");
    }
    return std::abs(lv[j].energy - lv[i].energy);
}

double adiabaticity_at(const AnticrossingRequest& req, double g) {
    RabiParams p = req.base;
    p.g1 = p.g2 = g;
    const auto basis = DisplacedBasis::for_params(p, req.M);
    const auto sol = truncated_parity_solve(p, basis, req.kappa);
    const bool drop = req.drop_singlets && homogeneous(p);
    std::vector<const TruncatedEigenpair*> kept;
    for (const auto& e : sol.pairs) {
        if (!(drop && e.is_singlet())) kept.push_back(&e);
    }
    const auto& a = *kept[req.levels.first];
    const auto& b = *kept[req.levels.second];
    return std::abs(photon_matrix_element(a, b, basis)) / std::abs(a.energy - b.energy);
}

}  // namespace

std::vector<double> sector_levels(const AnticrossingRequest& req, double g) {
    std::vector<double> e;
    for (const auto& l : levels_at(req, g)) e.push_back(l.energy);
    return e;
}

namespace {

void check_request(const AnticrossingRequest& req) {
    req.base.validate();
    if (req.points < 200) throw InvalidGrid("anti-crossing scan needs at least 200 points");
    if (!(req.g_min < req.g_max) || req.g_min < 0.0) throw InvalidGrid("bad coupling range");
}

// Golden-section refinement around the grid minimum, then the block and
// adiabaticity checks. `out.g` and `out.gap` are already filled.
Anticrossing refine(const AnticrossingRequest& req, Anticrossing out) {
    const auto it = std::min_element(out.gap.begin(), out.gap.end());
    const auto imin = static_cast<std::size_t>(it - out.gap.begin());
    if (imin == 0 || imin + 1 == out.gap.size()) {
        throw NoAnticrossing("gap is monotone over [" + std::to_string(req.g_min) + ", " +
                             std::to_string(req.g_max) + "]");
    }

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = out.g[imin - 1];
    double b = out.g[imin + 1];
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = gap_at(req, c);
    double fd = gap_at(req, d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = gap_at(req, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = gap_at(req, d);
        }
    }
    out.g_star = 0.5 * (a + b);
    out.min_gap = gap_at(req, out.g_star);

    if (req.mode == SpectrumMode::rwa) {
        const auto lv = levels_at(req, out.g_star);
        const int ki = lv[req.levels.first].k;
        const int kj = lv[req.levels.second].k;
        if (ki != kj) {
            throw NoAnticrossing("levels from blocks k=" + std::to_string(ki) + " and k=" +
                                 std::to_string(kj) + " cross exactly near g=" +
                                 std::to_string(out.g_star));
        }
        return out;
    }

    out.adiabaticity.resize(out.g.size());
    for (std::size_t i = 0; i < out.g.size(); ++i) {
        out.adiabaticity[i] = adiabaticity_at(req, out.g[i]);
        out.max_adiabaticity = std::max(out.max_adiabaticity, out.adiabaticity[i]);
    }
    out.adiabaticity_violated = out.max_adiabaticity > 1.0;
    return out;
}

}  // namespace

Anticrossing detect_anticrossing(const AnticrossingRequest& req) {
    check_request(req);
    if (req.levels.first == req.levels.second) throw LabelError("level pair must be distinct");
    Anticrossing out;
    out.g = linspace(req.g_min, req.g_max, static_cast<std::size_t>(req.points));
    out.gap.resize(out.g.size());
    for (std::size_t i = 0; i < out.g.size(); ++i) out.gap[i] = gap_at(req, out.g[i]);
    return refine(req, std::move(out));
}

std::pair<Anticrossing, std::pair<int, int>> find_anticrossing(AnticrossingRequest req,
                                                               int max_level) {
    check_request(req);
    const auto g = linspace(req.g_min, req.g_max, static_cast<std::size_t>(req.points));
    std::vector<std::vector<double>> gaps(static_cast<std::size_t>(std::max(max_level, 0)));
    for (double x : g) {
        const auto lv = levels_at(req, x);
        for (int i = 0; i < max_level; ++i) {
            const auto j = static_cast<std::size_t>(i);
            gaps[j].push_back(j + 1 < lv.size() ? lv[j + 1].energy - lv[j].energy
                                                : std::numeric_limits<double>::infinity());
        }
    }
    // Candidates ordered by their grid minimum; the first that survives refinement wins.
    std::vector<std::pair<double, int>> order;
    for (int i = 0; i < max_level; ++i) {
        const auto& row = gaps[static_cast<std::size_t>(i)];
        const auto it = std::min_element(row.begin(), row.end());
        const auto k = static_cast<std::size_t>(it - row.begin());
        if (std::isfinite(*it) && k != 0 && k + 1 != row.size()) order.emplace_back(*it, i);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [gap, i] : order) {
        req.levels = {i, i + 1};
        Anticrossing out;
        out.g = g;
        out.gap = gaps[static_cast<std::size_t>(i)];
        try {
            return {refine(req, std::move(out)), req.levels};
        } catch (const NoAnticrossing&) {
        }
    }
    throw NoAnticrossing("no adjacent level pair has an interior gap minimum");
}

double locate_phase_jump(std::span<const double> g, std::span<const double> gamma) {
    if (g.size() != gamma.size() || g.size() < 2) throw InvalidGrid("need matching samples, at least two");
    std::size_t best = 0;
    double step = -1.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double s = std::abs(gamma[i + 1] - gamma[i]);
        if (s > step) {
            step = s;
            best = i;
        }
    }
    return 0.5 * (g[best] + g[best + 1]);
}

}  // namespace rabigeom
