#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rabigeom/errors.hpp"
#include "rabigeom/model.hpp"

namespace rabigeom {

void RabiParams::validate() const {
    const bool finite = std::isfinite(omega_c) && std::isfinite(omega1) && std::isfinite(omega2) &&
                        std::isfinite(g1) && std::isfinite(g2);
    if (!finite) throw InvalidParams("parameters must be finite");
    if (!(omega_c > 0.0)) throw InvalidParams("omega_c must be positive");
    if (g1 < 0.0 || g2 < 0.0) throw InvalidParams("coupling strengths must be non-negative");
}

RabiParams RabiParams::jc(double detuning, double g1, double omega_c) {
    return RabiParams{omega_c, omega_c + detuning, 0.0, g1, 0.0};
}

RabiParams RabiParams::homogeneous(double detuning, double g, double omega_c) {
    return RabiParams{omega_c, omega_c + detuning, omega_c + detuning, g, g};
}

double mixing_angle(double detuning, double rabi) noexcept {
    if (rabi == 0.0) return detuning >= 0.0 ? 0.0 : std::numbers::pi;
    return std::acos(std::clamp(detuning / rabi, -1.0, 1.0));
}

SpectralAngles spectral_angles(const RabiParams& p, int k) {
    p.validate();
    const double delta = p.detuning();
    SpectralAngles s;
    s.k = k;
    s.Omega_k = std::sqrt(delta * delta + 4.0 * p.g1 * p.g1 * k);
    s.theta_k = mixing_angle(delta, s.Omega_k);
    s.Theta_1 = std::sqrt(delta * delta + 4.0 * (p.g1 * p.g1 + p.g2 * p.g2));
    const double g = std::hypot(p.g1, p.g2);
    s.alpha = g == 0.0 ? 0.0 : std::acos(std::clamp(p.g1 / g, 0.0, 1.0));
    return s;
}

JcEigensystem jc_eigensystem(const RabiParams& p, int k) {
    p.validate();
    if (p.omega2 != 0.0 || p.g2 != 0.0) {
        throw NotJCReduction("omega2 and g2 must vanish for the single-qubit model");
    }
    if (k < 0) throw InvalidParams("excitation number must be non-negative");

    JcEigensystem out;
    out.k = k;
    if (k == 0) {
        out.energy_plus = out.energy_minus = -p.omega1 / 2.0;
        out.plus = out.minus = {1.0, 0.0};
        return out;
    }
    const auto s = spectral_angles(p, k);
    out.Omega = s.Omega_k;
    out.theta = s.theta_k;
    out.energy_plus = p.omega_c * (k - 0.5) + s.Omega_k / 2.0;
    out.energy_minus = p.omega_c * (k - 0.5) - s.Omega_k / 2.0;
    const double c = std::cos(s.theta_k / 2.0);
    const double sn = std::sin(s.theta_k / 2.0);
    out.plus = {c, sn};
    out.minus = {sn, -c};
    return out;
}

SymMatrix jc_block(const RabiParams& p, int k) {
    if (k < 1) throw InvalidParams("JC block needs k >= 1");
    SymMatrix h(2);
    h.set(0, 0, p.omega_c * (k - 1) + p.omega1 / 2.0);
    h.set(1, 1, p.omega_c * k - p.omega1 / 2.0);
    h.set(0, 1, p.g1 * std::sqrt(static_cast<double>(k)));
    return h;
}

std::vector<BlockBasisState> block_basis(int k) {
    if (k < 0) throw InvalidParams("excitation number must be non-negative");
    if (k == 0) return {{Qubits::q00, 0}};
    if (k == 1) return {{Qubits::q10, 0}, {Qubits::q01, 0}, {Qubits::q00, 1}};
    return {{Qubits::q11, k - 2}, {Qubits::q10, k - 1}, {Qubits::q01, k - 1}, {Qubits::q00, k}};
}

std::vector<double> block_photon_numbers(int k) {
    std::vector<double> n;
    for (const auto& b : block_basis(k)) n.push_back(b.photons);
    return n;
}

SymMatrix build_block(const RabiParams& p, int k) {
    p.validate();
    const double w1 = p.omega1;
    const double w2 = p.omega2;
    const double wc = p.omega_c;
    if (k == 0) {
        SymMatrix h(1);
        h.set(0, 0, -(w1 + w2) / 2.0);
        return h;
    }
    if (k == 1) {
        SymMatrix h(3);
        h.set(0, 0, (w1 - w2) / 2.0);
        h.set(1, 1, (-w1 + w2) / 2.0);
        h.set(2, 2, wc - (w1 + w2) / 2.0);
        h.set(0, 2, p.g1);
        h.set(1, 2, p.g2);
        return h;
    }
    if (k < 0) throw InvalidParams("excitation number must be non-negative");
    const double shift = (k - 1) * wc;
    const double rk1 = std::sqrt(static_cast<double>(k - 1));
    const double rk = std::sqrt(static_cast<double>(k));
    SymMatrix h(4);
    h.set(0, 0, -wc + (w1 + w2) / 2.0 + shift);
    h.set(1, 1, (w1 - w2) / 2.0 + shift);
    h.set(2, 2, (-w1 + w2) / 2.0 + shift);
    h.set(3, 3, wc - (w1 + w2) / 2.0 + shift);
    h.set(0, 1, p.g2 * rk1);
    h.set(0, 2, p.g1 * rk1);
    h.set(1, 3, p.g1 * rk);
    h.set(2, 3, p.g2 * rk);
    return h;
}

std::vector<double> BlockEigenpair::block_vector() const {
    if (k == 0) return {coeffs[3]};
    if (k == 1) return {coeffs[1], coeffs[2], coeffs[3]};
    return {coeffs[0], coeffs[1], coeffs[2], coeffs[3]};
}

std::vector<BlockEigenpair> solve_block(const RabiParams& p, int k) {
    const auto decomp = eigh(build_block(p, k));
    std::vector<BlockEigenpair> out;
    out.reserve(decomp.dim());
    for (std::size_t j = 0; j < decomp.dim(); ++j) {
        BlockEigenpair e;
        e.k = k;
        e.l = static_cast<int>(j) + 1;
        e.energy = decomp.values[j];
        const auto v = decomp.vector(j);
        if (k == 0) {
            e.coeffs = {0.0, 0.0, 0.0, v[0]};
        } else if (k == 1) {
            e.coeffs = {0.0, v[0], v[1], v[2]};
        } else {
            e.coeffs = {v[0], v[1], v[2], v[3]};
        }
        out.push_back(e);
    }
    return out;
}

std::optional<std::size_t> block_singlet(const RabiParams& p, const std::vector<BlockEigenpair>& pairs) {
    if (pairs.empty() || pairs.front().k < 1) return std::nullopt;
    if (std::abs(p.omega1 - p.omega2) > 1e-12 || std::abs(p.g1 - p.g2) > 1e-12) return std::nullopt;
    const double e = (pairs.front().k - 1) * p.omega_c;
    std::optional<std::size_t> best;
    double best_exchange = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (std::abs(pairs[i].energy - e) > 1e-9 * (1.0 + std::abs(e))) continue;
        const auto& c = pairs[i].coeffs;
        const double exchange = c[0] * c[0] + c[3] * c[3] + 2.0 * c[1] * c[2];
        if (!best || exchange < best_exchange) {
            best = i;
            best_exchange = exchange;
        }
    }
    return best;
}

EqualFrequencyK1 equal_frequency_k1(const RabiParams& p) {
    p.validate();
    if (std::abs(p.omega1 - p.omega2) > 1e-12) {
        throw NotEqualFrequency("omega1 = " + std::to_string(p.omega1) +
                                " differs from omega2 = " + std::to_string(p.omega2));
    }
    const auto s = spectral_angles(p, 1);
    const double delta = p.detuning();

    EqualFrequencyK1 out;
    out.Theta_1 = s.Theta_1;
    out.alpha = s.alpha;
    const double theta2 = mixing_angle(delta, s.Theta_1);
    out.theta = {0.0, theta2, theta2 + std::numbers::pi};
    out.energy = {0.0, (-delta + s.Theta_1) / 2.0, (-delta - s.Theta_1) / 2.0};

    const double ca = std::cos(s.alpha);
    const double sa = std::sin(s.alpha);
    out.phi0_plus = {ca, sa, 0.0};
    out.phi0_minus = {sa, -ca, 0.0};
    out.phi1 = {0.0, 0.0, 1.0};

    const double c = std::cos(theta2 / 2.0);
    const double sn = std::sin(theta2 / 2.0);
    for (int i = 0; i < 3; ++i) {
        out.states[0][i] = out.phi0_minus[i];
        out.states[1][i] = c * out.phi0_plus[i] + sn * out.phi1[i];
        out.states[2][i] = sn * out.phi0_plus[i] - c * out.phi1[i];
    }
    return out;
}

}  // namespace rabigeom
