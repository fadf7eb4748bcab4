#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rabigeom/errors.hpp"
#include "rabigeom/model.hpp"

namespace rabigeom {

namespace {

constexpr std::array<int, 4> sz1 = {+1, +1, -1, -1};   // sigma1^z on |11>,|10>,|01>,|00>
constexpr std::array<int, 4> sz2 = {+1, -1, +1, -1};
constexpr std::array<int, 4> flip1 = {2, 3, 0, 1};     // sigma1^x
constexpr std::array<int, 4> flip2 = {1, 0, 3, 2};     // sigma2^x

void check_kappa(int kappa) {
    if (kappa != 1 && kappa != -1) throw InvalidParams("parity must be +1 or -1");
}

double sign_power(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Plain Fock basis

std::vector<std::size_t> FullRabi::sector_indices(int kappa) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < parity.size(); ++i) {
        if (parity[i] == kappa) idx.push_back(i);
    }
    return idx;
}

FullRabi build_full_rabi(const RabiParams& p, int n_photons) {
    p.validate();
    if (n_photons < 10) throw InvalidParams("photon cutoff must be at least 10");

    FullRabi full;
    full.n_photons = n_photons;
    const std::size_t dim = 4 * static_cast<std::size_t>(n_photons + 1);
    full.hamiltonian = SymMatrix(dim);
    full.parity.resize(dim);

    for (int q = 0; q < 4; ++q) {
        for (int n = 0; n <= n_photons; ++n) {
            const auto i = full.index(static_cast<Qubits>(q), n);
            full.parity[i] = sz1[q] * sz2[q] * static_cast<int>(sign_power(n));
            full.hamiltonian.set(i, i, p.omega_c * n + 0.5 * (p.omega1 * sz1[q] + p.omega2 * sz2[q]));
            if (n == n_photons) continue;
            // g (a + a^dag) sigma^x couples n <-> n + 1 with a qubit flip.
            const double amp = std::sqrt(static_cast<double>(n + 1));
            full.hamiltonian.set(i, full.index(static_cast<Qubits>(flip1[q]), n + 1), p.g1 * amp);
            full.hamiltonian.set(i, full.index(static_cast<Qubits>(flip2[q]), n + 1), p.g2 * amp);
        }
    }
    return full;
}

FockSectorSolution solve_full_rabi_sector(const FullRabi& full, int kappa) {
    check_kappa(kappa);
    const auto idx = full.sector_indices(kappa);
    const auto decomp = eigh(full.hamiltonian.restrict_to(idx));

    FockSectorSolution out;
    out.kappa = kappa;
    out.pairs.reserve(decomp.dim());
    for (std::size_t j = 0; j < decomp.dim(); ++j) {
        FockEigenpair e;
        e.energy = decomp.values[j];
        e.state.assign(full.dim(), 0.0);
        const auto v = decomp.vector(j);
        for (std::size_t a = 0; a < idx.size(); ++a) {
            e.state[idx[a]] = v[a];
            e.photon_number += full.photons(idx[a]) * v[a] * v[a];
        }
        out.pairs.push_back(std::move(e));
    }
    const auto& ground = out.pairs.front().state;
    for (int q = 0; q < 4; ++q) {
        const double c = ground[full.index(static_cast<Qubits>(q), full.n_photons)];
        out.top_population += c * c;
    }
    out.truncation_warning = out.top_population > 1e-8;
    return out;
}

// ---------------------------------------------------------------------------
// Displaced Fock states

double displaced_overlap(int m, int n, double delta) {
    if (m < 0 || n < 0) throw InvalidParams("Fock indices must be non-negative");
    if (delta == 0.0) return m == n ? 1.0 : 0.0;
    if (m < n) return sign_power(n - m) * displaced_overlap(n, m, delta);

    // m >= n: exp(-x/2) sqrt(n!/m!) delta^(m-n) L_n^(m-n)(x), x = delta^2.
    const int alpha = m - n;
    const double x = delta * delta;
    double lag_prev = 1.0;
    double lag = 1.0;
    if (n >= 1) {
        lag = 1.0 + alpha - x;
        for (int j = 1; j < n; ++j) {
            const double next = ((2.0 * j + 1.0 + alpha - x) * lag - (j + alpha) * lag_prev) / (j + 1.0);
            lag_prev = lag;
            lag = next;
        }
    }
    const double log_pref = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) +
                            alpha * std::log(std::abs(delta)) - 0.5 * x;
    const double sign = (delta < 0.0 && alpha % 2 == 1) ? -1.0 : 1.0;
    return sign * std::exp(log_pref) * lag;
}

DisplacedBasis DisplacedBasis::for_params(const RabiParams& p, int M) {
    p.validate();
    DisplacedBasis b;
    b.M = M;
    const double b1 = (p.g1 + p.g2) / p.omega_c;
    const double b2 = (p.g1 - p.g2) / p.omega_c;
    b.betas = {b1, b2, -b2, -b1};
    return b;
}

std::array<AdiabaticSolution, 2> adiabatic_eigensystem(const RabiParams& p, int n, int kappa) {
    p.validate();
    check_kappa(kappa);
    if (n < 0) throw InvalidParams("displaced level must be non-negative");

    const auto basis = DisplacedBasis::for_params(p, n);
    const double b1 = basis.betas[0];
    const double b2 = basis.betas[1];
    const double wc = p.omega_c;
    const double par = kappa * sign_power(n);
    // The qubit-2 flip connects |11>_A1 with |10>_A2 (displacement 2 g2); the
    // qubit-1 flip connects |11>_A1 with |01>_A3 (displacement 2 g1).
    const double Omega = -0.5 * p.omega2 * displaced_overlap(n, n, 2.0 * p.g2 / wc) -
                         par * 0.5 * p.omega1 * displaced_overlap(n, n, 2.0 * p.g1 / wc);
    const double split = wc * (b1 * b1 - b2 * b2) / 2.0;
    const double mu = std::sqrt(Omega * Omega + split * split);

    std::array<AdiabaticSolution, 2> out;
    bool degenerate[2] = {false, false};
    for (int s = 0; s < 2; ++s) {
        const int branch = s == 0 ? +1 : -1;
        auto& a = out[s];
        a.kappa = kappa;
        a.n = n;
        a.branch = branch;
        a.Omega = Omega;
        a.mu = mu;
        a.energy = n * wc - (b1 * b1 + b2 * b2) * wc / 2.0 + branch * mu;
        const double denom = -split - branch * mu;
        if (std::abs(denom) < 1e-14) {
            degenerate[s] = true;
            a.xi = std::numeric_limits<double>::infinity();
            a.d1 = 1.0;
            a.d2 = 0.0;
        } else {
            a.xi = Omega / denom;
            const double inv = 1.0 / std::sqrt(1.0 + a.xi * a.xi);
            a.d1 = a.xi * inv;
            a.d2 = -inv;
        }
    }
    if (degenerate[0] && degenerate[1]) {
        // Scalar 2x2 block: pick the two basis vectors.
        out[1].xi = 0.0;
        out[1].d1 = 0.0;
        out[1].d2 = -1.0;
    }
    return out;
}

SymMatrix build_displaced_sector(const RabiParams& p, const DisplacedBasis& basis, int kappa) {
    p.validate();
    check_kappa(kappa);
    const int M = basis.M;
    const std::size_t L = static_cast<std::size_t>(M + 1);
    const double wc = p.omega_c;
    const double b1 = basis.betas[0];
    const double b2 = basis.betas[1];
    const double delta_q2 = b1 - basis.betas[1];   // |11>_A1 <-> |10>_A2
    const double delta_q1 = b1 - basis.betas[2];   // |11>_A1 <-> |01>_A3

    SymMatrix h(2 * L);
    for (int n = 0; n <= M; ++n) {
        h.set(n, n, wc * (n - b1 * b1));
        h.set(L + n, L + n, wc * (n - b2 * b2));
    }
    for (int m = 0; m <= M; ++m) {
        for (int n = 0; n <= M; ++n) {
            const double c = 0.5 * p.omega2 * displaced_overlap(m, n, delta_q2) +
                             kappa * sign_power(n) * 0.5 * p.omega1 * displaced_overlap(m, n, delta_q1);
            h.set(m, L + n, -c);
        }
    }
    return h;
}

TruncatedSolution truncated_parity_solve(const RabiParams& p, const DisplacedBasis& basis,
                                         int kappa) {
    if (basis.M < 10) throw InvalidParams("displaced truncation M must be at least 10");
    const auto decomp = eigh(build_displaced_sector(p, basis, kappa));
    const std::size_t L = static_cast<std::size_t>(basis.M + 1);
    const bool swap_symmetric = basis.betas[1] == 0.0;

    TruncatedSolution out;
    out.kappa = kappa;
    out.pairs.reserve(decomp.dim());
    const double scale = 1.0 / std::numbers::sqrt2;
    for (std::size_t j = 0; j < decomp.dim(); ++j) {
        TruncatedEigenpair e;
        e.kappa = kappa;
        e.energy = decomp.values[j];
        const auto v = decomp.vector(j);
        e.d1.resize(L);
        e.d2.resize(L);
        for (std::size_t n = 0; n < L; ++n) {
            e.d1[n] = scale * v[n];
            e.d2[n] = scale * v[L + n];
        }
        if (swap_symmetric) {
            double x = 0.0;
            for (std::size_t n = 0; n < L; ++n) {
                x += 2.0 * e.d1[n] * e.d1[n] +
                     2.0 * kappa * sign_power(static_cast<int>(n)) * e.d2[n] * e.d2[n];
            }
            e.exchange = x;
        }
        if (j < low_lying_count) {
            const double top = 2.0 * (e.d1[L - 1] * e.d1[L - 1] + e.d2[L - 1] * e.d2[L - 1]);
            out.top_population = std::max(out.top_population, top);
        }
        out.pairs.push_back(std::move(e));
    }
    out.truncation_warning = out.top_population > 1e-8;
    return out;
}

namespace {

// Amplitudes of a sector eigenstate on the sigma^x-frame kets |11>,|10>,|01>,|00>,
// each multiplying |n>_{A_i}. The |10>, |01> kets carry the sign convention that
// makes the sector coupling equal to Omega as printed.
std::array<std::vector<double>, 4> frame_components(const TruncatedEigenpair& e) {
    const std::size_t L = e.d1.size();
    std::array<std::vector<double>, 4> c;
    for (auto& v : c) v.resize(L);
    for (std::size_t n = 0; n < L; ++n) {
        const double par = e.kappa * sign_power(static_cast<int>(n));
        c[0][n] = e.d1[n];
        c[1][n] = e.d2[n];
        c[2][n] = par * e.d2[n];
        c[3][n] = par * e.d1[n];
    }
    return c;
}

// <q1 q2 (z) | s1 s2 (frame)> with |+> = (|1> + |0>)/sqrt2 and the frame
// kets |11> = |++>, |10> = -|+->, |01> = -|-+>, |00> = |-->.
double frame_to_bare(int bare, int frame) {
    constexpr std::array<int, 4> s1 = {+1, +1, -1, -1};
    constexpr std::array<int, 4> s2 = {+1, -1, +1, -1};
    constexpr std::array<double, 4> ket_sign = {1.0, -1.0, -1.0, 1.0};
    const double a1 = (sz1[bare] > 0) ? 1.0 : static_cast<double>(s1[frame]);
    const double a2 = (sz2[bare] > 0) ? 1.0 : static_cast<double>(s2[frame]);
    return 0.5 * a1 * a2 * ket_sign[frame];
}

}  // namespace

std::array<double, 4> vacuum_amplitudes(const TruncatedEigenpair& pair,
                                        const DisplacedBasis& basis, InitialFrame frame) {
    const auto comp = frame_components(pair);
    std::array<double, 4> in_frame{};
    for (int f = 0; f < 4; ++f) {
        double s = 0.0;
        for (std::size_t n = 0; n < comp[f].size(); ++n) {
            // <0| n>_A = <0| D(-beta) |n>
            s += comp[f][n] * displaced_overlap(0, static_cast<int>(n), -basis.betas[f]);
        }
        in_frame[f] = s;
    }
    if (frame == InitialFrame::displaced_frame) return in_frame;

    std::array<double, 4> bare{};
    for (int q = 0; q < 4; ++q) {
        for (int f = 0; f < 4; ++f) bare[q] += frame_to_bare(q, f) * in_frame[f];
    }
    return bare;
}

std::vector<double> to_fock(const TruncatedEigenpair& pair, const DisplacedBasis& basis,
                            int n_photons) {
    const auto comp = frame_components(pair);
    const std::size_t L = static_cast<std::size_t>(n_photons + 1);
    std::array<std::vector<double>, 4> frame_fock;
    for (int f = 0; f < 4; ++f) {
        frame_fock[f].assign(L, 0.0);
        for (std::size_t k = 0; k < L; ++k) {
            double s = 0.0;
            for (std::size_t n = 0; n < comp[f].size(); ++n) {
                s += comp[f][n] *
                     displaced_overlap(static_cast<int>(k), static_cast<int>(n), -basis.betas[f]);
            }
            frame_fock[f][k] = s;
        }
    }
    std::vector<double> out(4 * L, 0.0);
    for (int q = 0; q < 4; ++q) {
        for (int f = 0; f < 4; ++f) {
            const double w = frame_to_bare(q, f);
            for (std::size_t k = 0; k < L; ++k) out[q * L + k] += w * frame_fock[f][k];
        }
    }
    return out;
}

double photon_matrix_element(const TruncatedEigenpair& a, const TruncatedEigenpair& b,
                             const DisplacedBasis& basis) {
    if (a.kappa != b.kappa) return 0.0;
    const std::size_t L = a.d1.size();
    if (b.d1.size() != L) throw DimensionError("eigenpairs come from different truncations");
    // a = A - beta within each qubit component; the |00>, |01> halves repeat the
    // |11>, |10> halves exactly, hence the factor 2.
    auto part = [&](const std::vector<double>& x, const std::vector<double>& y, double beta) {
        double s = 0.0;
        for (std::size_t n = 0; n < L; ++n) {
            s += (static_cast<double>(n) + beta * beta) * x[n] * y[n];
            if (n + 1 < L) {
                s -= beta * std::sqrt(static_cast<double>(n + 1)) * (x[n + 1] * y[n] + x[n] * y[n + 1]);
            }
        }
        return s;
    };
    return 2.0 * (part(a.d1, b.d1, basis.betas[0]) + part(a.d2, b.d2, basis.betas[1]));
}

// ---------------------------------------------------------------------------
// Exceptional solutions

std::vector<ExceptionalState> exceptional_states(const RabiParams& p, int n_photons) {
    p.validate();
    constexpr double tol = 1e-12;
    std::vector<ExceptionalState> out;
    if (std::abs(p.g1 - p.g2) > tol) return out;

    const FullRabi layout{n_photons, SymMatrix(1), std::vector<int>(4 * (n_photons + 1))};
    const std::size_t dim = layout.dim();

    if (std::abs(p.omega1 - p.omega2) <= tol) {
        for (int n = 0; n <= n_photons; ++n) {
            ExceptionalState s;
            s.kind = ExceptionalKind::singlet;
            s.n = n;
            s.energy = n * p.omega_c;
            s.state.assign(dim, 0.0);
            s.state[layout.index(Qubits::q10, n)] = 1.0 / std::numbers::sqrt2;
            s.state[layout.index(Qubits::q01, n)] = -1.0 / std::numbers::sqrt2;
            out.push_back(std::move(s));
        }
    }
    if (std::abs(p.omega1 + p.omega2 - 2.0 * p.omega_c) <= tol && std::abs(p.omega1 - p.omega2) > tol) {
        ExceptionalState s;
        s.kind = ExceptionalKind::even;
        s.energy = p.omega_c;
        s.q = 2.0 * p.g1 / (p.omega1 - p.omega2);
        // With sigma^x coupling as written the antisymmetric one-photon part
        // enters with -q_e.
        const double norm = std::sqrt(2.0 * s.q * s.q + 1.0);
        s.state.assign(dim, 0.0);
        s.state[layout.index(Qubits::q10, 1)] = -s.q / norm;
        s.state[layout.index(Qubits::q01, 1)] = s.q / norm;
        s.state[layout.index(Qubits::q11, 0)] = 1.0 / norm;
        out.push_back(std::move(s));
    }
    if (std::abs(p.omega1 - p.omega2 - 2.0 * p.omega_c) <= tol) {
        ExceptionalState s;
        s.kind = ExceptionalKind::odd;
        s.energy = p.omega_c;
        s.q = 2.0 * p.g1 / (p.omega1 + p.omega2);
        const double norm = std::sqrt(2.0 * s.q * s.q + 1.0);
        s.state.assign(dim, 0.0);
        s.state[layout.index(Qubits::q00, 1)] = s.q / norm;
        s.state[layout.index(Qubits::q11, 1)] = -s.q / norm;
        s.state[layout.index(Qubits::q10, 0)] = 1.0 / norm;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace rabigeom
