#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rabigeom/errors.hpp"
#include "rabigeom/model.hpp"

using namespace rabigeom;

namespace {

const double pi = std::numbers::pi;

double max_residual(const FullRabi& full, const std::vector<double>& v, double e) {
    double r = 0.0;
    for (std::size_t i = 0; i < full.dim(); ++i) {
        double h = -e * v[i];
        for (std::size_t j = 0; j < full.dim(); ++j) h += full.hamiltonian(i, j) * v[j];
        r = std::max(r, std::abs(h));
    }
    return r;
}

}  // namespace

TEST_CASE("RabiParams validation") {
    CHECK_THROWS_AS((RabiParams{0.0, 1.0, 1.0, 0.1, 0.1}.validate()), InvalidParams);
    CHECK_THROWS_AS((RabiParams{1.0, 1.0, 1.0, -0.1, 0.1}.validate()), InvalidParams);
    CHECK_THROWS_AS((RabiParams{1.0, INFINITY, 1.0, 0.1, 0.1}.validate()), InvalidParams);
    CHECK(RabiParams::jc(0.3, 0.1).detuning() == doctest::Approx(0.3));
}

TEST_CASE("jc_eigensystem") {
    SUBCASE("resonance") {
        const auto es = jc_eigensystem(RabiParams::jc(0.0, 0.1), 1);
        CHECK(es.theta == doctest::Approx(pi / 2));
        CHECK(es.energy_plus == doctest::Approx(0.6));
        CHECK(es.energy_minus == doctest::Approx(0.4));
    }
    SUBCASE("zero coupling gives bare states") {
        const auto es = jc_eigensystem(RabiParams::jc(0.2, 0.0), 1);
        CHECK(es.theta == 0.0);
        CHECK(es.plus[0] == 1.0);
        CHECK(std::abs(es.minus[1]) == 1.0);
    }
    SUBCASE("detuned") {
        const auto es = jc_eigensystem(RabiParams::jc(0.5, 0.25), 1);
        CHECK(es.Omega == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
        CHECK(std::cos(es.theta) == doctest::Approx(0.5 / std::sqrt(0.5)).epsilon(1e-14));
    }
    SUBCASE("k = 0 and block agreement") {
        const auto p = RabiParams::jc(-0.17, 0.08);
        CHECK(jc_eigensystem(p, 0).energy_minus == doctest::Approx(-p.omega1 / 2));
        for (int k = 1; k <= 5; ++k) {
            const auto es = jc_eigensystem(p, k);
            const auto d = eigh(jc_block(p, k));
            CHECK(d.values[0] == doctest::Approx(es.energy_minus).epsilon(1e-13));
            CHECK(d.values[1] == doctest::Approx(es.energy_plus).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(jc_eigensystem(RabiParams{1.0, 1.0, 0.5, 0.1, 0.0}, 1), NotJCReduction);
    CHECK_THROWS_AS(jc_eigensystem(RabiParams{1.0, 1.0, 0.0, 0.1, 0.1}, 1), NotJCReduction);
}

TEST_CASE("build_block: printed entries") {
    const RabiParams p{1.0, 1.3, 0.6, 0.11, 0.07};
    CHECK(build_block(p, 0)(0, 0) == doctest::Approx(-(1.3 + 0.6) / 2));

    const RabiParams free{1.0, 1.3, 0.6, 0.0, 0.0};
    const auto h1 = build_block(free, 1);
    CHECK(h1(0, 0) == doctest::Approx(0.35));
    CHECK(h1(1, 1) == doctest::Approx(-0.35));
    CHECK(h1(2, 2) == doctest::Approx(1.0 - 0.95));
    CHECK(h1(0, 1) == 0.0);

    const auto h2 = build_block(RabiParams{1.0, 1.0, 1.0, 0.1, 0.1}, 2);
    CHECK(h2(0, 1) == doctest::Approx(0.1));
    CHECK(h2(0, 2) == doctest::Approx(0.1));
    CHECK(h2(1, 3) == doctest::Approx(0.1 * std::sqrt(2.0)));
    CHECK(h2(2, 3) == doctest::Approx(0.1 * std::sqrt(2.0)));
    CHECK(h2(0, 3) == 0.0);
    CHECK(h2(1, 2) == 0.0);
}

TEST_CASE("build_block equals the RWA Hamiltonian projected on chi_k") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> w(0.3, 1.7);
    std::uniform_real_distribution<double> g(0.0, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
        const RabiParams p{1.0, w(rng), w(rng), g(rng), g(rng)};
        const int N = 8;
        const auto h = oracle::rwa_hamiltonian(p, N);
        for (int k = 0; k <= 6; ++k) {
            const auto basis = block_basis(k);
            const auto blk = build_block(p, k);
            double trace = 0.0;
            for (std::size_t a = 0; a < basis.size(); ++a) {
                for (std::size_t b = 0; b < basis.size(); ++b) {
                    const auto i = static_cast<std::size_t>(basis[a].qubits) * (N + 1) + basis[a].photons;
                    const auto j = static_cast<std::size_t>(basis[b].qubits) * (N + 1) + basis[b].photons;
                    CHECK(std::abs(blk(a, b) - h[i][j]) <= 1e-12);
                }
                trace += blk(a, a);
            }
            double sum = 0.0;
            for (const auto& e : solve_block(p, k)) sum += e.energy;
            CHECK(std::abs(sum - trace) <= 1e-10 * std::max(1.0, std::abs(trace)));
        }
    }
}

TEST_CASE("solve_block") {
    SUBCASE("equal frequencies, k = 1") {
        const RabiParams p{1.0, 1.2, 1.2, 0.09, 0.05};
        const auto s = spectral_angles(p, 1);
        const auto pairs = solve_block(p, 1);
        std::vector<double> e;
        for (const auto& x : pairs) e.push_back(x.energy);
        std::vector<double> expect{0.0, (-0.2 + s.Theta_1) / 2, (-0.2 - s.Theta_1) / 2};
        std::sort(expect.begin(), expect.end());
        for (int i = 0; i < 3; ++i) CHECK(e[i] == doctest::Approx(expect[i]).epsilon(1e-12));
        const auto zero = *std::find_if(pairs.begin(), pairs.end(),
                                        [](const BlockEigenpair& x) { return std::abs(x.energy) < 1e-12; });
        // |phi_0^-> = (sin a, -cos a, 0) up to the sign fixed by eigh
        CHECK(std::abs(zero.coeffs[1] - std::sin(s.alpha)) < 1e-12);
        CHECK(std::abs(zero.coeffs[2] + std::cos(s.alpha)) < 1e-12);
        CHECK(std::abs(zero.coeffs[3]) < 1e-12);
    }
    SUBCASE("k = 2 states are normalized and orthogonal") {
        const RabiParams p{1.0, 0.8, 1.1, 0.21, 0.13};
        const auto pairs = solve_block(p, 2);
        REQUIRE(pairs.size() == 4);
        for (const auto& a : pairs) {
            double n = 0.0;
            for (double c : a.coeffs) n += c * c;
            CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
            for (const auto& b : pairs) {
                if (&a == &b) continue;
                double o = 0.0;
                for (int i = 0; i < 4; ++i) o += a.coeffs[i] * b.coeffs[i];
                CHECK(std::abs(o) < 1e-12);
            }
        }
    }
}

TEST_CASE("equal_frequency_k1") {
    CHECK(equal_frequency_k1(RabiParams::homogeneous(0.0, 0.1)).theta[1] == doctest::Approx(pi / 2));

    const auto worked = equal_frequency_k1(RabiParams::homogeneous(0.01, 0.01));
    CHECK(worked.Theta_1 == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(worked.energy[1] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(worked.energy[2] == doctest::Approx(-0.02).epsilon(1e-12));

    SUBCASE("single-qubit limit") {
        const RabiParams p{1.0, 1.3, 1.3, 0.1, 0.0};
        const auto ef = equal_frequency_k1(p);
        CHECK(ef.alpha == 0.0);
        const auto jc = jc_eigensystem(RabiParams::jc(0.3, 0.1), 1);
        CHECK(ef.energy[1] + 1.3 / 2 == doctest::Approx(jc.energy_plus).epsilon(1e-12));
        CHECK(ef.states[1][0] == doctest::Approx(jc.plus[0]));
        CHECK(ef.states[1][2] == doctest::Approx(jc.plus[1]));
    }
    SUBCASE("states are eigenvectors of H_1") {
        const RabiParams p{1.0, 0.85, 0.85, 0.07, 0.12};
        const auto ef = equal_frequency_k1(p);
        const auto h = build_block(p, 1);
        for (int l = 0; l < 3; ++l) {
            for (int i = 0; i < 3; ++i) {
                double hv = 0.0;
                for (int j = 0; j < 3; ++j) hv += h(i, j) * ef.states[l][j];
                CHECK(std::abs(hv - ef.energy[l] * ef.states[l][i]) < 1e-13);
            }
        }
        CHECK(ef.theta[2] == doctest::Approx(ef.theta[1] + pi));
    }
    CHECK_THROWS_AS(equal_frequency_k1(RabiParams{1.0, 1.0, 0.9, 0.1, 0.1}), NotEqualFrequency);
}

TEST_CASE("build_full_rabi") {
    CHECK_THROWS_AS(build_full_rabi(RabiParams::homogeneous(0, 0.1), 9), InvalidParams);

    SUBCASE("decoupled energies") {
        const RabiParams p{1.0, 0.7, 0.4, 0.0, 0.0};
        const auto full = build_full_rabi(p, 12);
        for (int n = 0; n <= 12; ++n) {
            CHECK(full.hamiltonian(full.index(Qubits::q11, n), full.index(Qubits::q11, n)) ==
                  doctest::Approx(n + 0.55));
            CHECK(full.hamiltonian(full.index(Qubits::q01, n), full.index(Qubits::q01, n)) ==
                  doctest::Approx(n - 0.15));
        }
        for (std::size_t i = 0; i < full.dim(); ++i)
            for (std::size_t j = 0; j < full.dim(); ++j)
                if (i != j) CHECK(full.hamiltonian(i, j) == 0.0);
    }
    SUBCASE("parity conservation is structural") {
        const RabiParams p{1.0, 0.9, 1.2, 0.3, 0.2};
        const auto full = build_full_rabi(p, 15);
        for (std::size_t i = 0; i < full.dim(); ++i)
            for (std::size_t j = 0; j < full.dim(); ++j)
                if (full.parity[i] != full.parity[j]) CHECK(full.hamiltonian(i, j) == 0.0);
    }
    SUBCASE("singlets are exact eigenvectors") {
        const auto p = RabiParams::homogeneous(0.3, 0.25);
        const auto full = build_full_rabi(p, 14);
        for (int n = 0; n < 14; ++n) {
            std::vector<double> v(full.dim(), 0.0);
            v[full.index(Qubits::q10, n)] = 1.0 / std::sqrt(2.0);
            v[full.index(Qubits::q01, n)] = -1.0 / std::sqrt(2.0);
            CHECK(max_residual(full, v, n) < 1e-12);
        }
    }
    SUBCASE("E = omega_c in the even sector for symmetric detuning") {
        const RabiParams p{1.0, 1.5, 0.5, 0.1, 0.1};
        const auto sol = solve_full_rabi_sector(build_full_rabi(p, 30), 1);
        double best = 1.0;
        for (const auto& e : sol.pairs) best = std::min(best, std::abs(e.energy - 1.0));
        CHECK(best < 1e-10);
        CHECK_FALSE(sol.truncation_warning);
    }
}

TEST_CASE("displaced_overlap") {
    CHECK(displaced_overlap(3, 3, 0.0) == 1.0);
    CHECK(displaced_overlap(2, 3, 0.0) == 0.0);
    CHECK(displaced_overlap(0, 0, 0.7) == doctest::Approx(std::exp(-0.245)).epsilon(1e-15));

    const auto d = oracle::displacement(0.04, 60);
    CHECK(std::abs(displaced_overlap(1, 1, 0.04) - d[1][1]) <= 1e-10);

    for (double delta : {-1.9, -0.6, 0.04, 0.5, 1.3, 2.0}) {
        const auto D = oracle::displacement(delta, 60);
        for (int m = 0; m <= 10; ++m)
            for (int n = 0; n <= 10; ++n) {
                CAPTURE(delta);
                CAPTURE(m);
                CAPTURE(n);
                CHECK(std::abs(displaced_overlap(m, n, delta) - D[m][n]) <= 1e-10);
                CHECK(displaced_overlap(m, n, delta) ==
                      doctest::Approx(((m - n) % 2 == 0 ? 1.0 : -1.0) * displaced_overlap(n, m, delta)));
            }
        for (int n = 0; n <= 10; ++n) {
            double s = 0.0;
            for (int m = 0; m <= n + 40; ++m) s += std::pow(displaced_overlap(m, n, delta), 2);
            CHECK(std::abs(s - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("adiabatic_eigensystem") {
    SUBCASE("zero coupling") {
        const RabiParams p{1.0, 0.4, 0.3, 0.0, 0.0};
        for (int n = 0; n < 4; ++n)
            for (int kappa : {1, -1}) {
                const auto s = adiabatic_eigensystem(p, n, kappa);
                // |Omega| = |w1 + kappa (-1)^n w2| / 2; the parity factor rides on the qubit-1 flip.
                const double par = kappa * (n % 2 == 0 ? 1 : -1);
                const double omega = -(0.3 + par * 0.4) / 2;
                CHECK(s[0].Omega == doctest::Approx(omega));
                CHECK(std::abs(s[0].Omega) == doctest::Approx(std::abs(0.4 + par * 0.3) / 2));
                CHECK(s[0].energy == doctest::Approx(n + std::abs(omega)));
                CHECK(s[1].energy == doctest::Approx(n - std::abs(omega)));
            }
    }
    SUBCASE("normalization and mu bound") {
        const RabiParams p{1.0, 0.3, 0.2, 0.15, 0.05};
        for (int n = 0; n < 6; ++n)
            for (int kappa : {1, -1})
                for (const auto& s : adiabatic_eigensystem(p, n, kappa)) {
                    CHECK(s.d1 * s.d1 + s.d2 * s.d2 == doctest::Approx(1.0).epsilon(1e-12));
                    CHECK(s.mu >= std::abs(s.Omega));
                }
    }
    SUBCASE("homogeneous coupling uses overlaps at 2g") {
        const auto p = RabiParams::homogeneous(-0.5, 0.02);
        const auto s = adiabatic_eigensystem(p, 0, 1)[0];
        CHECK(s.Omega == doctest::Approx(-0.5 * displaced_overlap(0, 0, 0.04)).epsilon(1e-15));
    }
    SUBCASE("degenerate denominator limit") {
        const auto s = adiabatic_eigensystem(RabiParams{1.0, 0.0, 0.0, 0.0, 0.0}, 0, 1);
        CHECK(s[0].d1 == 1.0);
        CHECK(s[0].d2 == 0.0);
        CHECK(s[1].d1 == 0.0);
        CHECK(std::abs(s[1].d2) == 1.0);
    }
}

TEST_CASE("truncated_parity_solve") {
    CHECK_THROWS_AS(truncated_parity_solve(RabiParams::homogeneous(0, 0.1), DisplacedBasis{9, {}}, 1),
                    InvalidParams);
    CHECK_THROWS_AS(
        truncated_parity_solve(RabiParams::homogeneous(0, 0.1),
                               DisplacedBasis::for_params(RabiParams::homogeneous(0, 0.1), 20), 0),
        InvalidParams);

    SUBCASE("normalization convention") {
        const RabiParams p{1.0, 0.9, 0.6, 0.2, 0.1};
        const auto basis = DisplacedBasis::for_params(p, 30);
        for (int kappa : {1, -1})
            for (const auto& e : truncated_parity_solve(p, basis, kappa).pairs) {
                double n = 0.0;
                for (std::size_t i = 0; i < e.d1.size(); ++i) n += e.d1[i] * e.d1[i] + e.d2[i] * e.d2[i];
                CHECK(2.0 * n == doctest::Approx(1.0).epsilon(1e-10));
                CHECK_FALSE(e.exchange.has_value());
            }
    }
    SUBCASE("zero-coupling limit") {
        const RabiParams p{1.0, 0.7, 0.4, 0.0, 0.0};
        const auto basis = DisplacedBasis::for_params(p, 12);
        std::vector<double> got;
        for (int kappa : {1, -1})
            for (const auto& e : truncated_parity_solve(p, basis, kappa).pairs) got.push_back(e.energy);
        std::vector<double> want;
        for (int n = 0; n <= 12; ++n)
            for (double s1 : {0.35, -0.35})
                for (double s2 : {0.2, -0.2}) want.push_back(n + s1 + s2);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
    SUBCASE("matches the plain Fock sectors") {
        const RabiParams p{1.0, 1.1, 0.8, 0.17, 0.09};
        const auto full = build_full_rabi(p, 60);
        const auto basis = DisplacedBasis::for_params(p, 30);
        for (int kappa : {1, -1}) {
            const auto a = solve_full_rabi_sector(full, kappa);
            const auto b = truncated_parity_solve(p, basis, kappa);
            CHECK_FALSE(b.truncation_warning);
            for (int i = 0; i < 10; ++i) CHECK(std::abs(a.pairs[i].energy - b.pairs[i].energy) < 1e-8);
            // Same state up to sign, and the same photon number.
            for (int i = 0; i < 4; ++i) {
                const auto v = to_fock(b.pairs[i], basis, full.n_photons);
                double ov = 0.0;
                for (std::size_t j = 0; j < v.size(); ++j) ov += v[j] * a.pairs[i].state[j];
                CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-9));
                CHECK(photon_matrix_element(b.pairs[i], b.pairs[i], basis) ==
                      doctest::Approx(a.pairs[i].photon_number).epsilon(1e-9));
            }
        }
    }
    SUBCASE("exchange symmetry flags singlets") {
        const auto p = RabiParams::homogeneous(0.5, 0.2);
        const auto basis = DisplacedBasis::for_params(p, 30);
        int singlets = 0;
        for (const auto& e : truncated_parity_solve(p, basis, 1).pairs) {
            REQUIRE(e.exchange.has_value());
            CHECK(std::abs(std::abs(*e.exchange) - 1.0) < 1e-9);
            if (e.is_singlet()) {
                ++singlets;
                CHECK(std::abs(e.energy - std::round(e.energy)) < 1e-10);
            }
        }
        CHECK(singlets > 0);
    }
    SUBCASE("truncation warning for a tiny space at strong coupling") {
        const auto p = RabiParams::homogeneous(0.0, 1.5);
        CHECK(truncated_parity_solve(p, DisplacedBasis::for_params(p, 10), 1).truncation_warning);
    }
}

TEST_CASE("vacuum amplitudes agree with the plain Fock state") {
    const RabiParams p{1.0, 0.9, 0.7, 0.14, 0.06};
    const auto basis = DisplacedBasis::for_params(p, 30);
    const auto e = truncated_parity_solve(p, basis, -1).pairs[2];
    const auto v = to_fock(e, basis, 80);
    const auto bare = vacuum_amplitudes(e, basis, InitialFrame::bare);
    for (int q = 0; q < 4; ++q) CHECK(bare[q] == doctest::Approx(v[q * 81]).epsilon(1e-12));
}

TEST_CASE("exceptional_states") {
    SUBCASE("singlets") {
        const auto p = RabiParams::homogeneous(0.2, 0.1);
        const auto st = exceptional_states(p, 12);
        REQUIRE(st.size() == 13);
        const auto full = build_full_rabi(p, 12);
        for (const auto& s : st) {
            CHECK(s.kind == ExceptionalKind::singlet);
            CHECK(s.energy == doctest::Approx(s.n));
            CHECK(max_residual(full, s.state, s.energy) <= 1e-10);
        }
    }
    SUBCASE("even and odd") {
        for (const RabiParams p : {RabiParams{1.0, 1.5, 0.5, 0.1, 0.1}, RabiParams{1.0, 2.5, 0.5, 0.1, 0.1}}) {
            const auto st = exceptional_states(p, 12);
            REQUIRE(st.size() == 1);
            const auto& s = st[0];
            CHECK(s.energy == 1.0);
            const auto full = build_full_rabi(p, 12);
            CHECK(max_residual(full, s.state, s.energy) <= 1e-10);
            if (s.kind == ExceptionalKind::even) {
                CHECK(s.q == doctest::Approx(0.2));
            } else {
                CHECK(s.kind == ExceptionalKind::odd);
                CHECK(s.q == doctest::Approx(0.2 / 3.0));
            }
        }
    }
    CHECK(exceptional_states(RabiParams{1.0, 1.5, 0.5, 0.1, 0.12}, 12).empty());
}

TEST_CASE("block_singlet") {
    for (double g : {0.0, 0.07, 0.3}) {
        const auto p = RabiParams::homogeneous(0.5, g);
        for (int k = 1; k <= 5; ++k) {
            const auto pairs = solve_block(p, k);
            const auto s = block_singlet(p, pairs);
            REQUIRE(s.has_value());
            CHECK(pairs[*s].energy == doctest::Approx(k - 1.0).epsilon(1e-12));
            // Removing it leaves only exchange-symmetric levels; at g = 0 the
            // remaining degenerate partner is symmetric within the pair.
            int antisym = 0;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (i == *s) continue;
                const auto& c = pairs[i].coeffs;
                if (c[0] * c[0] + c[3] * c[3] + 2 * c[1] * c[2] < -0.5) ++antisym;
            }
            CHECK((antisym == 0 || g == 0.0));
        }
    }
    CHECK_FALSE(block_singlet(RabiParams{1.0, 1.2, 1.1, 0.1, 0.1}, solve_block(RabiParams{1.0, 1.2, 1.1, 0.1, 0.1}, 2)));
    CHECK_FALSE(block_singlet(RabiParams::homogeneous(0.1, 0.1), solve_block(RabiParams::homogeneous(0.1, 0.1), 0)));
}
