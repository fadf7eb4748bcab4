// dynamics.hpp - cyclic vacuum-to-vacuum evolutions and their phases
//
// Evolution uses the exact spectrum of the (tiny) RWA block, so there is no
// integrator tolerance anywhere. The photon-phase loop phi: 0 -> 2 pi is
// traversed once per cyclic evolution; all phases are kept unwrapped.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rabigeom/model.hpp"

namespace rabigeom {

struct CyclicResult {
    double period{0.0};            // T
    long p{0};                     // winding of the upper component (JC: q cycles)
    long q{0};
    double total_phase{0.0};       // Gamma, unwrapped
    double dynamical_phase{0.0};   // -sum_j w_j (E_j T + gamma_j)
    double aa_phase{0.0};          // beta = Gamma - dynamical phase, unreduced
    double aa_phase_reduced{0.0};  // beta mod 2 pi
    double aa_phase_formula{0.0};  // closed form
    double geometric_phase{0.0};   // weighted Berry phase gamma
    double fidelity{0.0};          // |<initial| Psi(T)>|
    double branch_mismatch{0.0};   // |Gamma mod 2 pi - propagated phase|, should vanish
};

/// |1>|0> under the JC k = 1 block for `cycles` periods T = 2 pi / Omega_1.
/// Throws NotJCReduction for two-qubit parameters.
CyclicResult cyclic_evolution_jc(const RabiParams& p, int cycles = 1);

struct Rational {
    long p{0};
    long q{1};
};

/// Continued-fraction convergent p/q (reduced, q > 0) with |ratio - p/q| <= tolerance
/// and q <= max_denominator. Throws NoRational otherwise, or for non-finite input.
Rational rationalize(double ratio, double tolerance = 1e-9, long max_denominator = 64);

/// |10>|0> under the k = 1 block with omega1 == omega2. The period is
/// T = 2 p pi / E_1^2 = 2 q pi / E_1^3 with signs chosen so T > 0.
/// Throws NotEqualFrequency or NoRational.
CyclicResult cyclic_evolution_two_qubit(const RabiParams& p, double tolerance = 1e-9,
                                        long max_denominator = 64);

enum class CyclicInitial { jc_10, two_qubit_10 };

struct PhotonAverage {
    double P{0.0};
    double gamma_over_2pi{0.0};
};

/// (1/T) int_0^T <Psi(t)| a^dag a |Psi(t)> dt by the trapezoid rule on
/// n_time_steps intervals (at least 1000).
double average_photon_number(const EigenDecomposition& decomp, std::span<const double> photons,
                             std::span<const double> initial, double T, int n_time_steps);

PhotonAverage average_photon_number(const RabiParams& p, CyclicInitial initial, double T,
                                    int n_time_steps = 4000);

struct TrajectorySample {
    double t{0.0};
    double photons{0.0};
    double fidelity{0.0};
    double norm{0.0};
    double excitations{0.0};   // <a^dag a + (sz1 + sz2 + 2)/2>, constant under RWA
};

std::vector<TrajectorySample> evolve_trajectory(const RabiParams& p, CyclicInitial initial,
                                                double T, int n_time_steps);

/// n * int_0^T phidot(t) dt for a loop schedule phi(t) with phi(0) = 0 and
/// phi(T) = 2 pi: the loop contribution to the dynamical phase of a component
/// with photon number n.
double loop_term(const std::function<double(double)>& phi, double T, double photon_number,
                 int n_time_steps = 4000);

}  // namespace rabigeom
