// model.hpp - Hamiltonians of the one- and two-qubit quantum Rabi model
//
// Energies and times are in units of the field frequency; omega_c defaults
// to 1 and every routine accepts other values consistently.
//
// Qubit product states are ordered |11>, |10>, |01>, |00> throughout, with
// |1> the upper sigma^z state. Photon-number bases are truncated explicitly.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "rabigeom/numerics.hpp"

namespace rabigeom {

struct RabiParams {
    double omega_c{1.0};
    double omega1{1.0};
    double omega2{0.0};
    double g1{0.0};
    double g2{0.0};

    /// Throws InvalidParams unless omega_c > 0, g1, g2 >= 0 and all fields finite.
    void validate() const;

    /// Delta = omega1 - omega_c, used for both qubits.
    double detuning() const noexcept { return omega1 - omega_c; }

    /// Single-qubit (Jaynes-Cummings) reduction: omega2 = g2 = 0.
    static RabiParams jc(double detuning, double g1, double omega_c = 1.0);
    /// Identical qubits with equal coupling: omega1 = omega2 = omega_c + detuning, g1 = g2 = g.
    static RabiParams homogeneous(double detuning, double g, double omega_c = 1.0);
};

struct SpectralAngles {
    int k{0};
    double Omega_k{0.0};   // sqrt(Delta^2 + 4 g1^2 k)
    double theta_k{0.0};   // arccos(Delta / Omega_k), in [0, pi]
    double Theta_1{0.0};   // sqrt(Delta^2 + 4 (g1^2 + g2^2))
    double alpha{0.0};     // cos(alpha) = g1 / sqrt(g1^2 + g2^2), in [0, pi/2]
};

SpectralAngles spectral_angles(const RabiParams& p, int k);

/// Mixing angle of a 2x2 problem with splitting `detuning` and Rabi frequency `rabi`.
/// At rabi == 0 the angle is 0 for detuning >= 0 and pi otherwise.
double mixing_angle(double detuning, double rabi) noexcept;

// ---------------------------------------------------------------------------
// Jaynes-Cummings closed forms

struct JcEigensystem {
    int k{0};
    double Omega{0.0};
    double theta{0.0};
    double energy_plus{0.0};
    double energy_minus{0.0};
    /// Amplitudes on {|1,k-1>, |0,k>}. For k = 0 both hold the single state |0,0>.
    std::array<double, 2> plus{};
    std::array<double, 2> minus{};
};

/// Throws NotJCReduction unless omega2 == 0 and g2 == 0.
JcEigensystem jc_eigensystem(const RabiParams& p, int k);

/// 2x2 excitation block of the JC model on {|1,k-1>, |0,k>} (k >= 1).
SymMatrix jc_block(const RabiParams& p, int k);

// ---------------------------------------------------------------------------
// Two-qubit model under the rotating-wave approximation

enum class Qubits : int { q11 = 0, q10 = 1, q01 = 2, q00 = 3 };

struct BlockBasisState {
    Qubits qubits;
    int photons;
};

/// Basis of the excitation subspace chi_k: 1, 3 or 4 states for k = 0, 1, >= 2.
std::vector<BlockBasisState> block_basis(int k);

/// H_0, H_1 or H_k as a 1x1, 3x3 or 4x4 matrix on block_basis(k).
SymMatrix build_block(const RabiParams& p, int k);

struct BlockEigenpair {
    int k{0};
    int l{0};              // 1-based position in ascending energy order
    double energy{0.0};
    /// (a, b, c, d) amplitudes of |11,k-2>, |10,k-1>, |01,k-1>, |00,k>;
    /// slots absent from chi_k are zero.
    std::array<double, 4> coeffs{};

    double s_k() const noexcept { return coeffs[3] * coeffs[3] - coeffs[0] * coeffs[0]; }
    /// Amplitudes in block_basis(k) order.
    std::vector<double> block_vector() const;
};

std::vector<BlockEigenpair> solve_block(const RabiParams& p, int k);

/// Index of the exchange-antisymmetric level (|10,k-1> - |01,k-1>)/sqrt(2), which
/// sits at E = (k-1) omega_c, within solve_block(p, k). Empty unless k >= 1,
/// omega1 == omega2 and g1 == g2. Robust to degeneracy with a symmetric level.
std::optional<std::size_t> block_singlet(const RabiParams& p, const std::vector<BlockEigenpair>& pairs);

/// Photon numbers of block_basis(k).
std::vector<double> block_photon_numbers(int k);

/// k = 1 eigensystem for omega1 == omega2, labelled l = 1, 2, 3:
/// l = 1 has E = 0, l = 2 has E = (-Delta + Theta_1)/2, l = 3 has E = (-Delta - Theta_1)/2.
struct EqualFrequencyK1 {
    double Theta_1{0.0};
    double alpha{0.0};
    std::array<double, 3> theta{};    // theta_1^1 = 0, theta_1^2, theta_1^3 = theta_1^2 + pi
    std::array<double, 3> energy{};
    /// Amplitudes (b, c, d) of each state on {|10,0>, |01,0>, |00,1>}.
    std::array<std::array<double, 3>, 3> states{};
    std::array<double, 3> phi0_plus{};
    std::array<double, 3> phi0_minus{};
    std::array<double, 3> phi1{};
};

/// Throws NotEqualFrequency when |omega1 - omega2| > 1e-12.
EqualFrequencyK1 equal_frequency_k1(const RabiParams& p);

// ---------------------------------------------------------------------------
// Full model in the plain Fock basis

/// Index of |q1 q2> x |n> is qubit_index * (n_photons + 1) + n.
struct FullRabi {
    int n_photons{0};
    SymMatrix hamiltonian{1};
    std::vector<int> parity;   // eigenvalue of sigma1^z sigma2^z (-1)^(a^dag a)

    std::size_t index(Qubits q, int n) const noexcept {
        return static_cast<std::size_t>(q) * static_cast<std::size_t>(n_photons + 1) +
               static_cast<std::size_t>(n);
    }
    int photons(std::size_t i) const noexcept { return static_cast<int>(i % (n_photons + 1)); }
    std::size_t dim() const noexcept { return parity.size(); }
    std::vector<std::size_t> sector_indices(int kappa) const;
};

/// Throws InvalidParams for n_photons < 10.
FullRabi build_full_rabi(const RabiParams& p, int n_photons);

struct FockEigenpair {
    double energy{0.0};
    std::vector<double> state;    // full-space amplitudes
    double photon_number{0.0};
};

struct FockSectorSolution {
    int kappa{1};
    std::vector<FockEigenpair> pairs;
    double top_population{0.0};   // ground-state weight at n = n_photons
    bool truncation_warning{false};
};

FockSectorSolution solve_full_rabi_sector(const FullRabi& full, int kappa);

/// Default plain-Fock cutoff matched to a displaced truncation M.
constexpr int default_photon_cutoff(int M) { return 4 * (M + 1); }

// ---------------------------------------------------------------------------
// Displaced Fock states and the beyond-RWA sector problem

/// <m| D(delta) |n> for real delta, D(delta) = exp(delta (a^dag - a)).
double displaced_overlap(int m, int n, double delta);

/// Displacements of the sigma^x-frame qubit states |11>, |10>, |01>, |00>.
struct DisplacedBasis {
    int M{50};
    std::array<double, 4> betas{};

    static DisplacedBasis for_params(const RabiParams& p, int M = 50);
};

struct AdiabaticSolution {
    int kappa{1};
    int n{0};
    int branch{1};     // +1 or -1
    double energy{0.0};
    double d1{0.0};
    double d2{0.0};
    double xi{0.0};
    double mu{0.0};
    double Omega{0.0};
};

/// Adiabatic eigenpair for displaced level n and parity kappa: {+ branch, - branch}.
std::array<AdiabaticSolution, 2> adiabatic_eigensystem(const RabiParams& p, int n, int kappa);

/// Eigenstate in a parity sector of the truncated displaced Fock space. The
/// coefficients multiply the sector basis states |11>|n>_A1 + kappa(-1)^n |00>|n>_A4
/// and |10>|n>_A2 + kappa(-1)^n |01>|n>_A3, so 2 * sum(d1^2 + d2^2) = 1.
struct TruncatedEigenpair {
    int kappa{1};
    double energy{0.0};
    std::vector<double> d1;
    std::vector<double> d2;
    /// Expectation of the qubit swap; present only when the swap preserves the
    /// basis (g1 == g2).
    std::optional<double> exchange;

    /// Exchange-antisymmetric (spin singlet) state.
    bool is_singlet() const noexcept { return exchange && *exchange < -0.5; }
};

struct TruncatedSolution {
    int kappa{1};
    std::vector<TruncatedEigenpair> pairs;
    double top_population{0.0};   // largest weight at n = M among low-lying states
    bool truncation_warning{false};
};

/// Number of lowest states checked for truncation leakage.
constexpr std::size_t low_lying_count = 10;

SymMatrix build_displaced_sector(const RabiParams& p, const DisplacedBasis& basis, int kappa);

/// Throws InvalidParams for M < 10 or kappa not in {+1, -1}.
TruncatedSolution truncated_parity_solve(const RabiParams& p, const DisplacedBasis& basis,
                                         int kappa);

/// Qubit frame for product states with the field in vacuum.
enum class InitialFrame {
    bare,             // sigma^z eigenstates, the frame of the RWA sections
    displaced_frame,  // sigma^x-frame states labelling the displaced Fock expansion
};

/// <q1 q2, 0| Psi> for the four qubit product states in the given frame.
std::array<double, 4> vacuum_amplitudes(const TruncatedEigenpair& pair,
                                        const DisplacedBasis& basis, InitialFrame frame);

/// Converts a sector eigenstate to plain Fock amplitudes (FullRabi ordering).
std::vector<double> to_fock(const TruncatedEigenpair& pair, const DisplacedBasis& basis,
                            int n_photons);

/// <a| a^dag a |b> between two eigenstates of the same sector (0 across sectors).
double photon_matrix_element(const TruncatedEigenpair& a, const TruncatedEigenpair& b,
                             const DisplacedBasis& basis);

// ---------------------------------------------------------------------------
// Exact solutions that survive beyond the RWA

enum class ExceptionalKind { singlet, even, odd };

struct ExceptionalState {
    ExceptionalKind kind{ExceptionalKind::singlet};
    int n{0};                    // photon number of a singlet
    double energy{0.0};
    double q{0.0};               // q_e or q_o; 0 for singlets
    std::vector<double> state;   // plain Fock amplitudes, FullRabi ordering
};

/// Singlets need omega1 == omega2 and g1 == g2; psi_e needs g1 == g2 and
/// omega1 + omega2 == 2 omega_c; psi_o needs g1 == g2 and omega1 - omega2 == 2 omega_c.
std::vector<ExceptionalState> exceptional_states(const RabiParams& p, int n_photons);

}  // namespace rabigeom
