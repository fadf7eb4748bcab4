// geometry.hpp - Berry connections, curvatures and geometric phases
//
// The loop is R(phi) = exp(-i phi a^dag a), phi: 0 -> 2 pi. For any state the
// integrand i <Psi| R^dag dR/dphi |Psi> equals <a^dag a>, so the Berry phase of
// an eigenstate is 2 pi <a^dag a>. Phases are returned unreduced.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rabigeom/model.hpp"

namespace rabigeom {

enum class PhaseMethod { closed_form, photon_expectation, curvature_integral, weighted_sum, loop_integral };

std::string_view to_string(PhaseMethod m) noexcept;

struct PhaseResult {
    double gamma{0.0};
    PhaseMethod method{PhaseMethod::closed_form};
};

/// Reduces an angle into [0, 2 pi).
double reduce_mod_2pi(double x) noexcept;

// ---------------------------------------------------------------------------
// Eigenstate phases

/// 2 pi sum_i n_i |c_i|^2 for amplitudes c_i on states with photon numbers n_i.
/// Throws NotNormalized when |sum |c_i|^2 - 1| > 1e-10.
PhaseResult berry_phase_eigenstate(std::span<const double> amplitudes,
                                   std::span<const double> photon_numbers);
/// Plain Fock state in FullRabi ordering.
PhaseResult berry_phase_eigenstate(std::span<const double> fock_state, int n_photons);
PhaseResult berry_phase_eigenstate(const BlockEigenpair& pair);
/// Displaced Fock expansion; normalization is 2 sum(d1^2 + d2^2) = 1.
PhaseResult berry_phase_eigenstate(const TruncatedEigenpair& pair, const DisplacedBasis& basis);

struct LoopSpec {
    int n_steps{256};   // at least 64
};

/// Discretized loop integral i oint <Psi| R^dag dR/dphi |Psi> dphi, with R(phi)
/// applied explicitly at every sample. Throws InvalidGrid for n_steps < 64.
PhaseResult berry_phase_loop(std::span<const cplx> amplitudes,
                             std::span<const double> photon_numbers, const LoopSpec& loop = {});

struct JcLabel {
    int k{1};
    int branch{+1};
};
struct TwoQubitLabel {
    int k{1};
    int l{1};   // 1-based ascending energy order within the block
};
/// k = 1 states of the equal-frequency model, l = 1, 2, 3 as in EqualFrequencyK1.
struct EqualFrequencyLabel {
    int l{1};
};
struct AdiabaticLabel {
    int n{0};
    int kappa{1};
    int branch{+1};
};
struct ExceptionalLabel {
    ExceptionalKind kind{ExceptionalKind::even};
    int n{0};   // singlets only
};

using StateLabel =
    std::variant<JcLabel, TwoQubitLabel, EqualFrequencyLabel, AdiabaticLabel, ExceptionalLabel>;

/// Printed closed-form Berry phase for the labelled state, including the
/// 2 pi (k - 1), 2 pi k or 2 n pi windings. Throws LabelError when the label
/// does not apply to `p`.
PhaseResult berry_phase_closed_form(const RabiParams& p, const StateLabel& label);

// ---------------------------------------------------------------------------
// Connections and curvature on the (theta, phi) sphere

enum class StateFamily {
    jc_plus,
    jc_minus,
    two_qubit_1,
    two_qubit_2,
    two_qubit_3,
    noneigen_jc,          // |1>|0>
    noneigen_two_qubit,   // |10>|0>, scaled by cos^2(alpha)
};

/// printed: states exactly as written out. shifted: every state multiplied by
/// exp(i phi), which lowers A_phi by one.
enum class Gauge { printed, shifted };

struct ConnectionSample {
    double theta{0.0};
    double phi{0.0};
    double A_theta{0.0};
    double A_phi{0.0};
    Gauge gauge{Gauge::printed};
};

/// Analytic connection on the product grid thetas x phis. `alpha` enters the
/// two-qubit noneigenstate only.
std::vector<ConnectionSample> connection_field(StateFamily family, std::span<const double> thetas,
                                               std::span<const double> phis, double alpha = 0.0,
                                               Gauge gauge = Gauge::printed);

/// A_phi from the explicit state i <Psi| R^dag(phi) d_phi R(phi) |Psi> at one point.
/// Noneigenstate families use the weighted sum over their eigen-components.
double connection_numeric(StateFamily family, double theta, double phi, double alpha = 0.0,
                          Gauge gauge = Gauge::printed);

struct CurvatureSample {
    double theta{0.0};
    double phi{0.0};
    double F_theta_phi{0.0};
    double F_radial{0.0};   // F_theta_phi / sin(theta) on the unit sphere
};

struct CurvatureField {
    std::vector<CurvatureSample> samples;
    bool accuracy_warning{false};   // theta spacing above 1e-2
};

/// Central differences of A_phi along a uniform theta grid at fixed phi
/// (second-order one-sided at the ends). Throws InvalidGrid for fewer than 3
/// samples or a non-uniform grid.
CurvatureField curvature_from_connection(std::span<const ConnectionSample> samples);

/// 2 pi int_0^theta F dtheta' + pole_offset over the sampled theta range. The
/// offset is 2 pi A_phi(0) for families whose connection does not vanish at
/// the north pole.
PhaseResult phase_by_surface_integral(std::span<const CurvatureSample> samples,
                                      double pole_offset = 0.0);

enum class FieldLabel { eigen_jc, eigen_two_qubit, noneigen_jc, noneigen_two_qubit };

/// Radial curvature on the unit sphere normalized to max |F_radial| = 1 over the grid.
std::vector<CurvatureSample> radial_field(FieldLabel label, std::span<const double> thetas,
                                          std::span<const double> phis, double alpha = 0.0);

// ---------------------------------------------------------------------------
// Noneigenstates

/// sum_n w_n gamma_n. Throws WeightError on size mismatch, negative weights or
/// |sum w - 1| > 1e-10.
PhaseResult noneigen_geometric_phase(std::span<const double> weights,
                                     std::span<const double> gammas);

struct Decomposition {
    std::vector<double> weights;
    std::vector<double> gammas;
    std::vector<double> energies;
};

/// |1>|0> over the JC k = 1 eigenstates {Psi_1^+, Psi_1^-}.
Decomposition noneigen_decomposition_jc(const RabiParams& p);
/// |10>|0> over the k = 1 block eigenstates in ascending energy order.
Decomposition noneigen_decomposition_two_qubit(const RabiParams& p);

/// (1/2) pi (1 - cos 2 theta_1).
double noneigen_phase_jc_closed(const RabiParams& p);
/// (1/2) pi cos^2(alpha) (1 - cos 2 theta_1^2); needs omega1 == omega2.
double noneigen_phase_two_qubit_closed(const RabiParams& p);

/// Vacuum-induced curvature F_theta_phi = (1/2) sin 2 theta_1 of |1>|0>.
double noneigen_curvature_jc(const RabiParams& p);
/// (1/2) sin 2 theta_1^2 cos^2(alpha) of |10>|0>; needs omega1 == omega2.
double noneigen_curvature_two_qubit(const RabiParams& p);

struct BeyondRwaPhase {
    PhaseResult phase;
    double weight_sum{0.0};
    std::size_t components{0};
    bool truncation_warning{false};
};

/// Weighted Berry phase of |10>|0> over both truncated parity sectors.
/// Components with weight below 1e-12 are dropped. Throws WeightError when the
/// captured weight differs from 1 by more than 1e-8.
BeyondRwaPhase noneigen_phase_beyond_rwa(const RabiParams& p, const DisplacedBasis& basis,
                                         InitialFrame frame = InitialFrame::displaced_frame);

// ---------------------------------------------------------------------------
// Anti-crossings

enum class SpectrumMode { rwa, beyond_rwa };

struct AnticrossingRequest {
    RabiParams base;           // g1 and g2 are both replaced by the scanned g
    int kappa{1};
    double g_min{0.2};
    double g_max{0.3};
    int points{201};           // at least 200
    std::pair<int, int> levels{0, 1};   // 0-based indices in the sector, after singlet removal
    SpectrumMode mode{SpectrumMode::beyond_rwa};
    int M{50};
    bool drop_singlets{true};
    int k_max{8};              // RWA mode: blocks 0..k_max contribute
};

struct Anticrossing {
    double g_star{0.0};
    double min_gap{0.0};
    std::vector<double> g;
    std::vector<double> gap;
    /// |<n| a^dag a |m>| / |E_n - E_m| along the scan (beyond-RWA mode).
    std::vector<double> adiabaticity;
    double max_adiabaticity{0.0};
    bool adiabaticity_violated{false};
};

/// Sector levels at coupling g (g1 = g2 = g), ascending.
std::vector<double> sector_levels(const AnticrossingRequest& req, double g);

/// Grid scan plus golden-section refinement of the gap between the requested
/// levels. Throws NoAnticrossing when the minimum sits on the range boundary,
/// or (RWA mode) when the closest approach is an exact crossing of levels from
/// different excitation blocks.
Anticrossing detect_anticrossing(const AnticrossingRequest& req);

/// Tries every adjacent pair among the lowest `max_level + 1` sector levels and
/// returns the narrowest interior anti-crossing together with its pair.
std::pair<Anticrossing, std::pair<int, int>> find_anticrossing(AnticrossingRequest req,
                                                               int max_level = 6);

/// Midpoint of the largest step |gamma_{i+1} - gamma_i| on the grid.
double locate_phase_jump(std::span<const double> g, std::span<const double> gamma);

}  // namespace rabigeom
