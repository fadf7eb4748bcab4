// cli.hpp - scenario configs, sweeps and CSV export behind the rabi-geom tool
//
// Every command turns a ScanConfig into a CsvDataset: a header, numeric rows
// in sweep order, and a JSON sidecar carrying the resolved config, the
// truncations and the convergence-gate result.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rabigeom/errors.hpp"
#include "rabigeom/model.hpp"

namespace rabigeom::cli {

inline constexpr std::string_view version = "0.1.0";

/// Bad config file, flag or parameter combination (exit code 2).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("ConfigError: " + what) {}
};

enum class ModelKind { jc, two_qubit };
enum class Approximation { rwa, full, both };

std::string_view to_string(ModelKind m) noexcept;
std::string_view to_string(Approximation a) noexcept;

struct Sweep {
    std::string variable{"g"};   // g, g1, g2, delta, omega1, omega2
    double start{0.0};
    double stop{0.5};
    int points{51};

    /// "VAR:START:STOP:POINTS". Throws ConfigError.
    static Sweep parse(std::string_view text);
    std::vector<double> values() const;
};

struct ScanConfig {
    std::string command;           // spectrum, berry, curvature-field, noneigen, evolve, scan-anticrossing
    ModelKind model{ModelKind::two_qubit};
    Approximation approximation{Approximation::rwa};
    RabiParams params{1.0, 1.0, 1.0, 0.0, 0.0};
    std::optional<Sweep> sweep;
    std::vector<double> detunings;   // noneigen / scan-anticrossing; empty: use params
    int M{50};
    std::optional<int> n_photons;    // plain Fock basis instead of displaced (spectrum, berry)
    std::string out;                 // empty: CSV on stdout, sidecar on stderr
    bool drop_singlets{false};
    int levels{6};                   // spectrum: levels per parity sector
    int kappa{1};                    // scan-anticrossing sector
    int theta_points{91};
    int phi_points{37};
    int time_steps{4000};
    int cycles{1};                   // JC evolve

    bool uses_rwa() const noexcept { return approximation != Approximation::full; }
    bool uses_full() const noexcept { return approximation != Approximation::rwa; }

    /// Throws ConfigError naming the offending field.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Overlays the keys present in `j` onto `cfg`. Unknown keys and type errors
/// raise ConfigError with the field path. A sidecar written by this tool is
/// accepted too (its "config" member is used).
void apply_json(ScanConfig& cfg, const nlohmann::json& j);

/// Parses JSON text; syntax errors report line and column of `source`.
nlohmann::json parse_config_text(std::string_view text, std::string_view source);
ScanConfig load_config(const std::string& path, ScanConfig base);

/// Parameters at one sweep value. `delta` moves omega1 (and omega2 for the
/// two-qubit model) to omega_c + delta; `g` sets g1 (and g2).
RabiParams apply_sweep(const ScanConfig& cfg, const RabiParams& p, double value);
/// omega1 (and omega2) = omega_c + delta.
RabiParams with_detuning(const ScanConfig& cfg, RabiParams p, double delta);

/// Configs behind fig1 ... fig5; fig2 yields one config per panel.
std::vector<ScanConfig> preset(std::string_view name);

struct GateResult {
    bool applicable{false};
    std::string quantity;    // "phase" or "energy"
    int M{0};
    int M_next{0};
    double max_drift{0.0};
    double threshold{1e-6};

    bool passed() const noexcept { return !applicable || max_drift < threshold; }
    nlohmann::json to_json() const;
};

struct CsvDataset {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    nlohmann::json metadata = nlohmann::json::object();
    GateResult gate;

    /// Throws Error on a ragged row or a non-finite value.
    void check() const;
    /// 17 significant digits, '.' decimal point, '\n' line endings.
    std::string to_csv() const;
    /// Metadata plus config, truncation, version and gate.
    nlohmann::json sidecar(const ScanConfig& cfg) const;
};

/// "%.17g" with negative zero printed as 0.
std::string format_number(double x);

/// Writes `path` and its sidecar (same stem, .json extension).
void write_dataset(const CsvDataset& data, const ScanConfig& cfg, const std::string& path);
std::string sidecar_path(const std::string& csv_path);

/// Hardware concurrency, capped by RABI_GEOM_THREADS when set.
unsigned thread_count();

CsvDataset cmd_spectrum(const ScanConfig& cfg);
CsvDataset cmd_berry(const ScanConfig& cfg);
CsvDataset cmd_curvature_field(const ScanConfig& cfg);
CsvDataset cmd_noneigen(const ScanConfig& cfg);
CsvDataset cmd_evolve(const ScanConfig& cfg);
CsvDataset cmd_scan_anticrossing(const ScanConfig& cfg);

/// Dispatches on cfg.command after validation.
CsvDataset run_command(const ScanConfig& cfg);

/// Full command-line entry point; returns the process exit code
/// (0 ok, 2 config error, 3 convergence gate failed, 4 no rational period or
/// no anti-crossing, 1 anything else).
int run(int argc, const char* const* argv);

}  // namespace rabigeom::cli
