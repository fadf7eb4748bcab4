#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "rabigeom/cli.hpp"

namespace rabigeom::cli {

namespace {

struct Flags {
    std::optional<std::string> model;
    bool rwa{false};
    bool full{false};
    std::optional<double> omega1;
    std::optional<double> omega2;
    std::optional<double> g1;
    std::optional<double> g2;
    std::optional<double> delta;
    std::optional<std::string> sweep;
    std::optional<int> trunc_m;
    std::optional<int> trunc_photons;
    std::optional<std::string> out;
    std::optional<std::string> config;
    bool drop_singlets{false};
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--model", f.model, "jc or two-qubit")->check(CLI::IsMember({"jc", "two-qubit"}));
    sub->add_flag("--rwa", f.rwa, "rotating-wave approximation (with --full: both)");
    sub->add_flag("--full", f.full, "beyond the rotating-wave approximation");
    sub->add_option("--omega1", f.omega1, "qubit 1 frequency in units of omega_c");
    sub->add_option("--omega2", f.omega2, "qubit 2 frequency");
    sub->add_option("--g1", f.g1, "qubit 1 coupling");
    sub->add_option("--g2", f.g2, "qubit 2 coupling");
    sub->add_option("--delta", f.delta, "detuning omega_j - omega_c for both qubits");
    sub->add_option("--sweep", f.sweep, "VAR:START:STOP:POINTS with VAR in g, g1, g2, delta, omega1, omega2");
    sub->add_option("--trunc-m", f.trunc_m, "displaced Fock truncation M (default 50)");
    sub->add_option("--trunc-photons", f.trunc_photons, "use the plain Fock basis with this photon cutoff");
    sub->add_option("--out", f.out, "CSV path; the sidecar gets the .json extension");
    sub->add_option("--config", f.config, "JSON config; flags override it");
    sub->add_flag("--drop-singlets", f.drop_singlets, "omit exchange-antisymmetric levels E = n omega_c");
}

void apply_flags(ScanConfig& cfg, const Flags& f) {
    if (f.model) cfg.model = *f.model == "jc" ? ModelKind::jc : ModelKind::two_qubit;
    if (cfg.model == ModelKind::jc && !f.omega2 && !f.g2) {
        cfg.params.omega2 = 0.0;
        cfg.params.g2 = 0.0;
    }
    if (f.rwa && f.full) cfg.approximation = Approximation::both;
    else if (f.rwa) cfg.approximation = Approximation::rwa;
    else if (f.full) cfg.approximation = Approximation::full;
    if (f.delta) {
        if (f.omega1) throw ConfigError("--delta conflicts with --omega1");
        cfg.params = with_detuning(cfg, cfg.params, *f.delta);
    }
    if (f.omega1) cfg.params.omega1 = *f.omega1;
    if (f.omega2) cfg.params.omega2 = *f.omega2;
    if (f.g1) cfg.params.g1 = *f.g1;
    if (f.g2) cfg.params.g2 = *f.g2;
    if (f.sweep) cfg.sweep = Sweep::parse(*f.sweep);
    if (f.trunc_m) cfg.M = *f.trunc_m;
    if (f.trunc_photons) cfg.n_photons = *f.trunc_photons;
    if (f.drop_singlets) cfg.drop_singlets = true;
}

// fig2 writes one file per panel: x.csv -> x_a.csv, x_b.csv.
std::string panel_path(const std::string& out, std::size_t i, std::size_t n) {
    if (n == 1) return out;
    std::filesystem::path p(out);
    const std::string stem = p.stem().string() + "_" + static_cast<char>('a' + i);
    return (p.parent_path() / (stem + p.extension().string())).string();
}

int execute(const std::string& name, const Flags& f) {
    const bool is_preset = name.rfind("fig", 0) == 0;
    std::vector<ScanConfig> configs;
    if (is_preset) {
        configs = preset(name);
    } else {
        ScanConfig c;
        c.command = name;
        configs.push_back(c);
    }

    bool gate_failed = false;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        ScanConfig& cfg = configs[i];
        if (f.config) {
            const std::string command = cfg.command;
            cfg = load_config(*f.config, cfg);
            cfg.command = command;
        }
        apply_flags(cfg, f);
        if (cfg.command == "scan-anticrossing") cfg.approximation = Approximation::full;
        if (f.out) cfg.out = panel_path(*f.out, i, configs.size());
        cfg.validate();

        const CsvDataset data = run_command(cfg);
        if (cfg.out.empty()) {
            std::cout << data.to_csv();
            std::cerr << data.sidecar(cfg).dump(2) << '\n';
        } else {
            write_dataset(data, cfg, cfg.out);
            std::cerr << "rabi-geom: wrote " << cfg.out << " (" << data.rows.size() << " rows), gate "
                      << (data.gate.applicable ? (data.gate.passed() ? "passed" : "FAILED") : "n/a") << '\n';
        }
        if (!data.gate.passed()) {
            std::cerr << "rabi-geom: convergence gate failed: " << data.gate.quantity << " drift "
                      << data.gate.max_drift << " between M=" << data.gate.M << " and M=" << data.gate.M_next
                      << '\n';
            gate_failed = true;
        }
    }
    return gate_failed ? 3 : 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Spectra, Berry curvature and geometric phases of the one- and two-qubit quantum Rabi model",
                 "rabi-geom"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Flags flags;
    const std::pair<const char*, const char*> commands[] = {
        {"spectrum", "sector-resolved energies along a sweep"},
        {"berry", "Berry phases of Psi_0, Psi_1^2, Psi_1^3 and their beyond-RWA counterparts"},
        {"curvature-field", "normalized radial curvature on the unit sphere"},
        {"noneigen", "curvature and geometric phase of |1>|0> or |10>|0>"},
        {"evolve", "cyclic vacuum-to-vacuum evolution with its phases"},
        {"scan-anticrossing", "gap minimum versus the noneigenstate phase jump"},
        {"fig1", "preset: curvature on the unit sphere"},
        {"fig2", "preset: noneigenstate curvature and phase under the RWA (two panels)"},
        {"fig3", "preset: spectra with and without the RWA, Delta = 0.5"},
        {"fig4", "preset: eigenstate Berry phases with and without the RWA"},
        {"fig5", "preset: noneigenstate phases with and without the RWA"},
    };
    for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 2;
    }

    try {
        return execute(app.get_subcommands().front()->get_name(), flags);
    } catch (const ConfigError& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 2;
    } catch (const NoRational& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 4;
    } catch (const NoAnticrossing& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 4;
    } catch (const InvalidParams& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 2;
    } catch (const NotJCReduction& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 2;
    } catch (const NotEqualFrequency& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "rabi-geom: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace rabigeom::cli
