#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "rabigeom/cli.hpp"
#include "rabigeom/dynamics.hpp"
#include "rabigeom/geometry.hpp"

namespace rabigeom::cli {

using nlohmann::json;

namespace {

using Row = std::vector<double>;
using Rows = std::vector<Row>;

// f(i) for i < n on up to thread_count() workers; results stay in index order
// and the first failing index rethrows.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{0}))> {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> out(n);
    std::vector<std::exception_ptr> err(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                err[i] = std::current_exception();
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    for (auto& e : err) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

bool homogeneous(const RabiParams& p) { return p.omega1 == p.omega2 && p.g1 == p.g2; }

Sweep sweep_or(const ScanConfig& cfg, Sweep fallback) { return cfg.sweep ? *cfg.sweep : fallback; }

// Sweep values paired with their detuning; rows come out detuning-major.
struct Point {
    double delta;
    double x;
    RabiParams p;
};

std::vector<Point> detuning_grid(const ScanConfig& cfg, const Sweep& sweep) {
    ScanConfig c = cfg;
    c.sweep = sweep;
    std::vector<double> deltas = cfg.detunings;
    if (deltas.empty()) deltas.push_back(cfg.params.detuning());
    std::vector<Point> out;
    for (double d : deltas) {
        const RabiParams base = cfg.detunings.empty() ? cfg.params : with_detuning(cfg, cfg.params, d);
        for (double x : sweep.values()) {
            const RabiParams p = apply_sweep(c, base, x);
            // Report the requested detuning, not omega1 - omega_c after rounding.
            out.push_back({sweep.variable == "delta" ? x : cfg.detunings.empty() ? p.detuning() : d, x, p});
        }
    }
    return out;
}

double exchange_of(const FullRabi& full, std::span<const double> psi) {
    double s = 0.0;
    for (int n = 0; n <= full.n_photons; ++n) {
        const double a = psi[full.index(Qubits::q11, n)];
        const double b = psi[full.index(Qubits::q10, n)];
        const double c = psi[full.index(Qubits::q01, n)];
        const double d = psi[full.index(Qubits::q00, n)];
        s += a * a + d * d + 2.0 * b * c;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Sector spectra

struct RwaLevel {
    double energy;
    int k;
    int l;
};

std::vector<RwaLevel> rwa_sector(const ScanConfig& cfg, const RabiParams& p, int parity, int count) {
    const bool drop = cfg.drop_singlets && homogeneous(p);
    std::vector<RwaLevel> out;
    const int k_max = 2 * count + 4;
    for (int k = 0; k <= k_max; ++k) {
        if ((k % 2 == 0 ? 1 : -1) != parity) continue;
        if (cfg.model == ModelKind::jc) {
            const auto es = jc_eigensystem(p, k);
            if (k == 0) {
                out.push_back({es.energy_minus, 0, 1});
            } else {
                out.push_back({es.energy_minus, k, 1});
                out.push_back({es.energy_plus, k, 2});
            }
            continue;
        }
        const auto pairs = solve_block(p, k);
        const auto singlet = drop ? block_singlet(p, pairs) : std::nullopt;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (singlet && *singlet == i) continue;
            out.push_back({pairs[i].energy, k, pairs[i].l});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RwaLevel& a, const RwaLevel& b) { return a.energy < b.energy; });
    return out;
}

// Beyond-RWA eigenpairs of one sector, singlets removed on request, as
// (energy, Berry phase) in ascending energy.
struct FullLevel {
    double energy;
    double gamma;
    double top_population;
};

std::vector<FullLevel> full_sector(const ScanConfig& cfg, const RabiParams& p, int kappa, int truncation) {
    const bool drop = cfg.drop_singlets && homogeneous(p);
    std::vector<FullLevel> out;
    if (cfg.n_photons) {
        const auto full = build_full_rabi(p, truncation);
        const auto sol = solve_full_rabi_sector(full, kappa);
        for (const auto& e : sol.pairs) {
            if (drop && exchange_of(full, e.state) < -0.5) continue;
            out.push_back({e.energy, berry_phase_eigenstate(e.state, full.n_photons).gamma, sol.top_population});
        }
    } else {
        const auto basis = DisplacedBasis::for_params(p, truncation);
        const auto sol = truncated_parity_solve(p, basis, kappa);
        for (const auto& e : sol.pairs) {
            if (drop && e.is_singlet()) continue;
            out.push_back({e.energy, berry_phase_eigenstate(e, basis).gamma, sol.top_population});
        }
    }
    return out;
}

int base_truncation(const ScanConfig& cfg) { return cfg.n_photons ? *cfg.n_photons : cfg.M; }

GateResult gate_for(const ScanConfig& cfg, std::string quantity, double drift) {
    GateResult g;
    g.applicable = true;
    g.quantity = std::move(quantity);
    g.M = base_truncation(cfg);
    g.M_next = g.M + 10;
    g.max_drift = drift;
    return g;
}

// Largest |<n|a^dag a|m>| / |E_n - E_m| over adjacent low-lying levels that both
// carry weight of |10>|0>, in either sector.
double max_adiabaticity(const RabiParams& p, const DisplacedBasis& basis) {
    const bool drop = homogeneous(p);
    double worst = 0.0;
    for (int kappa : {1, -1}) {
        const auto sol = truncated_parity_solve(p, basis, kappa);
        std::vector<const TruncatedEigenpair*> kept;
        for (const auto& e : sol.pairs) {
            if (drop && e.is_singlet()) continue;
            kept.push_back(&e);
            if (kept.size() > low_lying_count) break;
        }
        auto weight = [&](const TruncatedEigenpair& e) {
            const double a = vacuum_amplitudes(e, basis, InitialFrame::displaced_frame)[static_cast<int>(Qubits::q10)];
            return a * a;
        };
        for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
            if (weight(*kept[i]) < 1e-6 || weight(*kept[i + 1]) < 1e-6) continue;
            const double gap = std::abs(kept[i + 1]->energy - kept[i]->energy);
            const double num = std::abs(photon_matrix_element(*kept[i], *kept[i + 1], basis));
            worst = std::max(worst, num / std::max(gap, 1e-300));
        }
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------------------

CsvDataset cmd_spectrum(const ScanConfig& cfg) {
    const Sweep sweep = sweep_or(cfg, Sweep{"g", 0.0, 0.5, 51});
    ScanConfig c = cfg;
    c.sweep = sweep;
    const auto xs = sweep.values();

    struct Out {
        Rows rows;
        double drift{0.0};
        double top{0.0};
    };
    const auto results = parallel_map(xs.size(), [&](std::size_t i) {
        Out o;
        const RabiParams p = apply_sweep(c, cfg.params, xs[i]);
        for (int parity : {1, -1}) {
            if (cfg.uses_rwa()) {
                const auto lv = rwa_sector(cfg, p, parity, cfg.levels);
                for (int j = 0; j < cfg.levels && j < static_cast<int>(lv.size()); ++j) {
                    o.rows.push_back({xs[i], 0.0, double(parity), double(j), lv[j].energy});
                }
            }
            if (cfg.uses_full()) {
                const auto a = full_sector(cfg, p, parity, base_truncation(cfg));
                const auto b = full_sector(cfg, p, parity, base_truncation(cfg) + 10);
                for (int j = 0; j < cfg.levels && j < static_cast<int>(a.size()); ++j) {
                    o.rows.push_back({xs[i], 1.0, double(parity), double(j), a[j].energy});
                    o.drift = std::max(o.drift, std::abs(a[j].energy - b[j].energy));
                }
                if (!a.empty()) o.top = std::max(o.top, a.front().top_population);
            }
        }
        return o;
    });

    CsvDataset d;
    d.header = {sweep.variable, "mode", "parity", "level", "energy"};
    double drift = 0.0;
    double top = 0.0;
    for (const auto& r : results) {
        for (const auto& row : r.rows) d.rows.push_back(row);
        drift = std::max(drift, r.drift);
        top = std::max(top, r.top);
    }
    d.metadata["columns_legend"] = {{"mode", "0 = RWA, 1 = beyond RWA"},
                                    {"parity", "+1 even, -1 odd; RWA block k has parity (-1)^k"},
                                    {"level", "0-based ascending index within the sector"}};
    if (cfg.uses_full()) {
        d.gate = gate_for(cfg, "energy", drift);
        d.metadata["max_top_population"] = top;
    }
    return d;
}

CsvDataset cmd_berry(const ScanConfig& cfg) {
    if (cfg.model != ModelKind::two_qubit) throw ConfigError("model: berry compares two-qubit states");
    const Sweep sweep = sweep_or(cfg, Sweep{"g", 0.0, 0.5, 51});
    ScanConfig c = cfg;
    c.sweep = sweep;
    const auto xs = sweep.values();

    // Psi_1^2 is the upper and Psi_1^3 the lower k = 1 level, i.e. block
    // positions 3 and 1 in ascending order.
    struct Target {
        int k;
        int l;
        int block_l;
        int parity;
    };
    static constexpr Target targets[] = {{0, 1, 1, 1}, {1, 2, 3, -1}, {1, 3, 1, -1}};

    struct Out {
        Rows rows;
        double drift{0.0};
    };
    const auto results = parallel_map(xs.size(), [&](std::size_t i) {
        Out o;
        const RabiParams p = apply_sweep(c, cfg.params, xs[i]);
        const bool equal = p.omega1 == p.omega2;
        for (const auto& t : targets) {
            const double gamma_rwa =
                t.k == 1 && equal ? berry_phase_closed_form(p, EqualFrequencyLabel{t.l}).gamma
                                  : berry_phase_closed_form(p, TwoQubitLabel{t.k, t.block_l}).gamma;
            Row row{xs[i], double(t.k), double(t.l), double(t.parity)};
            if (cfg.uses_rwa()) row.push_back(gamma_rwa);
            if (cfg.uses_full()) {
                // The beyond-RWA counterpart holds the same rank in its sector.
                const auto lv = rwa_sector(cfg, p, t.parity, 4);
                std::size_t rank = 0;
                while (rank < lv.size() && !(lv[rank].k == t.k && lv[rank].l == t.block_l)) ++rank;
                const auto a = full_sector(cfg, p, t.parity, base_truncation(cfg));
                const auto b = full_sector(cfg, p, t.parity, base_truncation(cfg) + 10);
                row.push_back(a.at(rank).gamma);
                o.drift = std::max(o.drift, std::abs(a.at(rank).gamma - b.at(rank).gamma));
            }
            o.rows.push_back(std::move(row));
        }
        return o;
    });

    CsvDataset d;
    d.header = {sweep.variable, "k", "l", "parity"};
    if (cfg.uses_rwa()) d.header.push_back("gamma_rwa");
    if (cfg.uses_full()) d.header.push_back("gamma_full");
    double drift = 0.0;
    for (const auto& r : results) {
        for (const auto& row : r.rows) d.rows.push_back(row);
        drift = std::max(drift, r.drift);
    }
    d.metadata["columns_legend"] = {
        {"k,l", "RWA state Psi_k^l: (0,1) ground, (1,2) upper and (1,3) lower k = 1 level"},
        {"gamma_full", "beyond-RWA eigenstate at the same rank within its parity sector"}};
    if (cfg.uses_full()) d.gate = gate_for(cfg, "phase", drift);
    return d;
}

CsvDataset cmd_curvature_field(const ScanConfig& cfg) {
    const auto thetas = linspace(0.0, std::numbers::pi, static_cast<std::size_t>(cfg.theta_points));
    const auto phis = cfg.phi_points == 1 ? std::vector<double>{0.0}
                                          : linspace(0.0, 2.0 * std::numbers::pi,
                                                     static_cast<std::size_t>(cfg.phi_points));
    const double g1 = cfg.params.g1;
    const double g2 = cfg.model == ModelKind::jc ? 0.0 : cfg.params.g2;
    const double alpha = (g1 == 0.0 && g2 == 0.0) ? std::numbers::pi / 4.0 : std::atan2(g2, g1);

    static constexpr FieldLabel labels[] = {FieldLabel::eigen_jc, FieldLabel::eigen_two_qubit,
                                            FieldLabel::noneigen_jc, FieldLabel::noneigen_two_qubit};
    const auto fields = parallel_map(std::size(labels), [&](std::size_t i) {
        return radial_field(labels[i], thetas, phis, alpha);
    });

    CsvDataset d;
    d.header = {"label", "theta", "phi", "F_radial"};
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (const auto& s : fields[i]) d.rows.push_back({double(i), s.theta, s.phi, s.F_radial});
    }
    d.metadata["labels"] = {"eigen_jc", "eigen_two_qubit", "noneigen_jc", "noneigen_two_qubit"};
    d.metadata["alpha"] = alpha;
    return d;
}

CsvDataset cmd_noneigen(const ScanConfig& cfg) {
    const Sweep sweep = sweep_or(cfg, Sweep{"g", 0.0, 0.2, 201});
    if (!cfg.detunings.empty() && sweep.variable == "delta") {
        throw ConfigError("detunings: cannot be combined with a delta sweep");
    }
    const auto points = detuning_grid(cfg, sweep);
    const bool jc = cfg.model == ModelKind::jc;

    struct Out {
        Row row;
        double drift{0.0};
    };
    const auto results = parallel_map(points.size(), [&](std::size_t i) {
        const auto& pt = points[i];
        Out o;
        o.row = {pt.x, pt.delta, jc ? noneigen_curvature_jc(pt.p) : noneigen_curvature_two_qubit(pt.p)};
        if (cfg.uses_rwa()) o.row.push_back(jc ? noneigen_phase_jc_closed(pt.p) : noneigen_phase_two_qubit_closed(pt.p));
        if (cfg.uses_full()) {
            const auto basis = DisplacedBasis::for_params(pt.p, cfg.M);
            const double a = noneigen_phase_beyond_rwa(pt.p, basis).phase.gamma;
            const double b = noneigen_phase_beyond_rwa(pt.p, DisplacedBasis::for_params(pt.p, cfg.M + 10)).phase.gamma;
            const double ad = max_adiabaticity(pt.p, basis);
            o.row.push_back(a);
            o.row.push_back(ad > 1.0 ? 1.0 : 0.0);
            o.row.push_back(ad);
            o.drift = std::abs(a - b);
        }
        return o;
    });

    CsvDataset d;
    d.header = {sweep.variable, "delta", "F_theta_phi"};
    if (cfg.uses_rwa()) d.header.push_back("gamma_rwa");
    if (cfg.uses_full()) {
        d.header.push_back("gamma_full");
        d.header.push_back("adiabatic_invalid");
        d.header.push_back("max_adiabaticity");
    }
    double drift = 0.0;
    for (const auto& r : results) {
        d.rows.push_back(r.row);
        drift = std::max(drift, r.drift);
    }
    if (cfg.uses_full()) {
        d.gate = gate_for(cfg, "phase", drift);
        d.metadata["columns_legend"] = {
            {"gamma_full", "|10>|0> in the sigma^x frame of the displaced basis, both parity sectors"},
            {"adiabatic_invalid", "1 where |<n|a^dag a|m>| / |E_n - E_m| > 1 for adjacent populated levels"}};
    }
    return d;
}

CsvDataset cmd_evolve(const ScanConfig& cfg) {
    const RabiParams& p = cfg.params;
    const bool jc = cfg.model == ModelKind::jc;
    const CyclicResult r = jc ? cyclic_evolution_jc(p, cfg.cycles) : cyclic_evolution_two_qubit(p);
    const auto init = jc ? CyclicInitial::jc_10 : CyclicInitial::two_qubit_10;
    const auto avg = average_photon_number(p, init, r.period, cfg.time_steps);
    const auto traj = evolve_trajectory(p, init, r.period, cfg.time_steps);

    CsvDataset d;
    d.header = {"row", "t", "photons", "fidelity", "T", "p", "q", "Gamma", "dynamical_phase", "beta",
                "P", "gamma_over_2pi"};
    for (const auto& s : traj) d.rows.push_back({0.0, s.t, s.photons, s.fidelity, 0, 0, 0, 0, 0, 0, 0, 0});
    d.rows.push_back({1.0, r.period, avg.P, r.fidelity, r.period, double(r.p), double(r.q), r.total_phase,
                      r.dynamical_phase, r.aa_phase, avg.P, avg.gamma_over_2pi});
    d.metadata["summary"] = {{"T", r.period},
                             {"p", r.p},
                             {"q", r.q},
                             {"Gamma", r.total_phase},
                             {"dynamical_phase", r.dynamical_phase},
                             {"beta", r.aa_phase},
                             {"beta_mod_2pi", r.aa_phase_reduced},
                             {"beta_formula", r.aa_phase_formula},
                             {"gamma", r.geometric_phase},
                             {"fidelity", r.fidelity},
                             {"P", avg.P},
                             {"gamma_over_2pi", avg.gamma_over_2pi}};
    d.metadata["columns_legend"] = {{"row", "0 = trajectory sample, 1 = summary (t = T, photons = P)"}};
    return d;
}

CsvDataset cmd_scan_anticrossing(const ScanConfig& cfg) {
    const Sweep sweep = sweep_or(cfg, Sweep{"g", 0.2, 0.32, 241});
    std::vector<double> deltas = cfg.detunings;
    if (deltas.empty()) deltas.push_back(cfg.params.detuning());
    const auto xs = sweep.values();

    // Noneigenstate phases on the sweep grid, all detunings at once.
    std::vector<Point> points;
    for (double dl : deltas) {
        const RabiParams base = with_detuning(cfg, cfg.params, dl);
        for (double x : xs) {
            RabiParams p = base;
            p.g1 = p.g2 = x;
            points.push_back({dl, x, p});
        }
    }
    struct Phase {
        double gamma{0.0};
        double drift{0.0};
    };
    const auto phases = parallel_map(points.size(), [&](std::size_t i) {
        const auto& p = points[i].p;
        const double a = noneigen_phase_beyond_rwa(p, DisplacedBasis::for_params(p, cfg.M)).phase.gamma;
        const double b = noneigen_phase_beyond_rwa(p, DisplacedBasis::for_params(p, cfg.M + 10)).phase.gamma;
        return Phase{a, std::abs(a - b)};
    });

    const auto found = parallel_map(deltas.size(), [&](std::size_t i) {
        AnticrossingRequest req;
        req.base = with_detuning(cfg, cfg.params, deltas[i]);
        req.kappa = cfg.kappa;
        req.g_min = sweep.start;
        req.g_max = sweep.stop;
        req.points = std::max(sweep.points, 200);
        req.mode = SpectrumMode::beyond_rwa;
        req.M = cfg.M;
        req.drop_singlets = true;
        return find_anticrossing(req);
    });

    CsvDataset d;
    d.header = {"delta", "g_star", "min_gap", "jump_location", "level_lo", "level_hi", "max_adiabaticity",
                "resolution"};
    double drift = 0.0;
    for (const auto& ph : phases) drift = std::max(drift, ph.drift);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        std::vector<double> gam;
        for (std::size_t j = 0; j < xs.size(); ++j) gam.push_back(phases[i * xs.size() + j].gamma);
        const double jump = locate_phase_jump(xs, gam);
        const auto& [ac, pair] = found[i];
        d.rows.push_back({deltas[i], ac.g_star, ac.min_gap, jump, double(pair.first), double(pair.second),
                          ac.max_adiabaticity, xs[1] - xs[0]});
    }
    d.gate = gate_for(cfg, "phase", drift);
    d.metadata["columns_legend"] = {
        {"level_lo,level_hi", "0-based sector levels after removing singlets"},
        {"jump_location", "midpoint of the largest step of the |10>|0> phase on the sweep grid"}};
    return d;
}

CsvDataset run_command(const ScanConfig& cfg) {
    cfg.validate();
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "berry") return cmd_berry(cfg);
    if (cfg.command == "curvature-field") return cmd_curvature_field(cfg);
    if (cfg.command == "noneigen") return cmd_noneigen(cfg);
    if (cfg.command == "evolve") return cmd_evolve(cfg);
    return cmd_scan_anticrossing(cfg);
}

}  // namespace rabigeom::cli
