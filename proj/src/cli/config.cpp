#include "rabigeom/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rabigeom/numerics.hpp"

namespace rabigeom::cli {

using nlohmann::json;

std::string_view to_string(ModelKind m) noexcept { return m == ModelKind::jc ? "jc" : "two-qubit"; }

std::string_view to_string(Approximation a) noexcept {
    switch (a) {
        case Approximation::rwa: return "rwa";
        case Approximation::full: return "full";
        case Approximation::both: return "both";
    }
    return "rwa";
}

namespace {

constexpr std::array sweep_variables{"g", "g1", "g2", "delta", "omega1", "omega2"};

bool known_variable(std::string_view v) {
    return std::find(sweep_variables.begin(), sweep_variables.end(), v) != sweep_variables.end();
}

double parse_double(std::string_view s, std::string_view what) {
    // strtod is locale-bound but the tool never changes the C locale.
    const std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": '" + tmp + "' is not a finite number");
    }
    return v;
}

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(std::string(what) + ": '" + std::string(s) + "' is not an integer");
    }
    return v;
}

// Typed field access with the dotted path in every message.
double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError("field '" + path + "': expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("field '" + path + "': must be finite");
    return v;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError("field '" + path + "': expected an integer");
    return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError("field '" + path + "': expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError("field '" + path + "': expected a string");
    return j.get<std::string>();
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("field '" + path + "': expected an object");
}

ModelKind parse_model(const std::string& s, const std::string& path) {
    if (s == "jc") return ModelKind::jc;
    if (s == "two-qubit") return ModelKind::two_qubit;
    throw ConfigError("field '" + path + "': expected \"jc\" or \"two-qubit\", got \"" + s + "\"");
}

Approximation parse_approx(const std::string& s, const std::string& path) {
    if (s == "rwa") return Approximation::rwa;
    if (s == "full") return Approximation::full;
    if (s == "both") return Approximation::both;
    throw ConfigError("field '" + path + "': expected \"rwa\", \"full\" or \"both\", got \"" + s + "\"");
}

}  // namespace

Sweep Sweep::parse(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto c = text.find(':', pos);
        parts.push_back(text.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    if (parts.size() != 4) {
        throw ConfigError("sweep '" + std::string(text) + "': expected VAR:START:STOP:POINTS");
    }
    Sweep s;
    s.variable = std::string(parts[0]);
    s.start = parse_double(parts[1], "sweep start");
    s.stop = parse_double(parts[2], "sweep stop");
    s.points = parse_int(parts[3], "sweep points");
    return s;
}

std::vector<double> Sweep::values() const {
    return linspace(start, stop, static_cast<std::size_t>(points));
}

void ScanConfig::validate() const {
    static constexpr std::array commands{"spectrum", "berry", "curvature-field", "noneigen", "evolve",
                                         "scan-anticrossing"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
        throw ConfigError("unknown command '" + command + "'");
    }
    try {
        params.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    if (model == ModelKind::jc && (params.omega2 != 0.0 || params.g2 != 0.0)) {
        throw ConfigError("params: the jc model needs omega2 = g2 = 0");
    }
    if (sweep) {
        if (!known_variable(sweep->variable)) {
            throw ConfigError("sweep: variable '" + sweep->variable +
                              "' is not one of g, g1, g2, delta, omega1, omega2");
        }
        if (sweep->points < 2) throw ConfigError("sweep: points must be at least 2");
        if (!(sweep->start < sweep->stop)) throw ConfigError("sweep: start must be below stop");
        if (model == ModelKind::jc && (sweep->variable == "g2" || sweep->variable == "omega2")) {
            throw ConfigError("sweep: '" + sweep->variable + "' does not exist in the jc model");
        }
        if (command == "curvature-field" || command == "evolve") {
            throw ConfigError("sweep: " + command + " takes no sweep");
        }
        if (command == "scan-anticrossing" && sweep->variable != "g") {
            throw ConfigError("sweep: scan-anticrossing scans the common coupling 'g'");
        }
    }
    if (M < 10) throw ConfigError("truncation.M: must be at least 10");
    if (n_photons && *n_photons < 10) throw ConfigError("truncation.n_photons: must be at least 10");
    if (levels < 1) throw ConfigError("levels: must be positive");
    if (kappa != 1 && kappa != -1) throw ConfigError("kappa: must be +1 or -1");
    if (theta_points < 3 || phi_points < 1) throw ConfigError("grid: need theta_points >= 3, phi_points >= 1");
    if (time_steps < 1000) throw ConfigError("time_steps: must be at least 1000");
    if (cycles < 1) throw ConfigError("cycles: must be positive");
    if (command == "scan-anticrossing" && approximation != Approximation::full) {
        throw ConfigError("approximation: scan-anticrossing is a beyond-RWA scan");
    }
    if (uses_full() && model == ModelKind::jc) {
        throw ConfigError("approximation: beyond-RWA results exist for the two-qubit model only");
    }
    if (uses_full() && (command == "curvature-field" || command == "evolve")) {
        throw ConfigError("approximation: " + command + " is an RWA calculation; use --rwa");
    }
    if (command == "scan-anticrossing" && model != ModelKind::two_qubit) {
        throw ConfigError("model: scan-anticrossing needs the two-qubit model");
    }
    for (double d : detunings) {
        if (!std::isfinite(d)) throw ConfigError("detunings: values must be finite");
    }
}

json ScanConfig::to_json() const {
    json j;
    j["model"] = std::string(to_string(model));
    j["approximation"] = std::string(to_string(approximation));
    j["params"] = {{"omega_c", params.omega_c}, {"omega1", params.omega1}, {"omega2", params.omega2},
                   {"g1", params.g1},           {"g2", params.g2}};
    if (sweep) {
        j["sweep"] = {{"variable", sweep->variable}, {"start", sweep->start}, {"stop", sweep->stop},
                      {"points", sweep->points}};
    }
    j["detunings"] = detunings;
    j["truncation"] = {{"M", M}};
    if (n_photons) j["truncation"]["n_photons"] = *n_photons;
    j["drop_singlets"] = drop_singlets;
    j["levels"] = levels;
    j["kappa"] = kappa;
    j["grid"] = {{"theta_points", theta_points}, {"phi_points", phi_points}};
    j["time_steps"] = time_steps;
    j["cycles"] = cycles;
    return j;
}

void apply_json(ScanConfig& cfg, const json& in) {
    require_object(in, "<root>");
    const json& j = in.contains("config") && in["config"].is_object() && in.contains("gate") ? in["config"] : in;

    std::optional<double> delta;
    bool omega1_set = false;
    bool second_qubit_set = false;
    for (const auto& [key, v] : j.items()) {
        if (key == "model") {
            cfg.model = parse_model(get_string(v, key), key);
        } else if (key == "approximation") {
            cfg.approximation = parse_approx(get_string(v, key), key);
        } else if (key == "rwa") {
            cfg.approximation = get_bool(v, key) ? Approximation::rwa : Approximation::full;
        } else if (key == "params") {
            require_object(v, key);
            for (const auto& [pk, pv] : v.items()) {
                const std::string path = "params." + pk;
                if (pk == "omega_c") cfg.params.omega_c = get_number(pv, path);
                else if (pk == "omega1") { cfg.params.omega1 = get_number(pv, path); omega1_set = true; }
                else if (pk == "omega2") { cfg.params.omega2 = get_number(pv, path); second_qubit_set = true; }
                else if (pk == "g1") cfg.params.g1 = get_number(pv, path);
                else if (pk == "g2") { cfg.params.g2 = get_number(pv, path); second_qubit_set = true; }
                else if (pk == "delta") delta = get_number(pv, path);
                else throw ConfigError("field '" + path + "': unknown parameter");
            }
        } else if (key == "sweep") {
            if (v.is_string()) {
                cfg.sweep = Sweep::parse(v.get<std::string>());
            } else {
                require_object(v, key);
                Sweep s;
                for (const auto& [sk, sv] : v.items()) {
                    const std::string path = "sweep." + sk;
                    if (sk == "variable") s.variable = get_string(sv, path);
                    else if (sk == "start") s.start = get_number(sv, path);
                    else if (sk == "stop") s.stop = get_number(sv, path);
                    else if (sk == "points") s.points = get_int(sv, path);
                    else throw ConfigError("field '" + path + "': unknown key");
                }
                cfg.sweep = s;
            }
        } else if (key == "detunings") {
            if (!v.is_array()) throw ConfigError("field 'detunings': expected an array of numbers");
            cfg.detunings.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                cfg.detunings.push_back(get_number(v[i], "detunings[" + std::to_string(i) + "]"));
            }
        } else if (key == "truncation") {
            require_object(v, key);
            for (const auto& [tk, tv] : v.items()) {
                const std::string path = "truncation." + tk;
                if (tk == "M") cfg.M = get_int(tv, path);
                else if (tk == "n_photons") cfg.n_photons = get_int(tv, path);
                else throw ConfigError("field '" + path + "': unknown key");
            }
        } else if (key == "out") {
            cfg.out = get_string(v, key);
        } else if (key == "drop_singlets") {
            cfg.drop_singlets = get_bool(v, key);
        } else if (key == "levels") {
            cfg.levels = get_int(v, key);
        } else if (key == "kappa") {
            cfg.kappa = get_int(v, key);
        } else if (key == "grid") {
            require_object(v, key);
            for (const auto& [gk, gv] : v.items()) {
                const std::string path = "grid." + gk;
                if (gk == "theta_points") cfg.theta_points = get_int(gv, path);
                else if (gk == "phi_points") cfg.phi_points = get_int(gv, path);
                else throw ConfigError("field '" + path + "': unknown key");
            }
        } else if (key == "time_steps") {
            cfg.time_steps = get_int(v, key);
        } else if (key == "cycles") {
            cfg.cycles = get_int(v, key);
        } else {
            throw ConfigError("field '" + key + "': unknown key");
        }
    }
    if (cfg.model == ModelKind::jc && !second_qubit_set) {
        cfg.params.omega2 = 0.0;
        cfg.params.g2 = 0.0;
    }
    if (delta) {
        if (omega1_set) throw ConfigError("field 'params.delta': conflicts with params.omega1");
        cfg.params = with_detuning(cfg, cfg.params, *delta);
    }
}

json parse_config_text(std::string_view text, std::string_view source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        const auto cut = msg.find("parse error");
        if (cut != std::string::npos) msg = msg.substr(cut);
        throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": " + msg);
    }
}

ScanConfig load_config(const std::string& path, ScanConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        apply_json(base, parse_config_text(ss.str(), path));
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        // Field errors get the file name; syntax errors already carry it.
        if (what.find(path) == std::string::npos) throw ConfigError(path + ": " + what.substr(13));
        throw;
    }
    return base;
}

RabiParams with_detuning(const ScanConfig& cfg, RabiParams p, double delta) {
    p.omega1 = p.omega_c + delta;
    if (cfg.model == ModelKind::two_qubit) p.omega2 = p.omega_c + delta;
    return p;
}

RabiParams apply_sweep(const ScanConfig& cfg, const RabiParams& p, double value) {
    RabiParams out = p;
    const std::string& v = cfg.sweep->variable;
    if (v == "g") {
        out.g1 = value;
        if (cfg.model == ModelKind::two_qubit) out.g2 = value;
    } else if (v == "g1") {
        out.g1 = value;
    } else if (v == "g2") {
        out.g2 = value;
    } else if (v == "delta") {
        out = with_detuning(cfg, out, value);
    } else if (v == "omega1") {
        out.omega1 = value;
    } else if (v == "omega2") {
        out.omega2 = value;
    }
    return out;
}

std::vector<ScanConfig> preset(std::string_view name) {
    ScanConfig c;
    c.model = ModelKind::two_qubit;
    if (name == "fig1") {
        c.command = "curvature-field";
        c.params = RabiParams::homogeneous(0.0, 0.05);
        c.theta_points = 181;
        c.phi_points = 37;
        c.out = "fig1.csv";
        return {c};
    }
    if (name == "fig2") {
        c.command = "noneigen";
        c.detunings = {-0.2, -0.05, 0.0, 0.05, 0.2};
        ScanConfig a = c;
        a.sweep = Sweep{"g", 0.0, 0.2, 401};
        a.out = "fig2a.csv";
        ScanConfig b = c;
        b.params.g1 = 0.02;
        b.sweep = Sweep{"g2", 0.0, 0.2, 401};
        b.out = "fig2b.csv";
        return {a, b};
    }
    if (name == "fig3") {
        c.command = "spectrum";
        c.approximation = Approximation::both;
        c.params = RabiParams::homogeneous(0.5, 0.0);
        c.sweep = Sweep{"g", 0.0, 0.5, 101};
        c.drop_singlets = true;
        c.levels = 5;
        c.out = "fig3.csv";
        return {c};
    }
    if (name == "fig4") {
        c.command = "berry";
        c.approximation = Approximation::both;
        c.params = RabiParams::homogeneous(0.5, 0.0);
        c.sweep = Sweep{"g", 0.0, 0.5, 101};
        c.drop_singlets = true;
        c.out = "fig4.csv";
        return {c};
    }
    if (name == "fig5") {
        c.command = "noneigen";
        c.approximation = Approximation::both;
        c.detunings = {-0.5, 0.5};
        c.sweep = Sweep{"g", 0.0, 0.35, 351};
        c.drop_singlets = true;
        c.out = "fig5.csv";
        return {c};
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace rabigeom::cli
