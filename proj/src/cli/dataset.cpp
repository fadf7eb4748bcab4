#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "rabigeom/cli.hpp"

namespace rabigeom::cli {

using nlohmann::json;

json GateResult::to_json() const {
    json j{{"applicable", applicable}, {"passed", passed()}, {"threshold", threshold}};
    if (applicable) {
        j["quantity"] = quantity;
        j["M"] = M;
        j["M_next"] = M_next;
        j["max_drift"] = max_drift;
    }
    return j;
}

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;   // drops the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvDataset::check() const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw Error("dataset row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                        " columns, header has " + std::to_string(header.size()));
        }
        for (double v : rows[r]) {
            if (!std::isfinite(v)) throw Error("dataset row " + std::to_string(r) + " holds a non-finite value");
        }
    }
}

std::string CsvDataset::to_csv() const {
    check();
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) s += ',';
        s += header[i];
    }
    s += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += ',';
            s += format_number(row[i]);
        }
        s += '\n';
    }
    return s;
}

json CsvDataset::sidecar(const ScanConfig& cfg) const {
    json j = metadata;
    j["command"] = cfg.command;
    j["config"] = cfg.to_json();
    j["truncation"] = {{"M", cfg.M}, {"M_gate", cfg.M + 10}};
    if (cfg.n_photons) j["truncation"]["n_photons"] = *cfg.n_photons;
    j["version"] = std::string(version);
    j["gate"] = gate.to_json();
    j["columns"] = header;
    j["rows"] = rows.size();
    return j;
}

std::string sidecar_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".json");
    return p.string();
}

void write_dataset(const CsvDataset& data, const ScanConfig& cfg, const std::string& path) {
    const std::string csv = data.to_csv();
    const auto meta = sidecar_path(path);
    if (meta == path) throw ConfigError("out: '" + path + "' would be overwritten by its sidecar");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out: cannot write '" + path + "'");
    out << csv;
    std::ofstream side(meta, std::ios::binary);
    if (!side) throw ConfigError("out: cannot write '" + meta + "'");
    side << data.sidecar(cfg).dump(2) << '\n';
}

unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RABI_GEOM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*env == '\0' || *end != '\0' || v < 1) {
            throw ConfigError("RABI_GEOM_THREADS: expected a positive integer, got '" + std::string(env) + "'");
        }
        n = std::min(n, static_cast<unsigned>(std::min(v, 1024L)));
    }
    return n;
}

}  // namespace rabigeom::cli
