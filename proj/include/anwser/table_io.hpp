#pragma once

// Landscape tables on disk: CSV (one row per cell) and JSON with a run
// manifest that is sufficient to replay the run.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "errors.hpp"
#include "landscape.hpp"

namespace anwser {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kCsvHeader = "delta,epsilon,A_mean,A_q999,n_conditioned,n_total,n_rejected,status";

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string to_csv(const LandscapeTable& table) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& c : table.cells) {
        out += format_double(c.delta) + ',' + format_double(c.epsilon) + ',' + format_double(c.a_mean) + ',' +
               format_double(c.a_q999) + ',' + std::to_string(c.n_conditioned) + ',' + std::to_string(c.n_total) +
               ',' + std::to_string(c.n_rejected) + ',' + to_string(c.status) + '\n';
    }
    return out;
}

inline LandscapeTable from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ConfigError("table header mismatch: '" + line + "'");

    LandscapeTable table;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != 8) throw ConfigError("table line " + std::to_string(lineno) + ": expected 8 fields");
        auto num = [&](const std::string& s) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0') throw ConfigError("table line " + std::to_string(lineno) + ": bad number '" + s + "'");
            return v;
        };
        auto count = [&](const std::string& s) {
            char* end = nullptr;
            const auto v = std::strtoull(s.c_str(), &end, 10);
            if (s.empty() || *end != '\0') throw ConfigError("table line " + std::to_string(lineno) + ": bad count '" + s + "'");
            return static_cast<std::uint64_t>(v);
        };
        CellStats c;
        c.delta = num(f[0]);
        c.epsilon = num(f[1]);
        c.a_mean = num(f[2]);
        c.a_q999 = num(f[3]);
        c.n_conditioned = count(f[4]);
        c.n_total = count(f[5]);
        c.n_rejected = count(f[6]);
        c.status = cell_status_from_string(f[7]);
        table.cells.push_back(c);
    }
    return table;
}

struct RunManifest {
    ConfigValues config;
    std::string method;
    std::uint64_t master_seed = 0;
    std::string version = kVersion;
    double duration_seconds = 0.0;
    std::size_t threads = 1;
    ShockDistribution shock;  // after calibration
    std::vector<std::uint64_t> rejected_per_cell;
};

inline nlohmann::json number_or_null(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["config"] = m.config;
    j["method"] = m.method;
    j["master_seed"] = m.master_seed;
    j["version"] = m.version;
    j["duration_seconds"] = m.duration_seconds;
    j["threads"] = m.threads;
    j["shock"] = {{"kind", to_string(m.shock.kind)},
                  {"rate", m.shock.rate},
                  {"dof", m.shock.dof},
                  {"scale", m.shock.scale}};
    j["rejected_per_cell"] = m.rejected_per_cell;
    return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.config = j.at("config").get<ConfigValues>();
        m.method = j.value("method", "mc");
        m.master_seed = j.value("master_seed", std::uint64_t{0});
        m.version = j.value("version", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

inline nlohmann::json to_json(const LandscapeTable& table, const RunManifest& manifest) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : table.cells) {
        nlohmann::json row = {{"delta", c.delta},
                              {"epsilon", c.epsilon},
                              {"A_mean", number_or_null(c.a_mean)},
                              {"A_q999", number_or_null(c.a_q999)},
                              {"n_conditioned", c.n_conditioned},
                              {"n_total", c.n_total},
                              {"n_rejected", c.n_rejected},
                              {"status", to_string(c.status)},
                              {"A_mean_conditioned", number_or_null(c.a_mean_conditioned)},
                              {"A_q999_conditioned", number_or_null(c.a_q999_conditioned)},
                              {"p0", number_or_null(c.p0)},
                              {"p1", number_or_null(c.p1)},
                              {"p2", number_or_null(c.p2)},
                              {"pc", number_or_null(c.pc)}};
        if (!c.message.empty()) row["message"] = c.message;
        cells.push_back(std::move(row));
    }
    return {{"manifest", to_json(manifest)}, {"cells", cells}};
}

inline LandscapeTable table_from_json(const nlohmann::json& j) {
    auto num = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    LandscapeTable table;
    try {
        for (const auto& row : j.at("cells")) {
            CellStats c;
            c.delta = row.at("delta").get<double>();
            c.epsilon = row.at("epsilon").get<double>();
            c.a_mean = num(row.at("A_mean"));
            c.a_q999 = num(row.at("A_q999"));
            c.n_conditioned = row.at("n_conditioned").get<std::uint64_t>();
            c.n_total = row.at("n_total").get<std::uint64_t>();
            c.n_rejected = row.at("n_rejected").get<std::uint64_t>();
            c.status = cell_status_from_string(row.at("status").get<std::string>());
            c.a_mean_conditioned = num(row.value("A_mean_conditioned", nlohmann::json()));
            c.a_q999_conditioned = num(row.value("A_q999_conditioned", nlohmann::json()));
            c.p0 = num(row.value("p0", nlohmann::json()));
            c.p1 = num(row.value("p1", nlohmann::json()));
            c.p2 = num(row.value("p2", nlohmann::json()));
            c.pc = num(row.value("pc", nlohmann::json()));
            c.message = row.value("message", std::string{});
            table.cells.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed table: ") + e.what());
    }
    return table;
}

/// Accepts either the CSV or the JSON layout.
inline LandscapeTable parse_table(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return table_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("malformed table: ") + e.what());
        }
    }
    return from_csv(text);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace anwser
