#pragma once

// Flat key-value experiment files with one section per module:
//
//   [system]   n_banks, n_assets, theta, gamma
//   [network]  kind (ba|complete), kappa, rho5, rho5_tolerance, r, samples_per_network
//   [shock]    kind (exponential|student_t), dof, calibration_p, calibration_gamma, rate, scale
//   [cascade]  loss_rule (full_loan|capped_shortfall)
//   [run]      method (mc|analytic), n_samples, seed, threads, quantile, min_events
//   [grid]     delta = lo:hi:steps, epsilon = lo:hi:steps
//
// '#' starts a comment. Later assignments override earlier ones.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "analytic_n2.hpp"
#include "errors.hpp"
#include "monte_carlo.hpp"
#include "shocks.hpp"

namespace anwser {

enum class Method { monte_carlo, analytic };

inline std::string to_string(Method m) { return m == Method::analytic ? "analytic" : "mc"; }

/// Ordered section -> key -> raw value text; this is what manifests echo.
using ConfigValues = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

inline const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"system", {"n_banks", "n_assets", "theta", "gamma"}},
        {"network", {"kind", "kappa", "rho5", "rho5_tolerance", "r", "samples_per_network"}},
        {"shock", {"kind", "dof", "calibration_p", "calibration_gamma", "rate", "scale"}},
        {"cascade", {"loss_rule"}},
        {"run", {"method", "n_samples", "seed", "threads", "quantile", "min_events"}},
        {"grid", {"delta", "epsilon"}},
    };
    return keys;
}

inline void check_key(const std::string& where, const std::string& section, const std::string& key) {
    const auto& keys = known_keys();
    auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError(where + ": unknown section [" + section + "]");
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
}

}  // namespace detail

inline ConfigValues parse_config_text(const std::string& text, const std::string& source = "config") {
    ConfigValues values;
    std::istringstream in(text);
    std::string line;
    std::string section;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const std::string where = source + ":" + std::to_string(lineno);
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (!detail::known_keys().contains(section))
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        if (section.empty()) throw ConfigError(where + ": key outside of any section");
        const auto key = detail::trim(line.substr(0, eq));
        auto value = detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        detail::check_key(where, section, key);
        values[section][key] = value;
    }
    return values;
}

inline ConfigValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

/// Sets section.key, validating the name.
inline void set_value(ConfigValues& values, const std::string& section, const std::string& key, std::string value) {
    detail::check_key("override", section, key);
    values[section][key] = std::move(value);
}

struct ShockSpec {
    ShockKind kind = ShockKind::student_t;
    double dof = 1.5;
    double calibration_p = 1e-3;
    std::optional<double> calibration_gamma;  // defaults to the system gamma
    std::optional<double> rate;
    std::optional<double> scale;

    ShockDistribution resolve(double gamma, double theta) const {
        if (kind == ShockKind::two_sided_exponential && rate) return ShockDistribution::exponential(*rate);
        if (kind == ShockKind::student_t && scale) return ShockDistribution::student_t(dof, *scale);
        return calibrate_rate(kind, calibration_gamma.value_or(gamma), theta, calibration_p, dof);
    }
};

struct RunConfig {
    ExperimentConfig experiment;
    ShockSpec shock;
    Method method = Method::monte_carlo;
    ConfigValues values;

    n2::LandscapeParameters analytic_parameters() const {
        return {experiment.theta, experiment.gamma, experiment.shock.rate, experiment.loss_rule, experiment.quantile};
    }
};

namespace detail {

class Reader {
public:
    explicit Reader(const ConfigValues& v) : values_(v) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        auto s = values_.find(section);
        if (s == values_.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    template <class T>
    std::optional<T> get(const std::string& section, const std::string& key) const {
        auto text = raw(section, key);
        if (!text) return std::nullopt;
        return parse<T>(*text, section + "." + key);
    }

    template <class T>
    static T parse(const std::string& text, const std::string& field) {
        T value{};
        const char* first = text.data();
        const char* last = text.data() + text.size();
        std::from_chars_result res;
        if constexpr (std::is_floating_point_v<T>) {
            // from_chars for double is available in libstdc++ >= 11.
            res = std::from_chars(first, last, value, std::chars_format::general);
        } else {
            res = std::from_chars(first, last, value);
        }
        if (res.ec != std::errc() || res.ptr != last)
            throw ConfigError("field " + field + ": cannot parse '" + text + "'");
        return value;
    }

private:
    const ConfigValues& values_;
};

inline void parse_axis(const std::string& text, const std::string& field, double& lo, double& hi, std::size_t& steps) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos) throw ConfigError("field " + field + ": expected lo:hi:steps, got '" + text + "'");
    lo = Reader::parse<double>(trim(text.substr(0, a)), field);
    hi = Reader::parse<double>(trim(text.substr(a + 1, b - a - 1)), field);
    steps = Reader::parse<std::size_t>(trim(text.substr(b + 1)), field);
    if (steps == 0 || hi < lo) throw ConfigError("field " + field + ": need steps >= 1 and hi >= lo");
}

}  // namespace detail

/// Parses "dlo:dhi:dsteps,elo:ehi:esteps" into the [grid] entries.
inline void set_grid_override(ConfigValues& values, const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) throw ConfigError("--grid: expected delta_spec,epsilon_spec");
    GridSpec check;
    detail::parse_axis(spec.substr(0, comma), "--grid delta", check.delta_min, check.delta_max, check.delta_steps);
    detail::parse_axis(spec.substr(comma + 1), "--grid epsilon", check.epsilon_min, check.epsilon_max, check.epsilon_steps);
    set_value(values, "grid", "delta", spec.substr(0, comma));
    set_value(values, "grid", "epsilon", spec.substr(comma + 1));
}

/// `full_experiment = false` checks only what a single banking system needs.
inline RunConfig resolve_config(const ConfigValues& values, bool full_experiment = true) {
    detail::Reader r(values);
    RunConfig rc;
    rc.values = values;
    auto& ex = rc.experiment;

    ex.n_banks = r.get<std::size_t>("system", "n_banks").value_or(ex.n_banks);
    ex.n_assets = r.get<std::size_t>("system", "n_assets").value_or(ex.n_assets);
    ex.theta = r.get<double>("system", "theta").value_or(ex.theta);
    ex.gamma = r.get<double>("system", "gamma").value_or(ex.gamma);

    if (auto kind = r.raw("network", "kind")) {
        if (*kind == "ba") ex.network.kind = NetworkKind::barabasi_albert;
        else if (*kind == "complete") ex.network.kind = NetworkKind::complete;
        else throw ConfigError("field network.kind: expected ba or complete, got '" + *kind + "'");
    }
    ex.network.kappa = r.get<double>("network", "kappa").value_or(ex.network.kappa);
    ex.network.rho5 = r.get<double>("network", "rho5");
    ex.network.rho5_tolerance = r.get<double>("network", "rho5_tolerance").value_or(ex.network.rho5_tolerance);
    ex.network.r = r.get<double>("network", "r").value_or(ex.network.r);
    ex.network.samples_per_network =
        r.get<std::size_t>("network", "samples_per_network").value_or(ex.network.samples_per_network);

    if (auto kind = r.raw("shock", "kind")) {
        if (*kind == "exponential") rc.shock.kind = ShockKind::two_sided_exponential;
        else if (*kind == "student_t") rc.shock.kind = ShockKind::student_t;
        else throw ConfigError("field shock.kind: expected exponential or student_t, got '" + *kind + "'");
    }
    rc.shock.dof = r.get<double>("shock", "dof").value_or(rc.shock.dof);
    rc.shock.calibration_p = r.get<double>("shock", "calibration_p").value_or(rc.shock.calibration_p);
    rc.shock.calibration_gamma = r.get<double>("shock", "calibration_gamma");
    rc.shock.rate = r.get<double>("shock", "rate");
    rc.shock.scale = r.get<double>("shock", "scale");

    if (auto rule = r.raw("cascade", "loss_rule")) {
        if (*rule == "full_loan") ex.loss_rule = LossRule::full_loan;
        else if (*rule == "capped_shortfall") ex.loss_rule = LossRule::capped_shortfall;
        else throw ConfigError("field cascade.loss_rule: expected full_loan or capped_shortfall, got '" + *rule + "'");
    }

    if (auto m = r.raw("run", "method")) {
        if (*m == "mc") rc.method = Method::monte_carlo;
        else if (*m == "analytic") rc.method = Method::analytic;
        else throw ConfigError("field run.method: expected mc or analytic, got '" + *m + "'");
    }
    ex.n_samples = r.get<std::uint64_t>("run", "n_samples").value_or(ex.n_samples);
    ex.master_seed = r.get<std::uint64_t>("run", "seed").value_or(ex.master_seed);
    ex.threads = r.get<std::size_t>("run", "threads").value_or(0);
    ex.quantile = r.get<double>("run", "quantile").value_or(ex.quantile);
    ex.min_events = r.get<std::uint64_t>("run", "min_events").value_or(ex.min_events);

    if (auto d = r.raw("grid", "delta"))
        detail::parse_axis(*d, "grid.delta", ex.grid.delta_min, ex.grid.delta_max, ex.grid.delta_steps);
    if (auto e = r.raw("grid", "epsilon"))
        detail::parse_axis(*e, "grid.epsilon", ex.grid.epsilon_min, ex.grid.epsilon_max, ex.grid.epsilon_steps);

    try {
        ex.system().validate();
        ex.shock = rc.shock.resolve(ex.gamma, ex.theta);
    } catch (const ConfigError& e) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    if (rc.method == Method::analytic) {
        if (ex.n_banks != 2) throw ConfigError("analytic method requires N=2");
        if (ex.n_assets != 2) throw ConfigError("analytic method requires M=2");
        if (ex.shock.kind != ShockKind::two_sided_exponential)
            throw ConfigError("analytic method requires exponential shocks");
    } else if (full_experiment) {
        ex.validate();
    }
    return rc;
}

}  // namespace anwser
