#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kerrcav/audit.hpp"
#include "kerrcav/errors.hpp"
#include "kerrcav/husimi.hpp"
#include "kerrcav/joint_state.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/runner/csv.hpp"

namespace kerrcav::runner {

/// Everything a run needs. Times are Rabi angles in units of pi.
struct RunConfig {
    Scenario scenario = Scenario::EE;
    ModelParams params;

    double start = 0.0;
    double stop = 16.0;
    int samples = 3201;
    std::set<std::string> outputs{"concurrence", "eof", "populations"};

    double time = 5.0 / 3.0;
    PhaseWindow window;
    int nx = 201;
    int ny = 201;
    bool full_field = false;

    AuditSettings audit;
};

/// Keys accepted in config files and as --key flags, in echo order.
inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "scenario", "coupling", "kerr_ratio", "detuning_ratio", "mean_photons", "coherent_phase",
        "truncation", "truncation_epsilon", "start", "stop", "samples", "outputs",
        "time", "x_min", "x_max", "y_min", "y_max", "nx", "ny", "full_field",
        "audit_times", "audit_states", "seed"};
    return keys;
}

inline const std::set<std::string>& output_kinds() {
    static const std::set<std::string> kinds{"concurrence", "eof", "populations", "all_density_entries"};
    return kinds;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_real(const std::string& value, const std::string& where) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = first + value.size();
    if (!value.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (value.empty() || ec != std::errc{} || ptr != last || !std::isfinite(out))
        throw ConfigError(where + ": '" + value + "' is not a finite number");
    return out;
}

inline long long parse_integer(const std::string& value, const std::string& where) {
    long long out = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (value.empty() || ec != std::errc{} || ptr != last) throw ConfigError(where + ": '" + value + "' is not an integer");
    return out;
}

inline bool parse_bool(const std::string& value, const std::string& where) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(where + ": '" + value + "' is not a boolean");
}

inline int parse_count(const std::string& value, const std::string& where, long long lo, long long hi) {
    const long long v = parse_integer(value, where);
    if (v < lo || v > hi)
        throw ConfigError(where + ": " + value + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

}  // namespace detail

/// Applies one key/value pair. `where` prefixes every error message, e.g.
/// "run.cfg:12" or "--samples".
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw, const std::string& where) {
    using namespace detail;
    const std::string value = trim(raw);
    auto real = [&] { return parse_real(value, where); };

    if (key == "scenario") {
        if (value == "EE" || value == "ee") cfg.scenario = Scenario::EE;
        else if (value == "EG" || value == "eg") cfg.scenario = Scenario::EG;
        else throw ConfigError(where + ": unknown scenario '" + value + "' (expected EE or EG)");
    } else if (key == "coupling") {
        cfg.params.coupling = real();
    } else if (key == "kerr_ratio") {
        cfg.params.kerr_ratio = real();
    } else if (key == "detuning_ratio") {
        cfg.params.detuning_ratio = real();
    } else if (key == "mean_photons") {
        cfg.params.mean_photons = real();
    } else if (key == "coherent_phase") {
        cfg.params.coherent_phase = real();
    } else if (key == "truncation") {
        if (value == "auto") cfg.params.fock_cutoff.reset();
        else cfg.params.fock_cutoff = parse_count(value, where, 0, 4000);
    } else if (key == "truncation_epsilon") {
        cfg.params.truncation_epsilon = real();
    } else if (key == "start") {
        cfg.start = real();
    } else if (key == "stop") {
        cfg.stop = real();
    } else if (key == "samples") {
        cfg.samples = parse_count(value, where, 2, 10000000);
    } else if (key == "outputs") {
        std::set<std::string> kinds;
        for (const auto& item : split_list(value)) {
            if (!output_kinds().count(item)) throw ConfigError(where + ": unknown output '" + item + "'");
            kinds.insert(item);
        }
        if (kinds.empty()) throw ConfigError(where + ": outputs must name at least one kind");
        cfg.outputs = std::move(kinds);
    } else if (key == "time") {
        cfg.time = real();
    } else if (key == "x_min") {
        cfg.window.x_min = real();
    } else if (key == "x_max") {
        cfg.window.x_max = real();
    } else if (key == "y_min") {
        cfg.window.y_min = real();
    } else if (key == "y_max") {
        cfg.window.y_max = real();
    } else if (key == "nx") {
        cfg.nx = parse_count(value, where, 2, 20000);
    } else if (key == "ny") {
        cfg.ny = parse_count(value, where, 2, 20000);
    } else if (key == "full_field") {
        cfg.full_field = parse_bool(value, where);
    } else if (key == "audit_times") {
        std::vector<double> times;
        for (const auto& item : split_list(value)) times.push_back(parse_real(item, where));
        if (times.empty()) throw ConfigError(where + ": audit_times must list at least one value");
        cfg.audit.rabi_angles_over_pi = std::move(times);
    } else if (key == "audit_states") {
        cfg.audit.random_states = parse_count(value, where, 0, 10000000);
    } else if (key == "seed") {
        const long long s = parse_integer(value, where);
        if (s < 0) throw ConfigError(where + ": seed must be >= 0");
        cfg.audit.seed = static_cast<std::uint64_t>(s);
    } else {
        throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

/// key -> (value, "path:line") from a flat `key = value` file with # comments.
using SettingList = std::vector<std::pair<std::string, std::pair<std::string, std::string>>>;

inline SettingList read_config_text(const std::string& text, const std::string& origin) {
    SettingList out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = origin + ":" + std::to_string(number);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        out.push_back({key, {value, where}});
    }
    return out;
}

inline SettingList read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_config_text(ss.str(), path);
}

/// Cross-field checks once every setting is applied.
inline void validate(const RunConfig& cfg) {
    try {
        kerrcav::validate(cfg.params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.start < cfg.stop)) throw ConfigError("start must be < stop");
    if (cfg.start < 0.0) throw ConfigError("start must be >= 0");
    if (cfg.time < 0.0) throw ConfigError("time must be >= 0");
    if (!(cfg.window.x_max > cfg.window.x_min)) throw ConfigError("x_min must be < x_max");
    if (!(cfg.window.y_max > cfg.window.y_min)) throw ConfigError("y_min must be < y_max");
    for (double a : cfg.audit.rabi_angles_over_pi)
        if (a < 0.0) throw ConfigError("audit_times must be >= 0");
}

/// File settings first, then flag overrides; validates the result.
inline RunConfig build_config(const std::optional<std::string>& path,
                              const std::vector<std::pair<std::string, std::string>>& flags) {
    RunConfig cfg;
    if (path)
        for (const auto& [key, entry] : read_config_file(*path)) apply_setting(cfg, key, entry.first, entry.second);
    for (const auto& [key, value] : flags) apply_setting(cfg, key, value, "--" + key);
    validate(cfg);
    return cfg;
}

/// `key=value` lines describing the configuration, in config_keys() order.
inline std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    auto list = [](const auto& items, auto fmt) {
        std::string s;
        for (const auto& i : items) s += (s.empty() ? "" : ",") + fmt(i);
        return s;
    };
    const auto& p = cfg.params;
    out.emplace_back("scenario", std::string(to_string(cfg.scenario)));
    out.emplace_back("coupling", format_real(p.coupling));
    out.emplace_back("kerr_ratio", format_real(p.kerr_ratio));
    out.emplace_back("detuning_ratio", format_real(p.detuning_ratio));
    out.emplace_back("mean_photons", format_real(p.mean_photons));
    out.emplace_back("coherent_phase", format_real(p.coherent_phase));
    out.emplace_back("truncation", p.fock_cutoff ? std::to_string(*p.fock_cutoff) : "auto");
    out.emplace_back("truncation_epsilon", format_real(p.truncation_epsilon));
    out.emplace_back("start", format_real(cfg.start));
    out.emplace_back("stop", format_real(cfg.stop));
    out.emplace_back("samples", std::to_string(cfg.samples));
    out.emplace_back("outputs", list(cfg.outputs, [](const std::string& s) { return s; }));
    out.emplace_back("time", format_real(cfg.time));
    out.emplace_back("x_min", format_real(cfg.window.x_min));
    out.emplace_back("x_max", format_real(cfg.window.x_max));
    out.emplace_back("y_min", format_real(cfg.window.y_min));
    out.emplace_back("y_max", format_real(cfg.window.y_max));
    out.emplace_back("nx", std::to_string(cfg.nx));
    out.emplace_back("ny", std::to_string(cfg.ny));
    out.emplace_back("full_field", cfg.full_field ? "true" : "false");
    out.emplace_back("audit_times", list(cfg.audit.rabi_angles_over_pi, [](double v) { return format_real(v); }));
    out.emplace_back("audit_states", std::to_string(cfg.audit.random_states));
    out.emplace_back("seed", std::to_string(cfg.audit.seed));
    return out;
}

}  // namespace kerrcav::runner

