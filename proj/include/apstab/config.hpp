#pragma once

// Run configuration (tolerances, grids, budgets, thread width) with
// defaults < file < flag layering, plus a small structured logger.
//
// File format: one `key = value` per line; `#` starts a comment; blank
// lines are ignored. Keys are listed in Config::keys().

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "rng.hpp"
#include "robust_kmeans.hpp"
#include "stable_kmeans.hpp"

namespace apstab {

inline const char* to_string(SweepMemoryMode m) {
    switch (m) {
    case SweepMemoryMode::Auto: return "auto";
    case SweepMemoryMode::Full: return "full";
    case SweepMemoryMode::SpanningTree: return "mst";
    }
    return "auto";
}

inline const char* to_string(TGridPolicy p) {
    switch (p) {
    case TGridPolicy::Auto: return "auto";
    case TGridPolicy::Exhaustive: return "exhaustive";
    case TGridPolicy::Geometric: return "geometric";
    }
    return "auto";
}

struct Config {
    double lloyd_tol = 1e-9;
    std::size_t lloyd_max_iter = 300;
    SweepMemoryMode sweep_memory_mode = SweepMemoryMode::Auto;
    TGridPolicy t_grid_policy = TGridPolicy::Auto;
    std::size_t perceptron_budget = 3;
    double dedup_cosine = 1.0 - 1e-12;
    std::string rng_algorithm = std::string(kRngAlgorithmId);
    std::size_t thread_width = 1;
    std::size_t kpp_init_trials = 1000;
    std::size_t kpp_lloyd_trials = 100;

    // relative tolerances per acceptance check
    double tol_table1 = 0.01;
    double tol_kpp_init = 0.05;
    double tol_kpp_lloyd = 0.02;
    double tol_table2 = 0.15;
    double tol_table3 = 0.25;
    double min_recovery = 0.95;
    double small_dataset_seconds = 10.0;
    double letter_seconds = 1800.0;

    static const std::vector<std::string>& keys() {
        static const std::vector<std::string> k = {
            "dedup_cosine",     "kpp_init_trials", "kpp_lloyd_trials", "letter_seconds",   "lloyd_max_iter",
            "lloyd_tol",        "min_recovery",    "perceptron_budget", "rng_algorithm",   "small_dataset_seconds",
            "sweep_memory_mode", "t_grid_policy",  "thread_width",     "tol_kpp_init",     "tol_kpp_lloyd",
            "tol_table1",       "tol_table2",      "tol_table3",
        };
        return k;
    }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) throw Error(ErrorKind::ConfigParseError, std::string(name) + " must be > 0");
        };
        positive(lloyd_tol, "lloyd_tol");
        positive(tol_table1, "tol_table1");
        positive(tol_kpp_init, "tol_kpp_init");
        positive(tol_kpp_lloyd, "tol_kpp_lloyd");
        positive(tol_table2, "tol_table2");
        positive(tol_table3, "tol_table3");
        positive(min_recovery, "min_recovery");
        positive(small_dataset_seconds, "small_dataset_seconds");
        positive(letter_seconds, "letter_seconds");
        if (!(dedup_cosine > 0.0 && dedup_cosine <= 1.0))
            throw Error(ErrorKind::ConfigParseError, "dedup_cosine must lie in (0, 1]");
        if (perceptron_budget < 1) throw Error(ErrorKind::ConfigParseError, "perceptron_budget must be >= 1");
        if (thread_width < 1) throw Error(ErrorKind::ConfigParseError, "thread_width must be >= 1");
        if (lloyd_max_iter < 1) throw Error(ErrorKind::ConfigParseError, "lloyd_max_iter must be >= 1");
        if (rng_algorithm != kRngAlgorithmId)
            throw Error(ErrorKind::ConfigParseError, "unsupported rng_algorithm '" + rng_algorithm + "'");
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw Error(ErrorKind::ConfigParseError, "invalid value for " + key + ": '" + text + "'");
    return v;
}

} // namespace detail

// Applies one key=value setting.
inline void apply_setting(Config& c, const std::string& key, const std::string& value) {
    using detail::parse_number;
    if (key == "lloyd_tol") c.lloyd_tol = parse_number<double>(key, value);
    else if (key == "lloyd_max_iter") c.lloyd_max_iter = parse_number<std::size_t>(key, value);
    else if (key == "sweep_memory_mode") {
        if (value == "auto") c.sweep_memory_mode = SweepMemoryMode::Auto;
        else if (value == "full") c.sweep_memory_mode = SweepMemoryMode::Full;
        else if (value == "mst") c.sweep_memory_mode = SweepMemoryMode::SpanningTree;
        else throw Error(ErrorKind::ConfigParseError, "sweep_memory_mode must be auto, full or mst");
    } else if (key == "t_grid_policy") {
        if (value == "auto") c.t_grid_policy = TGridPolicy::Auto;
        else if (value == "exhaustive") c.t_grid_policy = TGridPolicy::Exhaustive;
        else if (value == "geometric") c.t_grid_policy = TGridPolicy::Geometric;
        else throw Error(ErrorKind::ConfigParseError, "t_grid_policy must be auto, exhaustive or geometric");
    } else if (key == "perceptron_budget") c.perceptron_budget = parse_number<std::size_t>(key, value);
    else if (key == "dedup_cosine") c.dedup_cosine = parse_number<double>(key, value);
    else if (key == "rng_algorithm") c.rng_algorithm = value;
    else if (key == "thread_width") c.thread_width = parse_number<std::size_t>(key, value);
    else if (key == "kpp_init_trials") c.kpp_init_trials = parse_number<std::size_t>(key, value);
    else if (key == "kpp_lloyd_trials") c.kpp_lloyd_trials = parse_number<std::size_t>(key, value);
    else if (key == "tol_table1") c.tol_table1 = parse_number<double>(key, value);
    else if (key == "tol_kpp_init") c.tol_kpp_init = parse_number<double>(key, value);
    else if (key == "tol_kpp_lloyd") c.tol_kpp_lloyd = parse_number<double>(key, value);
    else if (key == "tol_table2") c.tol_table2 = parse_number<double>(key, value);
    else if (key == "tol_table3") c.tol_table3 = parse_number<double>(key, value);
    else if (key == "min_recovery") c.min_recovery = parse_number<double>(key, value);
    else if (key == "small_dataset_seconds") c.small_dataset_seconds = parse_number<double>(key, value);
    else if (key == "letter_seconds") c.letter_seconds = parse_number<double>(key, value);
    else throw Error(ErrorKind::ConfigParseError, "unknown key '" + key + "'");
}

// Parses `key = value` lines into `c`; errors carry the line number.
inline void apply_config_text(Config& c, std::istream& in, const std::string& source = "<config>") {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ConfigParseError, source + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(body.substr(0, eq));
        const std::string value = detail::trim(body.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorKind::ConfigParseError, source + ":" + std::to_string(line_no) + ": empty key or value");
        try {
            apply_setting(c, key, value);
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigParseError, source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

// defaults < file < overrides
inline Config load_config(const std::optional<std::filesystem::path>& path,
                          const std::map<std::string, std::string>& overrides = {}) {
    Config c;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path->string());
        apply_config_text(c, in, path->string());
    }
    for (const auto& [k, v] : overrides) apply_setting(c, k, v);
    c.validate();
    return c;
}

inline std::map<std::string, std::string> config_values(const Config& c) {
    using detail::format_double;
    return {
        {"dedup_cosine", format_double(c.dedup_cosine)},
        {"kpp_init_trials", std::to_string(c.kpp_init_trials)},
        {"kpp_lloyd_trials", std::to_string(c.kpp_lloyd_trials)},
        {"letter_seconds", format_double(c.letter_seconds)},
        {"lloyd_max_iter", std::to_string(c.lloyd_max_iter)},
        {"lloyd_tol", format_double(c.lloyd_tol)},
        {"min_recovery", format_double(c.min_recovery)},
        {"perceptron_budget", std::to_string(c.perceptron_budget)},
        {"rng_algorithm", c.rng_algorithm},
        {"small_dataset_seconds", format_double(c.small_dataset_seconds)},
        {"sweep_memory_mode", to_string(c.sweep_memory_mode)},
        {"t_grid_policy", to_string(c.t_grid_policy)},
        {"thread_width", std::to_string(c.thread_width)},
        {"tol_kpp_init", format_double(c.tol_kpp_init)},
        {"tol_kpp_lloyd", format_double(c.tol_kpp_lloyd)},
        {"tol_table1", format_double(c.tol_table1)},
        {"tol_table2", format_double(c.tol_table2)},
        {"tol_table3", format_double(c.tol_table3)},
    };
}

// Canonical text: every key, sorted, shortest round-trip numbers.
inline std::string serialize(const Config& c) {
    std::string out;
    for (const auto& [k, v] : config_values(c)) out += k + " = " + v + "\n";
    return out;
}

inline bool operator==(const Config& a, const Config& b) { return serialize(a) == serialize(b); }

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Line-oriented logger: `level event key=value ...` to a stream (stderr by
// default). Thread-safe.
class Logger {
public:
    static Logger& global() {
        static Logger instance;
        return instance;
    }

    void set_level(LogLevel level) { level_ = level; }
    LogLevel level() const { return level_; }
    void set_stream(std::ostream* out) { out_ = out; }

    void log(LogLevel level, std::string_view event,
             std::initializer_list<std::pair<std::string_view, std::string>> fields = {}) {
        if (level < level_ || !out_) return;
        static constexpr const char* names[] = {"debug", "info", "warn", "error"};
        std::ostringstream line;
        line << names[static_cast<int>(level)] << ' ' << event;
        for (const auto& [k, v] : fields) line << ' ' << k << '=' << v;
        line << '\n';
        std::lock_guard lock(mutex_);
        *out_ << line.str();
    }

    void info(std::string_view event, std::initializer_list<std::pair<std::string_view, std::string>> f = {}) {
        log(LogLevel::Info, event, f);
    }
    void warn(std::string_view event, std::initializer_list<std::pair<std::string_view, std::string>> f = {}) {
        log(LogLevel::Warn, event, f);
    }
    void debug(std::string_view event, std::initializer_list<std::pair<std::string_view, std::string>> f = {}) {
        log(LogLevel::Debug, event, f);
    }

private:
    LogLevel level_ = LogLevel::Warn;
    std::ostream* out_ = &std::cerr;
    std::mutex mutex_;
};

inline Logger& logger() { return Logger::global(); }

} // namespace apstab
