#include "ldg/config.hpp"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <string_view>

#include "ldg/errors.hpp"

namespace ldg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(int line, std::string_view key, std::string_view v) {
    double out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw config_error(line, std::string(key) + ": not a number: '" + std::string(v) + "'");
    return out;
}

long long parse_int(int line, std::string_view key, std::string_view v) {
    long long out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw config_error(line, std::string(key) + ": not an integer: '" + std::string(v) + "'");
    return out;
}

std::uint64_t parse_u64(int line, std::string_view key, std::string_view v) {
    std::uint64_t out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw config_error(line,
                           std::string(key) + ": not an unsigned integer: '" + std::string(v) + "'");
    return out;
}

// Shortest representation that parses back to the same double.
std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

void require(bool ok, int line, const std::string& msg) {
    if (!ok) throw config_error(line, msg);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error(lineno, "expected 'key = value', got '" + std::string(line) + "'");
        std::string key(trim(line.substr(0, eq)));
        std::string_view val = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(lineno, "empty key");
        if (val.empty()) throw config_error(lineno, key + ": empty value");
        if (!seen.insert(key).second) throw config_error(lineno, "duplicate key '" + key + "'");

        if (key == "scenario") {
            if (val == "constant")
                c.scenario = Scenario::constant;
            else if (val == "rotation")
                c.scenario = Scenario::rotation;
            else if (val == "hedgehog")
                c.scenario = Scenario::hedgehog;
            else
                throw config_error(lineno, "scenario: expected constant|rotation|hedgehog");
        } else if (key == "nx" || key == "ny" || key == "nz") {
            long long n = parse_int(lineno, key, val);
            require(n >= 3 && n <= 1024, lineno, key + ": must lie in [3, 1024]");
            (key == "nx" ? c.nx : key == "ny" ? c.ny : c.nz) = static_cast<int>(n);
        } else if (key == "box") {
            c.box = parse_double(lineno, key, val);
            require(c.box > 0, lineno, "box: must be positive");
        } else if (key == "a2" || key == "b2" || key == "c2") {
            double v = parse_double(lineno, key, val);
            require(v > 0, lineno, key + ": must be positive");
            (key == "a2" ? c.a2 : key == "b2" ? c.b2 : c.c2) = v;
        } else if (key == "L") {
            c.L = parse_double(lineno, key, val);
            require(c.L > 0, lineno, "L: must be positive");
        } else if (key == "L_max") {
            c.L_max = parse_double(lineno, key, val);
            require(c.L_max > 0, lineno, "L_max: must be positive");
        } else if (key == "L_factor") {
            c.L_factor = parse_double(lineno, key, val);
            require(c.L_factor > 0 && c.L_factor < 1, lineno, "L_factor: must lie in (0,1)");
        } else if (key == "L_count") {
            long long n = parse_int(lineno, key, val);
            require(n >= 2 && n <= 64, lineno, "L_count: must lie in [2, 64]");
            c.L_count = static_cast<int>(n);
        } else if (key == "margin") {
            c.margin = parse_double(lineno, key, val);
            require(c.margin > 0, lineno, "margin: must be positive");
        } else if (key == "lambda") {
            c.lambda = parse_double(lineno, key, val);
            require(c.lambda > 0 && c.lambda < 1, lineno, "lambda: must lie in (0,1)");
        } else if (key == "max_iters") {
            long long n = parse_int(lineno, key, val);
            require(n >= 1, lineno, "max_iters: must be at least 1");
            c.max_iters = static_cast<int>(n);
        } else if (key == "tol_residual") {
            c.tol_residual = parse_double(lineno, key, val);
        } else if (key == "initial_step") {
            c.initial_step = parse_double(lineno, key, val);
        } else if (key == "step_rule") {
            if (val == "fixed")
                c.step_rule = StepRule::fixed;
            else if (val == "adaptive" || val == "adaptive-curvature")
                c.step_rule = StepRule::adaptive_curvature;
            else
                throw config_error(lineno, "step_rule: expected fixed|adaptive");
        } else if (key == "seed") {
            c.seed = parse_u64(lineno, key, val);
        } else if (key == "log_every") {
            long long n = parse_int(lineno, key, val);
            require(n >= 0, lineno, "log_every: must be nonnegative");
            c.log_every = static_cast<int>(n);
        } else if (key == "threads") {
            long long n = parse_int(lineno, key, val);
            require(n >= 1 && n <= 256, lineno, "threads: must lie in [1, 256]");
            c.threads = static_cast<int>(n);
        } else {
            throw config_error(lineno, "unknown key '" + key + "'");
        }
    }
    return c;
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    auto kv = [&](const char* k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    kv("scenario", scenario_name(c.scenario));
    kv("nx", std::to_string(c.nx));
    kv("ny", std::to_string(c.ny));
    kv("nz", std::to_string(c.nz));
    kv("box", fmt_double(c.box));
    kv("a2", fmt_double(c.a2));
    kv("b2", fmt_double(c.b2));
    kv("c2", fmt_double(c.c2));
    kv("L", fmt_double(c.L));
    kv("L_max", fmt_double(c.L_max));
    kv("L_factor", fmt_double(c.L_factor));
    kv("L_count", std::to_string(c.L_count));
    kv("margin", fmt_double(c.margin));
    kv("lambda", fmt_double(c.lambda));
    kv("max_iters", std::to_string(c.max_iters));
    kv("tol_residual", fmt_double(c.tol_residual));
    kv("initial_step", fmt_double(c.initial_step));
    kv("step_rule", c.step_rule == StepRule::fixed ? "fixed" : "adaptive");
    kv("seed", std::to_string(c.seed));
    kv("log_every", std::to_string(c.log_every));
    kv("threads", std::to_string(c.threads));
    return out;
}

std::string config_hash(const RunConfig& c) {
    std::string s = serialize_config(c);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

SolverOptions to_solver_options(const RunConfig& c) {
    SolverOptions o;
    o.max_iters = c.max_iters;
    o.tol_residual = c.tol_residual;
    o.step_rule = c.step_rule;
    o.initial_step = c.initial_step;
    o.seed = c.seed;
    o.log_every = c.log_every;
    return o;
}

SweepConfig to_sweep_config(const RunConfig& c) {
    SweepConfig s;
    s.nx = c.nx;
    s.ny = c.ny;
    s.nz = c.nz;
    s.box = c.box;
    s.origin = {0.0, 0.0, 0.0};
    s.scenario = c.scenario;
    s.a2 = c.a2;
    s.b2 = c.b2;
    s.c2 = c.c2;
    s.L_sequence = default_L_sequence(c.L_max, c.L_factor, c.L_count);
    s.margin = c.margin;
    s.lambda = c.lambda;
    s.solver = to_solver_options(c);
    return s;
}

MaterialParams to_material_params(const RunConfig& c) {
    return derive_params(c.a2, c.b2, c.c2, c.L);
}

}  // namespace ldg
