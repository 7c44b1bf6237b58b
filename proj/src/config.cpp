#include "smelab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smelab/errors.hpp"
#include "smelab/io.hpp"

namespace sme {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::map<std::string, std::string> spec_options(const std::string& spec, std::string& kind) {
    std::map<std::string, std::string> kv;
    const auto colon = spec.find(':');
    kind = trim(spec.substr(0, colon));
    if (colon == std::string::npos) return kv;
    std::istringstream is(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        const auto eq = tok.find('=');
        if (eq == std::string::npos) kv[""] = tok;
        else kv[trim(tok.substr(0, eq))] = trim(tok.substr(eq + 1));
    }
    return kv;
}

double parse_real(std::string_view text) {
    const std::string s = trim(text);
    auto one = [&](std::string_view t) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
            throw ParseError("expected a number, got '" + s + "'");
        return v;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return one(s);
    const double den = one(std::string_view(s).substr(slash + 1));
    if (den == 0.0) throw ParseError("division by zero in '" + s + "'");
    return one(std::string_view(s).substr(0, slash)) / den;
}

Config Config::parse(std::string_view text, const std::string& origin) {
    Config c;
    std::string section;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        const std::string s = trim(std::string_view(line).substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(origin + ":" + std::to_string(lineno) + ": unterminated section");
            section = trim(std::string_view(s).substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(s).substr(0, eq));
        if (key.empty()) throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        c.entries_[section.empty() ? key : section + "." + key] = trim(std::string_view(s).substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return parse_real(it->second);
    } catch (const ParseError& e) {
        throw ParseError(key + ": " + e.what());
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    int v = 0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(key + ": expected an integer, got '" + s + "'");
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& s = it->second;
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ParseError(key + ": expected a boolean, got '" + s + "'");
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string Config::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

SolveConfig solve_config_from(const Config& c, const std::string& section) {
    const std::string s = section + ".";
    SolveConfig cfg;
    cfg.delta = c.get_double(s + "delta", cfg.delta);
    cfg.tol_residual = c.get_double(s + "tol_residual", cfg.tol_residual);
    cfg.max_outer_iters = c.get_int(s + "max_outer_iters", cfg.max_outer_iters);
    cfg.damping = c.get_double(s + "damping", cfg.damping);
    cfg.linear_tol = c.get_double(s + "linear_tol", cfg.linear_tol);
    cfg.linear_max_iters = c.get_int(s + "linear_max_iters", cfg.linear_max_iters);
    cfg.newton_polish = c.get_bool(s + "newton_polish", cfg.newton_polish);
    cfg.handoff_residual = c.get_double(s + "handoff_residual", cfg.handoff_residual);
    cfg.newton_max_iters = c.get_int(s + "newton_max_iters", cfg.newton_max_iters);
    cfg.floor_stall_iters = c.get_int(s + "floor_stall_iters", cfg.floor_stall_iters);
    cfg.validate();
    return cfg;
}

ContinuationSchedule schedule_from(const Config& c, const std::string& section) {
    const std::string s = section + ".";
    ContinuationSchedule sc;
    sc.samples = c.get_int(s + "samples", sc.samples);
    sc.max_bisections = c.get_int(s + "max_bisections", sc.max_bisections);
    sc.bracket_tol = c.get_double(s + "bracket_tol", sc.bracket_tol);
    sc.delta_levels = c.get_int(s + "delta_levels", sc.delta_levels);
    sc.delta_fraction = c.get_double(s + "delta_fraction", sc.delta_fraction);
    sc.collar_eta = c.get_double(s + "collar_eta", sc.collar_eta);
    sc.singular_threshold = c.get_double(s + "singular_threshold", sc.singular_threshold);
    sc.floor_stall_iters = c.get_int(s + "floor_stall_iters", sc.floor_stall_iters);
    sc.extract_singular = c.get_bool(s + "extract_singular", sc.extract_singular);
    if (sc.samples < 1 || sc.delta_levels < 1 || !(sc.bracket_tol > 0) || !(sc.delta_fraction > 0))
        throw PreconditionError("continuation schedule: samples, delta_levels, bracket_tol, delta_fraction must be positive");
    return sc;
}

StepControl step_control_from(const Config& c, const std::string& section) {
    const std::string s = section + ".";
    StepControl ctl;
    ctl.step = c.get_double(s + "step", ctl.step);
    ctl.adaptive = c.get_bool(s + "adaptive", ctl.adaptive);
    ctl.tol = c.get_double(s + "tol", ctl.tol);
    ctl.max_step = c.get_double(s + "max_step", ctl.max_step);
    ctl.min_step = c.get_double(s + "min_step", ctl.min_step);
    ctl.launch_u = c.get_double(s + "launch_u", ctl.launch_u);
    ctl.switch_slope = c.get_double(s + "switch_slope", ctl.switch_slope);
    return ctl;
}

BoundaryData boundary_from_spec(const std::string& spec, const GridPtr& grid, const Params& p) {
    std::string kind;
    const auto kv = spec_options(spec, kind);
    auto num = [&](const std::string& key, double def, bool required = false) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw ParseError("boundary spec '" + spec + "': missing '" + key + "'");
            return def;
        }
        return parse_real(it->second);
    };
    if (kind == "constant") {
        const double v = kv.count("") ? parse_real(kv.at("")) : num("value", 0, true);
        return BoundaryData::constant(grid, v);
    }
    if (kind == "cone") {
        const double slope = kv.count("slope") ? num("slope", 0) : p.cone_slope();
        return BoundaryData::cone_trace(grid, slope, {num("cx", 0), num("cy", 0)});
    }
    if (kind == "linear") {
        const double c0 = num("c", 0, true), ax = num("ax", 0), ay = num("ay", 0);
        return BoundaryData::from_function(grid, [=](double x, double y) { return c0 + ax * x + ay * y; },
                                           "linear c=" + fmt(c0) + " ax=" + fmt(ax) + " ay=" + fmt(ay));
    }
    if (kind == "exterior") {
        const double lam = num("lambda", 0, true), cx = num("cx", 0), cy = num("cy", 0);
        if (!(lam > 0)) throw ParseError("boundary spec: exterior lambda must be positive");
        double rmax = 0.0;
        for (std::size_t b = 0; b < grid->boundary().size(); ++b)
            rmax = std::max(rmax, distance(grid->boundary_anchor(b), {cx, cy}));
        const RadialProfile psi = scale_profile(integrate_exterior(p, std::max(2.0, 1.01 * rmax / lam)), lam);
        return BoundaryData::from_function(
            grid,
            [&](double x, double y) {
                const double r = std::hypot(x - cx, y - cy);
                if (r < lam) throw PreconditionError("exterior trace: boundary point inside the launch circle");
                return profile_value(psi, r);
            },
            "exterior lambda=" + fmt(lam) + " cx=" + fmt(cx) + " cy=" + fmt(cy));
    }
    if (kind == "csv") {
        const std::string path = kv.count("") ? kv.at("") : (kv.count("path") ? kv.at("path") : "");
        if (path.empty()) throw ParseError("boundary spec: csv needs a path");
        const ScalarField f = read_field_csv(path, grid);
        std::vector<double> vals;
        for (std::size_t k : grid->boundary()) vals.push_back(f[k]);
        return BoundaryData(grid, std::move(vals), "csv " + path);
    }
    throw ParseError("boundary spec: unknown kind '" + kind + "' (expected constant, cone, linear, exterior, csv)");
}

}  // namespace sme
