#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "smelab/continuation.hpp"
#include "smelab/radial.hpp"
#include "smelab/solver.hpp"

namespace sme {

/// Flat key=value settings. `[section]` headers prefix the following keys as
/// "section.key"; `#` and `;` start comments. Later assignments win.
class Config {
public:
    static Config parse(std::string_view text, const std::string& origin = "<string>");
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    /// Sorted "key=value" lines; the hash is FNV-1a 64 over this text.
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

private:
    std::map<std::string, std::string> entries_;
};

/// Split "kind:key=value,key=value" into kind and options. A bare value is stored under "".
std::map<std::string, std::string> spec_options(const std::string& spec, std::string& kind);

/// Numbers written as "1/64" are accepted wherever a real is expected.
double parse_real(std::string_view text);

SolveConfig solve_config_from(const Config& c, const std::string& section = "solve");
ContinuationSchedule schedule_from(const Config& c, const std::string& section = "continue");
StepControl step_control_from(const Config& c, const std::string& section = "radial");

/// Boundary data from a spec string:
///   constant:value=K           (or constant:K)
///   cone[:slope=a,cx=0,cy=0]   slope defaults to the cone slope of p
///   linear:c=2,ax=0.5,ay=0     c + ax x + ay y
///   exterior:lambda=L,cx,cy    trace of lambda psi(|x - c| / lambda), the scaled exterior profile
///   csv:path                   one value per boundary node, "x,y,u" rows as written by the CLI
BoundaryData boundary_from_spec(const std::string& spec, const GridPtr& grid, const Params& p);

}  // namespace sme
