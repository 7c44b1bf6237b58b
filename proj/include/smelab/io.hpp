#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smelab/field.hpp"
#include "smelab/radial.hpp"

namespace sme {

/// Shortest round-trip representation of a double.
std::string fmt(double v);

/// CSV with header `x,y,u`, one row per active node, row-major (y outer). Each entry
/// of `meta` becomes a leading `# ` comment line.
void write_field_csv(std::ostream& os, const ScalarField& u, const std::vector<std::string>& meta = {});
void write_field_csv(const std::string& path, const ScalarField& u, const std::vector<std::string>& meta = {});

/// Read a field written by write_field_csv onto `grid`. Every active node must be present.
ScalarField read_field_csv(const std::string& path, const GridPtr& grid);

/// Profile CSV: `# key: value` metadata lines, then header `r,u,du_dr`.
void write_profile_csv(std::ostream& os, const RadialProfile& prof, const std::vector<std::string>& meta = {});
void write_profile_csv(const std::string& path, const RadialProfile& prof,
                       const std::vector<std::string>& meta = {});
RadialProfile read_profile_csv(const std::string& path, const Params& p);

/// Write a whole file, creating parent directories.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace sme
