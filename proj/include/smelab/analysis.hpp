#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smelab/field.hpp"
#include "smelab/params.hpp"

namespace sme {

/// One named measurement with its verdict.
struct Check {
    std::string name;
    std::string field;              // which field was checked (corpus id, run id or closed form)
    std::vector<std::pair<std::string, double>> values;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;

    double value(const std::string& key) const;
};

struct VerificationReport {
    std::vector<Check> checks;
    std::uint64_t seed = 0;
    bool all_pass() const;
};

std::string to_json(const VerificationReport& r);
/// One row per check: check,field,key,value,tolerance,pass.
std::string to_csv(const VerificationReport& r);

// ---------------------------------------------------------------- volume bounds

struct VolumeBound {
    double rho = 0.0;
    double area_integral = 0.0;     // int_{S_{rho/2}} v dx
    double weighted_integral = 0.0; // int_{S_{rho/2}} v u^{m-1} dx
    double ratio_i = 0.0;           // area_integral / rho^n
    double ratio_ii = 0.0;          // weighted_integral / ((rho + u(x0))^{m-1} rho^n)
    std::size_t member_cells = 0;
};

/// S_s = {x : |x - x0|^2 + (u(x) - u(x0))^2 < s^2}, membership and integrands at cell centres
/// (bilinear u, cell-averaged gradient). u(x0) is interpolated. Throws PreconditionError if
/// the ball of radius rho about (x0, u(x0)) reaches a boundary node.
VolumeBound volume_bound_check(const ScalarField& u, const Params& p, Point center, double rho);

/// max over x in B_{rho/2}(center) of u(x) / rho (the quantity bounded below by eps0).
double eps0_probe(const ScalarField& u, Point center, double rho);

// ---------------------------------------------------------------- Holder / gradient

struct HolderBound {
    double holder_half = 0.0;       // sup |u(x)-u(y)| / |x-y|^{1/2}
    double grad_u2 = 0.0;           // sup |D(u^2)|
    std::size_t pairs = 0;
};

/// Quotients over node pairs in B_{radius}(center) (radius <= 0: all interior nodes):
/// every pair within four lattice steps plus a strided all-pairs sample.
double holder_half_quotient(const ScalarField& u, Point center, double radius, std::size_t* pairs = nullptr);

/// Holder-1/2 quotient and sup |D u^2| on B_{rho/2}(center).
HolderBound holder_check(const ScalarField& u, Point center, double rho);

/// sup |Du| on B_{theta rho}(center); requires sup_{B_rho} u < M (PreconditionError otherwise).
double gradient_bound_check(const ScalarField& u, Point center, double M, double rho, double theta);

// ---------------------------------------------------------------- stability inequality

struct StabilityMargin {
    double lhs = 0.0;               // int |A|^2 zeta^2 v dx
    double grad_term = 0.0;         // int |grad_G zeta|^2 v dx
    double mass_term = 0.0;         // int zeta^2 v dx
    double rhs = 0.0;               // grad_term / (1 - eps) + mass_term / (eps delta^2)
    double margin = 0.0;            // rhs - lhs
};

/// Both sides of the stability inequality on the graph. zeta must vanish on boundary nodes and
/// wherever u <= delta (PreconditionError otherwise).
StabilityMargin stability_check(const ScalarField& u, const Params& p, const ScalarField& zeta, double eps,
                                double delta);

// ---------------------------------------------------------------- test functions

/// (1 - |x-c|^2/r^2)^3 inside the disk, 0 outside.
ScalarField bump(const GridPtr& grid, Point c, double r);

/// Bump with seeded centre and radius inside {dist(x, boundary) > margin} (radius <= max_r).
ScalarField random_bump(const GridPtr& grid, std::uint64_t seed, double margin, double max_r);

/// Zero every value within distance `width` of the boundary (and on boundary nodes).
void clear_near_boundary(ScalarField& zeta, double width);

// ---------------------------------------------------------------- weak form

struct WeakCheck {
    double max_relative = 0.0;          // max over trials of |W(zeta)| / (|zeta|_1 + |D zeta|_1)
    double max_relative_cutoff = 0.0;   // same with zeta * chi_j, chi_j = 0 near {u < threshold}
    std::vector<double> cutoff_widths;  // 1/j
    std::vector<double> cutoff_residuals;
    std::vector<double> cutoff_gradient_mass;  // int |D chi_j|
    int trials = 0;
};

WeakCheck weak_solution_check(const ScalarField& u, const Params& p, int trials, std::uint64_t seed,
                              double threshold);

// ---------------------------------------------------------------- blow-ups

struct BlowupSequence {
    Point center;
    std::vector<double> scales;
    std::vector<ScalarField> fields;    // u_j(x) = u(lambda_j x + x0) / lambda_j on the reference grid
    std::vector<double> slope_ratio;    // max u_j(x)/|x| over 0.25 <= |x| <= 1
    std::vector<double> successive_diff;// max |u_{j+1} - u_j| over the reference disk
    std::vector<bool> skipped;          // scale does not fit inside the domain
    GridPtr reference;
};

/// Reference grid: unit disk at spacing ref_h. Resampling is bilinear on the source lattice.
/// With `centered`, u(x0) is subtracted first (blow-up at a point where u does not vanish).
BlowupSequence blowup_sequence(const ScalarField& u, Point x0, const std::vector<double>& scales,
                               double ref_h = 1.0 / 32, bool centered = false);

/// Bilinear interpolation of u at p; nodes outside the domain are not used (falls back to the
/// nearest active node). Throws PreconditionError if p is farther than h from every active node.
double sample(const ScalarField& u, Point p);

// ---------------------------------------------------------------- singular set

struct SingularSet {
    std::vector<std::size_t> nodes;    // u < threshold
    double threshold = 0.0;
    std::vector<double> box_sizes;     // s = k h
    std::vector<double> box_counts;
    std::optional<double> dimension;   // least-squares slope of log N vs log(1/s)
};

/// Nodes with u < threshold and their box-counting dimension over box sizes {4h, 8h, 16h, 32h}.
/// A box of side k h covers k+1 consecutive lattice nodes per axis; counts are minimised over
/// all (k+1)^2 tiling offsets. Dimension is undefined with fewer than two nonempty scales.
SingularSet singular_set(const ScalarField& u, double threshold);

}  // namespace sme
