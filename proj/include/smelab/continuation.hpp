#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smelab/analysis.hpp"
#include "smelab/solver.hpp"

namespace sme {

enum class DataClass { StronglyPositive, SmallNonsolvable, Undetermined };
std::string to_string(DataClass c);

struct Classification {
    DataClass kind = DataClass::Undetermined;
    double min_phi = 0.0, sup_phi = 0.0;
    double positivity_margin = 0.0;   // min over boundary of phi(x) - beta sup_{x0} |x - x0|
    double smallness_bound = 0.0;     // eps0_hat * inradius / 2 (sup phi must be below this)
};

/// Strongly positive if phi(x) > beta sup_{x0 in domain} |x - x0| at every boundary node;
/// small non-solvable if sup phi < eps0_hat inradius / 2 (a factor 2 of safety on the measured
/// constant); undetermined otherwise. eps0_hat <= 0 disables the smallness test.
Classification classify_boundary_data(const BoundaryData& phi, const Params& p, double beta, double eps0_hat);

/// lambda in [0, 1] -> boundary data on a fixed grid.
struct BoundaryFamily {
    std::function<BoundaryData(double)> at;
    std::string label;

    /// phi_lambda = lambda * phi_1.
    static BoundaryFamily linear(const BoundaryData& phi1);
    /// phi_lambda = phi_0 for every lambda.
    static BoundaryFamily constant(const BoundaryData& phi);
};

struct ContinuationSchedule {
    int samples = 8;                  // scan lambda = k / samples, k = 0..samples
    int max_bisections = 12;
    double bracket_tol = 0.01;
    int delta_levels = 7;             // delta_j = delta_0 2^{-j}, j < delta_levels
    double delta_fraction = 0.1;      // delta_0 = fraction * min boundary value
    double collar_eta = 0.1;
    double singular_threshold = 0.0;  // <= 0: 3h
    int floor_stall_iters = 30;
    bool extract_singular = true;
};

struct DeltaSolve {
    double delta = 0.0;
    bool converged = false;
    bool floor_active = false;
    double min_u = 0.0;
    double max_grad = 0.0;
    int iterations = 0;
};

struct LambdaRecord {
    double lambda = 0.0;
    bool solvable = false;
    bool bisection = false;           // produced by bisection rather than the scan
    std::vector<DeltaSolve> solves;
    double min_u = 0.0;               // of the last solve
    double max_grad = 0.0;
};

struct SingularLimit {
    bool equicontinuous = false;
    bool differences_decrease = false;
    bool min_to_zero = false;
    bool boundary_touching = false;
    bool claimed = false;             // all of the above favourable
    std::vector<double> holder;       // Holder-1/2 quotient per field
    std::vector<double> min_u;        // per field
    std::vector<double> successive_diff;  // max |u_{j+1} - u_j|
    std::vector<double> collar_min;   // min of u within eta of the boundary, per field
    double threshold = 0.0;
    double eta = 0.0;
    std::vector<std::size_t> sing_nodes;
    std::optional<ScalarField> limit;
};

/// Uniform limit test for a sequence of fields with decreasing floors.
SingularLimit detect_singular_limit(const std::vector<ScalarField>& seq, double threshold, double eta);

struct SingularCandidate {
    double lambda = 0.0;
    std::vector<double> deltas;
    std::vector<double> lambdas;      // pinned lambda per delta level
    std::vector<bool> converged;
    SingularLimit limit;
    ScalarField field;                // finest-delta field
    double holder_half = 0.0;
    double collar_min = 0.0;
    double barrier_margin = 0.0;      // min over the collar of u - psi_lambda(|x - y0|) (diagnostic)
};

struct Flip {
    double from = 0.0, to = 0.0;      // consecutive scan points whose signals differ
    bool to_solvable = false;
};

struct ContinuationReport {
    std::string family;
    Params params;
    double h = 0.0;
    std::vector<LambdaRecord> records;   // sorted by lambda
    std::vector<Flip> flips;
    std::optional<std::pair<double, double>> bracket;  // (lambda_lo non-solvable, lambda_hi solvable)
    bool monotone = true;             // no solvable -> non-solvable flip in the scan
    std::vector<std::string> diagnostics;
    std::optional<SingularCandidate> singular;
};

/// Scan, bisect the first non-solvable -> solvable flip, then follow fixed points with a pinned
/// minimum delta_j -> 0 from the solvable end of the bracket.
ContinuationReport continuation_run(const BoundaryFamily& family, const Params& p, const SolveConfig& cfg,
                                    const ContinuationSchedule& schedule);

/// Structured JSON (fields are referenced by file name, not embedded).
std::string to_json(const ContinuationReport& r, const std::string& candidate_csv = "");
/// lambda,solvable,bisection,min_u,max_grad,delta,converged,floor_active per solve.
std::string records_csv(const ContinuationReport& r);

/// Signal at one lambda (exposed for testing): the delta_0 solve decides if it converges
/// unfloored, otherwise the finest-delta solve decides.
LambdaRecord solvability_signal(const BoundaryData& phi, double lambda, const Params& p, const SolveConfig& cfg,
                                const ContinuationSchedule& schedule, const ScalarField* warm,
                                ScalarField* solution = nullptr);

}  // namespace sme
