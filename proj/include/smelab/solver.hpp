#pragma once

#include <string>
#include <vector>

#include "smelab/field.hpp"
#include "smelab/params.hpp"

namespace sme {

struct SolveConfig {
    double delta = 1e-3;            // floor: the right side uses (m-1)/max(v, delta)
    double tol_residual = 1e-8;
    int max_outer_iters = 400;
    double damping = 0.5;
    double linear_tol = 1e-12;      // floor for the relative Krylov tolerance
    int linear_max_iters = 2000;
    bool newton_polish = true;      // finish with Newton on the divergence-form residual
    double handoff_residual = 1e-4; // Picard residual at which Newton takes over
    int newton_max_iters = 12;
    int floor_stall_iters = 0;      // stop after this many consecutive floored iterates (0: never)

    /// Throws PreconditionError when a field is out of range.
    void validate() const;
};

struct SolveOutcome {
    ScalarField u;
    bool converged = false;
    int iterations = 0;             // Picard iterations
    int newton_iterations = 0;
    double residual = 0.0;          // residual used for the convergence decision, on {u > 2 delta}
    std::string residual_kind;      // "divergence" (after Newton) or "picard"
    double divergence_residual = 0.0;  // max |sme_residual| on {u > 2 delta}
    double picard_residual = 0.0;   // max |(a_ij(Du) D_ij u - (m-1)/max(u,delta)) / v| on {u > 2 delta}
    double last_increment = 0.0;
    double min_u = 0.0;
    double max_grad = 0.0;
    bool floor_active = false;      // min_u <= delta (1 + 1e-6)
    bool floor_clamped = false;     // some iterate was clamped at delta
    bool newton_fallback = false;   // Newton hit a singular Jacobian or could not reduce the residual
    std::vector<double> history;    // Picard residual per outer iteration
    std::vector<double> newton_history;
};

/// One solve of sum a_ij(Dv) D_ij u = (m-1)/max(v, delta) with u = boundary on boundary nodes.
ScalarField linearized_step(const ScalarField& v, const BoundaryData& boundary, const Params& p,
                            const SolveConfig& cfg);

/// Damped Picard iteration of linearized_step, optionally finished by newton_refine.
/// `initial` (if given) replaces the default start.
SolveOutcome solve_dirichlet(const BoundaryData& boundary, const Params& p, const SolveConfig& cfg,
                             const ScalarField* initial = nullptr);

/// Newton iteration on the divergence-form residual. Requires u > 2 delta at interior nodes.
SolveOutcome newton_refine(const ScalarField& u, const BoundaryData& boundary, const Params& p,
                           const SolveConfig& cfg);

/// Picard-form residual (a_ij(Du) D_ij u - (m-1)/max(u, delta)) / v at interior nodes.
ScalarField picard_residual(const ScalarField& u, const Params& p, double delta);

/// Max of |r| over interior nodes with u > 2 delta (0 if there are none).
double max_on_free_region(const ScalarField& r, const ScalarField& u, double delta);

/// Fill SolveOutcome statistics (residuals, min_u, max_grad, floor flags) for a field.
void summarize(SolveOutcome& out, const Params& p, const SolveConfig& cfg);

/// Boundary level above which the barrier argument forces inf u >= K/2 for constant
/// data K on a domain of diameter d containing the origin: K > (m-1) / (2 (n-1) theta lower),
/// theta = 1/(2 d^2), where `lower` is any known positive lower bound for u.
double max_principle_threshold(const Params& p, double diameter, double lower);

/// Pinned-minimum fixed point: find (lambda, u) with u = T_lambda(u) and min u = delta for
/// boundary data lambda -> base + lambda * direction (affine family). Used to extract the
/// fixed points on the boundary of the floor region.
struct PinnedOutcome {
    ScalarField u;
    double lambda = 0.0;
    bool converged = false;
    int iterations = 0;
    double increment = 0.0;
    std::vector<double> history;
};
PinnedOutcome solve_pinned_minimum(const BoundaryData& base, const BoundaryData& direction, double delta,
                                   double lambda0, const ScalarField& initial, const Params& p,
                                   const SolveConfig& cfg);

}  // namespace sme
