#include "smelab/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "linear.hpp"
#include "smelab/errors.hpp"
#include "smelab/operators.hpp"

namespace sme {

void SolveConfig::validate() const {
    if (!(delta > 0)) throw PreconditionError("SolveConfig: delta must be positive");
    if (!(damping > 0 && damping <= 1)) throw PreconditionError("SolveConfig: damping must lie in (0, 1]");
    if (!(tol_residual > 0) || !(linear_tol > 0)) throw PreconditionError("SolveConfig: tolerances must be positive");
    if (max_outer_iters < 0 || linear_max_iters <= 0) throw PreconditionError("SolveConfig: bad iteration limits");
}

namespace {

// Rows: interior nodes. A acts on interior unknowns, B couples to boundary values:
// A u_int + B phi = source.
struct LinearSystem {
    SpMat A;
    SpMat B;
    Vec source;
};

LinearSystem assemble(const ScalarField& v, const Params& p, double delta) {
    const Grid2D& g = v.g();
    const auto& in = g.interior();
    const std::size_t ni = in.size(), nb = g.boundary().size();
    const double h2 = g.h() * g.h();
    const auto vals = v.values();
    std::vector<Eigen::Triplet<double>> ta, tb;
    ta.reserve(9 * ni);
    tb.reserve(3 * nb);
    LinearSystem sys;
    sys.source.resize(long(ni));
    for (std::size_t r = 0; r < ni; ++r) {
        const std::size_t k = in[r];
        double px, py;
        detail::central_gradient(g, vals, k, px, py);
        const double w = 1.0 + px * px + py * py;
        const double a11 = 1.0 - px * px / w, a22 = 1.0 - py * py / w, a12 = -px * py / w;
        const double cx = a11 / h2, cy = a22 / h2, cxy = 2.0 * a12 / (4.0 * h2);
        const struct {
            int di, dj;
            double c;
        } st[9] = {{0, 0, -2 * cx - 2 * cy}, {1, 0, cx},  {-1, 0, cx},   {0, 1, cy},  {0, -1, cy},
                   {1, 1, cxy},          {-1, -1, cxy}, {1, -1, -cxy}, {-1, 1, -cxy}};
        for (const auto& s : st) {
            if (s.c == 0.0) continue;
            const std::size_t q = g.neighbor(k, s.di, s.dj);
            if (g.is_interior(q))
                ta.emplace_back(long(r), g.interior_id(q), s.c);
            else
                tb.emplace_back(long(r), g.boundary_id(q), s.c);
        }
        sys.source[long(r)] = (p.m - 1) / std::max(vals[k], delta);
    }
    sys.A.resize(long(ni), long(ni));
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.B.resize(long(ni), long(nb));
    sys.B.setFromTriplets(tb.begin(), tb.end());
    return sys;
}

Vec boundary_vec(const BoundaryData& bd) {
    const auto& v = bd.values();
    return Eigen::Map<const Vec>(v.data(), long(v.size()));
}

Vec interior_vec(const ScalarField& u) {
    const auto& in = u.g().interior();
    Vec x(long(in.size()));
    for (std::size_t r = 0; r < in.size(); ++r) x[long(r)] = u[in[r]];
    return x;
}

ScalarField scatter(const GridPtr& grid, const Vec& x, const Vec& bvals) {
    ScalarField u(grid);
    const auto& in = grid->interior();
    const auto& bn = grid->boundary();
    for (std::size_t r = 0; r < in.size(); ++r) u[in[r]] = x[long(r)];
    for (std::size_t b = 0; b < bn.size(); ++b) u[bn[b]] = bvals[long(b)];
    return u;
}

void require_grid(const ScalarField& u, const BoundaryData& bd, const char* op) {
    if (!bd.grid() || !u.grid()->same_as(*bd.grid()))
        throw StructuralError(std::string(op) + ": boundary data lives on a different grid");
}

// Divergence-form residual at interior nodes; requires u > 0 there.
Vec div_residual(const ScalarField& u, const Params& p) {
    const ScalarField r = sme_residual(u, p);
    return interior_vec(r);
}

double max_abs(const Vec& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

// Jacobian of the divergence-form residual by central differences, nine interleaved
// colours so that each perturbation touches one column per 3x3 block.
Eigen::SparseMatrix<double> fd_jacobian(const ScalarField& u, const Params& p) {
    const Grid2D& g = u.g();
    const auto& in = g.interior();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * in.size());
    ScalarField plus = u, minus = u;
    for (int ci = 0; ci < 3; ++ci)
        for (int cj = 0; cj < 3; ++cj) {
            std::vector<std::size_t> cols;
            std::vector<double> eps;
            for (std::size_t k : in) {
                const int i = g.i_of(k), j = g.j_of(k);
                if (((i % 3) + 3) % 3 != ci || ((j % 3) + 3) % 3 != cj) continue;
                const double e = 1e-6 * std::max(1.0, std::abs(u[k]));
                cols.push_back(k);
                eps.push_back(e);
                plus[k] = u[k] + e;
                minus[k] = u[k] - e;
            }
            if (cols.empty()) continue;
            const ScalarField rp = sme_residual(plus, p);
            const ScalarField rm = sme_residual(minus, p);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const std::size_t q = cols[c];
                for (int dj = -1; dj <= 1; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        const std::size_t k = g.neighbor(q, di, dj);
                        if (!g.is_interior(k)) continue;
                        const double d = (rp[k] - rm[k]) / (2 * eps[c]);
                        if (d != 0.0) trip.emplace_back(g.interior_id(k), g.interior_id(q), d);
                    }
                plus[q] = u[q];
                minus[q] = u[q];
            }
        }
    Eigen::SparseMatrix<double> J(long(in.size()), long(in.size()));
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

struct Stepper {
    const BoundaryData& bd;
    const Params& p;
    const SolveConfig& cfg;
    Vec guess;
    LinearInfo info;

    // reduction > 0: ask the Krylov solve to shrink the residual of the warm start by this
    // factor (never below linear_tol); reduction = 0: plain linear_tol.
    ScalarField operator()(const ScalarField& v, double reduction) {
        const LinearSystem sys = assemble(v, p, cfg.delta);
        LinearSolver solver;
        solver.compute(sys.A);
        const Vec phi = boundary_vec(bd);
        const Vec rhs = sys.source - sys.B * phi;
        double tol = cfg.linear_tol;
        if (reduction > 0 && guess.size() == rhs.size())
            tol = std::max(tol, reduction * (rhs - sys.A * guess).norm() / rhs.norm());
        const Vec x = solver.solve(rhs, guess, tol, cfg.linear_max_iters, &info);
        guess = x;
        return scatter(v.grid(), x, phi);
    }
};

}  // namespace

ScalarField picard_residual(const ScalarField& u, const Params& p, double delta) {
    const Grid2D& g = u.g();
    ScalarField r(u.grid());
    const auto vals = u.values();
    const double h2 = g.h() * g.h();
    for (std::size_t k : g.interior()) {
        double px, py;
        detail::central_gradient(g, vals, k, px, py);
        const double w = 1.0 + px * px + py * py;
        const double c = vals[k];
        const double uxx = (vals[g.neighbor(k, 1, 0)] - 2 * c + vals[g.neighbor(k, -1, 0)]) / h2;
        const double uyy = (vals[g.neighbor(k, 0, 1)] - 2 * c + vals[g.neighbor(k, 0, -1)]) / h2;
        const double uxy = (vals[g.neighbor(k, 1, 1)] + vals[g.neighbor(k, -1, -1)] - vals[g.neighbor(k, 1, -1)] -
                            vals[g.neighbor(k, -1, 1)]) /
                           (4 * h2);
        const double lhs = (1 - px * px / w) * uxx + (1 - py * py / w) * uyy - 2 * px * py / w * uxy;
        r[k] = (lhs - (p.m - 1) / std::max(c, delta)) / std::sqrt(w);
    }
    return r;
}

double max_on_free_region(const ScalarField& r, const ScalarField& u, double delta) {
    double m = 0.0;
    for (std::size_t k : u.g().interior())
        if (u[k] > 2 * delta) m = std::max(m, std::abs(r[k]));
    return m;
}

void summarize(SolveOutcome& out, const Params& p, const SolveConfig& cfg) {
    const ScalarField& u = out.u;
    out.min_u = u.min_interior();
    const VectorField du = gradient(u);
    out.max_grad = 0.0;
    for (std::size_t k = 0; k < u.g().size(); ++k)
        if (u.g().active(k)) out.max_grad = std::max(out.max_grad, du.norm(k));
    out.floor_active = out.min_u <= cfg.delta * (1 + 1e-6);
    out.picard_residual = max_on_free_region(picard_residual(u, p, cfg.delta), u, cfg.delta);
    if (out.min_u > 0)
        out.divergence_residual = max_on_free_region(sme_residual(u, p), u, cfg.delta);
    else
        out.divergence_residual = std::numeric_limits<double>::infinity();
}

ScalarField linearized_step(const ScalarField& v, const BoundaryData& boundary, const Params& p,
                            const SolveConfig& cfg) {
    cfg.validate();
    require_grid(v, boundary, "linearized_step");
    Stepper step{boundary, p, cfg, {}, {}};
    return step(v, 0.0);
}

SolveOutcome solve_dirichlet(const BoundaryData& boundary, const Params& p, const SolveConfig& cfg,
                             const ScalarField* initial) {
    cfg.validate();
    if (!(boundary.min() > 0)) throw PreconditionError("solve_dirichlet: boundary data must be positive");
    const GridPtr& grid = boundary.grid();
    const double h = grid->h();
    Stepper step{boundary, p, cfg, {}, {}};

    SolveOutcome out;
    ScalarField u;
    if (initial) {
        require_grid(*initial, boundary, "solve_dirichlet");
        u = *initial;
        boundary.apply(u);
    } else {
        const ScalarField v0(grid, std::max(boundary.mean(), 2 * cfg.delta));
        u = step(v0, 0.0);
    }
    for (std::size_t k : grid->interior())
        if (u[k] < cfg.delta) {
            u[k] = cfg.delta;
            out.floor_clamped = true;
        }

    bool handoff = false;
    int floored_run = 0;
    double res = max_on_free_region(picard_residual(u, p, cfg.delta), u, cfg.delta);
    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        const ScalarField w = step(u, 1e-3);
        double inc = 0.0, umin = std::numeric_limits<double>::infinity();
        for (std::size_t k : grid->interior()) {
            double next = (1 - cfg.damping) * u[k] + cfg.damping * w[k];
            if (next < cfg.delta) {
                next = cfg.delta;
                out.floor_clamped = true;
            }
            if (!std::isfinite(next)) throw SolverError("solve_dirichlet: non-finite iterate", out.history);
            inc = std::max(inc, std::abs(next - u[k]));
            umin = std::min(umin, next);
            u[k] = next;
        }
        res = max_on_free_region(picard_residual(u, p, cfg.delta), u, cfg.delta);
        out.history.push_back(res);
        out.iterations = it + 1;
        out.last_increment = inc;
        const bool floored = umin <= cfg.delta * (1 + 1e-6);
        if (res <= cfg.tol_residual && inc < cfg.tol_residual * h) {
            out.converged = true;
            break;
        }
        if (cfg.newton_polish && !floored && umin > 2 * cfg.delta && res <= cfg.handoff_residual) {
            handoff = true;
            break;
        }
        floored_run = floored ? floored_run + 1 : 0;
        if (cfg.floor_stall_iters > 0 && floored_run >= cfg.floor_stall_iters) break;
    }
    out.u = u;
    out.residual_kind = "picard";
    summarize(out, p, cfg);
    out.residual = out.picard_residual;

    if (cfg.newton_polish && (handoff || out.converged) && out.min_u > 2 * cfg.delta) {
        SolveOutcome nw = newton_refine(u, boundary, p, cfg);
        nw.iterations = out.iterations;
        nw.history = out.history;
        nw.last_increment = out.last_increment;
        nw.floor_clamped = out.floor_clamped;
        return nw;
    }
    return out;
}

SolveOutcome newton_refine(const ScalarField& u0, const BoundaryData& boundary, const Params& p,
                           const SolveConfig& cfg) {
    cfg.validate();
    require_grid(u0, boundary, "newton_refine");
    const Grid2D& g = u0.g();
    for (std::size_t k : g.interior())
        if (!(u0[k] > 2 * cfg.delta))
            throw PreconditionError("newton_refine: u must exceed 2*delta at every interior node");
    SolveOutcome out;
    ScalarField u = u0;
    boundary.apply(u);
    Vec F = div_residual(u, p);
    double fn = max_abs(F);
    out.newton_history.push_back(fn);
    auto picard_fallback = [&]() {
        Stepper step{boundary, p, cfg, interior_vec(u), {}};
        const ScalarField w = step(u, 1e-3);
        for (std::size_t k : g.interior()) u[k] = std::max(cfg.delta, (1 - cfg.damping) * u[k] + cfg.damping * w[k]);
        out.newton_fallback = true;
    };
    for (int it = 0; it < cfg.newton_max_iters && fn > cfg.tol_residual; ++it) {
        out.newton_iterations = it + 1;
        const Eigen::SparseMatrix<double> J = fd_jacobian(u, p);
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(J);
        lu.factorize(J);
        bool accepted = false;
        if (lu.info() == Eigen::Success) {
            const Vec du = lu.solve(-F);
            double alpha = 1.0;
            for (int ls = 0; ls < 12 && !accepted; ++ls, alpha *= 0.5) {
                ScalarField trial = u;
                bool ok = true;
                for (std::size_t r = 0; r < g.interior().size(); ++r) {
                    const std::size_t k = g.interior()[r];
                    trial[k] = u[k] + alpha * du[long(r)];
                    if (!(trial[k] > cfg.delta)) ok = false;
                }
                if (!ok) continue;
                const Vec Ft = div_residual(trial, p);
                const double ft = max_abs(Ft);
                if (ft < fn) {
                    u = std::move(trial);
                    F = Ft;
                    fn = ft;
                    accepted = true;
                }
            }
        }
        if (!accepted) {
            picard_fallback();
            F = div_residual(u, p);
            fn = max_abs(F);
        }
        out.newton_history.push_back(fn);
    }
    out.u = u;
    summarize(out, p, cfg);
    out.residual_kind = "divergence";
    out.residual = out.divergence_residual;
    out.converged = fn <= cfg.tol_residual;
    return out;
}

double max_principle_threshold(const Params& p, double diameter, double lower) {
    if (p.n < 2) throw PreconditionError("max_principle_threshold: requires n >= 2");
    if (!(diameter > 0) || !(lower > 0)) throw PreconditionError("max_principle_threshold: need positive inputs");
    const double theta = 0.5 / (diameter * diameter);
    return (p.m - 1) / (2.0 * (p.n - 1) * theta * lower);
}

PinnedOutcome solve_pinned_minimum(const BoundaryData& base, const BoundaryData& direction, double delta,
                                   double lambda0, const ScalarField& initial, const Params& p,
                                   const SolveConfig& cfg) {
    cfg.validate();
    require_grid(initial, base, "solve_pinned_minimum");
    require_grid(initial, direction, "solve_pinned_minimum");
    const GridPtr& grid = initial.grid();
    const std::size_t ni = grid->interior().size();
    const Vec b0 = boundary_vec(base), b1 = boundary_vec(direction);
    PinnedOutcome out;
    out.lambda = lambda0;
    ScalarField v = initial;
    Vec g0 = interior_vec(v), g1 = Vec::Zero(long(ni));
    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        const LinearSystem sys = assemble(v, p, delta);
        LinearSolver solver;
        solver.compute(sys.A);
        const double rel = std::max(cfg.linear_tol, 1e-9);
        const Vec u0 = solver.solve(sys.source - sys.B * b0, g0, rel, cfg.linear_max_iters);
        const Vec u1 = solver.solve(-(sys.B * b1), g1, rel, cfg.linear_max_iters);
        g0 = u0;
        g1 = u1;
        // min_k (u0 + lambda u1) is concave and increasing in lambda when u1 > 0.
        auto gap = [&](double lam) { return (u0 + lam * u1).minCoeff() - delta; };
        double lo = out.lambda, hi = out.lambda;
        double step = std::max(1e-3, 0.05 * std::abs(out.lambda));
        int guard = 0;
        while (gap(lo) > 0 && guard++ < 200) lo -= (step *= 2);
        guard = 0;
        step = std::max(1e-3, 0.05 * std::abs(out.lambda));
        while (gap(hi) < 0 && guard++ < 200) hi += (step *= 2);
        if (gap(lo) > 0 || gap(hi) < 0)
            throw SolverError("solve_pinned_minimum: cannot bracket the pinning parameter", out.history);
        for (int b = 0; b < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++b) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0 ? lo : hi) = mid;
        }
        const double lam = hi;
        const Vec x = u0 + lam * u1;
        const ScalarField w = scatter(grid, x, b0 + lam * b1);
        double inc = 0.0;
        ScalarField next = w;
        for (std::size_t k : grid->interior()) {
            next[k] = std::max(delta, (1 - cfg.damping) * v[k] + cfg.damping * w[k]);
            inc = std::max(inc, std::abs(next[k] - v[k]));
        }
        v = std::move(next);
        out.lambda = lam;
        out.increment = inc;
        out.iterations = it + 1;
        out.history.push_back(inc);
        if (!std::isfinite(inc)) throw SolverError("solve_pinned_minimum: non-finite iterate", out.history);
        if (inc < cfg.tol_residual * grid->h()) {
            out.converged = true;
            break;
        }
    }
    out.u = v;
    return out;
}

}  // namespace sme
