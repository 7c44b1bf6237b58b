#include "smelab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <map>
#include <sstream>

#include "smelab/errors.hpp"
#include "smelab/io.hpp"
#include "smelab/radial.hpp"

namespace sme {

std::string to_string(DataClass c) {
    switch (c) {
        case DataClass::StronglyPositive: return "strongly_positive";
        case DataClass::SmallNonsolvable: return "small_nonsolvable";
        case DataClass::Undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace {

// sup over x0 in the domain of |x - x0|.
double farthest_distance(const Grid2D& g, Point x) {
    const Domain& d = g.domain();
    switch (d.kind()) {
        case Domain::Kind::Disk:
        case Domain::Kind::Annulus: return std::hypot(x.x - d.cx, x.y - d.cy) + d.r_outer;
        case Domain::Kind::Rectangle: {
            double m = 0.0;
            for (double cx : {d.x0, d.x1})
                for (double cy : {d.y0, d.y1}) m = std::max(m, std::hypot(x.x - cx, x.y - cy));
            return m;
        }
        case Domain::Kind::Convex: break;
    }
    double m = 0.0;
    for (std::size_t b = 0; b < g.boundary().size(); ++b) m = std::max(m, distance(x, g.boundary_anchor(b)));
    for (std::size_t k : g.interior()) m = std::max(m, distance(x, g.coords(k)));
    return m;
}

double collar_min(const ScalarField& u, double eta) {
    const Grid2D& g = u.g();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k : g.interior()) {
        const Point x = g.coords(k);
        if (-g.domain().sdf(x.x, x.y) < eta) m = std::min(m, u[k]);
    }
    return m;
}

ScalarField scaled(const ScalarField& u, double factor) {
    ScalarField out = u;
    for (auto& x : out.values()) x *= factor;
    return out;
}

}  // namespace

Classification classify_boundary_data(const BoundaryData& phi, const Params& p, double beta, double eps0_hat) {
    (void)p;
    const Grid2D& g = *phi.grid();
    Classification c;
    c.min_phi = phi.min();
    c.sup_phi = phi.max();
    c.positivity_margin = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < g.boundary().size(); ++b) {
        const double reach = beta * farthest_distance(g, g.boundary_anchor(b));
        c.positivity_margin = std::min(c.positivity_margin, phi.values()[b] - reach);
    }
    c.smallness_bound = eps0_hat > 0 ? 0.5 * eps0_hat * g.domain().inradius() : 0.0;
    if (c.positivity_margin > 0)
        c.kind = DataClass::StronglyPositive;
    else if (eps0_hat > 0 && c.sup_phi < c.smallness_bound)
        c.kind = DataClass::SmallNonsolvable;
    return c;
}

BoundaryFamily BoundaryFamily::linear(const BoundaryData& phi1) {
    BoundaryFamily f;
    f.label = "linear:" + phi1.label();
    f.at = [phi1](double lambda) {
        std::vector<double> v = phi1.values();
        for (auto& x : v) x *= lambda;
        return BoundaryData(phi1.grid(), std::move(v), phi1.label());
    };
    return f;
}

BoundaryFamily BoundaryFamily::constant(const BoundaryData& phi) {
    BoundaryFamily f;
    f.label = "constant:" + phi.label();
    f.at = [phi](double) { return phi; };
    return f;
}

LambdaRecord solvability_signal(const BoundaryData& phi, double lambda, const Params& p, const SolveConfig& cfg,
                                const ContinuationSchedule& schedule, const ScalarField* warm,
                                ScalarField* solution) {
    LambdaRecord rec;
    rec.lambda = lambda;
    if (!(phi.min() > 0)) return rec;  // zero or negative data: no positive solution
    SolveConfig c = cfg;
    c.newton_polish = false;
    c.floor_stall_iters = schedule.floor_stall_iters;
    const double d0 = schedule.delta_fraction * phi.min();
    const double dmin = d0 * std::pow(2.0, -(schedule.delta_levels - 1));
    for (double delta : {d0, dmin}) {
        c.delta = delta;
        const SolveOutcome out = solve_dirichlet(phi, p, c, warm);
        rec.solves.push_back({delta, out.converged, out.floor_active, out.min_u, out.max_grad, out.iterations});
        rec.min_u = out.min_u;
        rec.max_grad = out.max_grad;
        if (out.converged && !out.floor_active) {
            rec.solvable = true;
            if (solution) *solution = out.u;
            return rec;
        }
        // Floor active at delta_0: fall through to the finest delta. Floor active there too
        // means active for every delta in the sequence.
    }
    return rec;
}

SingularLimit detect_singular_limit(const std::vector<ScalarField>& seq, double threshold, double eta) {
    if (seq.size() < 2) throw StructuralError("detect_singular_limit: need at least two fields");
    for (const auto& f : seq) seq.front().require_same_grid(f, "detect_singular_limit");
    SingularLimit r;
    r.threshold = threshold;
    r.eta = eta;
    for (std::size_t j = 0; j < seq.size(); ++j) {
        r.holder.push_back(holder_half_quotient(seq[j], {}, 0.0));
        r.min_u.push_back(seq[j].min_interior());
        r.collar_min.push_back(collar_min(seq[j], eta));
        if (j > 0) r.successive_diff.push_back(seq[j].max_abs_diff_interior(seq[j - 1]));
    }
    const double hmax = *std::max_element(r.holder.begin(), r.holder.end());
    r.equicontinuous = std::isfinite(hmax) && hmax <= 2.0 * r.holder.front();
    r.differences_decrease = r.successive_diff.back() <= 0.5 * r.successive_diff.front();
    r.min_to_zero = r.min_u.back() < threshold && r.min_u.back() < r.min_u.front();
    r.boundary_touching = !(r.collar_min.back() > threshold);
    const ScalarField& last = seq.back();
    if (r.equicontinuous) {
        for (std::size_t k : last.g().interior())
            if (last[k] < threshold) r.sing_nodes.push_back(k);
        r.limit = last;
    }
    r.claimed = r.equicontinuous && r.differences_decrease && r.min_to_zero && !r.boundary_touching;
    return r;
}

namespace {

// min over sampled boundary points x0 of (u - psi_lambda(|x - y0|)) on the cap |x - y0| >= lambda,
// y0 = x0 + t0 nu_in, with lambda chosen so psi_lambda stays below min phi on the cap.
double barrier_margin(const ScalarField& u, const BoundaryData& phi, const Params& p) {
    const Grid2D& g = u.g();
    const double diam = g.domain().diameter();
    const double t0 = 2.0 * diam;
    StepControl ctl;
    ctl.step = 1e-3;
    const RadialProfile psi = integrate_exterior(p, 1.0 + 1.0, ctl);
    auto psi_l = [&](double lam, double r) { return lam * profile_value(psi, r / lam); };
    const double floor_phi = phi.min();
    double margin = std::numeric_limits<double>::infinity();
    const std::size_t nb = g.boundary().size();
    const std::size_t stride = std::max<std::size_t>(1, nb / 16);
    for (std::size_t b = 0; b < nb; b += stride) {
        const Point x0 = g.boundary_anchor(b);
        const Point out = g.domain().outward_normal(x0);
        const Point y0{x0.x - t0 * out.x, x0.y - t0 * out.y};
        auto cap_ok = [&](double lam) {
            for (std::size_t q = 0; q < nb; ++q) {
                const double r = distance(g.boundary_anchor(q), y0);
                if (r >= lam && psi_l(lam, r) > floor_phi) return false;
            }
            return true;
        };
        double lo = 0.0, hi = 0.5 * t0;  // eps = t0 - lambda
        if (!cap_ok(t0 - 1e-9)) continue;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cap_ok(t0 - mid) ? lo : hi) = mid;
        }
        const double lam = t0 - lo;
        for (std::size_t k : g.interior()) {
            const double r = distance(g.coords(k), y0);
            if (r >= lam) margin = std::min(margin, u[k] - psi_l(lam, r));
        }
    }
    return margin;
}

}  // namespace

ContinuationReport continuation_run(const BoundaryFamily& family, const Params& p, const SolveConfig& cfg,
                                    const ContinuationSchedule& schedule) {
    cfg.validate();
    if (schedule.samples < 1) throw PreconditionError("continuation_run: need at least one scan interval");
    ContinuationReport rep;
    rep.family = family.label;
    rep.params = p;
    const BoundaryData phi1 = family.at(1.0);
    const GridPtr grid = phi1.grid();
    rep.h = grid->h();
    const double threshold = schedule.singular_threshold > 0 ? schedule.singular_threshold : 3.0 * rep.h;

    std::map<double, ScalarField> solutions;
    auto warm_for = [&](double lambda) -> std::optional<ScalarField> {
        if (solutions.empty()) return std::nullopt;
        auto it = solutions.lower_bound(lambda);
        if (it == solutions.end()) --it;
        return scaled(it->second, lambda / it->first);
    };
    auto evaluate = [&](double lambda, bool bisection) {
        const BoundaryData phi = family.at(lambda);
        const auto warm = warm_for(lambda);
        ScalarField sol;
        LambdaRecord rec =
            solvability_signal(phi, lambda, p, cfg, schedule, warm ? &*warm : nullptr, &sol);
        rec.bisection = bisection;
        if (rec.solvable) solutions[lambda] = sol;
        rep.records.push_back(rec);
        return rec.solvable;
    };

    // Scan from the top so warm starts come from solvable neighbours.
    std::vector<bool> sig(schedule.samples + 1);
    for (int k = schedule.samples; k >= 0; --k) sig[k] = evaluate(double(k) / schedule.samples, false);
    for (int k = 0; k < schedule.samples; ++k)
        if (sig[k] != sig[k + 1]) {
            rep.flips.push_back({double(k) / schedule.samples, double(k + 1) / schedule.samples, sig[k + 1]});
            if (!sig[k + 1]) rep.monotone = false;
        }
    if (sig[0]) rep.diagnostics.push_back("phi_0 produced a solvable signal (endpoint expected non-solvable)");
    if (!sig[schedule.samples]) rep.diagnostics.push_back("phi_1 produced a non-solvable signal (endpoint expected solvable)");
    if (!rep.monotone) rep.diagnostics.push_back("solvable -> non-solvable flip found: signal not monotone in lambda");

    const auto first = std::find_if(rep.flips.begin(), rep.flips.end(), [](const Flip& f) { return f.to_solvable; });
    if (first == rep.flips.end()) {
        rep.diagnostics.push_back("no non-solvable -> solvable flip: no bracket");
    } else {
        double lo = first->from, hi = first->to;
        for (int it = 0; it < schedule.max_bisections && hi - lo > schedule.bracket_tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            (evaluate(mid, true) ? hi : lo) = mid;
        }
        rep.bracket = std::make_pair(lo, hi);
    }
    std::stable_sort(rep.records.begin(), rep.records.end(),
                     [](const LambdaRecord& a, const LambdaRecord& b) { return a.lambda < b.lambda; });

    if (rep.bracket && schedule.extract_singular) {
        const double lam_hi = rep.bracket->second;
        const BoundaryData phi_hi = family.at(lam_hi);
        const double eps = 1e-3;
        const BoundaryData phi_lo = family.at(lam_hi - eps);
        std::vector<double> dir(phi_hi.values().size()), base(dir.size());
        for (std::size_t b = 0; b < dir.size(); ++b) {
            dir[b] = (phi_hi.values()[b] - phi_lo.values()[b]) / eps;
            base[b] = phi_hi.values()[b] - lam_hi * dir[b];
        }
        const BoundaryData bdir(grid, dir, "direction"), bbase(grid, base, "base");
        SingularCandidate cand;
        SolveConfig c = cfg;
        c.newton_polish = false;
        const double d0 = schedule.delta_fraction * phi_hi.min();
        ScalarField v = solutions.at(lam_hi);
        double lam = lam_hi;
        std::vector<ScalarField> seq;
        for (int j = 0; j < schedule.delta_levels; ++j) {
            const double delta = d0 * std::pow(2.0, -j);
            const PinnedOutcome po = solve_pinned_minimum(bbase, bdir, delta, lam, v, p, c);
            v = po.u;
            lam = po.lambda;
            cand.deltas.push_back(delta);
            cand.lambdas.push_back(lam);
            cand.converged.push_back(po.converged);
            seq.push_back(po.u);
        }
        cand.lambda = lam;
        cand.field = seq.back();
        cand.limit = detect_singular_limit(seq, threshold, schedule.collar_eta);
        cand.holder_half = cand.limit.holder.back();
        cand.collar_min = cand.limit.collar_min.back();
        if (p.n >= 2) cand.barrier_margin = barrier_margin(cand.field, family.at(lam), p);
        rep.singular = std::move(cand);
    }
    return rep;
}

std::string to_json(const ContinuationReport& r, const std::string& candidate_csv) {
    using nlohmann::json;
    json j;
    j["family"] = r.family;
    j["m"] = r.params.m;
    j["n"] = r.params.n;
    j["h"] = r.h;
    j["monotone"] = r.monotone;
    j["diagnostics"] = r.diagnostics;
    json rows = json::array();
    for (const auto& rec : r.records) {
        json solves = json::array();
        for (const auto& s : rec.solves)
            solves.push_back({{"delta", s.delta},
                              {"converged", s.converged},
                              {"floor_active", s.floor_active},
                              {"min_u", s.min_u},
                              {"max_grad", s.max_grad},
                              {"iterations", s.iterations}});
        rows.push_back({{"lambda", rec.lambda},
                        {"solvable", rec.solvable},
                        {"bisection", rec.bisection},
                        {"min_u", rec.min_u},
                        {"max_grad", rec.max_grad},
                        {"solves", solves}});
    }
    j["records"] = rows;
    json flips = json::array();
    for (const auto& f : r.flips) flips.push_back({{"from", f.from}, {"to", f.to}, {"to_solvable", f.to_solvable}});
    j["flips"] = flips;
    if (r.bracket)
        j["bracket"] = {{"lambda_lo", r.bracket->first}, {"lambda_hi", r.bracket->second}};
    else
        j["bracket"] = nullptr;
    if (r.singular) {
        const auto& s = *r.singular;
        json conv = json::array();
        for (bool b : s.converged) conv.push_back(b);
        j["singular_candidate"] = {{"lambda", s.lambda},
                                   {"deltas", s.deltas},
                                   {"lambdas", s.lambdas},
                                   {"converged", conv},
                                   {"min_u", s.limit.min_u},
                                   {"holder_half", s.limit.holder},
                                   {"successive_diff", s.limit.successive_diff},
                                   {"collar_min", s.limit.collar_min},
                                   {"collar_eta", s.limit.eta},
                                   {"threshold", s.limit.threshold},
                                   {"equicontinuous", s.limit.equicontinuous},
                                   {"differences_decrease", s.limit.differences_decrease},
                                   {"min_to_zero", s.limit.min_to_zero},
                                   {"boundary_touching", s.limit.boundary_touching},
                                   {"claimed", s.limit.claimed},
                                   {"sing_nodes", s.limit.sing_nodes.size()},
                                   {"barrier_margin", s.barrier_margin},
                                   {"field_csv", candidate_csv}};
    } else {
        j["singular_candidate"] = nullptr;
    }
    return j.dump(2);
}

std::string records_csv(const ContinuationReport& r) {
    std::ostringstream os;
    os << "lambda,solvable,bisection,min_u,max_grad,delta,converged,floor_active\n";
    for (const auto& rec : r.records) {
        if (rec.solves.empty())
            os << fmt(rec.lambda) << ',' << rec.solvable << ',' << rec.bisection << ",nan,nan,nan,0,0\n";
        for (const auto& s : rec.solves)
            os << fmt(rec.lambda) << ',' << rec.solvable << ',' << rec.bisection << ',' << fmt(s.min_u) << ','
               << fmt(s.max_grad) << ',' << fmt(s.delta) << ',' << s.converged << ',' << s.floor_active << '\n';
    }
    return os.str();
}

}  // namespace sme
