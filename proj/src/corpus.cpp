#include "smelab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "smelab/errors.hpp"
#include "smelab/io.hpp"
#include "smelab/operators.hpp"

namespace sme {

namespace {

struct Recipe {
    const char* id;
    const char* description;
    int m;
    const char* domain;
    std::vector<Probe> probes;
};

const std::vector<Recipe>& recipes() {
    static const std::vector<Recipe> r = {
        {"cone", "closed-form cone |x| on the unit disk", 2, "disk:r=1",
         {{{0, 0}, 0.6}, {{0.3, 0.2}, 0.4}, {{-0.2, 0.1}, 0.5}}},
        {"annulus-cone", "annulus 0.2<|x|<1, cone boundary data", 2, "annulus:r_in=0.2,r_out=1",
         {{{0.6, 0}, 0.3}, {{0, -0.55}, 0.3}, {{-0.4, 0.4}, 0.25}}},
        {"disk-K1.5", "unit disk, constant 1.5", 2, "disk:r=1", {{{0, 0}, 0.6}, {{0.3, 0.2}, 0.4}, {{-0.2, 0.1}, 0.5}}},
        {"disk-K3", "unit disk, constant 3", 2, "disk:r=1", {{{0, 0}, 0.6}, {{0.3, 0.2}, 0.4}, {{-0.2, 0.1}, 0.5}}},
        {"disk-affine", "unit disk, 2 + x/2", 2, "disk:r=1", {{{0, 0}, 0.6}, {{0.3, 0.2}, 0.4}, {{-0.2, 0.1}, 0.5}}},
        {"rect-K1.5", "rectangle [-1,1]x[-0.6,0.6], constant 1.5", 2, "rect:x0=-1,y0=-0.6,x1=1,y1=0.6",
         {{{0, 0}, 0.5}, {{0.4, 0.1}, 0.4}, {{-0.5, -0.1}, 0.4}}},
        {"disk-m3-K3", "unit disk, m = 3, constant 3", 3, "disk:r=1",
         {{{0, 0}, 0.6}, {{0.3, 0.2}, 0.4}, {{-0.2, 0.1}, 0.5}}},
    };
    return r;
}

BoundaryData recipe_boundary(const std::string& id, const GridPtr& g, const Params& p) {
    if (id == "cone" || id == "annulus-cone") return BoundaryData::cone_trace(g, p.cone_slope());
    if (id == "disk-K1.5" || id == "rect-K1.5") return BoundaryData::constant(g, 1.5);
    if (id == "disk-K3" || id == "disk-m3-K3") return BoundaryData::constant(g, 3.0);
    if (id == "disk-affine")
        return BoundaryData::from_function(g, [](double x, double) { return 2.0 + 0.5 * x; }, "2 + x/2");
    throw PreconditionError("unknown corpus id '" + id + "'");
}

std::string field_name(const CorpusEntry& e) { return e.id + "@h=" + fmt(e.u.g().h()); }

Check make_check(const std::string& name, const std::string& field, double tol) {
    Check c;
    c.name = name;
    c.field = field;
    c.tolerance = tol;
    return c;
}

double rel_change(double coarse, double fine) {
    if (coarse == 0.0 && fine == 0.0) return 0.0;
    return std::abs(fine - coarse) / std::max(std::abs(coarse), 1e-300);
}

// Part (i) band: Chat = max over probes of max(r, 1/r).
double band(const std::vector<double>& ratios) {
    double c = 1.0;
    for (double r : ratios) c = std::max({c, r, 1.0 / r});
    return c;
}

}  // namespace

std::vector<std::string> corpus_ids() {
    std::vector<std::string> ids;
    for (const auto& r : recipes()) ids.push_back(r.id);
    return ids;
}

CorpusEntry make_corpus_entry(const std::string& id, double h, const SolveConfig& cfg) {
    const auto it = std::find_if(recipes().begin(), recipes().end(), [&](const Recipe& r) { return id == r.id; });
    if (it == recipes().end()) throw PreconditionError("unknown corpus id '" + id + "'");
    CorpusEntry e;
    e.id = it->id;
    e.description = it->description;
    e.params = Params(it->m, 2);
    e.probes = it->probes;
    const GridPtr g = Grid2D::make(Domain::parse(it->domain), h);
    e.boundary = recipe_boundary(id, g, e.params);
    if (id == "cone") {
        const double a = e.params.cone_slope();
        e.closed_form = true;
        e.u = ScalarField::from_function(g, [a](double x, double y) { return a * std::hypot(x, y); });
        return e;
    }
    const SolveOutcome out = solve_dirichlet(e.boundary, e.params, cfg);
    e.u = out.u;
    e.converged = out.converged;
    e.residual = out.residual;
    return e;
}

std::vector<CorpusEntry> build_corpus(double h, const SolveConfig& cfg) {
    std::vector<CorpusEntry> out;
    for (const auto& id : corpus_ids()) out.push_back(make_corpus_entry(id, h, cfg));
    return out;
}

double measured_eps0(const std::vector<CorpusEntry>& corpus) {
    double e0 = std::numeric_limits<double>::infinity();
    for (const auto& e : corpus)
        for (const auto& pr : e.probes) e0 = std::min(e0, eps0_probe(e.u, pr.center, pr.rho));
    return e0;
}

VerificationReport verify_corpus(const std::vector<CorpusEntry>& coarse, const std::vector<CorpusEntry>& fine,
                                 const VerifyOptions& opt) {
    if (coarse.size() != fine.size()) throw PreconditionError("verify_corpus: corpus sizes differ");
    VerificationReport rep;
    rep.seed = opt.seed;
    const Tolerances& tol = opt.tol;

    // Solver convergence is a prerequisite for everything else.
    for (const auto* level : {&coarse, &fine})
        for (const auto& e : *level) {
            if (e.closed_form) continue;
            Check c = make_check("converged", field_name(e), 0.0);
            c.values = {{"residual", e.residual}};
            c.pass = e.converged;
            rep.checks.push_back(c);
        }

    // Volume bound part (i): one band per (m, n), stable under refinement.
    std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> ratios;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const CorpusEntry& ec = coarse[i];
        const CorpusEntry& ef = fine[i];
        if (ec.id != ef.id) throw PreconditionError("verify_corpus: entry order differs");
        Check c = make_check("volume_bounds", ec.id, tol.volume_refinement);
        double worst = 0.0;
        for (std::size_t k = 0; k < ec.probes.size(); ++k) {
            const Probe& pr = ec.probes[k];
            const VolumeBound vc = volume_bound_check(ec.u, ec.params, pr.center, pr.rho);
            const VolumeBound vf = volume_bound_check(ef.u, ef.params, pr.center, pr.rho);
            const std::string tag = "probe" + std::to_string(k);
            c.values.push_back({tag + ".ratio_i.coarse", vc.ratio_i});
            c.values.push_back({tag + ".ratio_i.fine", vf.ratio_i});
            c.values.push_back({tag + ".ratio_ii.coarse", vc.ratio_ii});
            c.values.push_back({tag + ".ratio_ii.fine", vf.ratio_ii});
            worst = std::max(worst, rel_change(vc.ratio_i, vf.ratio_i));
            auto& [rc, rf] = ratios[{ec.params.m, ec.params.n}];
            rc.push_back(vc.ratio_i);
            rf.push_back(vf.ratio_i);
        }
        c.values.push_back({"max_refinement_change", worst});
        c.pass = worst <= tol.volume_refinement;
        rep.checks.push_back(c);
    }
    for (const auto& [mn, rr] : ratios) {
        Check c = make_check("volume_band", "m=" + std::to_string(mn.first) + ",n=" + std::to_string(mn.second),
                             tol.volume_refinement);
        const double cc = band(rr.first), cf = band(rr.second);
        c.values = {{"C_hat.coarse", cc}, {"C_hat.fine", cf}, {"change", rel_change(cc, cf)}};
        c.pass = rel_change(cc, cf) <= tol.volume_refinement;
        c.note = "every part (i) ratio lies in [1/C_hat, C_hat]";
        rep.checks.push_back(c);
    }

    // Holder-1/2 quotient, sup |D u^2| and the interior gradient bound on the first probe.
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const CorpusEntry& ec = coarse[i];
        const CorpusEntry& ef = fine[i];
        const Probe& pr = ec.probes.front();
        const HolderBound hc = holder_check(ec.u, pr.center, pr.rho);
        const HolderBound hf = holder_check(ef.u, pr.center, pr.rho);
        Check c = make_check("holder", ec.id, tol.holder_refinement);
        c.values = {{"holder_half.coarse", hc.holder_half},
                    {"holder_half.fine", hf.holder_half},
                    {"grad_u2.coarse", hc.grad_u2},
                    {"grad_u2.fine", hf.grad_u2}};
        c.pass = rel_change(hc.holder_half, hf.holder_half) <= tol.holder_refinement &&
                 rel_change(hc.grad_u2, hf.grad_u2) <= tol.holder_refinement && std::isfinite(hf.holder_half);
        rep.checks.push_back(c);

        const double M = 1.01 * std::max(ec.boundary.max(), ec.u.max_interior());
        const double gc = gradient_bound_check(ec.u, pr.center, M, pr.rho, opt.theta);
        const double gf = gradient_bound_check(ef.u, pr.center, M, pr.rho, opt.theta);
        Check gchk = make_check("gradient_bound", ec.id, tol.holder_refinement);
        gchk.values = {{"M_over_rho", M / pr.rho}, {"theta", opt.theta}, {"sup_grad.coarse", gc}, {"sup_grad.fine", gf}};
        gchk.pass = std::isfinite(gf) && rel_change(gc, gf) <= tol.holder_refinement;
        rep.checks.push_back(gchk);
    }

    // Stability inequality with seeded bumps inside {u > delta}, both resolutions.
    for (const auto* level : {&coarse, &fine})
        for (const auto& e : *level) {
            const Grid2D& g = e.u.g();
            Check c = make_check("stability", field_name(e), tol.stability_rel);
            double worst = std::numeric_limits<double>::infinity();
            int used = 0;
            const double max_r = 0.25 * g.domain().diameter();
            for (std::uint64_t s = 0; used < opt.trials && s < std::uint64_t(20 * opt.trials); ++s) {
                const ScalarField z = random_bump(e.u.grid(), opt.seed + s, 3 * g.h(), max_r);
                double umin = std::numeric_limits<double>::infinity();
                for (std::size_t k : g.interior()) {
                    if (z[k] == 0.0) continue;
                    for (int dj = -1; dj <= 1; ++dj)
                        for (int di = -1; di <= 1; ++di) umin = std::min(umin, e.u[g.neighbor(k, di, dj)]);
                }
                if (!(umin > 0) || !std::isfinite(umin)) continue;
                const StabilityMargin sm = stability_check(e.u, e.params, z, opt.eps, 0.9 * umin);
                worst = std::min(worst, sm.margin / sm.rhs);
                ++used;
            }
            c.values = {{"min_margin_over_rhs", worst}, {"trials", double(used)}};
            c.pass = used == opt.trials && worst >= -tol.stability_rel;
            rep.checks.push_back(c);
        }

    // Weak form on the fine fields.
    for (const auto& e : fine) {
        const WeakCheck wc = weak_solution_check(e.u, e.params, opt.trials, opt.seed, 3 * e.u.g().h());
        Check c = make_check("weak_form", field_name(e), tol.weak_form_rel);
        c.values = {{"max_relative", wc.max_relative}, {"max_relative_cutoff", wc.max_relative_cutoff}};
        for (std::size_t j = 0; j < wc.cutoff_widths.size(); ++j) {
            c.values.push_back({"cutoff_residual@" + fmt(wc.cutoff_widths[j]), wc.cutoff_residuals[j]});
            c.values.push_back({"cutoff_grad_mass@" + fmt(wc.cutoff_widths[j]), wc.cutoff_gradient_mass[j]});
        }
        // The closed-form cone is not a discrete solution; only the cut-off residual is judged.
        c.pass = (e.closed_form ? wc.max_relative_cutoff : wc.max_relative) <= tol.weak_form_rel;
        if (e.closed_form) c.note = "closed form: judged with the singular-set cutoff";
        rep.checks.push_back(c);
    }

    // eps0 probe: recorded, positive.
    {
        Check c = make_check("eps0_probe", "corpus", 0.0);
        const double e0c = measured_eps0(coarse), e0f = measured_eps0(fine);
        c.values = {{"eps0_hat.coarse", e0c}, {"eps0_hat.fine", e0f}};
        c.pass = e0c > 0 && e0f > 0;
        c.note = "min over probes of max_{B_{rho/2}} u / rho";
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace sme
