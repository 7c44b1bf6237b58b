// Acceptance run: one verdict line per criterion, preceded by indented detail lines.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "smelab/analysis.hpp"
#include "smelab/continuation.hpp"
#include "smelab/corpus.hpp"
#include "smelab/operators.hpp"
#include "smelab/radial.hpp"
#include "smelab/solver.hpp"

using namespace sme;

namespace {

// Pinned tolerances.
constexpr double kConeErrorPerH = 5.0;
constexpr double kConeRatio = 1.7;
constexpr double kConeSeconds = 60.0;
constexpr double kCoshTol = 1e-6;
constexpr double kDriftTol = 1e-8;
constexpr double kAsymptoteTol = 0.05;
constexpr double kBetaTol = 0.01;
constexpr double kGradientRel = 1e-6;
constexpr int kGradientFields = 20;
constexpr double kBracketTol = 0.05;
constexpr double kBlowupRatioLo = 0.5;  // "bounded": every ratio finite and inside [lo, hi]
constexpr double kBlowupRatioHi = 2.0;
constexpr double kDimensionMax = 0.5;
constexpr double kPipelineSeconds = 900.0;

// Criteria whose failure is understood and recorded (see README): the exterior gap
// psi(r) - r oscillates about zero for m + n - 1 < 7, so it cannot decrease monotonically.
const std::set<int> kKnownFailures = {3};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Part {
    std::string name;
    bool pass;
    std::string detail;
};

void print_parts(const std::vector<Part>& parts) {
    for (const auto& p : parts)
        std::printf("    %-36s %s  %s\n", p.name.c_str(), p.pass ? "pass" : "FAIL", p.detail.c_str());
}

std::string f(const char* format, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

// ---------------------------------------------------------------- 1
std::vector<Part> cone_regression() {
    const Params p(2, 2);
    double err[2], secs[2];
    const double hs[2] = {1.0 / 64, 1.0 / 128};
    bool conv = true;
    for (int l = 0; l < 2; ++l) {
        const auto t0 = Clock::now();
        const GridPtr g = Grid2D::make(Domain::annulus(0, 0, 0.2, 1.0), hs[l]);
        const SolveOutcome out = solve_dirichlet(BoundaryData::cone_trace(g, 1.0), p, SolveConfig{});
        secs[l] = seconds_since(t0);
        conv = conv && out.converged;
        err[l] = 0.0;
        for (std::size_t k : g->interior()) {
            const Point x = g->coords(k);
            err[l] = std::max(err[l], std::abs(out.u[k] - std::hypot(x.x, x.y)));
        }
        std::printf("    h=1/%d: converged=%d error=%.4e (%.2f h) %.1f s\n", int(1 / hs[l]), int(out.converged),
                    err[l], err[l] / hs[l], secs[l]);
    }
    return {{"converged", conv, ""},
            {"error <= 5h at h=1/64", err[0] <= kConeErrorPerH * hs[0], f("%.4e <= %.4e", err[0], kConeErrorPerH * hs[0])},
            {"ratio 1/64 -> 1/128 >= 1.7", err[0] / err[1] >= kConeRatio, f("%.3f", err[0] / err[1])},
            {"<= 60 s per grid", secs[0] <= kConeSeconds && secs[1] <= kConeSeconds, f("%.1f s, %.1f s", secs[0], secs[1])}};
}

// ---------------------------------------------------------------- 2
std::vector<Part> catenary() {
    const Params p(2, 1);
    const RadialProfile prof = integrate_n1(p, 2.0, 1e-3);
    double err = 0.0, drift = 0.0;
    const double c0 = conserved_quantity(p, prof.u[0], prof.s[0]);
    for (std::size_t i = 0; i < prof.size(); ++i) {
        err = std::max(err, std::abs(prof.u[i] - std::cosh(prof.r[i])));
        drift = std::max(drift, std::abs(conserved_quantity(p, prof.u[i], prof.s[i]) - c0));
    }
    return {{"reaches x = 2", std::abs(prof.r.back() - 2.0) < 1e-12, ""},
            {"max |u - cosh| < 1e-6", err < kCoshTol, f("%.3e", err)},
            {"conserved quantity drift < 1e-8", drift < kDriftTol, f("%.3e", drift)}};
}

// ---------------------------------------------------------------- 3
std::vector<Part> exterior_asymptote() {
    const RadialProfile psi = integrate_exterior(Params(2, 2), 50.0);
    const double q = psi.u.back() / psi.r.back();
    bool monotone = true;
    double first_rise = 0.0, prev = 0.0, gap_min = 1e300, r_min = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (psi.r[i] < 10.0) continue;
        const double gap = psi.u[i] - psi.r[i];
        if (gap < gap_min) gap_min = gap, r_min = psi.r[i];
        if (have && gap > prev && monotone) monotone = false, first_rise = psi.r[i];
        prev = gap;
        have = true;
    }
    for (double r : {10.0, 20.0, 30.0, 40.0, 50.0})
        std::printf("    psi(%g) - %g = %+.6f\n", r, r, profile_value(psi, r) - r);
    return {{"|psi(50)/50 - 1| < 0.05", std::abs(q - 1) < kAsymptoteTol, f("psi(50)/50 = %.8f", q)},
            {"gap decreasing on [10, 50]", monotone,
             monotone ? "" : f("gap reaches its minimum %.5f at r = %.2f and increases from r = %.2f", gap_min, r_min, first_rise)}};
}

// ---------------------------------------------------------------- 4
std::vector<Part> beta_identity() {
    const SlopeSup s = slope_sup(integrate_exterior(Params(4, 4), 50.0));
    return {{"beta(4,4) = 1 +- 0.01", std::abs(s.beta - 1) <= kBetaTol,
             f("beta = %.8f at r = %.2f", s.beta, s.r_at) + (s.at_last_sample ? " (last sample)" : "")}};
}

// ---------------------------------------------------------------- 5
std::vector<Part> gradient_oracle() {
    const GridPtr g = Grid2D::make(Domain::disk(0, 0, 1), 1.0 / 16);
    double worst = 0.0;
    bool positive = true;
    for (int seed = 0; seed < kGradientFields; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        std::uniform_real_distribution<double> U(-1, 1);
        const Params p(2 + seed % 2, 2);
        double c[8];
        for (double& x : c) x = U(rng);
        ScalarField u = ScalarField::from_function(g, [&](double x, double y) {
            return 1.5 + 0.4 * c[0] * x + 0.4 * c[1] * y + 0.3 * c[2] * std::sin(3 * x + c[3]) * std::cos(2 * y + c[4]) +
                   0.2 * c[5] * x * y + 0.2 * c[6] * (x * x - y * y);
        });
        for (std::size_t k : g->interior()) u[k] += 0.05 * U(rng);
        positive = positive && u.min_interior() > 0;
        const ScalarField G = area_gradient(u, p);
        double gmax = 0.0, emax = 0.0;
        const double eps = 1e-5;
        for (std::size_t k : g->interior()) {
            ScalarField up = u, dn = u;
            up[k] += eps;
            dn[k] -= eps;
            const double fd = (area_functional(up, p) - area_functional(dn, p)) / (2 * eps);
            gmax = std::max(gmax, std::abs(G[k]));
            emax = std::max(emax, std::abs(fd - G[k]));
        }
        worst = std::max(worst, emax / gmax);
    }
    return {{"fields positive", positive, ""},
            {"max_k |G - FD| / max_k |G| < 1e-6", worst < kGradientRel, f("worst of 20 fields %.3e", worst)}};
}

// ---------------------------------------------------------------- 6
std::vector<Part> estimate_suite() {
    const SolveConfig cfg;
    const auto t0 = Clock::now();
    const auto coarse = build_corpus(1.0 / 32, cfg);
    const auto fine = build_corpus(1.0 / 64, cfg);
    const VerificationReport rep = verify_corpus(coarse, fine, VerifyOptions{});
    int solved = 0;
    bool cone = false;
    for (const auto& e : fine) {
        if (e.closed_form) cone = cone || e.id == "cone";
        else if (e.converged) ++solved;
    }
    std::vector<Part> parts{{"corpus: >= 5 solved fields + cone", solved >= 5 && cone, f("%g solved", solved)}};
    // group checks by name
    std::vector<std::string> names;
    for (const auto& c : rep.checks)
        if (std::find(names.begin(), names.end(), c.name) == names.end()) names.push_back(c.name);
    for (const auto& n : names) {
        int total = 0, ok = 0;
        std::string failed;
        for (const auto& c : rep.checks)
            if (c.name == n) {
                ++total;
                if (c.pass) ++ok;
                else failed += " " + c.field;
            }
        parts.push_back({n, ok == total, f("%g/%g", ok, total) + (failed.empty() ? "" : " failed:" + failed)});
    }
    std::printf("    corpus built and checked in %.1f s\n", seconds_since(t0));
    return parts;
}

// ---------------------------------------------------------------- 7
std::vector<Part> singular_pipeline() {
    const auto t0 = Clock::now();
    const Params p(2, 2);
    const double K1 = 2.2;
    const double beta = slope_sup(integrate_exterior(p, 50.0)).beta;
    SolveConfig cfg;
    cfg.tol_residual = 1e-6;
    const ContinuationSchedule sc;
    std::optional<std::pair<double, double>> br[2];
    std::optional<SingularCandidate> cand;
    double h_fine = 1.0 / 128;
    bool positive = true;
    for (int l = 0; l < 2; ++l) {
        const double h = l == 0 ? 1.0 / 64 : 1.0 / 128;
        const GridPtr g = Grid2D::make(Domain::disk(0, 0, 1), h);
        const BoundaryData phi1 = BoundaryData::constant(g, K1);
        positive = positive && classify_boundary_data(phi1, p, beta, 0.0).kind == DataClass::StronglyPositive;
        ContinuationSchedule s = sc;
        s.extract_singular = l == 1;
        const auto t1 = Clock::now();
        const ContinuationReport rep = continuation_run(BoundaryFamily::linear(phi1), p, cfg, s);
        br[l] = rep.bracket;
        if (l == 1) cand = rep.singular;
        std::printf("    h=1/%d: bracket %s, %zu lambda values, %.1f s\n", int(1 / h),
                    rep.bracket ? f("[%.5f, %.5f]", rep.bracket->first, rep.bracket->second).c_str() : "none",
                    rep.records.size(), seconds_since(t1));
    }
    std::vector<Part> parts;
    parts.push_back({"phi_1 = 2.2 strongly positive", positive, f("beta diam = %.5f", 2 * beta)});
    const bool both = br[0] && br[1];
    parts.push_back({"bracket stable to 0.05", both && std::abs(br[0]->first - br[1]->first) <= kBracketTol &&
                                                    std::abs(br[0]->second - br[1]->second) <= kBracketTol,
                     both ? f("lo %.5f vs %.5f, hi %.5f vs %.5f", br[0]->first, br[1]->first, br[0]->second,
                              br[1]->second)
                          : "missing bracket"});
    if (!cand) {
        parts.push_back({"singular candidate", false, "no candidate extracted"});
        return parts;
    }
    const ScalarField& u = cand->field;
    const double mn = u.min_interior();
    std::printf("    candidate: lambda = %.5f (K = %.5f), claimed = %d\n", cand->lambda, cand->lambda * K1,
                int(cand->limit.claimed));
    parts.push_back({"candidate min u < 3h", mn < 3 * h_fine, f("%.4e < %.4e", mn, 3 * h_fine)});
    parts.push_back({"collar min > 0", cand->collar_min > 0, f("%.5f", cand->collar_min)});

    const BlowupSequence bs = blowup_sequence(u, u.g().coords(u.argmin_interior()), {0.8, 0.4, 0.2, 0.1});
    bool bounded = true;
    std::string ratios;
    for (std::size_t j = 0; j < bs.scales.size(); ++j) {
        const double r = bs.slope_ratio[j];
        bounded = bounded && std::isfinite(r) && r >= kBlowupRatioLo && r <= kBlowupRatioHi;
        ratios += f("%.4f ", r);
    }
    parts.push_back({"blow-up ratios bounded, 4 scales", bounded, ratios});

    const SingularSet ss = singular_set(u, 3 * h_fine);
    parts.push_back({"box dimension <= 0.5", ss.dimension && *ss.dimension <= kDimensionMax,
                     ss.dimension ? f("%.3f from %g nodes", *ss.dimension, double(ss.nodes.size())) : "undefined"});
    const double secs = seconds_since(t0);
    parts.push_back({"full run <= 15 min", secs <= kPipelineSeconds, f("%.1f s", secs)});
    return parts;
}

// ---------------------------------------------------------------- 8
std::vector<Part> max_principle() {
    const Params p(2, 2);
    const GridPtr g = Grid2D::make(Domain::disk(0, 0, 1), 1.0 / 64);
    const double diam = g->domain().diameter();
    std::vector<Part> parts;
    int above = 0;
    for (double K : {1.5, 3.0, 5.0, 8.0}) {
        const SolveOutcome out = solve_dirichlet(BoundaryData::constant(g, K), p, SolveConfig{});
        const double thr = max_principle_threshold(p, diam, out.min_u);
        const bool is_above = out.converged && K > thr;
        std::printf("    K = %g: converged=%d min u = %.5f threshold = %.5f%s\n", K, int(out.converged), out.min_u,
                    thr, is_above ? "" : " (not above)");
        if (!is_above) continue;
        ++above;
        parts.push_back({f("K = %g: min u >= K/2", K), out.min_u >= 0.5 * K, f("%.5f >= %.5f", out.min_u, 0.5 * K)});
    }
    parts.insert(parts.begin(), Part{"some K above the threshold", above > 0, f("%g of 4", above)});
    return parts;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* title;
        std::function<std::vector<Part>()> run;
    };
    const std::vector<Criterion> all = {
        {1, "cone regression on the annulus", cone_regression},
        {2, "catenary regression", catenary},
        {3, "exterior asymptote", exterior_asymptote},
        {4, "beta identity (4,4)", beta_identity},
        {5, "area gradient oracle", gradient_oracle},
        {6, "estimate suite on the corpus", estimate_suite},
        {7, "singular pipeline", singular_pipeline},
        {8, "maximum principle bound", max_principle},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int unexpected = 0;
    std::vector<int> known;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::printf("criterion %d: %s\n", c.id, c.title);
        std::fflush(stdout);
        const auto t0 = Clock::now();
        bool pass = true;
        try {
            const auto parts = c.run();
            print_parts(parts);
            for (const auto& p : parts) pass = pass && p.pass;
        } catch (const std::exception& e) {
            std::printf("    exception: %s\n", e.what());
            pass = false;
        }
        const bool is_known = !pass && kKnownFailures.count(c.id);
        std::printf("[%d] %s  (%.1f s)%s\n", c.id, pass ? "PASS" : "FAIL", seconds_since(t0),
                    is_known ? "  known failure, see README" : "");
        std::fflush(stdout);
        if (is_known) known.push_back(c.id);
        else if (!pass) ++unexpected;
    }
    std::printf("summary: %d unexpected failure(s), %zu known failure(s)\n", unexpected, known.size());
    return unexpected == 0 ? 0 : 1;
}
