#include "smelab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "smelab/errors.hpp"
#include "smelab/io.hpp"
#include "smelab/operators.hpp"

namespace sme {

double Check::value(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    throw StructuralError("Check '" + name + "' has no value '" + key + "'");
}

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string to_json(const VerificationReport& r) {
    using nlohmann::json;
    json j;
    j["seed"] = r.seed;
    j["all_pass"] = r.all_pass();
    json arr = json::array();
    for (const auto& c : r.checks) {
        json vals = json::object();
        for (const auto& [k, v] : c.values) vals[k] = v;
        arr.push_back({{"name", c.name},
                       {"field", c.field},
                       {"values", vals},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass},
                       {"note", c.note}});
    }
    j["checks"] = arr;
    return j.dump(2);
}

std::string to_csv(const VerificationReport& r) {
    std::ostringstream os;
    os << "check,field,key,value,tolerance,pass\n";
    for (const auto& c : r.checks)
        for (const auto& [k, v] : c.values)
            os << c.name << ',' << c.field << ',' << k << ',' << fmt(v) << ',' << fmt(c.tolerance) << ','
               << (c.pass ? 1 : 0) << '\n';
    return os.str();
}

// ---------------------------------------------------------------- sampling

double sample(const ScalarField& u, Point p) {
    const Grid2D& g = u.g();
    const double h = g.h();
    const double fx = p.x / h, fy = p.y / h;
    const int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
    const double tx = fx - i0, ty = fy - j0;
    double sum = 0.0, wsum = 0.0;
    for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) {
            const int i = i0 + di, j = j0 + dj;
            if (!g.in_lattice(i, j)) continue;
            const std::size_t k = g.index(i, j);
            if (!g.active(k)) continue;
            const double w = (di ? tx : 1 - tx) * (dj ? ty : 1 - ty);
            sum += w * u[k];
            wsum += w;
        }
    if (wsum > 1e-12) return sum / wsum;
    const std::size_t k = g.nearest_node(p);
    if (g.active(k) && distance(g.coords(k), p) <= h) return u[k];
    throw PreconditionError("sample: point (" + fmt(p.x) + ", " + fmt(p.y) + ") is outside the grid");
}

// ---------------------------------------------------------------- volume bounds

VolumeBound volume_bound_check(const ScalarField& u, const Params& p, Point center, double rho) {
    if (!(rho > 0)) throw PreconditionError("volume_bound_check: rho must be positive");
    const Grid2D& g = u.g();
    const double u0 = sample(u, center);
    for (std::size_t k : g.boundary()) {
        const Point x = g.coords(k);
        const double dx = x.x - center.x, dy = x.y - center.y, du = u[k] - u0;
        if (dx * dx + dy * dy + du * du < rho * rho)
            throw PreconditionError("volume_bound_check: the graph ball of radius rho reaches the boundary");
    }
    const double h = g.h();
    const double s2 = 0.25 * rho * rho;
    VolumeBound vb;
    vb.rho = rho;
    for (std::size_t c : g.cells()) {
        const double u00 = u[c], u10 = u[g.neighbor(c, 1, 0)], u01 = u[g.neighbor(c, 0, 1)],
                     u11 = u[g.neighbor(c, 1, 1)];
        const Point x = g.coords(c);
        const double xc = x.x + 0.5 * h, yc = x.y + 0.5 * h;
        const double uc = 0.25 * (u00 + u10 + u01 + u11);
        const double dx = xc - center.x, dy = yc - center.y, du = uc - u0;
        if (dx * dx + dy * dy + du * du >= s2) continue;
        const double gx = ((u10 - u00) + (u11 - u01)) / (2 * h);
        const double gy = ((u01 - u00) + (u11 - u10)) / (2 * h);
        const double v = std::sqrt(1 + gx * gx + gy * gy);
        vb.area_integral += v * h * h;
        vb.weighted_integral += v * std::pow(std::max(uc, 0.0), p.m - 1) * h * h;
        ++vb.member_cells;
    }
    const double rn = std::pow(rho, 2);
    vb.ratio_i = vb.area_integral / rn;
    vb.ratio_ii = vb.weighted_integral / (std::pow(rho + u0, p.m - 1) * rn);
    return vb;
}

double eps0_probe(const ScalarField& u, Point center, double rho) {
    const Grid2D& g = u.g();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k : g.interior())
        if (distance(g.coords(k), center) < 0.5 * rho) m = std::max(m, u[k]);
    if (!std::isfinite(m)) throw PreconditionError("eps0_probe: no interior node in B_{rho/2}");
    return m / rho;
}

// ---------------------------------------------------------------- Holder / gradient

double holder_half_quotient(const ScalarField& u, Point center, double radius, std::size_t* pairs) {
    const Grid2D& g = u.g();
    std::vector<std::size_t> nodes;
    std::vector<char> member(g.size(), 0);
    for (std::size_t k : g.interior())
        if (radius <= 0 || distance(g.coords(k), center) < radius) {
            nodes.push_back(k);
            member[k] = 1;
        }
    double best = 0.0;
    std::size_t count = 0;
    auto visit = [&](std::size_t a, std::size_t b) {
        const double d = distance(g.coords(a), g.coords(b));
        best = std::max(best, std::abs(u[a] - u[b]) / std::sqrt(d));
        ++count;
    };
    for (std::size_t k : nodes) {
        const int i = g.i_of(k), j = g.j_of(k);
        for (int dj = 0; dj <= 4; ++dj)
            for (int di = -4; di <= 4; ++di) {
                if (dj == 0 && di <= 0) continue;
                if (di * di + dj * dj > 16 || !g.in_lattice(i + di, j + dj)) continue;
                const std::size_t q = g.index(i + di, j + dj);
                if (member[q]) visit(k, q);
            }
    }
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / 1200);
    for (std::size_t a = 0; a < nodes.size(); a += stride)
        for (std::size_t b = a + stride; b < nodes.size(); b += stride) visit(nodes[a], nodes[b]);
    if (pairs) *pairs = count;
    return best;
}

HolderBound holder_check(const ScalarField& u, Point center, double rho) {
    HolderBound hb;
    hb.holder_half = holder_half_quotient(u, center, 0.5 * rho, &hb.pairs);
    const Grid2D& g = u.g();
    const VectorField du = gradient(u);
    for (std::size_t k : g.interior())
        if (distance(g.coords(k), center) < 0.5 * rho) hb.grad_u2 = std::max(hb.grad_u2, 2 * std::abs(u[k]) * du.norm(k));
    return hb;
}

double gradient_bound_check(const ScalarField& u, Point center, double M, double rho, double theta) {
    const Grid2D& g = u.g();
    for (std::size_t k : g.interior())
        if (distance(g.coords(k), center) < rho && !(u[k] < M))
            throw PreconditionError("gradient_bound_check: sup of u on B_rho is not below M");
    const VectorField du = gradient(u);
    double m = 0.0;
    for (std::size_t k : g.interior())
        if (distance(g.coords(k), center) < theta * rho) m = std::max(m, du.norm(k));
    return m;
}

// ---------------------------------------------------------------- stability inequality

StabilityMargin stability_check(const ScalarField& u, const Params& p, const ScalarField& zeta, double eps,
                                double delta) {
    u.require_same_grid(zeta, "stability_check");
    if (!(eps > 0 && eps < 1) || !(delta > 0)) throw PreconditionError("stability_check: need 0 < eps < 1, delta > 0");
    const Grid2D& g = u.g();
    for (std::size_t k : g.boundary())
        if (zeta[k] != 0.0) throw PreconditionError("stability_check: zeta is nonzero on the boundary");
    for (std::size_t k : g.interior()) {
        if (zeta[k] == 0.0) continue;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di)
                if (!(u[g.neighbor(k, di, dj)] > delta))
                    throw PreconditionError("stability_check: support of zeta touches {u <= delta}");
    }
    const GraphGeometry geo = graph_geometry(u, p);
    const auto z = zeta.values();
    const double h2 = g.h() * g.h();
    StabilityMargin s;
    for (std::size_t k : g.interior()) {
        double zx, zy;
        detail::central_gradient(g, z, k, zx, zy);
        if (zeta[k] == 0.0 && zx == 0.0 && zy == 0.0) continue;
        const double v = geo.v[k];
        const double ux = -geo.nu1[k] * v, uy = -geo.nu2[k] * v;
        const double dot = zx * ux + zy * uy;
        const double tang = zx * zx + zy * zy - dot * dot / (v * v);
        s.lhs += geo.A2[k] * zeta[k] * zeta[k] * v * h2;
        s.grad_term += tang * v * h2;
        s.mass_term += zeta[k] * zeta[k] * v * h2;
    }
    s.rhs = s.grad_term / (1 - eps) + s.mass_term / (eps * delta * delta);
    s.margin = s.rhs - s.lhs;
    return s;
}

// ---------------------------------------------------------------- test functions

ScalarField bump(const GridPtr& grid, Point c, double r) {
    return ScalarField::from_function(grid, [=](double x, double y) {
        const double q = ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y)) / (r * r);
        return q < 1 ? std::pow(1 - q, 3) : 0.0;
    });
}

ScalarField random_bump(const GridPtr& grid, std::uint64_t seed, double margin, double max_r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double x0, y0, x1, y1;
    grid->domain().bounding_box(x0, y0, x1, y1);
    double r = max_r;
    for (int attempt = 0; attempt < 4000; ++attempt) {
        if (attempt % 400 == 399) r *= 0.5;
        const double rr = r * (0.4 + 0.6 * unit(rng));
        const Point c{x0 + (x1 - x0) * unit(rng), y0 + (y1 - y0) * unit(rng)};
        if (-grid->domain().sdf(c.x, c.y) > rr + margin) {
            ScalarField z = bump(grid, c, rr);
            for (std::size_t k : grid->boundary()) z[k] = 0.0;
            return z;
        }
    }
    throw PreconditionError("random_bump: no admissible bump (domain too thin for the margin)");
}

void clear_near_boundary(ScalarField& zeta, double width) {
    const Grid2D& g = zeta.g();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.active(k)) continue;
        const Point x = g.coords(k);
        if (g.is_boundary(k) || -g.domain().sdf(x.x, x.y) < width) zeta[k] = 0.0;
    }
}

// ---------------------------------------------------------------- weak form

WeakCheck weak_solution_check(const ScalarField& u, const Params& p, int trials, std::uint64_t seed,
                              double threshold) {
    const Grid2D& g = u.g();
    const double h = g.h();
    const auto norm = [&](const ScalarField& z) {
        double l1 = 0.0;
        const auto zv = z.values();
        for (std::size_t k : g.interior()) {
            double zx, zy;
            detail::central_gradient(g, zv, k, zx, zy);
            l1 += (std::abs(z[k]) + std::hypot(zx, zy)) * h * h;
        }
        return l1;
    };
    // distance to {u < threshold}
    std::vector<Point> sing;
    for (std::size_t k : g.interior())
        if (u[k] < threshold) sing.push_back(g.coords(k));
    std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
    if (!sing.empty())
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.active(k))
                for (const Point& s : sing) dist[k] = std::min(dist[k], distance(g.coords(k), s));

    WeakCheck wc;
    wc.trials = trials;
    for (double w : {8 * h, 4 * h, 2 * h}) {
        wc.cutoff_widths.push_back(w);
        wc.cutoff_residuals.push_back(0.0);
        wc.cutoff_gradient_mass.push_back(0.0);
    }
    std::vector<ScalarField> chis;
    for (std::size_t c = 0; c < wc.cutoff_widths.size(); ++c) {
        const double w = wc.cutoff_widths[c];
        ScalarField chi(u.grid(), 1.0);
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.active(k)) chi[k] = std::clamp((dist[k] - w) / w, 0.0, 1.0);
        const auto cv = chi.values();
        double mass = 0.0;
        for (std::size_t k : g.interior()) {
            double cx, cy;
            detail::central_gradient(g, cv, k, cx, cy);
            mass += std::hypot(cx, cy) * h * h;
        }
        wc.cutoff_gradient_mass[c] = mass;
        chis.push_back(std::move(chi));
    }
    const double max_r = 0.25 * g.domain().diameter();
    for (int t = 0; t < trials; ++t) {
        const ScalarField z = random_bump(u.grid(), seed + std::uint64_t(t), 3 * h, max_r);
        const double n = norm(z);
        if (n > 0) {
            bool defined = true;
            for (std::size_t k : g.interior())
                if (z[k] != 0.0 && !(u[k] > 0)) defined = false;
            if (defined) wc.max_relative = std::max(wc.max_relative, std::abs(weak_form_residual(u, z, p)) / n);
        }
        for (std::size_t c = 0; c < chis.size(); ++c) {
            ScalarField zc = z;
            for (std::size_t k = 0; k < g.size(); ++k) zc[k] *= chis[c][k];
            const double nc = norm(zc);
            if (nc == 0.0) continue;
            const double rel = std::abs(weak_form_residual(u, zc, p)) / nc;
            wc.cutoff_residuals[c] = std::max(wc.cutoff_residuals[c], rel);
        }
    }
    wc.max_relative_cutoff = wc.cutoff_residuals.back();
    return wc;
}

// ---------------------------------------------------------------- blow-ups

BlowupSequence blowup_sequence(const ScalarField& u, Point x0, const std::vector<double>& scales, double ref_h,
                               bool centered) {
    const Grid2D& g = u.g();
    if (!(g.domain().sdf(x0.x, x0.y) < 0)) throw PreconditionError("blowup_sequence: x0 must lie in the domain");
    for (std::size_t j = 1; j < scales.size(); ++j)
        if (!(scales[j] < scales[j - 1])) throw PreconditionError("blowup_sequence: scales must decrease strictly");
    BlowupSequence bs;
    bs.center = x0;
    bs.scales = scales;
    bs.reference = Grid2D::make(Domain::disk(0, 0, 1), ref_h);
    const Grid2D& ref = *bs.reference;
    const double base = centered ? sample(u, x0) : 0.0;
    const double reach = 1.0 + 2.0 * ref_h;
    for (double lam : scales) {
        ScalarField f(bs.reference);
        const bool fits = -g.domain().sdf(x0.x, x0.y) >= lam * reach;
        bs.skipped.push_back(!fits);
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (fits) {
            ratio = 0.0;
            for (std::size_t k = 0; k < ref.size(); ++k) {
                if (!ref.active(k)) continue;
                const Point x = ref.coords(k);
                f[k] = (sample(u, {x0.x + lam * x.x, x0.y + lam * x.y}) - base) / lam;
                const double r = std::hypot(x.x, x.y);
                if (r >= 0.25 && r <= 1.0) ratio = std::max(ratio, f[k] / r);
            }
        }
        bs.slope_ratio.push_back(ratio);
        bs.fields.push_back(std::move(f));
    }
    for (std::size_t j = 1; j < scales.size(); ++j) {
        double d = std::numeric_limits<double>::quiet_NaN();
        if (!bs.skipped[j] && !bs.skipped[j - 1]) {
            d = 0.0;
            for (std::size_t k = 0; k < ref.size(); ++k)
                if (ref.active(k)) d = std::max(d, std::abs(bs.fields[j][k] - bs.fields[j - 1][k]));
        }
        bs.successive_diff.push_back(d);
    }
    return bs;
}

// ---------------------------------------------------------------- singular set

SingularSet singular_set(const ScalarField& u, double threshold) {
    const Grid2D& g = u.g();
    const double h = g.h();
    if (threshold < 3 * h * (1 - 1e-12))
        throw PreconditionError("singular_set: threshold below the resolution floor 3h");
    SingularSet s;
    s.threshold = threshold;
    for (std::size_t k : g.interior())
        if (u[k] < threshold) s.nodes.push_back(k);
    std::vector<double> xs, ys;
    for (int k : {4, 8, 16, 32}) {
        const int span = k + 1;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        if (s.nodes.empty()) best = 0;
        for (int oy = 0; oy < span && !s.nodes.empty(); ++oy)
            for (int ox = 0; ox < span; ++ox) {
                std::set<std::pair<int, int>> boxes;
                for (std::size_t q : s.nodes) {
                    const int i = g.i_of(q) - ox, j = g.j_of(q) - oy;
                    boxes.insert({int(std::floor(double(i) / span)), int(std::floor(double(j) / span))});
                }
                best = std::min(best, boxes.size());
            }
        s.box_sizes.push_back(k * h);
        s.box_counts.push_back(double(best));
        if (best > 0) {
            xs.push_back(-std::log(k * h));
            ys.push_back(std::log(double(best)));
        }
    }
    if (xs.size() >= 2) {
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        s.dimension = sxy / sxx;
    }
    return s;
}

}  // namespace sme
