#include "smelab/operators.hpp"

#include <cmath>
#include <sstream>

#include "smelab/errors.hpp"

namespace sme {

namespace detail {

namespace {
// Derivative along (di, dj) at node q using whichever active neighbours exist.
double tangential(const Grid2D& g, std::span<const double> u, std::size_t q, int di, int dj) {
    const int i = g.i_of(q), j = g.j_of(q);
    const bool fwd = g.in_lattice(i + di, j + dj) && g.active(g.neighbor(q, di, dj));
    const bool bwd = g.in_lattice(i - di, j - dj) && g.active(g.neighbor(q, -di, -dj));
    if (fwd && bwd) return (u[g.neighbor(q, di, dj)] - u[g.neighbor(q, -di, -dj)]) / (2 * g.h());
    if (fwd) return (u[g.neighbor(q, di, dj)] - u[q]) / g.h();
    if (bwd) return (u[q] - u[g.neighbor(q, -di, -dj)]) / g.h();
    return 0.0;
}
}  // namespace

double half_node_flux(const Grid2D& g, std::span<const double> u, std::size_t k, int d) {
    const int di = d == 0 ? 1 : 0, dj = 1 - di;
    const std::size_t e = g.neighbor(k, di, dj);
    const double dn = (u[e] - u[k]) / g.h();
    const double dt = 0.5 * (tangential(g, u, k, dj, di) + tangential(g, u, e, dj, di));
    return dn / std::sqrt(1.0 + dn * dn + dt * dt);
}

}  // namespace detail

namespace {

// One-sided derivative at a boundary node along one axis.
double boundary_derivative(const Grid2D& g, std::span<const double> u, std::size_t k, int di, int dj) {
    const int i = g.i_of(k), j = g.j_of(k);
    auto ok = [&](int s) {
        return g.in_lattice(i + s * di, j + s * dj) && g.active(g.index(i + s * di, j + s * dj));
    };
    auto val = [&](int s) { return u[g.index(i + s * di, j + s * dj)]; };
    const double h = g.h();
    if (ok(1) && ok(-1)) return (val(1) - val(-1)) / (2 * h);
    if (ok(1) && ok(2)) return (-3 * val(0) + 4 * val(1) - val(2)) / (2 * h);
    if (ok(-1) && ok(-2)) return (3 * val(0) - 4 * val(-1) + val(-2)) / (2 * h);
    if (ok(1)) return (val(1) - val(0)) / h;
    if (ok(-1)) return (val(0) - val(-1)) / h;
    return 0.0;
}

std::string node_label(const Grid2D& g, std::size_t k) {
    std::ostringstream os;
    const Point p = g.coords(k);
    os << "node " << k << " (i=" << g.i_of(k) << ", j=" << g.j_of(k) << ", x=" << p.x << ", y=" << p.y << ")";
    return os.str();
}

}  // namespace

VectorField gradient(const ScalarField& u) {
    const Grid2D& g = u.g();
    VectorField out{u.grid(), std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
    const auto vals = u.values();
    for (std::size_t k : g.interior()) detail::central_gradient(g, vals, k, out.x[k], out.y[k]);
    for (std::size_t k : g.boundary()) {
        out.x[k] = boundary_derivative(g, vals, k, 1, 0);
        out.y[k] = boundary_derivative(g, vals, k, 0, 1);
    }
    return out;
}

ScalarField mean_curvature_operator(const ScalarField& u) {
    const Grid2D& g = u.g();
    ScalarField out(u.grid());
    const auto vals = u.values();
    const double h = g.h();
    for (std::size_t k : g.interior()) {
        const double fe = detail::half_node_flux(g, vals, k, 0);
        const double fw = detail::half_node_flux(g, vals, g.neighbor(k, -1, 0), 0);
        const double fn = detail::half_node_flux(g, vals, k, 1);
        const double fs = detail::half_node_flux(g, vals, g.neighbor(k, 0, -1), 1);
        out[k] = (fe - fw + fn - fs) / h;
    }
    return out;
}

ScalarField sme_residual(const ScalarField& u, const Params& p) {
    const Grid2D& g = u.g();
    for (std::size_t k : g.interior())
        if (!(u[k] > 0.0)) throw DomainError("sme_residual: u <= 0 at " + node_label(g, k), long(k));
    ScalarField r = mean_curvature_operator(u);
    const auto vals = u.values();
    for (std::size_t k : g.interior()) {
        double gx, gy;
        detail::central_gradient(g, vals, k, gx, gy);
        const double v = std::sqrt(1.0 + gx * gx + gy * gy);
        r[k] -= (p.m - 1) / (u[k] * v);
    }
    return r;
}

double area_functional(const ScalarField& u, const Params& p) {
    const Grid2D& g = u.g();
    const double h = g.h();
    double sum = 0.0;
    for (std::size_t c : g.cells()) {
        const double u00 = u[c], u10 = u[g.neighbor(c, 1, 0)], u01 = u[g.neighbor(c, 0, 1)],
                     u11 = u[g.neighbor(c, 1, 1)];
        const double gx = ((u10 - u00) + (u11 - u01)) / (2 * h);
        const double gy = ((u01 - u00) + (u11 - u10)) / (2 * h);
        const double ub = 0.25 * (u00 + u10 + u01 + u11);
        sum += std::sqrt(1.0 + gx * gx + gy * gy) * std::pow(ub, p.m - 1);
    }
    return p.sigma_m1() * sum * h * h;
}

ScalarField area_gradient(const ScalarField& u, const Params& p) {
    const Grid2D& g = u.g();
    for (std::size_t k : g.interior())
        if (!(u[k] > 0.0)) throw DomainError("area_gradient: u <= 0 at " + node_label(g, k), long(k));
    const double h = g.h();
    const double scale = p.sigma_m1() * h * h;
    ScalarField out(u.grid());
    // corner offsets and the signs of d(gx)/du, d(gy)/du in units of 1/(2h)
    static constexpr int off[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    static constexpr double sx[4] = {-1, 1, -1, 1};
    static constexpr double sy[4] = {-1, -1, 1, 1};
    for (std::size_t c : g.cells()) {
        std::size_t nodes[4];
        double val[4];
        for (int q = 0; q < 4; ++q) {
            nodes[q] = g.neighbor(c, off[q][0], off[q][1]);
            val[q] = u[nodes[q]];
        }
        const double gx = ((val[1] - val[0]) + (val[3] - val[2])) / (2 * h);
        const double gy = ((val[2] - val[0]) + (val[3] - val[1])) / (2 * h);
        const double ub = 0.25 * (val[0] + val[1] + val[2] + val[3]);
        const double w = std::sqrt(1.0 + gx * gx + gy * gy);
        const double pw = std::pow(ub, p.m - 1);
        const double dpw = (p.m - 1) * std::pow(ub, p.m - 2);
        for (int q = 0; q < 4; ++q) {
            if (!g.is_interior(nodes[q])) continue;
            const double dw = (gx * sx[q] + gy * sy[q]) / (2 * h * w);
            out[nodes[q]] += scale * (dw * pw + w * dpw * 0.25);
        }
    }
    return out;
}

GraphGeometry graph_geometry(const ScalarField& u, const Params& p) {
    const Grid2D& g = u.g();
    const std::size_t N = g.size();
    GraphGeometry geo;
    for (auto* vec : {&geo.v, &geo.nu1, &geo.nu2, &geo.nu3, &geo.g11, &geo.g12, &geo.g22, &geo.H, &geo.A2})
        vec->assign(N, 0.0);
    const VectorField du = gradient(u);
    for (std::size_t k = 0; k < N; ++k) {
        if (!g.active(k)) continue;
        const double v = std::sqrt(1.0 + du.x[k] * du.x[k] + du.y[k] * du.y[k]);
        geo.v[k] = v;
        geo.nu1[k] = -du.x[k] / v;
        geo.nu2[k] = -du.y[k] / v;
        geo.nu3[k] = 1.0 / v;
        geo.g11[k] = 1.0 - geo.nu1[k] * geo.nu1[k];
        geo.g12[k] = -geo.nu1[k] * geo.nu2[k];
        geo.g22[k] = 1.0 - geo.nu2[k] * geo.nu2[k];
    }
    const ScalarField Mu = mean_curvature_operator(u);
    const double h2 = g.h() * g.h();
    for (std::size_t k : g.interior()) {
        geo.H[k] = Mu[k];
        const double c = u[k];
        const double uxx = (u[g.neighbor(k, 1, 0)] - 2 * c + u[g.neighbor(k, -1, 0)]) / h2;
        const double uyy = (u[g.neighbor(k, 0, 1)] - 2 * c + u[g.neighbor(k, 0, -1)]) / h2;
        const double uxy = (u[g.neighbor(k, 1, 1)] - u[g.neighbor(k, -1, 1)] - u[g.neighbor(k, 1, -1)] +
                            u[g.neighbor(k, -1, -1)]) /
                           (4 * h2);
        // B = g U, |A|^2 = v^{-2} tr(B B)
        const double b11 = geo.g11[k] * uxx + geo.g12[k] * uxy;
        const double b12 = geo.g11[k] * uxy + geo.g12[k] * uyy;
        const double b21 = geo.g12[k] * uxx + geo.g22[k] * uxy;
        const double b22 = geo.g12[k] * uxy + geo.g22[k] * uyy;
        const double v = geo.v[k];
        geo.A2[k] = (b11 * b11 + 2 * b12 * b21 + b22 * b22) / (v * v);
        if (c > 0.0) {
            geo.identity_defect = std::max(geo.identity_defect, std::abs(geo.H[k] - (p.m - 1) * geo.nu3[k] / c));
        } else {
            ++geo.identity_skipped;
        }
    }
    return geo;
}

double weak_form_residual(const ScalarField& u, const ScalarField& zeta, const Params& p) {
    u.require_same_grid(zeta, "weak_form_residual");
    const Grid2D& g = u.g();
    for (std::size_t k : g.boundary())
        if (zeta[k] != 0.0) throw PreconditionError("weak_form_residual: test function nonzero on the boundary");
    for (std::size_t k : g.interior()) {
        if (zeta[k] == 0.0) continue;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di)
                if (g.is_boundary(g.neighbor(k, di, dj)))
                    throw PreconditionError("weak_form_residual: test function nonzero next to the boundary");
        if (!(u[k] > 0.0))
            throw DomainError("weak_form_residual: u <= 0 inside the support of the test function", long(k));
    }
    const auto vals = u.values();
    const double h = g.h();
    double edge_sum = 0.0, source_sum = 0.0;
    for (std::size_t k : g.interior()) {
        for (int d = 0; d < 2; ++d) {
            const std::size_t nb = d == 0 ? g.neighbor(k, 1, 0) : g.neighbor(k, 0, 1);
            if (!g.is_interior(nb)) continue;
            const double dz = zeta[nb] - zeta[k];
            if (dz == 0.0) continue;
            edge_sum += detail::half_node_flux(g, vals, k, d) * dz * h;
        }
        if (zeta[k] != 0.0) {
            double gx, gy;
            detail::central_gradient(g, vals, k, gx, gy);
            source_sum += (p.m - 1) * zeta[k] / (u[k] * std::sqrt(1.0 + gx * gx + gy * gy)) * h * h;
        }
    }
    return edge_sum + source_sum;
}

}  // namespace sme
