#include <doctest.h>

#include <cmath>
#include <random>

#include "smelab/errors.hpp"
#include "smelab/operators.hpp"

using namespace sme;

namespace {

GridPtr annulus(double h) { return Grid2D::make(Domain::annulus(0, 0, 0.2, 1.0), h); }

double max_over(const Grid2D& g, const std::function<double(std::size_t)>& f,
                const std::function<bool(Point)>& keep) {
    double m = 0.0;
    for (std::size_t k : g.interior())
        if (keep(g.coords(k))) m = std::max(m, f(k));
    return m;
}

}  // namespace

TEST_CASE("params") {
    const Params p(3, 2);
    CHECK(p.cone_slope() * p.cone_slope() * (p.n - 1) == doctest::Approx(p.m - 1));
    CHECK(Params(2, 2).sigma_m1() == doctest::Approx(2 * M_PI));
    CHECK(Params(3, 2).sigma_m1() == doctest::Approx(4 * M_PI));
    CHECK_THROWS_AS(Params(1, 2), PreconditionError);
    CHECK_THROWS_AS(Params(2, 1).cone_slope(), PreconditionError);
}

TEST_CASE("grid invariants") {
    for (const char* spec : {"disk:r=1", "annulus:r_in=0.2,r_out=1", "rect:x0=-1,y0=-0.6,x1=1,y1=0.6",
                             "ellipse:a=1,b=0.6"}) {
        const GridPtr g = Grid2D::make(Domain::parse(spec), 1.0 / 32);
        for (std::size_t k : g->interior())
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) CHECK(g->active(g->neighbor(k, di, dj)));
        for (std::size_t b = 0; b < g->boundary().size(); ++b) {
            const Point x = g->coords(g->boundary()[b]);
            CHECK(distance(x, g->boundary_anchor(b)) <= g->h() * std::sqrt(2.0) + 1e-12);
        }
    }
    CHECK_THROWS_AS(Domain::parse("blob:r=1"), ParseError);
    CHECK_THROWS_AS(Grid2D::make(Domain::disk(0, 0, 1), 0.0), PreconditionError);
}

TEST_CASE("gradient") {
    const GridPtr g = annulus(1.0 / 32);
    const ScalarField aff = ScalarField::from_function(g, [](double x, double y) { return 3 * x + 2 * y; });
    const VectorField d = gradient(aff);
    for (std::size_t k : g->interior()) {
        CHECK(d.x[k] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(d.y[k] == doctest::Approx(2.0).epsilon(1e-12));
    }
    const VectorField z = gradient(ScalarField(g, 4.0));
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(z.norm(k) == 0.0);

    // |x| on the annulus, away from the axes: error O(h^2).
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const GridPtr gl = annulus(l == 0 ? 1.0 / 32 : 1.0 / 64);
        const ScalarField r = ScalarField::from_function(gl, [](double x, double y) { return std::hypot(x, y); });
        const VectorField dr = gradient(r);
        err[l] = max_over(*gl, [&](std::size_t k) {
            const Point x = gl->coords(k);
            const double rr = std::hypot(x.x, x.y);
            return std::hypot(dr.x[k] - x.x / rr, dr.y[k] - x.y / rr);
        }, [](Point x) { return std::abs(x.x) > 0.1 && std::abs(x.y) > 0.1; });
    }
    CHECK(err[0] < 1e-2);
    CHECK(err[0] / err[1] > 3.5);
}

TEST_CASE("mean curvature operator") {
    const GridPtr g = annulus(1.0 / 32);
    const ScalarField aff = ScalarField::from_function(g, [](double x, double y) { return 0.5 - x + 2 * y; });
    const ScalarField M0 = mean_curvature_operator(aff);
    for (std::size_t k : g->interior()) CHECK(std::abs(M0[k]) < 1e-12);

    // M(a|x|) = a (n-1) / (|x| sqrt(1 + a^2)) and M(x^2) = 2 / (1 + 4x^2)^{3/2}.
    double cone_err[2], parab_err[2];
    for (int l = 0; l < 2; ++l) {
        const GridPtr gl = annulus(l == 0 ? 1.0 / 32 : 1.0 / 64);
        const ScalarField c = ScalarField::from_function(gl, [](double x, double y) { return std::hypot(x, y); });
        const ScalarField q = ScalarField::from_function(gl, [](double x, double) { return x * x; });
        const ScalarField Mc = mean_curvature_operator(c), Mq = mean_curvature_operator(q);
        auto away = [](Point x) { return std::hypot(x.x, x.y) > 0.3 && std::hypot(x.x, x.y) < 0.9; };
        cone_err[l] = max_over(*gl, [&](std::size_t k) {
            const Point x = gl->coords(k);
            return std::abs(Mc[k] - 1.0 / (std::hypot(x.x, x.y) * std::sqrt(2.0)));
        }, away);
        parab_err[l] = max_over(*gl, [&](std::size_t k) {
            const double x = gl->coords(k).x;
            return std::abs(Mq[k] - 2.0 / std::pow(1 + 4 * x * x, 1.5));
        }, away);
    }
    CHECK(cone_err[1] < cone_err[0]);
    CHECK(cone_err[1] < 5e-3);
    CHECK(parab_err[0] / parab_err[1] > 3.0);
    CHECK(parab_err[1] < 1e-3);
}

TEST_CASE("sme residual") {
    const Params p(2, 2);
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const GridPtr g = annulus(l == 0 ? 1.0 / 32 : 1.0 / 64);
        const ScalarField c = ScalarField::from_function(g, [](double x, double y) { return std::hypot(x, y); });
        const ScalarField r = sme_residual(c, p);
        err[l] = 0.0;
        for (std::size_t k : g->interior()) err[l] = std::max(err[l], std::abs(r[k]));
    }
    CHECK(err[1] < err[0]);
    CHECK(err[0] / err[1] > 1.7);

    const GridPtr g = annulus(1.0 / 16);
    const ScalarField r = sme_residual(ScalarField(g, 2.0), Params(3, 2));
    for (std::size_t k : g->interior()) CHECK(r[k] == doctest::Approx(-1.0));

    ScalarField bad(g, 1.0);
    bad[g->interior()[5]] = 0.0;
    CHECK_THROWS_AS(sme_residual(bad, p), DomainError);
}

TEST_CASE("sme residual, n = 1 catenary") {
    // A strip thin in y with u depending on x only: the 2-D operator reduces to the 1-D one.
    const Params p(2, 2);
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const double h = l == 0 ? 1.0 / 32 : 1.0 / 64;
        const GridPtr g = Grid2D::make(Domain::rectangle(-1, -0.25, 1, 0.25), h);
        const ScalarField u = ScalarField::from_function(g, [](double x, double) { return std::cosh(x); });
        const ScalarField M = mean_curvature_operator(u);
        err[l] = 0.0;
        for (std::size_t k : g->interior()) {
            const double x = g->coords(k).x;
            // u''/(1+u'^2)^{3/2} = 1/(u v) with v = cosh for the catenary.
            err[l] = std::max(err[l], std::abs(M[k] - 1.0 / (std::cosh(x) * std::cosh(x))));
        }
    }
    CHECK(err[1] < 2e-4);
    CHECK(err[0] / err[1] > 3.0);
}

TEST_CASE("area functional") {
    const Params p(2, 2);
    const GridPtr sq = Grid2D::make(Domain::rectangle(0, 0, 1, 1), 1.0 / 16);
    CHECK(area_functional(ScalarField(sq, 1.7), p) == doctest::Approx(2 * M_PI * 1.7).epsilon(1e-12));
    CHECK(area_functional(ScalarField(sq, 0.0), p) == 0.0);

    // lambda u(x / lambda) on lambda Omega has area lambda^{n+m-1} A(u).
    const Params p3(3, 2);
    const double lam = 2.0, h = 1.0 / 32;
    auto f = [](double x, double y) { return 1.0 + 0.3 * x * x + 0.1 * std::sin(3 * y); };
    const GridPtr g1 = Grid2D::make(Domain::rectangle(-1, -1, 1, 1), h);
    const GridPtr g2 = Grid2D::make(Domain::rectangle(-lam, -lam, lam, lam), lam * h);
    const double a1 = area_functional(ScalarField::from_function(g1, f), p3);
    const double a2 = area_functional(
        ScalarField::from_function(g2, [&](double x, double y) { return lam * f(x / lam, y / lam); }), p3);
    CHECK(a2 == doctest::Approx(std::pow(lam, 4) * a1).epsilon(1e-10));
}

TEST_CASE("area gradient is the exact derivative") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    const Params p(3, 2);
    const GridPtr g = Grid2D::make(Domain::disk(0, 0, 1), 1.0 / 16);
    const double a = U(rng), b = U(rng), c = U(rng);
    const ScalarField u = ScalarField::from_function(
        g, [&](double x, double y) { return 2.0 + 0.5 * a * x + 0.5 * b * y * y + 0.3 * c * std::sin(2 * x * y); });
    const ScalarField G = area_gradient(u, p);
    ScalarField dir(g, 0.0);
    for (std::size_t k : g->interior()) dir[k] = U(rng);
    const double eps = 1e-6;
    ScalarField up = u, dn = u;
    double analytic = 0.0;
    for (std::size_t k : g->interior()) {
        up[k] += eps * dir[k];
        dn[k] -= eps * dir[k];
        analytic += G[k] * dir[k];
    }
    const double fd = (area_functional(up, p) - area_functional(dn, p)) / (2 * eps);
    CHECK(std::abs(fd - analytic) / std::abs(analytic) < 1e-6);

    // Flat data: only the u^{m-1} factor varies, four quarter-cells around each node.
    const ScalarField G0 = area_gradient(ScalarField(g, 1.5), p);
    const std::size_t k = g->nearest_interior({0, 0});
    CHECK(G0[k] == doctest::Approx(p.sigma_m1() * (p.m - 1) * std::pow(1.5, p.m - 2) * g->h() * g->h()));
}

TEST_CASE("graph geometry") {
    const Params p(2, 2);
    const GridPtr g = annulus(1.0 / 64);
    const ScalarField c = ScalarField::from_function(g, [](double x, double y) { return std::hypot(x, y); });
    const GraphGeometry geo = graph_geometry(c, p);
    for (std::size_t k : g->interior()) {
        const double n2 = geo.nu1[k] * geo.nu1[k] + geo.nu2[k] * geo.nu2[k] + geo.nu3[k] * geo.nu3[k];
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(geo.v[k] >= 1.0);
        CHECK(geo.A2[k] >= 0.0);
        CHECK(geo.g11[k] * geo.g22[k] - geo.g12[k] * geo.g12[k] >= -1e-12);
        const Point x = g->coords(k);
        const double r = std::hypot(x.x, x.y);
        if (r > 0.4 && r < 0.9) CHECK(geo.A2[k] == doctest::Approx(1.0 / (2 * r * r)).epsilon(0.02));
    }
}

TEST_CASE("weak form equals the summed residual") {
    const Params p(2, 2);
    const GridPtr g = Grid2D::make(Domain::disk(0, 0, 1), 1.0 / 32);
    const ScalarField u = ScalarField::from_function(g, [](double x, double y) { return 1.0 + x * x + 0.5 * y; });
    ScalarField z = ScalarField::from_function(g, [](double x, double y) {
        const double q = x * x + y * y;
        return q < 0.5 ? std::pow(0.5 - q, 2) : 0.0;
    });
    const ScalarField r = sme_residual(u, p);
    double sum = 0.0;
    for (std::size_t k : g->interior()) sum += z[k] * r[k];
    const double h = g->h();
    CHECK(weak_form_residual(u, z, p) == doctest::Approx(-h * h * sum).epsilon(1e-12));
    CHECK(weak_form_residual(u, ScalarField(g, 0.0), p) == 0.0);
    z[g->boundary()[0]] = 1.0;
    CHECK_THROWS_AS(weak_form_residual(u, z, p), PreconditionError);
}
