#include <doctest.h>

#include <cmath>

#include "smelab/errors.hpp"
#include "smelab/radial.hpp"

using namespace sme;

// Reference values below come from an independent scipy (LSODA/RK45 at rtol 1e-12)
// integration of the same initial value problems.

TEST_CASE("n = 1 catenary and conserved quantity") {
    const Params p(2, 1);
    const RadialProfile prof = integrate_n1(p, 2.0, 1e-3);
    double err = 0.0, drift = 0.0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        err = std::max(err, std::abs(prof.u[i] - std::cosh(prof.r[i])));
        drift = std::max(drift, std::abs(conserved_quantity(p, prof.u[i], prof.s[i]) - 1.0));
    }
    CHECK(err < 1e-6);
    CHECK(drift < 1e-8);
    for (std::size_t i = 1; i + 1 < prof.size(); ++i) CHECK(prof.u[i + 1] - 2 * prof.u[i] + prof.u[i - 1] > 0);

    const RadialProfile neg = integrate_n1(p, -2.0, 1e-3);
    REQUIRE(neg.size() == prof.size());
    for (std::size_t i = 0; i < neg.size(); ++i) {
        const std::size_t j = neg.size() - 1 - i;
        CHECK(neg.r[i] == doctest::Approx(-prof.r[j]));
        CHECK(neg.u[i] == doctest::Approx(prof.u[j]).epsilon(1e-13));
    }

    const Params p3(3, 1);
    const RadialProfile blow = integrate_n1(p3, 10.0, 1e-3, 1e6);
    CHECK(blow.hit_slope_cap);
    CHECK(blow.stop_x < 10.0);
    CHECK_THROWS_AS(integrate_n1(Params(2, 2), 1.0, 1e-3), PreconditionError);
}

TEST_CASE("exterior profile") {
    const Params p(2, 2);
    const RadialProfile psi = integrate_exterior(p, 50.0);
    CHECK(psi.r.front() == 1.0);
    CHECK(std::abs(psi.u.front()) < 1e-8);
    for (std::size_t i = 1; i < psi.size(); ++i) {
        CHECK(psi.r[i] > psi.r[i - 1]);
        CHECK(psi.u[i] > psi.u[i - 1]);
    }
    CHECK(std::abs(psi.u.back() / psi.r.back() - 1.0) < 0.05);
    CHECK(psi.u.back() / psi.r.back() == doctest::Approx(0.9983964429).epsilon(1e-6));
    CHECK(profile_value(psi, 10.0) - 10.0 == doctest::Approx(0.1135613043).epsilon(1e-4));
    CHECK(profile_value(psi, 30.0) - 30.0 == doctest::Approx(-0.0721572209).epsilon(1e-4));

    const SlopeSup s = slope_sup(psi);
    CHECK(s.beta == doctest::Approx(1.0887428243).epsilon(1e-6));
    CHECK(s.r_at == doctest::Approx(2.592).epsilon(0.01));
    CHECK_FALSE(s.at_last_sample);
    CHECK_THROWS_AS(integrate_exterior(Params(2, 1), 5.0), PreconditionError);
}

TEST_CASE("slope supremum for other (m, n)") {
    struct Case {
        int m, n;
        double beta;
    };
    for (const Case c : {Case{3, 2, 1.4351256233}, Case{2, 3, 0.7426791858}}) {
        const Params p(c.m, c.n);
        const SlopeSup s = slope_sup(integrate_exterior(p, 50.0));
        CHECK(s.beta == doctest::Approx(c.beta).epsilon(1e-6));
        CHECK(s.beta >= p.cone_slope() - 1e-9);
    }
    const SlopeSup s44 = slope_sup(integrate_exterior(Params(4, 4), 50.0));
    CHECK(std::abs(s44.beta - 1.0) < 0.01);
    CHECK(s44.at_last_sample);  // psi(r)/r increases towards the cone slope
}

TEST_CASE("scaling") {
    const Params p(2, 2);
    const RadialProfile psi = integrate_exterior(p, 20.0);
    const RadialProfile same = scale_profile(psi, 1.0);
    CHECK(same.r == psi.r);
    CHECK(same.u == psi.u);
    for (double lam : {0.3, 2.0, 7.5}) {
        const RadialProfile sc = scale_profile(psi, lam);
        CHECK(slope_sup(sc).beta == doctest::Approx(slope_sup(psi).beta).epsilon(1e-14));
    }
    RadialProfile one;
    one.params = p;
    one.push(1.0, 0.5, 0.25);
    const RadialProfile two = scale_profile(one, 2.0);
    CHECK(two.r[0] == 2.0);
    CHECK(two.u[0] == 1.0);
    CHECK(two.s[0] == 0.25);

    // The residual of psi_lambda at lambda r is the residual of psi at r divided by lambda.
    const RadialProfile tail = scale_profile(psi, 1.0);
    const auto r1 = radial_residual(tail);
    const auto r2 = radial_residual(scale_profile(tail, 3.0));
    for (std::size_t i = 100; i + 1 < r1.size(); i += 997) CHECK(r2[i] == doctest::Approx(r1[i] / 3.0).epsilon(1e-6));
}

TEST_CASE("radial residual") {
    const Params p(2, 2);
    double err[2];
    for (int l = 0; l < 2; ++l) {
        const RadialProfile c = cone_profile(p, 1.0, 0.2, 1.0, l == 0 ? 81 : 161);
        const auto r = radial_residual(c);
        err[l] = 0.0;
        for (std::size_t i = 1; i + 1 < r.size(); ++i) err[l] = std::max(err[l], std::abs(r[i]));
    }
    CHECK(err[1] < 1e-10);

    RadialProfile flat;
    flat.params = p;
    for (int i = 1; i <= 5; ++i) flat.push(i * 0.1, 2.0, 0.0);
    const auto rf = radial_residual(flat);
    CHECK(std::isnan(rf.front()));
    CHECK(rf[2] == doctest::Approx(-0.5));

    const auto rc = radial_residual(integrate_n1(Params(2, 1), 2.0, 1e-3));
    for (std::size_t i = 1; i + 1 < rc.size(); ++i) CHECK(std::abs(rc[i]) < 1e-5);

    RadialProfile two;
    two.params = p;
    two.push(1, 1, 0);
    two.push(2, 1, 0);
    CHECK_THROWS_AS(radial_residual(two), StructuralError);
}

TEST_CASE("interior profile and disk solutions") {
    const InteriorFold f = interior_fold(Params(2, 2));
    CHECK(f.ratio == doctest::Approx(0.9184905541).epsilon(1e-6));
    CHECK(f.t == doctest::Approx(2.822).epsilon(0.01));
    CHECK(interior_fold(Params(3, 2)).ratio == doctest::Approx(1.3464764047).epsilon(1e-6));

    const RadialProfile d = disk_radial_solution(Params(2, 2), 1.0, 1.5);
    CHECK(d.u.back() == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(d.r.back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(disk_radial_solution(Params(2, 2), 1.0, 0.9), PreconditionError);
}
