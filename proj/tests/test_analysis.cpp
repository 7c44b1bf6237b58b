#include <doctest.h>

#include <cmath>
#include <numbers>

#include "smelab/analysis.hpp"
#include "smelab/errors.hpp"

using namespace sme;

namespace {

GridPtr unit_disk(double h) { return Grid2D::make(Domain::disk(0, 0, 1), h); }

ScalarField cone(const GridPtr& g, double a = 1.0) {
    return ScalarField::from_function(g, [a](double x, double y) { return a * std::hypot(x, y); });
}

}  // namespace

TEST_CASE("sampling") {
    const GridPtr g = unit_disk(1.0 / 16);
    const ScalarField lin = ScalarField::from_function(g, [](double x, double y) { return 1 + 2 * x - y; });
    CHECK(sample(lin, {0.123, -0.271}) == doctest::Approx(1 + 2 * 0.123 + 0.271).epsilon(1e-12));
    CHECK(sample(lin, {0.25, 0.5}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(sample(lin, {3.0, 0.0}), PreconditionError);
}

TEST_CASE("volume bounds") {
    const Params p(2, 2);
    const GridPtr g = unit_disk(1.0 / 64);
    const VolumeBound flat = volume_bound_check(ScalarField(g, 2.0), p, {0.1, 0.0}, 0.4);
    CHECK(flat.area_integral == doctest::Approx(std::numbers::pi * 0.04).epsilon(0.03));
    CHECK(flat.weighted_integral == doctest::Approx(2.0 * flat.area_integral));

    // closed-form values for the cone |x| (independent quadrature)
    const ScalarField c = cone(g);
    const VolumeBound v0 = volume_bound_check(c, p, {0, 0}, 0.6);
    CHECK(v0.ratio_i == doctest::Approx(std::sqrt(2.0) * std::numbers::pi / 8).epsilon(0.03));
    CHECK(v0.ratio_ii == doctest::Approx(2 * std::numbers::pi / 48).epsilon(0.03));
    const VolumeBound v1 = volume_bound_check(c, p, {0.3, 0.2}, 0.4);
    CHECK(v1.ratio_i == doctest::Approx(0.7893918).epsilon(0.03));
    CHECK(v1.ratio_ii == doctest::Approx(0.3814074).epsilon(0.03));
    const VolumeBound v2 = volume_bound_check(c, p, {0.3, 0.2}, 0.2);
    CHECK(v2.ratio_i == doctest::Approx(0.7863518).epsilon(0.03));
    CHECK(v2.ratio_ii == doctest::Approx(0.5082208).epsilon(0.03));
    // the cone is scale invariant about its vertex
    CHECK(volume_bound_check(c, p, {0, 0}, 0.3).ratio_i == doctest::Approx(v0.ratio_i).epsilon(0.03));

    CHECK_THROWS_AS(volume_bound_check(c, p, {0.8, 0.0}, 0.4), PreconditionError);
    CHECK(eps0_probe(c, {0.3, 0.0}, 0.2) == doctest::Approx(0.4 / 0.2).epsilon(0.02));
}

TEST_CASE("Holder and gradient bounds") {
    const GridPtr g = unit_disk(1.0 / 64);
    const ScalarField c = cone(g, 0.5);
    const HolderBound hb = holder_check(c, {0, 0}, 0.6);
    CHECK(hb.holder_half > 0);
    CHECK(hb.holder_half <= 0.5 * std::sqrt(2 * 0.3) + 1e-12);
    CHECK(hb.grad_u2 == doctest::Approx(2 * 0.25 * 0.3).epsilon(0.05));
    CHECK(hb.pairs > 0);
    CHECK(holder_check(ScalarField(g, 1.0), {0, 0}, 0.6).holder_half == 0.0);

    CHECK(gradient_bound_check(c, {0.1, 0}, 1.0, 0.4, 0.5) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(gradient_bound_check(ScalarField(g, 1.0), {0, 0}, 2.0, 0.4, 0.5) == 0.0);
    CHECK_THROWS_AS(gradient_bound_check(c, {0, 0}, 0.1, 0.4, 0.5), PreconditionError);
}

TEST_CASE("stability inequality") {
    const Params p(2, 2);
    const GridPtr g = unit_disk(1.0 / 128);
    const ScalarField c = cone(g);
    const StabilityMargin zero = stability_check(c, p, ScalarField(g, 0.0), 0.5, 0.3);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.margin == 0.0);

    // radial bump on the annulus 0.4 < r < 0.8 (quadrature reference values)
    const ScalarField z = ScalarField::from_function(g, [](double x, double y) {
        const double q = (std::hypot(x, y) - 0.6) / 0.2;
        return std::abs(q) < 1 ? std::pow(1 - q * q, 3) : 0.0;
    });
    const StabilityMargin s = stability_check(c, p, z, 0.5, 0.3);
    CHECK(s.lhs == doctest::Approx(1.0176252801).epsilon(0.02));
    CHECK(s.grad_term == doctest::Approx(35.4507438598).epsilon(0.02));
    CHECK(s.mass_term == doctest::Approx(0.7271947458).epsilon(0.02));
    CHECK(s.rhs == doctest::Approx(87.0613709605).epsilon(0.02));
    CHECK(s.margin == doctest::Approx(s.rhs - s.lhs));

    CHECK_THROWS_AS(stability_check(c, p, bump(g, {0, 0}, 0.3), 0.5, 0.1), PreconditionError);
    ScalarField edge(g, 0.0);
    edge[g->boundary()[0]] = 1.0;
    CHECK_THROWS_AS(stability_check(c, p, edge, 0.5, 0.1), PreconditionError);
    CHECK_THROWS_AS(stability_check(c, p, z, 1.0, 0.1), PreconditionError);
}

TEST_CASE("test functions") {
    const GridPtr g = unit_disk(1.0 / 32);
    const ScalarField b = bump(g, {0.25, 0}, 0.5);
    CHECK(b[g->nearest_node({0.25, 0})] == 1.0);
    CHECK(b[g->nearest_node({0.0, 0.5})] == 0.0);
    const ScalarField r1 = random_bump(g, 7, 0.1, 0.5);
    const ScalarField r2 = random_bump(g, 7, 0.1, 0.5);
    const ScalarField r3 = random_bump(g, 8, 0.1, 0.5);
    CHECK(r1.max_abs_diff_interior(r2) == 0.0);
    CHECK(r1.max_abs_diff_interior(r3) > 0.0);
    for (std::size_t k : g->interior()) {
        const Point x = g->coords(k);
        if (-g->domain().sdf(x.x, x.y) < 0.1) CHECK(r1[k] == 0.0);
    }
    ScalarField one(g, 1.0);
    clear_near_boundary(one, 0.2);
    CHECK(one[g->nearest_node({0.85, 0})] == 0.0);
    CHECK(one[g->nearest_node({0.5, 0})] == 1.0);
}

TEST_CASE("weak solution check") {
    const Params p(2, 2);
    const GridPtr g = unit_disk(1.0 / 64);
    // a constant is not a solution: (m-1)/u does not vanish
    const WeakCheck flat = weak_solution_check(ScalarField(g, 1.0), p, 5, 1, 3.0 / 64);
    CHECK(flat.max_relative > 0.05);
    CHECK(flat.trials == 5);

    const WeakCheck wc = weak_solution_check(cone(g), p, 10, 3, 3.0 / 64);
    REQUIRE(wc.cutoff_widths.size() == 3);
    CHECK(wc.cutoff_widths[0] > wc.cutoff_widths[2]);
    CHECK(wc.max_relative_cutoff == wc.cutoff_residuals.back());
    CHECK(wc.max_relative_cutoff < 1e-2);
    // n = 2: int |D chi_j| does not grow as the cutoff tightens
    CHECK(wc.cutoff_gradient_mass[2] <= 1.1 * wc.cutoff_gradient_mass[0]);
}

TEST_CASE("blow-up sequence") {
    const GridPtr g = unit_disk(1.0 / 128);
    const ScalarField c = cone(g);
    // lambda in {1/2, 1/4} maps reference nodes (spacing 1/32) onto lattice nodes
    const BlowupSequence bs = blowup_sequence(c, {0, 0}, {0.5, 0.25}, 1.0 / 32);
    REQUIRE(bs.fields.size() == 2);
    CHECK_FALSE(bs.skipped[0]);
    for (std::size_t k = 0; k < bs.reference->size(); ++k) {
        if (!bs.reference->active(k)) continue;
        const Point x = bs.reference->coords(k);
        CHECK(std::abs(bs.fields[1][k] - std::hypot(x.x, x.y)) < 1e-10);
    }
    CHECK(bs.slope_ratio[0] == doctest::Approx(1.0));
    CHECK(bs.successive_diff[0] < 1e-10);

    const BlowupSequence off = blowup_sequence(c, {0.7, 0}, {0.5, 0.1});
    CHECK(off.skipped[0]);
    CHECK(std::isnan(off.slope_ratio[0]));
    CHECK(std::isnan(off.successive_diff[0]));
    CHECK_FALSE(off.skipped[1]);
    CHECK_THROWS_AS(blowup_sequence(c, {0, 0}, {0.1, 0.5}), PreconditionError);
}

TEST_CASE("singular set") {
    const GridPtr g = unit_disk(1.0 / 128);
    const SingularSet s = singular_set(cone(g), 3.0 / 128);
    CHECK_FALSE(s.nodes.empty());
    REQUIRE(s.dimension.has_value());
    CHECK(*s.dimension <= 0.3);
    CHECK(s.box_sizes.size() == 4);

    const SingularSet none = singular_set(ScalarField(g, 1.0), 3.0 / 128);
    CHECK(none.nodes.empty());
    CHECK_FALSE(none.dimension.has_value());

    // a line of zeros has dimension close to one
    const ScalarField line = ScalarField::from_function(g, [](double, double y) { return std::abs(y); });
    const SingularSet l = singular_set(line, 3.0 / 128);
    REQUIRE(l.dimension.has_value());
    CHECK(*l.dimension == doctest::Approx(1.0).epsilon(0.15));

    CHECK_THROWS_AS(singular_set(cone(g), 1.0 / 128), PreconditionError);
}

TEST_CASE("verification report output") {
    VerificationReport r;
    r.seed = 5;
    Check c;
    c.name = "holder";
    c.field = "cone";
    c.values = {{"holder_half", 0.5}};
    c.pass = true;
    r.checks.push_back(c);
    CHECK(r.all_pass());
    CHECK(c.value("holder_half") == 0.5);
    CHECK_THROWS_AS(c.value("missing"), StructuralError);
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("check,field,key,value,tolerance,pass\n", 0) == 0);
    CHECK(csv.find("holder,cone,holder_half,") != std::string::npos);
    CHECK(to_json(r).find("\"all_pass\": true") != std::string::npos);
    r.checks.push_back(Check{"x", "y", {}, 0.0, false, ""});
    CHECK_FALSE(r.all_pass());
}
