#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "smelab/config.hpp"
#include "smelab/errors.hpp"
#include "smelab/io.hpp"

using namespace sme;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("smelab_test_" + name)).string();
}

}  // namespace

TEST_CASE("config parsing") {
    const Config c = Config::parse(R"(
# comment
m = 3
[solve]
delta = 1/64   ; trailing comment
newton_polish = off
[continue]
samples = 5
)");
    CHECK(c.get_int("m", 0) == 3);
    CHECK(c.get_double("solve.delta", 0) == doctest::Approx(1.0 / 64));
    CHECK_FALSE(c.get_bool("solve.newton_polish", true));
    CHECK(c.get("absent", "x") == "x");
    CHECK(solve_config_from(c).delta == doctest::Approx(1.0 / 64));
    CHECK(schedule_from(c).samples == 5);
    CHECK(step_control_from(c).step == StepControl{}.step);

    CHECK_THROWS_AS(Config::parse("novalue"), ParseError);
    CHECK_THROWS_AS(Config::parse("[open"), ParseError);
    CHECK_THROWS_AS(Config::parse("=3"), ParseError);
    CHECK_THROWS_AS(Config::parse("a = x").get_double("a", 0), ParseError);
    CHECK_THROWS_AS(Config::parse("a = 1.5").get_int("a", 0), ParseError);
    CHECK_THROWS_AS(Config::parse("a = maybe").get_bool("a", false), ParseError);
    CHECK_THROWS_AS(Config::load("/nonexistent/file.ini"), ParseError);
    CHECK_THROWS_AS(solve_config_from(Config::parse("[solve]\ndelta = -1")), PreconditionError);
}

TEST_CASE("config hash") {
    // FNV-1a 64 reference values computed independently
    CHECK(Config{}.hash_hex() == "14650fb0739d0383");
    Config c;
    c.set("solve.delta", "0.001");
    c.set("a", "1");
    CHECK(c.canonical() == "a=1\nsolve.delta=0.001\n");
    CHECK(c.hash_hex() == "d144e7d3a12b3e95");
    Config d = Config::parse("a=1\n[solve]\ndelta=0.001\n");
    CHECK(d.hash() == c.hash());
    d.set("a", "2");
    CHECK(d.hash() != c.hash());
}

TEST_CASE("real parsing") {
    CHECK(parse_real("0.25") == 0.25);
    CHECK(parse_real(" 1/128 ") == 1.0 / 128);
    CHECK(parse_real("-3e-2") == -0.03);
    CHECK_THROWS_AS(parse_real("1/0"), ParseError);
    CHECK_THROWS_AS(parse_real(""), ParseError);
    CHECK_THROWS_AS(parse_real("2x"), ParseError);
}

TEST_CASE("boundary specs") {
    const Params p(2, 2);
    const GridPtr g = Grid2D::make(Domain::disk(0, 0, 1), 1.0 / 16);
    CHECK(boundary_from_spec("constant:2.5", g, p).min() == 2.5);
    CHECK(boundary_from_spec("constant:value=2.5", g, p).max() == 2.5);
    const BoundaryData cone = boundary_from_spec("cone", g, p);
    CHECK(cone.min() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(boundary_from_spec("cone:slope=2", g, p).max() == doctest::Approx(2.0).epsilon(1e-9));
    const BoundaryData lin = boundary_from_spec("linear:c=2,ax=0.5", g, p);
    CHECK(lin.min() == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(lin.max() == doctest::Approx(2.5).epsilon(1e-9));

    // lambda psi(1 / lambda) on the unit circle
    const BoundaryData ext = boundary_from_spec("exterior:lambda=0.5", g, p);
    CHECK(ext.max() - ext.min() < 1e-9);
    CHECK(ext.min() > 0.0);
    CHECK(ext.min() < 0.5 * 1.0887428243 * 2.0);
    CHECK_THROWS_AS(boundary_from_spec("exterior:lambda=2", g, p), PreconditionError);

    CHECK_THROWS_AS(boundary_from_spec("spline:1", g, p), ParseError);
    CHECK_THROWS_AS(boundary_from_spec("constant", g, p), ParseError);
    CHECK_THROWS_AS(boundary_from_spec("linear:ax=1", g, p), ParseError);
    CHECK_THROWS_AS(boundary_from_spec("constant:abc", g, p), ParseError);

    std::string kind;
    const auto kv = spec_options("disk:cx=0, r=2", kind);
    CHECK(kind == "disk");
    CHECK(kv.at("r") == "2");
}

TEST_CASE("field CSV roundtrip") {
    const GridPtr g = Grid2D::make(Domain::annulus(0, 0, 0.3, 1.0), 1.0 / 16);
    const ScalarField u = ScalarField::from_function(g, [](double x, double y) { return std::exp(x) * std::sin(3 * y) + 0.1; });
    const std::string path = temp_path("field.csv");
    write_field_csv(path, u, {"seed: 4"});
    const std::string text = read_text(path);
    CHECK(text.rfind("# seed: 4\nx,y,u\n", 0) == 0);
    const ScalarField back = read_field_csv(path, g);
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->active(k)) CHECK(back[k] == u[k]);

    const BoundaryData bd = boundary_from_spec("csv:" + path, g, Params(2, 2));
    for (std::size_t b = 0; b < g->boundary().size(); ++b) CHECK(bd.values()[b] == u[g->boundary()[b]]);

    CHECK_THROWS(read_field_csv(path, Grid2D::make(Domain::disk(0, 0, 1), 1.0 / 16)));
    std::filesystem::remove(path);
}

TEST_CASE("profile CSV roundtrip") {
    const Params p(2, 2);
    const RadialProfile psi = integrate_exterior(p, 3.0);
    const std::string path = temp_path("profile.csv");
    write_profile_csv(path, psi, {"beta: 1"});
    const RadialProfile back = read_profile_csv(path, p);
    REQUIRE(back.size() == psi.size());
    for (std::size_t i = 0; i < psi.size(); i += 37) {
        CHECK(back.r[i] == psi.r[i]);
        CHECK(back.u[i] == psi.u[i]);
        CHECK(back.s[i] == psi.s[i]);
        CHECK(back.by_height[i] == psi.by_height[i]);
    }
    std::filesystem::remove(path);
    CHECK(fmt(0.1) == "0.1");
    CHECK(std::stod(fmt(1.0 / 3)) == 1.0 / 3);
}
