#pragma once

#include <string>
#include <vector>

#include "smelab/params.hpp"

namespace sme {

/// Tabulated radial solution: samples (r_i, u_i, s_i = u'(r_i)) with r strictly increasing.
struct RadialProfile {
    Params params;
    std::vector<double> r, u, s;
    /// Per sample: 1 if produced while integrating r as a function of u (vertical launch), else 0.
    std::vector<unsigned char> by_height;
    std::string kind;              // "n1", "exterior", "interior", "cone", "scaled"
    double launch_r = 0.0;
    double launch_u = 0.0;
    double step = 0.0;
    double stop_x = 0.0;           // where integration ended (numerical d for n = 1)
    bool hit_slope_cap = false;
    double error_estimate = 0.0;   // max step-halving estimate of the local error

    std::size_t size() const noexcept { return r.size(); }
    void push(double ri, double ui, double si, bool height = false) {
        r.push_back(ri);
        u.push_back(ui);
        s.push_back(si);
        by_height.push_back(height ? 1 : 0);
    }
};

struct StepControl {
    double step = 1e-3;
    bool adaptive = false;
    double tol = 1e-11;            // local error target when adaptive
    double max_step = 0.05;
    double min_step = 1e-12;
    double launch_u = 1e-4;        // height where the series start hands over to integration
    double switch_slope = 10.0;    // leave the height parametrization once u' <= this
};

/// m, n = 1: u''/(1+u'^2) = (m-1)/u from u(0)=1, u'(0)=0 out to x_max (negative x_max
/// integrates towards -inf; samples are still stored with increasing r). Stops early
/// once |u'| exceeds slope_cap and records the stopping point in stop_x.
RadialProfile integrate_n1(const Params& p, double x_max, double step, double slope_cap = 1e6);

/// Exterior profile psi: psi(1) = 0 with a vertical tangent, integrated as r(u) near the
/// launch and as u(r) afterwards, out to r_max. Requires n >= 2.
RadialProfile integrate_exterior(const Params& p, double r_max, const StepControl& ctl = {});

/// Rotationally symmetric solution with phi(0) = 1, phi'(0) = 0 on [0, r_max].
RadialProfile integrate_interior(const Params& p, double r_max, double step = 1e-3);

/// Residual of the radial equation divided by v, so it is comparable with sme_residual:
/// (u''/(1+u'^2) + (n-1)u'/r - (m-1)/u) / sqrt(1+u'^2), derivatives by three-point
/// differences on the samples. NaN at the two end samples and where u <= 0.
std::vector<double> radial_residual(const RadialProfile& prof);

/// Samples (lambda r, lambda u, s).
RadialProfile scale_profile(const RadialProfile& prof, double lambda);

struct SlopeSup {
    double beta = 0.0;
    double r_at = 0.0;
    bool at_last_sample = false;   // supremum possibly not captured
};

/// max_i u_i / r_i over samples with r_i > 0.
SlopeSup slope_sup(const RadialProfile& prof);

/// u^{1-m} sqrt(1 + u'^2), constant along n = 1 solutions.
double conserved_quantity(const Params& p, double u, double du);

/// Linear profile slope * r sampled at `count` points on [r0, r1].
RadialProfile cone_profile(const Params& p, double slope, double r0, double r1, std::size_t count);

/// u at r: cubic Hermite from the stored slopes, linear across height-parametrized samples.
/// Clamped to the sampled range.
double profile_value(const RadialProfile& prof, double r);

/// Radial solution on the disk |x| < R with u = K on the boundary, taken from the
/// branch connected to large K (u(0) = a, u(r) = a phi(r/a)). Throws PreconditionError
/// when K/R is below the smallest attainable ratio.
RadialProfile disk_radial_solution(const Params& p, double R, double K, double step = 1e-3);

/// min_t phi(t)/t for the interior profile and where it is attained.
struct InteriorFold {
    double ratio = 0.0;
    double t = 0.0;
};
InteriorFold interior_fold(const Params& p, double t_max = 20.0, double step = 1e-3);

}  // namespace sme
