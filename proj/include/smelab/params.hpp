#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "smelab/errors.hpp"

namespace sme {

/// Problem constants: the symmetry dimension m (u is the radius of an
/// (m-1)-sphere) and the base dimension n of the domain.
struct Params {
    int m = 2;
    int n = 2;

    Params() = default;
    Params(int m_, int n_) : m(m_), n(n_) {
        if (m < 2) throw PreconditionError("Params: m must be >= 2, got " + std::to_string(m));
        if (n < 1) throw PreconditionError("Params: n must be >= 1, got " + std::to_string(n));
    }

    /// Slope of the homogeneous solution sqrt((m-1)/(n-1))|x|. Requires n >= 2.
    double cone_slope() const {
        if (n < 2) throw PreconditionError("cone_slope is undefined for n = 1");
        return std::sqrt(double(m - 1) / double(n - 1));
    }

    /// Area of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
    double sigma_m1() const {
        return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
    }

    bool operator==(const Params&) const = default;
};

/// Every numerical tolerance the library uses by default, in one place.
struct Tolerances {
    std::vector<double> refinement_h{1.0 / 32, 1.0 / 64, 1.0 / 128};
    double gradient_fd_rel = 1e-6;       // area_gradient vs finite differences
    double weak_form_rel = 1e-2;         // weak residual / zeta mass for solver outputs
    double stability_rel = 1e-3;         // stability margin >= -rel * right side
    double volume_refinement = 0.20;     // measured C stable to +-20%
    double holder_refinement = 0.50;     // Holder / gradient sups stable to +-50%
    double singular_threshold_h = 3.0;   // singular threshold in units of h
    double n1_slope_cap = 1e6;           // maximal-interval surrogate for n = 1
    double launch_slope_switch = 10.0;   // vertical launch: switch parametrization at |u'| <= this
};

}  // namespace sme
