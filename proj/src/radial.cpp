#include "smelab/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "smelab/errors.hpp"

namespace sme {

namespace {

using State = std::array<double, 2>;

bool finite(const State& y) { return std::isfinite(y[0]) && std::isfinite(y[1]); }

template <class F>
State rk4(const F& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const State k3 = f(t + 0.5 * h, State{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const State k4 = f(t + h, State{y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

// One step of size h taken as two half steps; returns the Richardson estimate of the
// local error from comparing with the single full step.
template <class F>
double step_pair(const F& f, double t, State& y, double h) {
    const State full = rk4(f, t, y, h);
    const State mid = rk4(f, t, y, 0.5 * h);
    const State two = rk4(f, t + 0.5 * h, mid, 0.5 * h);
    y = two;
    return std::max(std::abs(two[0] - full[0]), std::abs(two[1] - full[1])) / 15.0;
}

enum class March { Reached, Stopped, NonFinite };

template <class F, class Done, class Emit>
March march(const F& f, double& t, State& y, double t_end, const StepControl& ctl, double& max_err, Done done,
            Emit emit) {
    const double dir = t_end >= t ? 1.0 : -1.0;
    double h = ctl.step;
    const double eps = 1e-13 * std::max(1.0, std::isfinite(t_end) ? std::abs(t_end) : std::abs(t));
    while (dir * (t_end - t) > eps) {
        // absorb a rounding-sized remainder into this step instead of emitting a near-duplicate sample
        const double left = dir * (t_end - t);
        const bool last = left <= h * (1 + 1e-6);
        const double hh = last ? left : h;
        State trial = y;
        const double err = step_pair(f, t, trial, dir * hh);
        if (ctl.adaptive) {
            if (!finite(trial) || err > ctl.tol) {
                h = 0.5 * hh;
                if (h < ctl.min_step) {
                    std::ostringstream os;
                    os << "step underflow at t=" << t << " (y=" << y[0] << ", " << y[1] << ", h=" << h
                       << ", err=" << err << ")";
                    throw IntegrationError(os.str());
                }
                continue;
            }
            if (err < ctl.tol / 32) h = std::min(2 * hh, ctl.max_step);
        } else if (!finite(trial)) {
            return March::NonFinite;
        }
        t = last ? t_end : t + dir * hh;
        y = trial;
        max_err = std::max(max_err, err);
        emit(t, y);
        if (done(t, y)) return March::Stopped;
    }
    return March::Reached;
}

void reverse_profile(RadialProfile& p) {
    std::reverse(p.r.begin(), p.r.end());
    std::reverse(p.u.begin(), p.u.end());
    std::reverse(p.s.begin(), p.s.end());
    std::reverse(p.by_height.begin(), p.by_height.end());
}

}  // namespace

double conserved_quantity(const Params& p, double u, double du) {
    return std::pow(u, 1 - p.m) * std::sqrt(1.0 + du * du);
}

RadialProfile integrate_n1(const Params& p, double x_max, double step, double slope_cap) {
    if (!(step > 0.0)) throw PreconditionError("integrate_n1: step must be positive");
    if (p.n != 1) throw PreconditionError("integrate_n1: requires n = 1");
    RadialProfile prof;
    prof.params = p;
    prof.kind = "n1";
    prof.launch_u = 1.0;
    prof.step = step;
    prof.push(0.0, 1.0, 0.0);
    const double mm1 = p.m - 1;
    auto f = [mm1](double, const State& y) { return State{y[1], (1.0 + y[1] * y[1]) * mm1 / y[0]}; };
    StepControl ctl;
    ctl.step = step;
    double t = 0.0;
    State y{1.0, 0.0};
    const March st = march(
        f, t, y, x_max, ctl, prof.error_estimate, [&](double, const State& z) { return std::abs(z[1]) > slope_cap; },
        [&](double x, const State& z) { prof.push(x, z[0], z[1]); });
    if (prof.size() == 1 && st == March::NonFinite)
        throw IntegrationError("integrate_n1: solution blew up before the first step");
    prof.stop_x = t;
    prof.hit_slope_cap = st != March::Reached;
    if (x_max < 0) reverse_profile(prof);
    return prof;
}

RadialProfile integrate_interior(const Params& p, double r_max, double step) {
    if (!(step > 0.0) || !(r_max > 0.0)) throw PreconditionError("integrate_interior: need step > 0, r_max > 0");
    RadialProfile prof;
    prof.params = p;
    prof.kind = "interior";
    prof.launch_u = 1.0;
    prof.step = step;
    const double mm1 = p.m - 1, nm1 = p.n - 1;
    // u = 1 + c r^2 + O(r^4) with c = (m-1)/(2n)
    const double c = mm1 / (2.0 * p.n);
    const double r0 = std::min(1e-4, 0.1 * step);
    prof.push(0.0, 1.0, 0.0);
    prof.push(r0, 1.0 + c * r0 * r0, 2 * c * r0);
    auto f = [mm1, nm1](double r, const State& y) {
        return State{y[1], (1.0 + y[1] * y[1]) * (mm1 / y[0] - nm1 * y[1] / r)};
    };
    StepControl ctl;
    ctl.step = step;
    double t = r0;
    State y{prof.u.back(), prof.s.back()};
    const March st = march(
        f, t, y, r_max, ctl, prof.error_estimate, [](double, const State&) { return false; },
        [&](double r, const State& z) { prof.push(r, z[0], z[1]); });
    if (st == March::NonFinite) throw IntegrationError("integrate_interior: non-finite state before r_max");
    prof.stop_x = t;
    return prof;
}

RadialProfile integrate_exterior(const Params& p, double r_max, const StepControl& ctl) {
    if (p.n < 2) throw PreconditionError("integrate_exterior: requires n >= 2");
    if (!(r_max > 1.0)) throw PreconditionError("integrate_exterior: requires r_max > 1");
    RadialProfile prof;
    prof.params = p;
    prof.kind = "exterior";
    prof.launch_r = 1.0;
    prof.launch_u = ctl.launch_u;
    prof.step = ctl.step;
    const double mm1 = p.m - 1, nm1 = p.n - 1;
    const double inf = std::numeric_limits<double>::infinity();
    prof.push(1.0, 0.0, inf, true);

    // Height parametrization: r(u) with r_uu = (1 + r_u^2)((n-1)/r - (m-1) r_u/u), started
    // from the series r = 1 + a u^2, a = (n-1)/(2m).
    const double a = nm1 / (2.0 * p.m);
    double u = ctl.launch_u;
    State y{1.0 + a * u * u, 2.0 * a * u};
    prof.push(y[0], u, 1.0 / y[1], true);
    auto fh = [mm1, nm1](double uu, const State& z) {
        return State{z[1], (1.0 + z[1] * z[1]) * (nm1 / z[0] - mm1 * z[1] / uu)};
    };
    const double ru_switch = 1.0 / ctl.switch_slope;
    if (y[1] < ru_switch) {
        const March st = march(
            fh, u, y, inf, ctl, prof.error_estimate,
            [&](double, const State& z) { return z[1] >= ru_switch || z[0] >= r_max; },
            [&](double uu, const State& z) { prof.push(z[0], uu, 1.0 / z[1], true); });
        if (st == March::NonFinite)
            throw IntegrationError("integrate_exterior: non-finite state in the launch region at u=" +
                                   std::to_string(u));
    }

    // Radial parametrization: u(r).
    double r = y[0];
    State z{u, 1.0 / y[1]};
    auto fr = [mm1, nm1](double rr, const State& w) {
        return State{w[1], (1.0 + w[1] * w[1]) * (mm1 / w[0] - nm1 * w[1] / rr)};
    };
    if (r < r_max) {
        const March st = march(
            fr, r, z, r_max, ctl, prof.error_estimate, [](double, const State&) { return false; },
            [&](double rr, const State& w) { prof.push(rr, w[0], w[1]); });
        if (st == March::NonFinite)
            throw IntegrationError("integrate_exterior: non-finite state at r=" + std::to_string(r));
    }
    prof.stop_x = r;
    return prof;
}

std::vector<double> radial_residual(const RadialProfile& prof) {
    const std::size_t N = prof.size();
    if (N < 3) throw StructuralError("radial_residual: need at least 3 samples");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double mm1 = prof.params.m - 1, nm1 = prof.params.n - 1;
    std::vector<double> res(N, nan);
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double h1 = prof.r[i] - prof.r[i - 1], h2 = prof.r[i + 1] - prof.r[i];
        const double um = prof.u[i - 1], u0 = prof.u[i], up = prof.u[i + 1];
        if (!(u0 > 0.0)) continue;
        if (nm1 > 0 && !(prof.r[i] > 0.0)) continue;
        const double d1 = -h2 / (h1 * (h1 + h2)) * um + (h2 - h1) / (h1 * h2) * u0 + h1 / (h2 * (h1 + h2)) * up;
        const double d2 = 2.0 * (um / (h1 * (h1 + h2)) - u0 / (h1 * h2) + up / (h2 * (h1 + h2)));
        const double w = 1.0 + d1 * d1;
        double lhs = d2 / w;
        if (nm1 > 0) lhs += nm1 * d1 / prof.r[i];
        res[i] = (lhs - mm1 / u0) / std::sqrt(w);
    }
    return res;
}

RadialProfile scale_profile(const RadialProfile& prof, double lambda) {
    if (!(lambda > 0.0)) throw PreconditionError("scale_profile: lambda must be positive");
    RadialProfile out = prof;
    for (auto& x : out.r) x *= lambda;
    for (auto& x : out.u) x *= lambda;
    out.launch_r *= lambda;
    out.launch_u *= lambda;
    out.stop_x *= lambda;
    out.kind = "scaled";
    return out;
}

SlopeSup slope_sup(const RadialProfile& prof) {
    SlopeSup best;
    bool any = false;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        if (!(prof.r[i] > 0.0)) continue;
        const double q = prof.u[i] / prof.r[i];
        if (!any || q > best.beta) {
            best.beta = q;
            best.r_at = prof.r[i];
            arg = i;
            any = true;
        }
    }
    if (!any) throw StructuralError("slope_sup: profile has no samples with r > 0");
    best.at_last_sample = arg + 1 == prof.size();
    return best;
}

RadialProfile cone_profile(const Params& p, double slope, double r0, double r1, std::size_t count) {
    if (count < 2 || !(r1 > r0)) throw StructuralError("cone_profile: need count >= 2 and r1 > r0");
    RadialProfile prof;
    prof.params = p;
    prof.kind = "cone";
    prof.step = (r1 - r0) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = r0 + prof.step * double(i);
        prof.push(r, slope * r, slope);
    }
    prof.stop_x = r1;
    return prof;
}

double profile_value(const RadialProfile& prof, double r) {
    if (prof.size() == 0) throw StructuralError("profile_value: empty profile");
    if (r <= prof.r.front()) return prof.u.front();
    if (r >= prof.r.back()) return prof.u.back();
    const auto it = std::upper_bound(prof.r.begin(), prof.r.end(), r);
    const std::size_t i = std::size_t(it - prof.r.begin());
    const double dr = prof.r[i] - prof.r[i - 1];
    const double t = (r - prof.r[i - 1]) / dr;
    const double lin = (1 - t) * prof.u[i - 1] + t * prof.u[i];
    const bool steep = prof.by_height.size() == prof.size() && (prof.by_height[i - 1] || prof.by_height[i]);
    if (steep || !std::isfinite(prof.s[i - 1]) || !std::isfinite(prof.s[i])) return lin;
    // cubic Hermite with the stored slopes
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * prof.u[i - 1] + (t3 - 2 * t2 + t) * dr * prof.s[i - 1] +
           (-2 * t3 + 3 * t2) * prof.u[i] + (t3 - t2) * dr * prof.s[i];
}

InteriorFold interior_fold(const Params& p, double t_max, double step) {
    const RadialProfile phi = integrate_interior(p, t_max, step);
    InteriorFold fold{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 1; i < phi.size(); ++i) {
        const double q = phi.u[i] / phi.r[i];
        if (q < fold.ratio) fold = {q, phi.r[i]};
    }
    return fold;
}

RadialProfile disk_radial_solution(const Params& p, double R, double K, double step) {
    if (!(R > 0.0) || !(K > 0.0)) throw PreconditionError("disk_radial_solution: need R > 0 and K > 0");
    const InteriorFold fold = interior_fold(p, 20.0, step);
    const double target = K / R;
    if (target < fold.ratio)
        throw PreconditionError("disk_radial_solution: K/R = " + std::to_string(target) +
                                " is below the smallest attainable ratio " + std::to_string(fold.ratio));
    const RadialProfile phi = integrate_interior(p, fold.t, step);
    const double c = (p.m - 1) / (2.0 * p.n);
    auto ratio = [&](double t) {
        const double v = t <= phi.r[1] ? 1.0 + c * t * t : profile_value(phi, t);
        return v / t;
    };
    // phi(t)/t decreases on (0, fold.t]
    double lo = 1e-12, hi = fold.t;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) > target ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double a = R / t;
    const RadialProfile fine = integrate_interior(p, t, std::min(step, t / 2000.0));
    RadialProfile out = scale_profile(fine, a);
    out.kind = "interior";
    return out;
}

}  // namespace sme
