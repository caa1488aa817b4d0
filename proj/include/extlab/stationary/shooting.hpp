#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "extlab/core/mesh.hpp"
#include "extlab/errors.hpp"
#include "extlab/stationary/profile.hpp"

namespace extlab {

// Dense output of the radial integration of u'' + ((n-1)/r) u' + u^p = 0,
// u(0)=1, u'(0)=0, up to its first zero crossing r*.
struct ShootingTable {
    double rstar = 0.0;
    double du_end = 0.0;        // u'(r*)
    double error_estimate = 0.0; // accumulated local truncation error
    std::vector<double> r, u, du;

    // cubic Hermite interpolation between stored nodes; clamps to 0 past r*
    double eval(double rq) const {
        if (rq <= r.front())
            return u.front();
        if (rq >= rstar)
            return 0.0;
        auto it = std::upper_bound(r.begin(), r.end(), rq);
        const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
        const double h = r[k + 1] - r[k];
        const double t = (rq - r[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * u[k] + (t3 - 2 * t2 + t) * h * du[k] +
               (-2 * t3 + 3 * t2) * u[k + 1] + (t3 - t2) * h * du[k + 1];
    }
};

namespace detail {

struct LaneEmdenRhs {
    double p;
    int n;
    // y = (u, u'); the (n-1)/r term is regularized at r=0 by the symmetric
    // limit u''(0) = -u(0)^p / n
    void operator()(double r, const double y[2], double dy[2]) const {
        dy[0] = y[1];
        const double up = y[0] <= 0.0 ? -std::pow(-y[0], p) : std::pow(y[0], p);
        if (r == 0.0)
            dy[1] = -up / n;
        else
            dy[1] = -up - (n - 1) * y[1] / r;
    }
};

inline void rk4_step(const LaneEmdenRhs& rhs, double r, const double y[2], double h,
                     double out[2]) {
    double k1[2], k2[2], k3[2], k4[2], tmp[2];
    rhs(r, y, k1);
    tmp[0] = y[0] + 0.5 * h * k1[0];
    tmp[1] = y[1] + 0.5 * h * k1[1];
    rhs(r + 0.5 * h, tmp, k2);
    tmp[0] = y[0] + 0.5 * h * k2[0];
    tmp[1] = y[1] + 0.5 * h * k2[1];
    rhs(r + 0.5 * h, tmp, k3);
    tmp[0] = y[0] + h * k3[0];
    tmp[1] = y[1] + h * k3[1];
    rhs(r + h, tmp, k4);
    out[0] = y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    out[1] = y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
}

} // namespace detail

// Adaptive RK4 with step doubling; keeps every accepted node for dense output.
inline ShootingTable shoot_lane_emden(const MediumParams& prm, double tol,
                                      double rmax = 50.0) {
    if (prm.p <= 1.0)
        throw InvalidExponent("shooting needs p > 1");
    tol = std::max(tol, 1e-13);
    const detail::LaneEmdenRhs rhs{prm.p, prm.n};

    ShootingTable tab;
    double r = 0.0;
    double y[2] = {1.0, 0.0};
    double h = 1e-3;
    const double hmin = 1e-7, hmax = 5e-3;
    tab.r.push_back(r);
    tab.u.push_back(y[0]);
    tab.du.push_back(y[1]);

    while (r < rmax) {
        double full[2], half[2], two[2];
        detail::rk4_step(rhs, r, y, h, full);
        detail::rk4_step(rhs, r, y, 0.5 * h, half);
        detail::rk4_step(rhs, r + 0.5 * h, half, 0.5 * h, two);
        const double err =
            std::max(std::abs(two[0] - full[0]), std::abs(two[1] - full[1])) / 15.0;
        // per-step budget proportional to h so the accumulated error stays
        // below tol times the integrated span
        const double budget = tol * h / 4.0;
        if (err > budget && h > hmin) {
            h = std::max(hmin, 0.5 * h);
            continue;
        }
        // accept (with local extrapolation)
        double ynew[2] = {two[0] + (two[0] - full[0]) / 15.0,
                          two[1] + (two[1] - full[1]) / 15.0};
        const double rnew = r + h;
        tab.error_estimate += err;
        if (ynew[0] <= 0.0) {
            // bracketed the first zero: bisect with doubled RK4 restarts from (r, y)
            auto fine_step = [&](double hh, double out[2]) {
                double mid1[2];
                detail::rk4_step(rhs, r, y, 0.5 * hh, mid1);
                detail::rk4_step(rhs, r + 0.5 * hh, mid1, 0.5 * hh, out);
            };
            double lo = 0.0, hi = h;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                double ymid[2];
                fine_step(mid, ymid);
                (ymid[0] > 0.0 ? lo : hi) = mid;
            }
            const double hc = 0.5 * (lo + hi);
            double yc[2];
            fine_step(hc, yc);
            tab.rstar = r + hc;
            tab.du_end = yc[1];
            tab.r.push_back(tab.rstar);
            tab.u.push_back(0.0);
            tab.du.push_back(yc[1]);
            return tab;
        }
        r = rnew;
        y[0] = ynew[0];
        y[1] = ynew[1];
        tab.r.push_back(r);
        tab.u.push_back(y[0]);
        tab.du.push_back(y[1]);
        if (err < 0.1 * budget)
            h = std::min(hmax, 1.5 * h);
    }
    throw NoZeroFound("no sign change before rmax");
}

// Solve the stationary problem on an Interval (even about the midpoint) or
// RadialBall mesh by shooting and rescaling: V(x) = alpha u(beta rho(x)) with
// beta = r*/R and alpha = beta^{2/(p-1)}.
inline StationaryProfile solve_radial_shooting(std::shared_ptr<const Mesh> mesh,
                                               const MediumParams& prm,
                                               double tol = 1e-10) {
    double R = 0.0;
    double center = 0.0;
    bool radial_coord = false;
    if (const auto* iv = std::get_if<Interval>(&mesh->domain)) {
        R = 0.5 * (iv->b - iv->a);
        center = 0.5 * (iv->a + iv->b);
    } else if (const auto* ball = std::get_if<RadialBall>(&mesh->domain)) {
        R = ball->R;
        radial_coord = true;
        if (ball->n != prm.n)
            throw PreconditionViolated("ball dimension disagrees with params");
    } else {
        throw PreconditionViolated("shooting needs an Interval or RadialBall domain");
    }

    const ShootingTable tab = shoot_lane_emden(prm, tol);
    const double beta = tab.rstar / R;
    const double alpha = std::pow(beta, 2.0 / (prm.p - 1.0));

    Field V = make_field(mesh);
    for (int i = 0; i < V.size(); ++i) {
        const double rho = radial_coord ? mesh->cx[i] : std::abs(mesh->cx[i] - center);
        V.v[i] = alpha * tab.eval(beta * rho);
    }
    const double resid = std::min(tol, std::max(tab.error_estimate, 1e-15));
    return detail::finish_profile(std::move(V), resid, prm);
}

} // namespace extlab
