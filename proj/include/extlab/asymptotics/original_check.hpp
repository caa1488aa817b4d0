#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "extlab/asymptotics/ratefit.hpp"
#include "extlab/core/field.hpp"
#include "extlab/core/params.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/evolution/rescale.hpp"

namespace extlab {

struct OriginalReport {
    std::vector<double> taus;            // snapshot times
    std::vector<double> normalized_diff; // (T-tau)^{-1/(1-m)} ||w - W||_inf
    RateFit exponent_fit;                // slope in log(1 - tau/T)
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    double reference_exponent = std::numeric_limits<double>::quiet_NaN();
    bool zero_difference = false;
    double log_bound_min = std::numeric_limits<double>::quiet_NaN();
};

// Compares an original-variable trajectory against the separation solution
// built from V, normalizes by the extinction amplitude, and fits the decay
// exponent in powers of (1 - tau/T).  When the measured spectral gap is
// supplied the reference exponent m*lambda_K/(1-m) is reported alongside.
inline OriginalReport original_variable_check(
    const Trajectory& traj, const Field& V, const MediumParams& prm, double T,
    double lambda_K = std::numeric_limits<double>::quiet_NaN(),
    std::pair<double, double> window_frac = {0.1, 0.9}) {
    if (traj.snapshots.empty())
        throw EmptyTrajectory("trajectory has no snapshots");
    if (traj.snapshots.front().mesh.get() != V.mesh.get() ||
        traj.snapshots.front().size() != V.size())
        throw MismatchedProfile("profile and trajectory live on different meshes");
    auto maps = rescale_maps(prm, T);

    OriginalReport rep;
    const std::size_t ns = traj.snapshots.size();
    rep.taus.resize(ns);
    rep.normalized_diff.resize(ns);
    double scale = 0.0;
    for (std::size_t k = 0; k < ns; ++k) {
        const double tau = traj.times[traj.snapshot_steps[k]];
        rep.taus[k] = tau;
        if (tau >= T)
            throw BeyondExtinction("trajectory extends past the declared extinction time");
        const double norm = std::pow(T - tau, -1.0 / (1.0 - prm.m));
        Eigen::VectorXd W = maps.amplitude(tau) * V.v.array().pow(prm.p).matrix();
        rep.normalized_diff[k] =
            norm * (traj.snapshots[k].v - W).cwiseAbs().maxCoeff();
        scale = std::max(scale, norm * W.cwiseAbs().maxCoeff());
    }

    double peak = 0.0;
    for (double d : rep.normalized_diff)
        peak = std::max(peak, d);
    rep.zero_difference = peak <= 1e-12 * scale;

    if (!std::isnan(lambda_K))
        rep.reference_exponent = prm.m * lambda_K / (1.0 - prm.m);

    if (rep.zero_difference)
        return rep;

    // abscissa u = -log(1 - tau/T) is ascending in tau, and
    // diff ~ (1-tau/T)^beta = e^{-beta u} makes beta a decay rate in u
    std::vector<double> u, logd;
    double logmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ns; ++k) {
        const double frac = rep.taus[k] / T;
        if (frac < window_frac.first || frac > window_frac.second)
            continue;
        if (!(rep.normalized_diff[k] > 0.0))
            continue;
        const double l1mt = std::log(1.0 - frac);
        u.push_back(-l1mt);
        logd.push_back(std::log(rep.normalized_diff[k]));
        logmin = std::min(logmin, rep.normalized_diff[k] * l1mt * l1mt);
    }
    rep.log_bound_min = logmin;
    if (u.size() < 20)
        throw WindowTooShort("too few usable samples in the exponent window");
    rep.exponent_fit = detail::decay_fit(u, logd);
    rep.fitted_exponent = rep.exponent_fit.slope;
    return rep;
}

} // namespace extlab
