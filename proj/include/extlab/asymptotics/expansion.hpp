#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "extlab/asymptotics/ratefit.hpp"
#include "extlab/core/field.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/spectrum/eigen.hpp"

namespace extlab {

struct ExpansionReport {
    double lambda = 0.0;            // decay rate used
    double mu = 0.0;                // next eigenvalue past the retained set
    std::vector<int> retained;      // indices into the decomposition
    std::vector<double> retained_eigenvalues;
    std::vector<double> coefficients; // C_i per retained mode
    std::vector<double> snapshot_times;
    std::vector<double> residual_series;
    RateFit residual_rate;
    double predicted_rate = 0.0;    // min(2 lambda, mu)
    bool resonant = false;          // mu within eig_err of 2 lambda
};

// Mode-coefficient extraction: project each snapshot onto the eigenfields,
// compensate the known decay e^{lambda_i t}, and read the limit off the last
// quarter window with linear detrending.  The expansion set starts at the
// first non-negative eigenvalue and keeps lambda_i < 2 lambda.
inline ExpansionReport extract_coefficients(const Trajectory& traj,
                                            const SpectralDecomposition& dec,
                                            const Field& V, const MediumParams& prm,
                                            double lambda, double eig_err = 0.0) {
    if (traj.snapshots.size() < 8)
        throw EmptyTrajectory("need at least 8 snapshots");
    if (!(lambda > 0.0) ||
        traj.norm_series.back() >= traj.norm_series.front())
        throw NotDecaying("trajectory norm does not decay");
    if (lambda < 0.9 * dec.lambda_K)
        throw PreconditionViolated("rate must be at least the measured gap");

    ExpansionReport rep;
    rep.lambda = lambda;

    // expansion set: indices at or above the first non-negative eigenvalue
    std::vector<int> nn;
    for (int i = 0; i < static_cast<int>(dec.eigenvalues.size()); ++i)
        if (dec.eigenvalues[i] > -dec.zero_tol)
            nn.push_back(i);
    for (int i : nn) {
        if (dec.eigenvalues[i] < 2.0 * lambda) {
            rep.retained.push_back(i);
            rep.retained_eigenvalues.push_back(dec.eigenvalues[i]);
        }
    }
    if (rep.retained.empty())
        throw ModeCutoffEmpty("no non-negative modes below twice the rate");
    if (rep.retained.size() < nn.size())
        rep.mu = dec.eigenvalues[nn[rep.retained.size()]];
    else
        rep.mu = std::numeric_limits<double>::infinity();
    rep.predicted_rate = std::min(2.0 * lambda, rep.mu);
    rep.resonant = std::isfinite(rep.mu) &&
                   std::abs(rep.mu - 2.0 * lambda) < 2.0 * eig_err;

    const std::size_t ns = traj.snapshots.size();
    rep.snapshot_times.resize(ns);
    for (std::size_t k = 0; k < ns; ++k)
        rep.snapshot_times[k] = traj.times[traj.snapshot_steps[k]];

    std::vector<std::vector<double>> y(rep.retained.size(),
                                       std::vector<double>(ns));
    for (std::size_t k = 0; k < ns; ++k)
        for (std::size_t j = 0; j < rep.retained.size(); ++j)
            y[j][k] = weighted_inner(traj.snapshots[k],
                                     dec.eigenfields[rep.retained[j]], V,
                                     prm.p + 1.0);

    // C_i from the compensated series on the last quarter window
    rep.coefficients.resize(rep.retained.size());
    const std::size_t q0 = ns - std::max<std::size_t>(ns / 4, 3);
    for (std::size_t j = 0; j < rep.retained.size(); ++j) {
        std::vector<double> tq, gq;
        for (std::size_t k = q0; k < ns; ++k) {
            tq.push_back(rep.snapshot_times[k]);
            gq.push_back(std::exp(rep.retained_eigenvalues[j] *
                                  rep.snapshot_times[k]) *
                         y[j][k]);
        }
        auto [b, a, rms] = detail::line_fit(tq, gq);
        (void)rms;
        rep.coefficients[j] = a + b * tq.back();
    }

    // The residual is measured transverse to the computed unstable modes.  A
    // trajectory decaying at rate lambda carries no unstable content in exact
    // arithmetic, but a discrete run regenerates a small growing component
    // through quadratic feedback, and that component would otherwise swamp the
    // expansion remainder late in the window.
    std::vector<int> unstable;
    for (int i = 0; i < static_cast<int>(dec.eigenvalues.size()); ++i)
        if (dec.eigenvalues[i] < -dec.zero_tol)
            unstable.push_back(i);
    rep.residual_series.resize(ns);
    for (std::size_t k = 0; k < ns; ++k) {
        Eigen::VectorXd r = traj.snapshots[k].v;
        for (std::size_t j = 0; j < rep.retained.size(); ++j)
            r -= rep.coefficients[j] *
                 std::exp(-rep.retained_eigenvalues[j] * rep.snapshot_times[k]) *
                 dec.eigenfields[rep.retained[j]].v;
        for (int i : unstable)
            r -= weighted_inner(traj.snapshots[k], dec.eigenfields[i], V,
                                prm.p + 1.0) *
                 dec.eigenfields[i].v;
        rep.residual_series[k] = norm_weighted(Field{V.mesh, std::move(r)}, V,
                                               prm.p + 1.0);
    }

    // fit the residual decay on the middle-late window, above the noise floor
    const double t0 = rep.snapshot_times.front();
    const double t1 = rep.snapshot_times.back();
    double peak = 0.0;
    for (double r : rep.residual_series)
        peak = std::max(peak, r);
    std::vector<double> tf, rf;
    for (std::size_t k = 0; k < ns; ++k) {
        const double t = rep.snapshot_times[k];
        if (t < t0 + 0.2 * (t1 - t0) || rep.residual_series[k] < 1e-11 * peak)
            continue;
        if (rep.resonant && t <= 0.0)
            continue;
        tf.push_back(t);
        // in the resonant case the predicted envelope is t e^{-2 lambda t}
        rf.push_back(rep.resonant ? rep.residual_series[k] / tf.back()
                                  : rep.residual_series[k]);
    }
    if (tf.size() < 20)
        throw WindowTooShort("residual series too short for a rate fit");
    std::vector<double> logr(rf.size());
    for (std::size_t i = 0; i < rf.size(); ++i) {
        if (!(rf[i] > 0.0))
            throw NonPositiveValues("residual series must be positive");
        logr[i] = std::log(rf[i]);
    }
    rep.residual_rate = detail::decay_fit(tf, logr);
    return rep;
}

} // namespace extlab
