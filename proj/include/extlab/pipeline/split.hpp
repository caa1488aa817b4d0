#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "extlab/asymptotics/ratefit.hpp"
#include "extlab/core/field.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/merlezaag/modesystem.hpp"
#include "extlab/spectrum/eigen.hpp"

namespace extlab {

// Projection of a trajectory onto the unstable / neutral / stable eigenspaces.
// series holds the raw per-snapshot subspace norms (X, Y, Z) against the
// rescaled time s = lambda_half * t; coefficients keeps the per-mode values
// behind those norms for downstream conditioning and persistence.
struct SubspaceSplit {
    std::vector<int> unstable_modes;
    std::vector<int> neutral_modes;
    std::vector<int> stable_modes;
    std::vector<double> times;                 // snapshot times t
    ModeSeries series;                         // s, X = |h_u|, Y = |h_c|, Z = |h_s|
    std::vector<std::vector<double>> coefficients; // [snapshot][mode]
    std::vector<double> total_norms;           // |h| in the p+1 product
    std::vector<double> transverse_norms;      // sqrt(Y^2 + Z^2)
    double lambda_half = 0.0;                  // s = lambda_half * t
    double eps_hat = 0.0;                      // max over tail of |N(h)|/|h|
};

// max over snapshots [lo, hi] of |N(h)|/|h| in the p+1 product, with the
// time derivative taken by centered differences on the snapshot grid
inline double measure_eps_hat(const Trajectory& traj, const Field& V,
                              const MediumParams& prm, std::size_t lo,
                              std::size_t hi) {
    const std::size_t ns = traj.snapshots.size();
    if (ns < 2 || hi >= ns || lo > hi)
        throw PreconditionViolated("eps window must index into the snapshots");
    double eps = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const std::size_t a = (k == 0) ? 0 : k - 1;
        const std::size_t b = (k + 1 < ns) ? k + 1 : k;
        if (a == b)
            continue;
        const double ta = traj.times[traj.snapshot_steps[a]];
        const double tb = traj.times[traj.snapshot_steps[b]];
        Field dhdt{V.mesh,
                   (traj.snapshots[b].v - traj.snapshots[a].v) / (tb - ta)};
        const Field N = nonlinear_n(traj.snapshots[k], dhdt, prm);
        const double nh = norm_weighted(traj.snapshots[k], V, prm.p + 1.0);
        if (nh > 0.0)
            eps = std::max(eps, norm_weighted(N, V, prm.p + 1.0) / nh);
    }
    return eps;
}

inline SubspaceSplit split_trajectory(const Trajectory& traj,
                                      const SpectralDecomposition& dec,
                                      const Field& V, const MediumParams& prm,
                                      double tail_fraction = 0.5) {
    if (traj.snapshots.size() < 2 ||
        traj.snapshot_steps.size() != traj.snapshots.size())
        throw EmptyTrajectory("need at least 2 snapshots to split");
    if (dec.eigenfields.empty())
        throw PreconditionViolated("decomposition carries no modes");
    if (!(tail_fraction >= 0.0) || !(tail_fraction < 1.0))
        throw PreconditionViolated("tail fraction must lie in [0, 1)");
    if (!same_mesh(*V.mesh, *dec.eigenfields.front().mesh) ||
        !same_mesh(*V.mesh, *traj.snapshots.front().mesh))
        throw MeshMismatch("trajectory, profile and modes must share a mesh");

    SubspaceSplit out;
    const int nm = static_cast<int>(dec.eigenvalues.size());
    for (int i = 0; i < nm; ++i) {
        const double lam = dec.eigenvalues[i];
        if (lam < -dec.zero_tol)
            out.unstable_modes.push_back(i);
        else if (lam <= dec.zero_tol)
            out.neutral_modes.push_back(i);
        else
            out.stable_modes.push_back(i);
    }

    double lam_neg = 0.0;
    if (!out.unstable_modes.empty())
        lam_neg = -dec.eigenvalues[out.unstable_modes.back()];
    out.lambda_half =
        0.5 * (lam_neg > 0.0 ? std::min(lam_neg, dec.lambda_K) : dec.lambda_K);

    const std::size_t ns = traj.snapshots.size();
    std::vector<std::vector<double>> coeffs(ns);
    for (std::size_t k = 0; k < ns; ++k) {
        const Field& h = traj.snapshots[k];
        const double t = traj.times[traj.snapshot_steps[k]];
        coeffs[k] = project_modes(h, dec, V, prm);
        auto block = [&](const std::vector<int>& idx) {
            double sum = 0.0;
            for (int i : idx)
                sum += coeffs[k][i] * coeffs[k][i];
            return std::sqrt(sum);
        };
        out.times.push_back(t);
        out.series.s.push_back(out.lambda_half * t);
        out.series.X.push_back(block(out.unstable_modes));
        out.series.Y.push_back(block(out.neutral_modes));
        out.series.Z.push_back(block(out.stable_modes));
        out.total_norms.push_back(norm_weighted(h, V, prm.p + 1.0));
        out.transverse_norms.push_back(
            std::hypot(out.series.Y.back(), out.series.Z.back()));
    }
    out.coefficients = std::move(coeffs);

    const double t0 = out.times.front() +
                      tail_fraction * (out.times.back() - out.times.front());
    std::size_t lo = 0;
    while (lo + 1 < ns && out.times[lo] < t0)
        ++lo;
    out.eps_hat = measure_eps_hat(traj, V, prm, lo, ns - 1);
    return out;
}

// Unstable norms with the linear gauge drift removed, on snapshots [lo, hi].
// A trajectory decaying toward the profile carries no growing unstable
// content in exact arithmetic (that content is the extinction-time gauge
// freedom), but a discrete run regenerates it quadratically and it would
// swamp the genuine transient.  For each unstable mode the gauge rate and
// amplitude are fitted from ln|y| on the last quarter of the window, where
// the growth dominates, and the extrapolated gauge is subtracted; a fit that
// does not actually grow (rate below half the linear one) means there is no
// gauge content to remove and the raw coefficient is kept.
inline std::vector<double> condition_unstable(const SubspaceSplit& split,
                                              const SpectralDecomposition& dec,
                                              std::size_t lo, std::size_t hi) {
    const std::size_t ns = split.times.size();
    if (hi >= ns || lo > hi || hi - lo < 8)
        throw PreconditionViolated("conditioning window needs 9+ snapshots");

    struct Gauge {
        double amp = 0.0, rate = 0.0, t_ref = 0.0;
        bool active = false;
    };
    std::vector<Gauge> gauges;
    for (int i : split.unstable_modes) {
        Gauge g;
        g.t_ref = split.times[hi];
        std::vector<double> ts, ln;
        for (std::size_t k = hi - (hi - lo) / 4; k <= hi; ++k)
            if (std::abs(split.coefficients[k][i]) > 0.0) {
                ts.push_back(split.times[k]);
                ln.push_back(std::log(std::abs(split.coefficients[k][i])));
            }
        if (ts.size() >= 5) {
            auto [slope, intercept, rms] = detail::line_fit(ts, ln);
            (void)intercept;
            (void)rms;
            if (slope > 0.5 * -dec.eigenvalues[i]) {
                g.rate = slope;
                g.amp = split.coefficients[hi][i];
                g.active = true;
            }
        }
        gauges.push_back(g);
    }

    std::vector<double> out;
    for (std::size_t k = lo; k <= hi; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < split.unstable_modes.size(); ++j) {
            const int i = split.unstable_modes[j];
            double d = split.coefficients[k][i];
            if (gauges[j].active)
                d -= gauges[j].amp *
                     std::exp(gauges[j].rate * (split.times[k] - gauges[j].t_ref));
            sum += d * d;
        }
        out.push_back(std::sqrt(sum));
    }
    return out;
}

} // namespace extlab
