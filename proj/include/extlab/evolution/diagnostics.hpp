#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "extlab/core/field.hpp"
#include "extlab/core/params.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"

namespace extlab {

struct EnergyDiagnostics {
    std::vector<double> energy;
    bool monotone = true;        // non-increasing up to per-step slack
    double max_violation = 0.0;  // worst positive energy increment
    std::vector<double> quotient; // (||h||^2 + cumulative dissipation)/||h0||^2
    double c_fit = 0.0;          // minimal C with e^{Ct} >= quotient on the run
};

inline EnergyDiagnostics energy_and_estimate_series(const Trajectory& traj,
                                                    const Field& V,
                                                    const MediumParams& prm) {
    (void)prm;
    if (traj.times.empty())
        throw EmptyTrajectory("trajectory has no recorded steps");
    if (!traj.snapshots.empty())
        require_same_mesh(traj.snapshots.front(), V);

    EnergyDiagnostics diag;
    diag.energy = traj.energy_series;
    for (std::size_t k = 1; k < diag.energy.size(); ++k) {
        const double incr = diag.energy[k] - diag.energy[k - 1];
        const double slack = 1e-10 * std::abs(diag.energy[k - 1]) + 1e-12;
        if (incr > slack)
            diag.monotone = false;
        diag.max_violation = std::max(diag.max_violation, incr);
    }

    const double n0 = traj.norm_series.front();
    diag.quotient.resize(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (n0 == 0.0) {
            diag.quotient[k] = 1.0; // stationary zero run
            continue;
        }
        const double nk = traj.norm_series[k];
        diag.quotient[k] =
            (nk * nk + traj.dissipation_accumulator[k]) / (n0 * n0);
    }

    diag.c_fit = 0.0;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        if (diag.quotient[k] > 0.0 && traj.times[k] > 0.0)
            diag.c_fit = std::max(diag.c_fit,
                                  std::log(diag.quotient[k]) / traj.times[k]);
    }
    return diag;
}

} // namespace extlab
