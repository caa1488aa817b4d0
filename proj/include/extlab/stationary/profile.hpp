#pragma once

#include <cmath>

#include "extlab/core/field.hpp"
#include "extlab/core/operators.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"

namespace extlab {

// Positive steady state together with its quality diagnostics.  For Newton
// profiles residual_norm is the discrete L2 residual of the cell equations;
// for shooting profiles it is the ODE integrator's accuracy estimate (the
// sampled continuum solution does not satisfy the mesh equations to solver
// tolerance, only to discretization order).
struct StationaryProfile {
    Field V;
    double residual_norm = 0.0;
    double growth_ratio_lo = 0.0;
    double growth_ratio_hi = 0.0;
    double energy = 0.0;
};

inline double energy(const Field& v, const MediumParams& prm) {
    if ((v.v.array() < 0.0).any())
        throw PreconditionViolated("energy expects a non-negative field");
    const auto grad = assemble_dirichlet_stiffness(v.mesh);
    double bulk = 0.0;
    for (int i = 0; i < v.size(); ++i)
        bulk += std::pow(v.v[i], prm.p + 1.0) * v.mesh->measure[i];
    return 0.5 * grad.quadratic(v.v) - bulk / (prm.p + 1.0);
}

// Pointwise residual of the cell equations Delta_h V + V^p with Dirichlet
// ghosts, as a field over cells.  Fluxes are accumulated in extended
// precision: the two O(1/dx^2) terms cancel to O(dx^2) and double
// accumulation noise would otherwise dominate tight tolerances.
inline Eigen::VectorXd discrete_residual(const Field& V, const MediumParams& prm) {
    const auto& mesh = *V.mesh;
    const int N = mesh.cells();
    std::vector<long double> acc(N, 0.0L);
    for (const auto& f : mesh.faces) {
        const long double d =
            static_cast<long double>(f.area / f.dist) *
            (static_cast<long double>(V.v[f.left]) -
             (f.right < 0 ? 0.0L : static_cast<long double>(V.v[f.right])));
        acc[f.left] -= d;
        if (f.right >= 0)
            acc[f.right] += d;
    }
    Eigen::VectorXd F(N);
    for (int i = 0; i < N; ++i)
        F[i] = static_cast<double>(
            acc[i] / static_cast<long double>(mesh.measure[i]) +
            powl(fabsl(static_cast<long double>(V.v[i])), static_cast<long double>(prm.p)));
    return F;
}

inline double discrete_residual_norm(const Field& V, const MediumParams& prm) {
    const Eigen::VectorXd F = discrete_residual(V, prm);
    return std::sqrt((F.array().square() * V.mesh->measure.array()).sum());
}

// min/max of V/dist over the near-boundary band dist <= band_fraction * inradius.
inline std::pair<double, double> check_boundary_growth(const StationaryProfile& profile,
                                                       double band_fraction) {
    if (!(band_fraction > 0.0) || !(band_fraction < 0.5))
        throw EmptyBand("band fraction must lie in (0, 1/2)");
    const auto& mesh = *profile.V.mesh;
    const double cut = band_fraction * inradius(mesh.domain);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int hits = 0;
    for (int i = 0; i < mesh.cells(); ++i) {
        if (mesh.bdist[i] <= cut) {
            const double ratio = profile.V.v[i] / mesh.bdist[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            ++hits;
        }
    }
    if (hits == 0)
        throw EmptyBand("no cell centers inside the requested band");
    return {lo, hi};
}

namespace detail {

// Builds the profile record; the growth band widens on coarse meshes so at
// least the closest cell ring is always included.
inline StationaryProfile finish_profile(Field V, double residual_norm,
                                        const MediumParams& prm) {
    StationaryProfile prof;
    prof.V = std::move(V);
    prof.residual_norm = residual_norm;
    prof.energy = energy(prof.V, prm);
    const auto& mesh = *prof.V.mesh;
    double band = 0.1;
    const double closest = mesh.bdist.minCoeff() / inradius(mesh.domain);
    band = std::min(0.49, std::max(band, 1.05 * closest));
    auto [lo, hi] = check_boundary_growth(prof, band);
    prof.growth_ratio_lo = lo;
    prof.growth_ratio_hi = hi;
    return prof;
}

} // namespace detail

} // namespace extlab
