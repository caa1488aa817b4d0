#pragma once

#include <cmath>

#include "extlab/core/field.hpp"
#include "extlab/errors.hpp"

namespace extlab {

// Midpoint quadrature of f g V^sigma over the domain.
inline double weighted_inner(const Field& f, const Field& g, const Field& V,
                             double sigma) {
    require_same_mesh(f, g);
    require_same_mesh(f, V);
    if ((V.v.array() < 0.0).any())
        throw PreconditionViolated("weight profile must be non-negative");
    const auto& m = f.mesh->measure;
    if (sigma == 0.0)
        return (f.v.array() * g.v.array() * m.array()).sum();
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i)
        acc += f.v[i] * g.v[i] * std::pow(V.v[i], sigma) * m[i];
    return acc;
}

inline double norm_weighted(const Field& f, const Field& V, double sigma) {
    return std::sqrt(std::max(0.0, weighted_inner(f, f, V, sigma)));
}

// Plain (unweighted) L2 norm with the cell measure.
inline double norm_l2(const Field& f) {
    return std::sqrt((f.v.array().square() * f.mesh->measure.array()).sum());
}

inline double sup_norm(const Field& f) {
    return f.size() == 0 ? 0.0 : f.v.cwiseAbs().maxCoeff();
}

inline double integrate(const Field& f) {
    return (f.v.array() * f.mesh->measure.array()).sum();
}

} // namespace extlab
