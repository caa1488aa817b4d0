#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <memory>
#include <vector>

#include "extlab/core/field.hpp"
#include "extlab/core/mesh.hpp"
#include "extlab/errors.hpp"

namespace extlab {

struct FaceWeight {
    int left;
    int right; // -1 marks a boundary face with a zero ghost value
    double w;
};

// Finite-volume stiffness kept as a face list.  apply() accumulates fluxes
// face by face, so a spatially constant vector maps to exactly zero when no
// boundary faces are present: each flux is w*(x_l - x_r) = w*0.
class WeightedStiffness {
public:
    std::shared_ptr<const Mesh> mesh;
    std::vector<FaceWeight> fw;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
        for (const auto& f : fw) {
            const double d = f.w * (x[f.left] - (f.right < 0 ? 0.0 : x[f.right]));
            y[f.left] += d;
            if (f.right >= 0)
                y[f.right] -= d;
        }
        return y;
    }

    // Energy form sum_faces w (x_l - x_r)^2; non-negative by construction.
    double quadratic(const Eigen::VectorXd& x) const {
        double acc = 0.0;
        for (const auto& f : fw) {
            const double d = x[f.left] - (f.right < 0 ? 0.0 : x[f.right]);
            acc += f.w * d * d;
        }
        return acc;
    }

    Eigen::SparseMatrix<double> matrix() const {
        const int N = mesh->cells();
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(4 * fw.size());
        for (const auto& f : fw) {
            trip.emplace_back(f.left, f.left, f.w);
            if (f.right >= 0) {
                trip.emplace_back(f.right, f.right, f.w);
                trip.emplace_back(f.left, f.right, -f.w);
                trip.emplace_back(f.right, f.left, -f.w);
            }
        }
        Eigen::SparseMatrix<double> A(N, N);
        A.setFromTriplets(trip.begin(), trip.end());
        return A;
    }
};

// Stiffness of -div(V^e grad .) with zero flux through the boundary: the
// Dirichlet weight V vanishes there, so boundary faces are dropped outright.
// Interior face values of V are arithmetic means clamped below at zero.
inline WeightedStiffness assemble_weighted_stiffness(const Field& V,
                                                     double weight_exponent) {
    if ((V.v.array() < 0.0).any())
        throw NegativeWeight("weight profile has negative cells");
    WeightedStiffness A;
    A.mesh = V.mesh;
    A.fw.reserve(V.mesh->faces.size());
    for (const auto& f : V.mesh->faces) {
        if (f.right < 0)
            continue;
        const double vf = std::max(0.0, 0.5 * (V.v[f.left] + V.v[f.right]));
        A.fw.push_back({f.left, f.right,
                        std::pow(vf, weight_exponent) * f.area / f.dist});
    }
    return A;
}

// Stiffness of the Dirichlet Laplacian: boundary faces stay in with a zero
// ghost value, giving the quadratic form its H^1_0 boundary terms.
inline WeightedStiffness assemble_dirichlet_stiffness(std::shared_ptr<const Mesh> mesh) {
    WeightedStiffness A;
    A.fw.reserve(mesh->faces.size());
    for (const auto& f : mesh->faces)
        A.fw.push_back({f.left, f.right, f.area / f.dist});
    A.mesh = std::move(mesh);
    return A;
}

// Diagonal of the weighted mass: V^sigma * cell measure.
inline Eigen::VectorXd mass_vector(const Field& V, double sigma) {
    Eigen::VectorXd d(V.size());
    for (int i = 0; i < V.size(); ++i)
        d[i] = std::pow(V.v[i], sigma) * V.mesh->measure[i];
    return d;
}

} // namespace extlab
