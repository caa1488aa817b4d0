#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "extlab/core/operators.hpp"
#include "extlab/errors.hpp"
#include "extlab/stationary/profile.hpp"

namespace extlab {

// First Dirichlet eigenpair of the mesh Laplacian by inverse power iteration.
inline std::pair<double, Field> first_dirichlet_eigenpair(
    std::shared_ptr<const Mesh> mesh) {
    const auto A = assemble_dirichlet_stiffness(mesh);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A.matrix());
    if (solver.info() != Eigen::Success)
        throw LinearSolveFailure("dirichlet stiffness factorization failed");

    const auto& m = mesh->measure;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(mesh->cells());
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd y = solver.solve((x.array() * m.array()).matrix());
        y /= std::sqrt((y.array().square() * m.array()).sum());
        const double lam = A.quadratic(y) / (y.array().square() * m.array()).sum();
        const bool done = it > 3 && std::abs(lam - lambda) <= 1e-12 * lam;
        lambda = lam;
        x = y;
        if (done)
            break;
    }
    if (x[mesh->cells() / 2] < 0.0)
        x = -x;
    Field f = make_field(std::move(mesh));
    f.v = x;
    return {lambda, std::move(f)};
}

// Initial Newton guess at the mountain-pass amplitude: the first Dirichlet
// eigenfunction scaled so its peak obeys the balance peak^{p-1} = lambda_1,
// making the linear and nonlinear terms comparable and steering the iteration
// away from the trivial solution.
inline Field mountain_pass_init(std::shared_ptr<const Mesh> mesh,
                                const MediumParams& prm) {
    auto [lambda, psi] = first_dirichlet_eigenpair(std::move(mesh));
    psi.v *= std::pow(lambda, 1.0 / (prm.p - 1.0)) / psi.v.cwiseAbs().maxCoeff();
    return psi;
}

// Damped Newton for Delta_h V + V^p = 0 with zero Dirichlet ghosts.
inline StationaryProfile solve_newton(std::shared_ptr<const Mesh> mesh,
                                      const MediumParams& prm, const Field& init,
                                      double tol = 1e-10, int max_iter = 100) {
    if (!same_mesh(*mesh, *init.mesh))
        throw MeshMismatch("newton initial guess lives on a different mesh");
    if ((init.v.array() < 0.0).any())
        throw PreconditionViolated("newton initial guess must be non-negative");

    const double positivity_floor = 1e-14;
    const auto A = assemble_dirichlet_stiffness(mesh);
    const Eigen::SparseMatrix<double> Amat = A.matrix();
    const auto& m = mesh->measure;
    const int N = mesh->cells();

    Field V{mesh, init.v};
    auto residual_l2 = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd F = discrete_residual(Field{mesh, v}, prm);
        return std::sqrt((F.array().square() * m.array()).sum());
    };

    int clamp_streak = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (V.v.cwiseAbs().maxCoeff() <= 1e-8)
            throw ConvergedToZero("iterate collapsed to the trivial solution");
        const double res0 = residual_l2(V.v);
        if (res0 <= tol) {
            if ((V.v.array() <= 0.0).any())
                throw LostPositivity("converged iterate has non-positive cells");
            return detail::finish_profile(std::move(V), res0, prm);
        }

        // symmetric Jacobian system  (A_D - p M diag(V^{p-1})) delta = A_D V - M V^p
        Eigen::SparseMatrix<double> J = Amat;
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(N);
        for (int i = 0; i < N; ++i)
            trip.emplace_back(i, i,
                              -prm.p * m[i] * std::pow(std::abs(V.v[i]), prm.p - 1.0));
        Eigen::SparseMatrix<double> D(N, N);
        D.setFromTriplets(trip.begin(), trip.end());
        J += D;
        // rhs = M F(V); reuse the extended-precision residual so the step
        // direction stays meaningful near the convergence floor
        const Eigen::VectorXd Fv = discrete_residual(V, prm);
        const Eigen::VectorXd rhs = (m.array() * Fv.array()).matrix();

        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        if (lu.info() != Eigen::Success)
            throw LinearSolveFailure("newton jacobian factorization failed");
        const Eigen::VectorXd delta = lu.solve(rhs);

        // Armijo backtracking on the residual norm
        double step = 1.0;
        Eigen::VectorXd cand;
        bool accepted = false;
        for (int bt = 0; bt < 14; ++bt) {
            cand = V.v + step * delta;
            if (residual_l2(cand) <= (1.0 - 1e-4 * step) * res0) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            cand = V.v + delta * std::pow(0.5, 14);

        // transient negative undershoot near the boundary is clamped; only a
        // persistent clamp across iterations counts as losing positivity
        if ((cand.array() < 0.0).any()) {
            ++clamp_streak;
            if (clamp_streak >= 5)
                throw LostPositivity("negative cells persisted over 5 iterations");
            cand = cand.cwiseMax(positivity_floor);
        } else {
            clamp_streak = 0;
        }
        V.v = cand;
    }
    throw MaxIterExceeded("newton did not reach tolerance");
}

} // namespace extlab
