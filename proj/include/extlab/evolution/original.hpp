#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "extlab/core/field.hpp"
#include "extlab/core/operators.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"

namespace extlab {

// Fully implicit step for the original equation dw/dtau = Delta(w^m) with
// homogeneous Dirichlet data.  Each step solves for u = w^m by Newton:
//   G(u) = measure .* (u^p - w_old)/dtau + A_D u = 0,
// whose Jacobian  diag(measure p u^{p-1}/dtau) + A_D  is positive definite
// for u >= 0, so the iteration stays well posed through extinction.
inline Trajectory evolve_original(const Field& w0, const MediumParams& prm,
                                  double dtau, double tau_end,
                                  int snapshot_stride = 10,
                                  double positivity_floor = 1e-14) {
    if ((w0.v.array() < 0.0).any())
        throw PreconditionViolated("initial data must be non-negative");
    if (!(dtau > 0.0) || !(tau_end > dtau))
        throw PreconditionViolated("need 0 < dtau < tau_end");
    if (snapshot_stride < 1 || !(positivity_floor > 0.0))
        throw PreconditionViolated("bad stride or positivity floor");

    const auto& mesh = *w0.mesh;
    const int N = mesh.cells();
    const WeightedStiffness AD = assemble_dirichlet_stiffness(w0.mesh);
    const Eigen::SparseMatrix<double> ADmat = AD.matrix();
    const Eigen::VectorXd& mv = mesh.measure;
    const double ufloor = std::pow(positivity_floor, prm.m);

    const int nsteps = static_cast<int>(std::llround(tau_end / dtau));
    Eigen::VectorXd u = w0.v.array().pow(prm.m).matrix();
    Eigen::VectorXd w = w0.v;

    Trajectory traj;
    double diss = 0.0;
    auto record = [&](int k) {
        traj.times.push_back(k * dtau);
        Field wf{w0.mesh, w};
        traj.norm_series.push_back(norm_l2(wf));
        traj.sup_series.push_back(w.cwiseAbs().maxCoeff());
        // Lyapunov functional of the original flow: int w^{1+m}/(1+m)
        double en = 0.0;
        for (int i = 0; i < N; ++i)
            en += mv[i] * std::pow(w[i], 1.0 + prm.m) / (1.0 + prm.m);
        traj.energy_series.push_back(en);
        traj.dissipation_accumulator.push_back(diss);
    };
    auto snapshot = [&](int k) {
        traj.snapshots.push_back(Field{w0.mesh, w});
        traj.snapshot_steps.push_back(k);
    };

    record(0);
    snapshot(0);
    for (int k = 1; k <= nsteps; ++k) {
        const Eigen::VectorXd w_old = w;
        auto residual = [&](const Eigen::VectorXd& uu) {
            Eigen::VectorXd G = AD.apply(uu);
            for (int i = 0; i < N; ++i)
                G[i] += mv[i] * (std::pow(uu[i], prm.p) - w_old[i]) / dtau;
            return G;
        };

        Eigen::VectorXd G = residual(u);
        const double scale =
            mv.maxCoeff() * (w_old.cwiseAbs().maxCoeff() + 1.0) / dtau;
        bool done = G.cwiseAbs().maxCoeff() <= 1e-14 * scale;
        int it = 0;
        while (!done) {
            if (++it > 50 || !G.allFinite())
                throw NewtonDivergence("implicit step did not converge");
            Eigen::SparseMatrix<double> J = ADmat;
            for (int i = 0; i < N; ++i)
                J.coeffRef(i, i) +=
                    mv[i] * prm.p * std::pow(u[i], prm.p - 1.0) / dtau;
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(J);
            if (solver.info() != Eigen::Success)
                throw NewtonDivergence("implicit step jacobian factorization failed");
            const Eigen::VectorXd delta = solver.solve(G);
            if (solver.info() != Eigen::Success || !delta.allFinite())
                throw NewtonDivergence("implicit step solve failed");
            u -= delta;
            u = u.cwiseMax(ufloor);
            G = residual(u);
            done = G.cwiseAbs().maxCoeff() <= 1e-14 * scale ||
                   delta.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + u.cwiseAbs().maxCoeff());
        }
        w = u.array().pow(prm.p).matrix();
        diss += dtau * AD.quadratic(u);
        record(k);
        if (k % snapshot_stride == 0 || k == nsteps)
            snapshot(k);
    }
    return traj;
}

} // namespace extlab
