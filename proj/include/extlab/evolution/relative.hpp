#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "extlab/core/field.hpp"
#include "extlab/core/operators.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"
#include "extlab/stationary/profile.hpp"

namespace extlab {

struct EvolutionConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_stride = 10;
    double positivity_floor = 1e-14;
};

inline void validate_config(const EvolutionConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0) || !(cfg.dt < cfg.t_end))
        throw PreconditionViolated("need 0 < dt < t_end");
    if (cfg.snapshot_stride < 1)
        throw PreconditionViolated("snapshot stride must be at least 1");
    if (!(cfg.positivity_floor > 0.0))
        throw PreconditionViolated("positivity floor must be positive");
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<int> snapshot_steps;    // index into times for each snapshot
    std::vector<double> norm_series;    // weighted p+1 norm per step
    std::vector<double> sup_series;
    std::vector<double> energy_series;
    std::vector<double> dissipation_accumulator; // running sum dt*||grad h||^2_{L2_2}
    bool stopped_early = false;
};

// quadratic remainder M(h) = (1+h)^p - 1 - p h
inline Field nonlinear_m(const Field& h, const MediumParams& prm) {
    Field out{h.mesh, Eigen::VectorXd(h.size())};
    for (int i = 0; i < h.size(); ++i) {
        const double a = 1.0 + h.v[i];
        out.v[i] = std::pow(a, prm.p) - 1.0 - prm.p * h.v[i];
    }
    return out;
}

// degenerate-prefactor remainder N(h) = (1 - (1+h)^{p-1}) dh/dt
inline Field nonlinear_n(const Field& h, const Field& dhdt, const MediumParams& prm) {
    require_same_mesh(h, dhdt);
    Field out{h.mesh, Eigen::VectorXd(h.size())};
    for (int i = 0; i < h.size(); ++i)
        out.v[i] = (1.0 - std::pow(1.0 + h.v[i], prm.p - 1.0)) * dhdt.v[i];
    return out;
}

// Semi-implicit stepper for the relative-error flow
//   diag((1+h)^{p-1}) dh/dt = -[B^{-1}A - (p-1)] h + M(h):
// the linear pencil part is implicit, the quadratic remainder explicit, and
// the whole system is symmetrized by B so each step is one sparse LDLT solve.
// A has no boundary faces (the profile weight vanishes there), so constants
// are in its kernel and spatially constant data stays spatially constant.
class RelativeErrorStepper {
  public:
    RelativeErrorStepper(const Field& V, const MediumParams& prm, double dt)
        : prm_(prm), dt_(dt), V_(V),
          A_(assemble_weighted_stiffness(V, 2.0)),
          B_(mass_vector(V, prm.p + 1.0)), Amat_(A_.matrix()) {
        if (!(dt > 0.0))
            throw PreconditionViolated("dt must be positive");
        if ((B_.array() <= 0.0).any())
            throw DegenerateMass("profile weight must be positive on all cells");
    }

    Field step(const Field& h) const {
        require_same_mesh(h, V_);
        if (((1.0 + h.v.array()) <= 0.0).any())
            throw PositivityLost("1 + h must stay positive");
        const int N = h.size();
        Eigen::VectorXd D(N);
        for (int i = 0; i < N; ++i)
            D[i] = std::pow(1.0 + h.v[i], prm_.p - 1.0);

        Eigen::SparseMatrix<double> S = Amat_;
        for (int i = 0; i < N; ++i)
            S.coeffRef(i, i) += B_[i] * (D[i] / dt_ - (prm_.p - 1.0));

        const Field M = nonlinear_m(h, prm_);
        Eigen::VectorXd rhs(N);
        for (int i = 0; i < N; ++i)
            rhs[i] = B_[i] * (D[i] * h.v[i] / dt_ + M.v[i]);

        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S);
        if (solver.info() != Eigen::Success)
            throw LinearSolveFailure("step matrix factorization failed");
        Eigen::VectorXd hn = solver.solve(rhs);
        if (solver.info() != Eigen::Success || !hn.allFinite())
            throw LinearSolveFailure("step solve failed");
        return Field{h.mesh, std::move(hn)};
    }

    const WeightedStiffness& stiffness() const { return A_; }

  private:
    MediumParams prm_;
    double dt_;
    Field V_;
    WeightedStiffness A_;
    Eigen::VectorXd B_;
    Eigen::SparseMatrix<double> Amat_;
};

inline Field step_relative_error(const Field& h, const Field& V,
                                 const MediumParams& prm, double dt) {
    return RelativeErrorStepper(V, prm, dt).step(h);
}

inline Trajectory evolve(const Field& h0, const Field& V, const MediumParams& prm,
                         const EvolutionConfig& cfg) {
    validate_config(cfg);
    require_same_mesh(h0, V);
    if (!(sup_norm(h0) < 1.0))
        throw PreconditionViolated("initial relative error must satisfy |h0| < 1");

    RelativeErrorStepper stepper(V, prm, cfg.dt);
    const int nsteps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));

    Trajectory traj;
    Field h = h0;
    double diss = 0.0;
    auto record = [&](int k) {
        traj.times.push_back(k * cfg.dt);
        traj.norm_series.push_back(norm_weighted(h, V, prm.p + 1.0));
        traj.sup_series.push_back(sup_norm(h));
        Field v{V.mesh, (V.v.array() * (1.0 + h.v.array())).matrix()};
        traj.energy_series.push_back(energy(v, prm));
        traj.dissipation_accumulator.push_back(diss);
    };
    auto snapshot = [&](int k) {
        traj.snapshots.push_back(h);
        traj.snapshot_steps.push_back(k);
    };

    record(0);
    snapshot(0);
    for (int k = 1; k <= nsteps; ++k) {
        h = stepper.step(h);
        diss += cfg.dt * stepper.stiffness().quadratic(h.v);
        record(k);
        const bool last = (k == nsteps);
        const bool leaving = traj.sup_series.back() > 0.5;
        if (k % cfg.snapshot_stride == 0 || last || leaving)
            snapshot(k);
        if (leaving) {
            traj.stopped_early = true;
            break;
        }
    }
    return traj;
}

} // namespace extlab
