#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "extlab/core/field.hpp"
#include "extlab/core/operators.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"
#include "extlab/stationary/profile.hpp"

namespace extlab {

// Generalized pencil A x = nu B x for the weighted linearization: A is the
// V^2-weighted stiffness, B the diagonal V^{p+1} mass.  Reported eigenvalues
// are lambda = nu - (p-1), so the constant mode (A 1 = 0 exactly) sits at
// lambda = 1-p.
struct Pencil {
    WeightedStiffness A;
    Eigen::VectorXd B;
    MediumParams prm;
};

inline Pencil assemble_pencil(const Field& V, const MediumParams& prm) {
    Pencil pen{assemble_weighted_stiffness(V, 2.0), mass_vector(V, prm.p + 1.0), prm};
    if ((pen.B.array() <= 0.0).any())
        throw DegenerateMass("mass diagonal must be positive on all cells");
    return pen;
}

struct SpectralDecomposition {
    std::vector<double> eigenvalues; // ascending, lambda convention
    std::vector<Field> eigenfields;  // B-orthonormal in the p+1 weighted product
    int I = 0;                       // count below -zero_tol
    int K = 0;                       // count within [-zero_tol, zero_tol]
    double lambda_K = 0.0;           // smallest eigenvalue above zero_tol
    double zero_tol = 0.0;
};

// I = #{lambda < -tol}, K = #{|lambda| <= tol}, lambda_K = min{lambda > tol}.
inline std::tuple<int, int, double> classify_spectrum(const std::vector<double>& evals,
                                                      double zero_tol) {
    if (!std::is_sorted(evals.begin(), evals.end()))
        throw PreconditionViolated("eigenvalue list must be ascending");
    int I = 0, K = 0;
    double lambda_K = 0.0;
    bool found = false;
    for (const double lam : evals) {
        if (lam < -zero_tol)
            ++I;
        else if (lam <= zero_tol)
            ++K;
        else {
            lambda_K = lam;
            found = true;
            break;
        }
    }
    if (!found)
        throw NoPositiveGap("no eigenvalue above zero_tol");
    return {I, K, lambda_K};
}

// Kernel detection tolerance: floors at 1e-6 (scaled by the ground-state
// magnitude) and tracks the discretization error ~ h^2 on finer scales.
inline double default_zero_tol(const MediumParams& prm, const Mesh& mesh) {
    double h = mesh.dx;
    if (const auto* an = std::get_if<Annulus>(&mesh.domain))
        h = std::max(h, an->r1 * mesh.dy);
    else if (mesh.ny > 1)
        h = std::max(h, mesh.dy);
    const double scale = std::max(1.0, prm.p - 1.0);
    return std::max(1e-6 * scale, 2.0 * h * h * scale);
}

namespace detail {

inline SpectralDecomposition finish_decomposition(
    const Pencil& pen, std::vector<double> evals,
    std::vector<Eigen::VectorXd> vecs, double zero_tol) {
    SpectralDecomposition dec;
    dec.zero_tol = zero_tol;
    dec.eigenvalues = std::move(evals);
    dec.eigenfields.reserve(vecs.size());
    for (auto& v : vecs) {
        Field f{pen.A.mesh, std::move(v)};
        dec.eigenfields.push_back(std::move(f));
    }
    auto [I, K, lamK] = classify_spectrum(dec.eigenvalues, zero_tol);
    dec.I = I;
    dec.K = K;
    dec.lambda_K = lamK;
    return dec;
}

// Dense path: B is diagonal positive, so the congruence C = B^{-1/2} A B^{-1/2}
// turns the pencil into an ordinary symmetric eigenproblem and the
// back-transformed eigenvectors are B-orthonormal by construction.
inline SpectralDecomposition solve_dense(const Pencil& pen, int k, double zero_tol) {
    const int N = static_cast<int>(pen.B.size());
    const Eigen::VectorXd isqrt = pen.B.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd C = Eigen::MatrixXd(pen.A.matrix());
    C = isqrt.asDiagonal() * C * isqrt.asDiagonal();
    C = 0.5 * (C + C.transpose()); // restore exact symmetry after scaling
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("dense symmetric eigensolver failed");
    std::vector<double> evals(k);
    std::vector<Eigen::VectorXd> vecs(k);
    const double shift = pen.prm.p - 1.0;
    for (int i = 0; i < k; ++i) {
        evals[i] = es.eigenvalues()[i] - shift;
        vecs[i] = isqrt.asDiagonal() * es.eigenvectors().col(i);
        // fix an overall sign: make the mean positive
        if (vecs[i].sum() < 0.0)
            vecs[i] = -vecs[i];
    }
    (void)N;
    return finish_decomposition(pen, std::move(evals), std::move(vecs), zero_tol);
}

// Shift-invert Lanczos on T = (A + B)^{-1} B, self-adjoint in the B-inner
// product; the shift sits at nu = -1, below the spectrum (A is PSD), so the
// factored matrix is positive definite and the largest Ritz values of T map
// to the smallest nu.  Full B-reorthogonalization keeps the basis clean.
inline SpectralDecomposition solve_lanczos(const Pencil& pen, int k, double zero_tol) {
    const int N = static_cast<int>(pen.B.size());
    Eigen::SparseMatrix<double> S = pen.A.matrix();
    for (int i = 0; i < N; ++i)
        S.coeffRef(i, i) += pen.B[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S);
    if (solver.info() != Eigen::Success)
        throw EigensolverFailure("shifted pencil factorization failed");

    const int m = std::min(N, std::max(2 * k + 40, 80));
    std::vector<Eigen::VectorXd> Q;
    Q.reserve(m);
    Eigen::VectorXd alpha(m), beta(m);

    auto b_dot = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return (x.array() * pen.B.array() * y.array()).sum();
    };

    // deterministic start vector with all symmetry classes populated
    Eigen::VectorXd q(N);
    for (int i = 0; i < N; ++i)
        q[i] = 1.0 + 0.3 * std::sin(1.0 + 7.0 * i) + 0.1 * std::cos(3.0 + 13.0 * i);
    q /= std::sqrt(b_dot(q, q));
    Q.push_back(q);

    int steps = 0;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w = solver.solve((pen.B.array() * Q[j].array()).matrix());
        alpha[j] = b_dot(w, Q[j]);
        w -= alpha[j] * Q[j];
        if (j > 0)
            w -= beta[j - 1] * Q[j - 1];
        for (const auto& qq : Q) // full reorthogonalization
            w -= b_dot(w, qq) * qq;
        steps = j + 1;
        const double nb = std::sqrt(std::max(0.0, b_dot(w, w)));
        if (nb < 1e-13 || j + 1 == m) {
            beta[j] = 0.0;
            break;
        }
        beta[j] = nb;
        Q.push_back(w / nb);
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < steps) {
            T(j, j + 1) = beta[j];
            T(j + 1, j) = beta[j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("lanczos tridiagonal solve failed");

    if (steps < k)
        throw EigensolverFailure("lanczos basis smaller than requested count");
    std::vector<double> evals(k);
    std::vector<Eigen::VectorXd> vecs(k);
    const double shift = pen.prm.p - 1.0;
    // largest Ritz values of T give the smallest nu = 1/theta - 1
    for (int i = 0; i < k; ++i) {
        const int col = steps - 1 - i;
        const double theta = es.eigenvalues()[col];
        if (theta <= 0.0)
            throw EigensolverFailure("nonpositive Ritz value in shift-invert map");
        evals[i] = 1.0 / theta - 1.0 - shift;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
        for (int j = 0; j < steps; ++j)
            x += es.eigenvectors()(j, col) * Q[j];
        x /= std::sqrt(b_dot(x, x));
        if (x.sum() < 0.0)
            x = -x;
        vecs[i] = std::move(x);
    }
    // enforce ascending order in lambda
    for (int i = 1; i < k; ++i)
        if (evals[i] < evals[i - 1])
            throw EigensolverFailure("lanczos ritz values unordered");
    return finish_decomposition(pen, std::move(evals), std::move(vecs), zero_tol);
}

} // namespace detail

// k smallest eigenvalues of the pencil; dense congruence up to the crossover
// size, shift-invert Lanczos beyond it.
inline SpectralDecomposition solve_eigens(const Pencil& pen, int k, double zero_tol,
                                          int dense_crossover = 4000) {
    const int N = static_cast<int>(pen.B.size());
    if (k < 1 || k > N)
        throw PreconditionViolated("mode count must be in [1, cell count]");
    if (!(zero_tol > 0.0))
        throw PreconditionViolated("zero_tol must be positive");
    if (N <= dense_crossover)
        return detail::solve_dense(pen, k, zero_tol);
    return detail::solve_lanczos(pen, k, zero_tol);
}

// Projection coefficients y_i = <h, phi_i> in the p+1 weighted product.
inline std::vector<double> project_modes(const Field& h,
                                         const SpectralDecomposition& dec,
                                         const Field& V, const MediumParams& prm) {
    std::vector<double> y;
    y.reserve(dec.eigenfields.size());
    for (const auto& phi : dec.eigenfields)
        y.push_back(weighted_inner(h, phi, V, prm.p + 1.0));
    return y;
}

// || L_V 1 - (1-p) 1 ||_{p+1} through the product form of the operator,
// which equals 1-p only when the profile satisfies the stationary equation:
// the residual field is -V^{-p} (Delta_h V + V^p).
inline double ground_state_residual(const Field& V, const MediumParams& prm) {
    const Eigen::VectorXd F = discrete_residual(V, prm);
    Field r{V.mesh, Eigen::VectorXd(V.size())};
    for (int i = 0; i < V.size(); ++i)
        r.v[i] = -F[i] / std::pow(V.v[i], prm.p);
    return norm_weighted(r, V, prm.p + 1.0);
}

} // namespace extlab
