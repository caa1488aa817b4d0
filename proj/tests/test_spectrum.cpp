#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "extlab/core/field.hpp"
#include "extlab/core/mesh.hpp"
#include "extlab/core/params.hpp"
#include "extlab/core/quadrature.hpp"
#include "extlab/errors.hpp"
#include "extlab/spectrum/eigen.hpp"
#include "extlab/stationary/newton.hpp"
#include "extlab/stationary/shooting.hpp"

using namespace extlab;

namespace {

// Frozen reference values for the interval (0,1) with p = 2, computed with an
// independent dense solver over the same finite volume scheme before this
// module existed.  The continuum spectrum for this case is the sequence
// (3k-1)(k+2)/2: -1, 3, 10, 20, 33, 49, ...
constexpr double kLambdaK_res400 = 2.999894943;
constexpr double kLambdaK_res1600 = 2.999993479;
constexpr double kLambdaExact[6] = {-1.0, 3.0, 10.0, 20.0, 33.0, 49.0};

MediumParams params_p2() { return validate_params(0.5, 1); }

Field interval_profile(int res, const MediumParams& prm) {
    auto mesh = build_mesh(Interval{0.0, 1.0}, res);
    return solve_newton(mesh, prm, mountain_pass_init(mesh, prm), 1e-9).V;
}

// the frozen gap values were computed on sampled continuum profiles, so the
// anchor tests sample the shooting solution rather than solving Newton
Field sampled_profile(int res, const MediumParams& prm) {
    auto mesh = build_mesh(Interval{0.0, 1.0}, res);
    return solve_radial_shooting(mesh, prm, 1e-12).V;
}

double lambda_gap(int res, const MediumParams& prm) {
    Field V = sampled_profile(res, prm);
    auto pen = assemble_pencil(V, prm);
    auto dec = solve_eigens(pen, 2, default_zero_tol(prm, *V.mesh));
    return dec.lambda_K;
}

} // namespace

TEST_CASE("ground state eigenvalue is 1-p with a constant eigenfield", "[spectrum]") {
    const auto prm = params_p2();
    Field V = interval_profile(400, prm);
    auto dec = solve_eigens(assemble_pencil(V, prm), 4, default_zero_tol(prm, *V.mesh));

    REQUIRE(dec.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(dec.I == 1);
    REQUIRE(dec.K == 0);

    const auto& phi = dec.eigenfields[0].v;
    const double mean = phi.mean();
    REQUIRE(mean > 0.0);
    const double cov = std::sqrt((phi.array() - mean).square().mean()) / mean;
    REQUIRE(cov < 1e-6);
}

TEST_CASE("spectral gap matches the frozen reference at two resolutions", "[spectrum]") {
    const auto prm = params_p2();
    const double l400 = lambda_gap(400, prm);
    const double l1600 = lambda_gap(1600, prm);

    REQUIRE(l400 == Catch::Approx(kLambdaK_res400).margin(2e-6));
    REQUIRE(l1600 == Catch::Approx(kLambdaK_res1600).margin(2e-6));
    REQUIRE(std::abs(l400 - l1600) / l1600 < 0.005);

    // second order scheme: Richardson extrapolation lands on the continuum gap
    const double rich = l1600 + (l1600 - l400) / 3.0;
    REQUIRE(rich == Catch::Approx(3.0).margin(5e-6));
}

TEST_CASE("eigenvalue convergence is second order in the mesh size", "[spectrum]") {
    const auto prm = params_p2();
    const double l100 = lambda_gap(100, prm);
    const double l200 = lambda_gap(200, prm);
    const double l400 = lambda_gap(400, prm);
    const double ratio = (l100 - l200) / (l200 - l400);
    REQUIRE(ratio > 0.0);
    const double order = std::log2(ratio);
    REQUIRE(order > 1.7);
    REQUIRE(order < 2.5);
}

TEST_CASE("low spectrum agrees with the closed form sequence", "[spectrum]") {
    const auto prm = params_p2();
    Field V = sampled_profile(1600, prm);
    auto dec = solve_eigens(assemble_pencil(V, prm), 6, default_zero_tol(prm, *V.mesh));
    for (int i = 0; i < 6; ++i) {
        const double tol = 1e-2 * std::max(1.0, std::abs(kLambdaExact[i]));
        REQUIRE(dec.eigenvalues[i] == Catch::Approx(kLambdaExact[i]).margin(tol));
    }
    REQUIRE(dec.lambda_K == Catch::Approx(3.0).margin(1e-4));
}

TEST_CASE("classification splits the spectrum at the tolerance", "[spectrum]") {
    auto [I1, K1, g1] = classify_spectrum({-1.0, 0.5, 2.0}, 0.01);
    REQUIRE(I1 == 1);
    REQUIRE(K1 == 0);
    REQUIRE(g1 == 0.5);

    auto [I2, K2, g2] = classify_spectrum({-1.0, -1e-9, 0.7}, 1e-6);
    REQUIRE(I2 == 1);
    REQUIRE(K2 == 1);
    REQUIRE(g2 == 0.7);

    REQUIRE_THROWS_AS(classify_spectrum({-1.0, -0.5}, 1e-6), NoPositiveGap);
    REQUIRE_THROWS_AS(classify_spectrum({0.5, -1.0}, 1e-6), PreconditionViolated);
}

TEST_CASE("eigenfields are orthonormal in the weighted product", "[spectrum]") {
    const auto prm = params_p2();
    Field V = interval_profile(200, prm);
    auto dec = solve_eigens(assemble_pencil(V, prm), 6, default_zero_tol(prm, *V.mesh));
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
            const double g = weighted_inner(dec.eigenfields[i], dec.eigenfields[j],
                                            V, prm.p + 1.0);
            REQUIRE(g == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
        }
}

TEST_CASE("mode projection recovers coefficients and preserves norms", "[spectrum]") {
    const auto prm = params_p2();
    Field V = interval_profile(200, prm);
    auto pen = assemble_pencil(V, prm);
    auto dec = solve_eigens(pen, 6, default_zero_tol(prm, *V.mesh));

    SECTION("an eigenfield projects to a coordinate vector") {
        for (int j = 0; j < 6; ++j) {
            auto y = project_modes(dec.eigenfields[j], dec, V, prm);
            for (int i = 0; i < 6; ++i)
                REQUIRE(y[i] == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
        }
    }

    SECTION("projection is linear") {
        Field h{V.mesh, 2.0 * dec.eigenfields[0].v + 3.0 * dec.eigenfields[1].v};
        auto y = project_modes(h, dec, V, prm);
        REQUIRE(y[0] == Catch::Approx(2.0).margin(1e-10));
        REQUIRE(y[1] == Catch::Approx(3.0).margin(1e-10));
        for (int i = 2; i < 6; ++i)
            REQUIRE(y[i] == Catch::Approx(0.0).margin(1e-10));
    }

    SECTION("full basis satisfies the Parseval identity") {
        auto full = solve_eigens(pen, 200, default_zero_tol(prm, *V.mesh));
        std::mt19937 rng(91);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Eigen::VectorXd hv(200);
        for (int i = 0; i < 200; ++i)
            hv[i] = uni(rng);
        Field h{V.mesh, hv};
        auto y = project_modes(h, full, V, prm);
        double sum = 0.0;
        for (double yi : y)
            sum += yi * yi;
        const double n2 = std::pow(norm_weighted(h, V, prm.p + 1.0), 2);
        REQUIRE(sum == Catch::Approx(n2).epsilon(1e-8));
    }

    SECTION("mismatched meshes are rejected") {
        auto other = build_mesh(Interval{0.0, 1.0}, 100);
        Field h = make_field(other, 1.0);
        REQUIRE_THROWS_AS(project_modes(h, dec, V, prm), MeshMismatch);
    }
}

TEST_CASE("ground state residual tracks profile quality", "[spectrum]") {
    const auto prm = params_p2();

    SECTION("a converged discrete profile gives a near zero residual") {
        auto mesh = build_mesh(Interval{0.0, 1.0}, 200);
        auto sol = solve_newton(mesh, prm, mountain_pass_init(mesh, prm), 1e-9);
        const double gsr = ground_state_residual(sol.V, prm);
        REQUIRE(gsr < 10.0 * std::max(sol.residual_norm, 1e-12));
        REQUIRE(gsr < 1e-8);
    }

    SECTION("a sampled continuum profile carries the discretization residual") {
        auto mesh = build_mesh(Interval{0.0, 1.0}, 400);
        auto tab = solve_radial_shooting(mesh, prm, 1e-10);
        const double gsr = ground_state_residual(tab.V, prm);
        REQUIRE(gsr > 1e-6);
        REQUIRE(gsr < 1e-1);
    }

    SECTION("residual scales linearly with a profile perturbation") {
        auto mesh = build_mesh(Interval{0.0, 1.0}, 200);
        auto sol = solve_newton(mesh, prm, mountain_pass_init(mesh, prm), 1e-9);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Eigen::VectorXd xi(sol.V.size());
        for (int i = 0; i < xi.size(); ++i)
            xi[i] = uni(rng);
        auto perturbed = [&](double a) {
            Field W{sol.V.mesh,
                    (sol.V.v.array() * (1.0 + a * xi.array())).matrix()};
            return ground_state_residual(W, prm);
        };
        const double g1 = perturbed(1e-3);
        const double g2 = perturbed(1e-2);
        const double slope = std::log10(g2 / g1);
        REQUIRE(slope > 0.9);
        REQUIRE(slope < 1.1);
    }
}

TEST_CASE("iterative path reproduces the dense spectrum", "[spectrum]") {
    const auto prm = params_p2();
    Field V = interval_profile(300, prm);
    auto pen = assemble_pencil(V, prm);
    const double tol = default_zero_tol(prm, *V.mesh);
    auto dense = solve_eigens(pen, 6, tol);
    auto lanczos = solve_eigens(pen, 6, tol, /*dense_crossover=*/0);

    for (int i = 0; i < 6; ++i) {
        const double scale = std::max(1.0, std::abs(dense.eigenvalues[i]));
        REQUIRE(std::abs(dense.eigenvalues[i] - lanczos.eigenvalues[i]) <
                1e-8 * scale);
        const double overlap = std::abs(weighted_inner(
            dense.eigenfields[i], lanczos.eigenfields[i], V, prm.p + 1.0));
        REQUIRE(overlap == Catch::Approx(1.0).margin(1e-6));
    }
    REQUIRE(lanczos.lambda_K == Catch::Approx(dense.lambda_K).margin(1e-8));
}

TEST_CASE("pencil assembly rejects degenerate mass entries", "[spectrum]") {
    const auto prm = params_p2();
    auto mesh = build_mesh(Interval{0.0, 1.0}, 32);
    Field V = make_field(mesh, 1.0);
    V.v[10] = 0.0;
    REQUIRE_THROWS_AS(assemble_pencil(V, prm), DegenerateMass);
}

TEST_CASE("eigensolve argument guards", "[spectrum]") {
    const auto prm = params_p2();
    auto mesh = build_mesh(Interval{0.0, 1.0}, 32);
    Field V = make_field(mesh, [](double x) { return x * (1.0 - x) + 0.1; });
    auto pen = assemble_pencil(V, prm);
    REQUIRE_THROWS_AS(solve_eigens(pen, 0, 1e-6), PreconditionViolated);
    REQUIRE_THROWS_AS(solve_eigens(pen, 33, 1e-6), PreconditionViolated);
    REQUIRE_THROWS_AS(solve_eigens(pen, 2, 0.0), PreconditionViolated);
}

TEST_CASE("default zero tolerance scales with resolution", "[spectrum]") {
    const auto prm = params_p2();
    auto coarse = build_mesh(Interval{0.0, 1.0}, 100);
    auto fine = build_mesh(Interval{0.0, 1.0}, 800);
    const double tc = default_zero_tol(prm, *coarse);
    const double tf = default_zero_tol(prm, *fine);
    REQUIRE(tc == Catch::Approx(2.0e-4).epsilon(1e-12));
    REQUIRE(tf >= 1e-6);
    REQUIRE(tf < tc);
}
