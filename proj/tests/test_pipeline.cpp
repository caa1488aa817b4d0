#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "extlab/errors.hpp"
#include "extlab/pipeline/experiment.hpp"
#include "extlab/pipeline/split.hpp"

using namespace extlab;

namespace {

struct Lab {
    MediumParams prm;
    std::shared_ptr<const Mesh> mesh;
    Field V;
    SpectralDecomposition dec;
};

Lab make_lab(int res, int k, double zero_tol = 0.0, double tol = 1e-11) {
    Lab lab{validate_params(0.5, 1), build_mesh(Interval{0.0, 1.0}, res),
            Field{}, SpectralDecomposition{}};
    const Field init = solve_radial_shooting(lab.mesh, lab.prm, 1e-10).V;
    lab.V = solve_newton(lab.mesh, lab.prm, init, tol).V;
    const Pencil pen = assemble_pencil(lab.V, lab.prm);
    if (zero_tol <= 0.0)
        zero_tol = default_zero_tol(lab.prm, *lab.mesh);
    lab.dec = solve_eigens(pen, k, zero_tol);
    return lab;
}

// trajectory whose snapshot k is sum_i coeff_i(t_k) * phi_i
Trajectory plant(const Lab& lab,
                 const std::vector<std::pair<int, std::function<double(double)>>>&
                     modes,
                 double t0, double t1, double dt) {
    Trajectory traj;
    int k = 0;
    for (double t = t0; t <= t1 + 1e-9; t += dt, ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(lab.mesh->cells());
        for (const auto& [i, f] : modes)
            v += f(t) * lab.dec.eigenfields[i].v;
        traj.times.push_back(t);
        traj.snapshot_steps.push_back(k);
        traj.snapshots.push_back(Field{lab.mesh, std::move(v)});
    }
    return traj;
}

} // namespace

TEST_CASE("planted eigenmode trajectories project to their coefficients",
          "[pipeline]") {
    auto lab = make_lab(50, 8);
    REQUIRE(lab.dec.I == 1);
    REQUIRE(lab.dec.K == 0);
    const double lamK = lab.dec.lambda_K;

    auto tr = plant(lab, {{1, [&](double t) { return std::exp(-lamK * t); }}},
                    0.0, 2.0, 0.1);
    auto sp = split_trajectory(tr, lab.dec, lab.V, lab.prm);
    REQUIRE(sp.unstable_modes == std::vector<int>{0});
    REQUIRE(sp.neutral_modes.empty());
    REQUIRE(sp.stable_modes.size() == 7);
    CHECK(sp.lambda_half ==
          Catch::Approx(0.5 * std::min(-lab.dec.eigenvalues[0], lamK))
              .epsilon(1e-12));
    CHECK(sp.lambda_half == Catch::Approx(0.5).margin(1e-3));
    for (std::size_t k = 0; k < sp.times.size(); ++k) {
        CHECK(sp.series.X[k] <= 1e-12);
        CHECK(sp.series.Y[k] == 0.0);
        CHECK(sp.series.Z[k] ==
              Catch::Approx(std::exp(-lamK * sp.times[k])).margin(1e-10));
        CHECK(sp.series.s[k] ==
              Catch::Approx(sp.lambda_half * sp.times[k]).epsilon(1e-12));
    }

    auto tr2 = plant(lab,
                     {{0, [](double) { return 0.3; }},
                      {1, [](double) { return 0.7; }}},
                     0.0, 2.5, 0.5);
    auto sp2 = split_trajectory(tr2, lab.dec, lab.V, lab.prm);
    for (std::size_t k = 0; k < sp2.times.size(); ++k) {
        CHECK(sp2.series.X[k] == Catch::Approx(0.3).margin(1e-10));
        CHECK(sp2.series.Y[k] == 0.0);
        CHECK(sp2.series.Z[k] == Catch::Approx(0.7).margin(1e-10));
        CHECK(sp2.total_norms[k] ==
              Catch::Approx(std::hypot(0.3, 0.7)).margin(1e-10));
    }
}

TEST_CASE("full-basis projection satisfies the Bessel identity", "[pipeline]") {
    auto lab = make_lab(50, 50);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    Eigen::VectorXd hv(lab.mesh->cells());
    for (int i = 0; i < hv.size(); ++i)
        hv[i] = U(rng);
    const Field h{lab.mesh, hv};
    const auto y = project_modes(h, lab.dec, lab.V, lab.prm);
    double sum = 0.0;
    for (double c : y)
        sum += c * c;
    const double tot = norm_weighted(h, lab.V, lab.prm.p + 1.0);
    CHECK(std::abs(sum - tot * tot) < 1e-8);

    // truncated basis: plain Bessel inequality
    auto lab8 = make_lab(50, 8);
    const auto y8 = project_modes(h, lab8.dec, lab8.V, lab8.prm);
    double sum8 = 0.0;
    for (double c : y8)
        sum8 += c * c;
    CHECK(sum8 <= tot * tot + 1e-12);
}

TEST_CASE("split and eps measurement validation", "[pipeline]") {
    auto lab = make_lab(50, 8);
    auto tr = plant(lab, {{1, [](double) { return 0.5; }}}, 0.0, 2.0, 0.1);

    Trajectory single;
    single.times = {0.0};
    single.snapshot_steps = {0};
    single.snapshots = {tr.snapshots[0]};
    CHECK_THROWS_AS(split_trajectory(single, lab.dec, lab.V, lab.prm),
                    EmptyTrajectory);

    auto lab100 = make_lab(100, 8);
    CHECK_THROWS_AS(split_trajectory(tr, lab100.dec, lab100.V, lab.prm),
                    MeshMismatch);

    SpectralDecomposition hollow;
    CHECK_THROWS_AS(split_trajectory(tr, hollow, lab.V, lab.prm),
                    PreconditionViolated);
    CHECK_THROWS_AS(split_trajectory(tr, lab.dec, lab.V, lab.prm, 1.0),
                    PreconditionViolated);

    CHECK_THROWS_AS(measure_eps_hat(tr, lab.V, lab.prm, 0, 99),
                    PreconditionViolated);
    CHECK_THROWS_AS(measure_eps_hat(tr, lab.V, lab.prm, 5, 3),
                    PreconditionViolated);
    // constant-in-time snapshots have a vanishing time derivative
    CHECK(measure_eps_hat(tr, lab.V, lab.prm, 0, tr.snapshots.size() - 1) ==
          0.0);
}

TEST_CASE("conditioning removes planted gauge growth", "[pipeline]") {
    auto lab = make_lab(50, 8);
    const double A = 1e-6, B = 1e-5, lamK = lab.dec.lambda_K;
    auto tr = plant(lab,
                    {{0,
                      [&](double t) {
                          return A * std::exp(t) + B * std::exp(-2.0 * lamK * t);
                      }},
                     {1, [&](double t) { return 1e-3 * std::exp(-lamK * t); }}},
                    1.0, 3.0, 0.01);
    auto sp = split_trajectory(tr, lab.dec, lab.V, lab.prm);
    auto xc = condition_unstable(sp, lab.dec, 0, sp.times.size() - 1);
    REQUIRE(xc.size() == sp.times.size());
    CHECK(xc[0] == Catch::Approx(B * std::exp(-2.0 * lamK)).epsilon(0.02));
    std::vector<double> tt(sp.times.begin(), sp.times.begin() + 101);
    std::vector<double> xx(xc.begin(), xc.begin() + 101);
    auto fit = fit_exponential_rate(tt, xx, {1.0, 2.0});
    CHECK(fit.slope == Catch::Approx(2.0 * lamK).epsilon(0.05));

    // purely decaying unstable content is left untouched
    auto tr2 = plant(lab,
                     {{0, [&](double t) { return B * std::exp(-2.0 * lamK * t); }}},
                     1.0, 3.0, 0.01);
    auto sp2 = split_trajectory(tr2, lab.dec, lab.V, lab.prm);
    auto xc2 = condition_unstable(sp2, lab.dec, 0, sp2.times.size() - 1);
    for (std::size_t k = 0; k < xc2.size(); ++k)
        CHECK(xc2[k] == Catch::Approx(sp2.series.X[k]).epsilon(1e-12));

    CHECK_THROWS_AS(condition_unstable(sp, lab.dec, 0, 5), PreconditionViolated);
}

TEST_CASE("stable seeded run: both verdicts land on the stable side",
          "[pipeline]") {
    DichotomyConfig cfg;
    auto rep = dichotomy_experiment(cfg);

    CHECK(rep.agree);
    CHECK(rep.outcome == "agree");
    CHECK(rep.mode_verdict == MzVerdict::StableDominates);
    CHECK(rep.decay_verdict.tag == DichotomyVerdict::Tag::Exponential);
    CHECK(rep.decay_verdict.rate ==
          Catch::Approx(rep.dec.lambda_K).epsilon(0.05));
    CHECK(rep.eps_used > 0.0);
    CHECK(rep.eps_used < 0.01);

    // the verified window satisfies the hypotheses with the measured eps
    auto hyp = check_hypotheses_mz(rep.verified, rep.eps_used, rep.s0);
    CHECK(hyp.passed);

    // unstable gate on the verified tail, with margin
    double gate = 0.0;
    for (std::size_t k = 0; k < rep.verified.s.size(); ++k) {
        CHECK(rep.verified.Y[k] == 0.0); // no neutral modes on the interval
        const double den =
            2.0 * rep.eps_used * (rep.verified.Y[k] + rep.verified.Z[k]);
        REQUIRE(den > 0.0);
        gate = std::max(gate, rep.verified.X[k] / den);
    }
    CHECK(gate < 0.2);

    // conditioned unstable + neutral norms decay at rate >= 2 lambda; the
    // measured rate in fact sits at 2 lambda_K, the quadratic echo of the
    // stable decay
    std::size_t hi = 0;
    while (hi + 1 < rep.split.times.size() && rep.split.times[hi] < 1.5)
        ++hi;
    auto xc = condition_unstable(rep.split, rep.dec, 0, hi);
    std::vector<double> tt(rep.split.times.begin(),
                           rep.split.times.begin() + hi + 1);
    std::vector<double> cu(xc.size());
    for (std::size_t k = 0; k < xc.size(); ++k)
        cu[k] = xc[k] + rep.split.series.Y[k];
    auto fit = fit_exponential_rate(tt, cu, {0.02, 0.5});
    CHECK(fit.slope >= 2.0 * rep.split.lambda_half * 0.85);
    CHECK(fit.slope == Catch::Approx(2.0 * rep.dec.lambda_K).epsilon(0.1));
}

TEST_CASE("synthetic neutral injection agrees on the other branch",
          "[pipeline]") {
    DichotomyConfig cfg;
    cfg.zero_tol = 5.0; // relabels the first two modes as neutral
    auto lab = make_lab(cfg.resolution, cfg.num_modes, cfg.zero_tol, cfg.profile_tol);

    const double a = 0.01, b = 0.005;
    auto inj = plant(lab,
                     {{1, [&](double t) { return a / t; }},
                      {2,
                       [&](double t) {
                           return b * std::exp(-10.0 * (t - 1.0));
                       }}},
                     1.0, 80.0, 0.05);
    cfg.injected = &inj;
    cfg.eps_override = 5e-3;
    cfg.mz_window = {0.6, 1.0};
    auto rep = dichotomy_experiment(cfg);

    CHECK(rep.mode_verdict == MzVerdict::NeutralDominates);
    CHECK(rep.decay_verdict.tag == DichotomyVerdict::Tag::AlgebraicOrSlower);
    CHECK(rep.decay_verdict.exponent == Catch::Approx(1.0).epsilon(0.02));
    CHECK(rep.decay_verdict.min_t_value == Catch::Approx(a).epsilon(0.01));
    CHECK(rep.agree);
    CHECK(rep.split.lambda_half == Catch::Approx(5.0).margin(0.01));
}

TEST_CASE("mismatched trajectory mesh surfaces as MeshMismatch", "[pipeline]") {
    DichotomyConfig cfg;
    auto coarse = build_mesh(cfg.domain, 100);
    Trajectory bad;
    for (int j = 0; j < 12; ++j) {
        bad.times.push_back(0.5 * j);
        bad.snapshot_steps.push_back(j);
        bad.snapshots.push_back(Field{coarse, Eigen::VectorXd::Zero(100)});
    }
    cfg.injected = &bad;
    CHECK_THROWS_AS(dichotomy_experiment(cfg), MeshMismatch);
}

TEST_CASE("experiment config validation", "[pipeline]") {
    DichotomyConfig cfg;
    cfg.resolution = 50;
    cfg.mz_window = {0.5, 0.2};
    CHECK_THROWS_AS(dichotomy_experiment(cfg), PreconditionViolated);
    cfg.mz_window = {0.125, 0.25};
    cfg.seed_mode = 99;
    CHECK_THROWS_AS(dichotomy_experiment(cfg), PreconditionViolated);
}

TEST_CASE("verdict agreement mapping", "[pipeline]") {
    DichotomyVerdict expo;
    expo.tag = DichotomyVerdict::Tag::Exponential;
    DichotomyVerdict alg;
    alg.tag = DichotomyVerdict::Tag::AlgebraicOrSlower;
    DichotomyVerdict inc;

    CHECK(verdicts_agree(MzVerdict::StableDominates, expo));
    CHECK(verdicts_agree(MzVerdict::NeutralDominates, alg));
    CHECK_FALSE(verdicts_agree(MzVerdict::StableDominates, alg));
    CHECK_FALSE(verdicts_agree(MzVerdict::NeutralDominates, expo));
    CHECK_FALSE(verdicts_agree(MzVerdict::Violation, expo));
    CHECK_FALSE(verdicts_agree(MzVerdict::StableDominates, inc));

    CHECK(std::string(mz_name(MzVerdict::StableDominates)) ==
          "stable-dominates");
    CHECK(std::string(decay_name(DichotomyVerdict::Tag::Exponential)) ==
          "exponential");
}

TEST_CASE("verdict mismatch is a reported outcome, not an exception",
          "[pipeline]") {
    // a slowly decaying neutral exponential: the mode structure says the
    // neutral part dominates, while the norm classifier correctly reads the
    // series as exponential; the disagreement must come back as a report
    DichotomyConfig cfg;
    cfg.zero_tol = 5.0;
    auto lab = make_lab(cfg.resolution, cfg.num_modes, cfg.zero_tol, cfg.profile_tol);
    const double c = 5e-3, b = 5e-3;
    auto inj = plant(lab,
                     {{1, [&](double t) { return c * std::exp(-0.04 * t); }},
                      {2,
                       [&](double t) {
                           return b * std::exp(-10.0 * (t - 1.0));
                       }}},
                     1.0, 80.0, 0.05);
    cfg.injected = &inj;
    cfg.eps_override = 9e-3;
    cfg.mz_window = {0.6, 1.0};
    auto rep = dichotomy_experiment(cfg);

    CHECK(rep.mode_verdict == MzVerdict::NeutralDominates);
    CHECK(rep.decay_verdict.tag == DichotomyVerdict::Tag::Exponential);
    CHECK(rep.decay_verdict.rate == Catch::Approx(0.04).epsilon(0.02));
    CHECK_FALSE(rep.agree);
    CHECK(rep.outcome ==
          "verdict-mismatch: neutral-dominates vs exponential");
}
