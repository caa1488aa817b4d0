#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "extlab/asymptotics/ratefit.hpp"
#include "extlab/core/domain.hpp"
#include "extlab/core/mesh.hpp"
#include "extlab/core/params.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/merlezaag/verify.hpp"
#include "extlab/pipeline/split.hpp"
#include "extlab/spectrum/eigen.hpp"
#include "extlab/stationary/newton.hpp"
#include "extlab/stationary/shooting.hpp"

namespace extlab {

struct DichotomyConfig {
    DomainSpec domain = Interval{0.0, 1.0};
    double m = 0.5;
    int resolution = 200;
    int num_modes = 8;
    double profile_tol = 1e-9;
    double zero_tol = 0.0;   // <= 0: use default_zero_tol
    int seed_mode = -1;      // eigenfield index; -1 picks the first stable mode
    double seed_amplitude = 1e-3;
    EvolutionConfig evolution{1e-3, 12.0, 10, 1e-14};
    // Mode verification window, as fractions of the run span.  The default
    // sits early: there every subspace still carries live dynamics, while
    // late in a run the stable norm is orders of magnitude below the
    // regenerated gauge content and the comparison would measure noise.
    std::pair<double, double> mz_window{0.125, 0.25};
    double eps_override = 0.0; // > 0 replaces the measured eps_hat
    DecayThresholds decay{0.05, 1e-14, 0.0};
    const Trajectory* injected = nullptr; // substitutes for the evolution stage
};

struct DichotomyReport {
    StationaryProfile profile;
    SpectralDecomposition dec;
    Trajectory traj;
    SubspaceSplit split;
    ModeSeries verified;    // series the mode verifier saw (conditioned X)
    double eps_used = 0.0;
    double s0 = 0.0;        // verified tail start in rescaled time
    MzVerdict mode_verdict = MzVerdict::Violation;
    DichotomyVerdict decay_verdict;
    bool agree = false;
    std::string outcome;    // "agree" or "verdict-mismatch: ..."
};

inline const char* mz_name(MzVerdict v) {
    switch (v) {
    case MzVerdict::NeutralDominates: return "neutral-dominates";
    case MzVerdict::StableDominates: return "stable-dominates";
    default: return "violation";
    }
}

inline const char* decay_name(DichotomyVerdict::Tag t) {
    switch (t) {
    case DichotomyVerdict::Tag::Exponential: return "exponential";
    case DichotomyVerdict::Tag::AlgebraicOrSlower: return "algebraic-or-slower";
    default: return "inconclusive";
    }
}

// The two finite-horizon proxies agree when they land on matching sides of
// the dichotomy: stable domination goes with exponential norm decay, neutral
// domination with algebraic-or-slower decay.
inline bool verdicts_agree(MzVerdict mz, const DichotomyVerdict& d) {
    if (mz == MzVerdict::StableDominates)
        return d.tag == DichotomyVerdict::Tag::Exponential;
    if (mz == MzVerdict::NeutralDominates)
        return d.tag == DichotomyVerdict::Tag::AlgebraicOrSlower;
    return false;
}

inline int domain_dimension(const DomainSpec& d) {
    if (std::holds_alternative<Interval>(d))
        return 1;
    if (const auto* ball = std::get_if<RadialBall>(&d))
        return ball->n;
    return 2;
}

// One full experiment: profile, spectrum, evolution (or an injected
// trajectory), subspace split, then both verdicts.  Disagreement between the
// verifiers is a reported outcome; everything else propagates as an error.
inline DichotomyReport dichotomy_experiment(const DichotomyConfig& cfg) {
    if (!(cfg.mz_window.first >= 0.0) ||
        !(cfg.mz_window.second > cfg.mz_window.first) ||
        !(cfg.mz_window.second <= 1.0))
        throw PreconditionViolated("mz window fractions must be ordered in [0,1]");
    const MediumParams prm = validate_params(cfg.m, domain_dimension(cfg.domain));
    auto mesh = build_mesh(cfg.domain, cfg.resolution);

    DichotomyReport rep;
    const bool radial = std::holds_alternative<Interval>(cfg.domain) ||
                        std::holds_alternative<RadialBall>(cfg.domain);
    const Field init = radial
                           ? solve_radial_shooting(mesh, prm, cfg.profile_tol).V
                           : mountain_pass_init(mesh, prm);
    rep.profile = solve_newton(mesh, prm, init, cfg.profile_tol);

    const Pencil pen = assemble_pencil(rep.profile.V, prm);
    const double ztol =
        cfg.zero_tol > 0.0 ? cfg.zero_tol : default_zero_tol(prm, *mesh);
    rep.dec = solve_eigens(pen, cfg.num_modes, ztol);

    if (cfg.injected) {
        rep.traj = *cfg.injected;
    } else {
        const int idx = cfg.seed_mode >= 0 ? cfg.seed_mode : rep.dec.I + rep.dec.K;
        if (idx >= static_cast<int>(rep.dec.eigenfields.size()))
            throw PreconditionViolated("seed mode index beyond computed modes");
        Field h0 = rep.dec.eigenfields[idx];
        h0.v *= cfg.seed_amplitude;
        rep.traj = evolve(h0, rep.profile.V, prm, cfg.evolution);
    }

    rep.split = split_trajectory(rep.traj, rep.dec, rep.profile.V, prm);

    const std::size_t ns = rep.split.times.size();
    const double t_front = rep.split.times.front();
    const double span = rep.split.times.back() - t_front;
    auto at_fraction = [&](double f) {
        std::size_t k = 0;
        while (k + 1 < ns && rep.split.times[k] < t_front + f * span)
            ++k;
        return k;
    };
    const std::size_t lo = at_fraction(cfg.mz_window.first);
    const std::size_t hi = at_fraction(cfg.mz_window.second);

    const std::vector<double> xc =
        condition_unstable(rep.split, rep.dec, lo, hi);
    for (std::size_t k = lo; k <= hi; ++k) {
        rep.verified.s.push_back(rep.split.series.s[k]);
        rep.verified.X.push_back(xc[k - lo]);
        rep.verified.Y.push_back(rep.split.series.Y[k]);
        rep.verified.Z.push_back(rep.split.series.Z[k]);
    }

    rep.s0 = rep.verified.s.front();
    rep.eps_used = cfg.eps_override > 0.0
                       ? cfg.eps_override
                       : measure_eps_hat(rep.traj, rep.profile.V, prm, lo, hi);
    rep.mode_verdict = check_conclusion_mz(rep.verified, rep.eps_used, rep.s0);
    rep.decay_verdict =
        classify_decay(rep.split.times, rep.split.transverse_norms, cfg.decay);

    rep.agree = verdicts_agree(rep.mode_verdict, rep.decay_verdict);
    rep.outcome = rep.agree
                      ? std::string("agree")
                      : std::string("verdict-mismatch: ") +
                            mz_name(rep.mode_verdict) + " vs " +
                            decay_name(rep.decay_verdict.tag);
    return rep;
}

} // namespace extlab
