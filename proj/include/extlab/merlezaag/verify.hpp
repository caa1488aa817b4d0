#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "extlab/errors.hpp"
#include "extlab/merlezaag/modesystem.hpp"

namespace extlab {

namespace detail {

inline void require_series(const ModeSeries& series) {
    const std::size_t n = series.size();
    if (n < 5 || series.X.size() != n || series.Y.size() != n ||
        series.Z.size() != n)
        throw PreconditionViolated("need at least 5 aligned samples");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(series.X[k] >= 0.0) || !(series.Y[k] >= 0.0) ||
            !(series.Z[k] >= 0.0))
            throw PreconditionViolated("components must be non-negative");
        if (k > 0 && !(series.s[k] > series.s[k - 1]))
            throw PreconditionViolated("grid must be strictly ascending");
    }
}

// Largest second difference over the tail, across all three components; the
// verifier grants twice this value as slack on every derivative inequality.
// On smooth series sampled uniformly the slack shrinks at second order.
inline double derivative_slack(const ModeSeries& series, std::size_t lo,
                               std::size_t hi) {
    double worst = 0.0;
    for (const auto* f : {&series.X, &series.Y, &series.Z})
        for (std::size_t k = std::max(lo, std::size_t{1}); k + 1 <= hi; ++k)
            worst = std::max(worst, std::abs((*f)[k + 1] - 2.0 * (*f)[k] +
                                             (*f)[k - 1]));
    return 2.0 * worst;
}

inline double central(const std::vector<double>& f,
                      const std::vector<double>& s, std::size_t k) {
    return (f[k + 1] - f[k - 1]) / (s[k + 1] - s[k - 1]);
}

// first tail index with s >= s0; throws if s0 falls outside the grid
inline std::size_t tail_start(const ModeSeries& series, double s0) {
    if (s0 < series.s.front() || s0 > series.s.back())
        throw PreconditionViolated("s0 must lie within the sampled grid");
    std::size_t lo = 0;
    while (series.s[lo] < s0)
        ++lo;
    return lo;
}

} // namespace detail

struct MzHypothesesReport {
    bool passed = true;
    double slack = 0.0;        // derivative tolerance actually granted
    int first_violation = -1;  // sample index of the first failure
    std::string log;
};

// Discrete check of the three coupled differential inequalities
//   X' - X >= -eps (Y + Z),  |Y'| <= eps (X + Y + Z),  Z' + Z <= eps (X + Y)
// on the tail s >= s0, with central-difference derivatives and a slack of
// twice the largest second difference standing in for "almost everywhere".
inline MzHypothesesReport check_hypotheses_mz(const ModeSeries& series,
                                              double eps, double s0) {
    detail::require_series(series);
    if (!(eps > 0.0) || !(eps < 0.01))
        throw PreconditionViolated("eps must lie in (0, 1/100)");
    const std::size_t lo = detail::tail_start(series, s0);
    const std::size_t hi = series.size() - 1;
    if (hi - std::max(lo, std::size_t{1}) < 3)
        throw PreconditionViolated("tail needs at least 3 interior samples");

    MzHypothesesReport rep;
    rep.slack = detail::derivative_slack(series, lo, hi);
    double scale = 0.0;
    for (std::size_t k = lo; k <= hi; ++k)
        scale = std::max(scale, series.X[k] + series.Y[k] + series.Z[k]);
    if (rep.slack > 0.1 * scale)
        throw GridTooCoarse("derivative slack exceeds 10% of the series scale");

    auto fail = [&](std::size_t k, const char* which, double lhs, double rhs) {
        rep.passed = false;
        rep.first_violation = static_cast<int>(k);
        std::ostringstream os;
        os << which << " violated at s = " << series.s[k] << ": " << lhs
           << " vs " << rhs;
        rep.log = os.str();
    };
    for (std::size_t k = std::max(lo, std::size_t{1}); k < hi; ++k) {
        const double x = series.X[k], y = series.Y[k], z = series.Z[k];
        const double dx = detail::central(series.X, series.s, k);
        const double dy = detail::central(series.Y, series.s, k);
        const double dz = detail::central(series.Z, series.s, k);
        if (dx - x < -eps * (y + z) - rep.slack) {
            fail(k, "dX/ds - X >= -eps(Y+Z)", dx - x, -eps * (y + z));
            return rep;
        }
        if (std::abs(dy) > eps * (x + y + z) + rep.slack) {
            fail(k, "|dY/ds| <= eps(X+Y+Z)", std::abs(dy), eps * (x + y + z));
            return rep;
        }
        if (dz + z > eps * (x + y) + rep.slack) {
            fail(k, "dZ/ds + Z <= eps(X+Y)", dz + z, eps * (x + y));
            return rep;
        }
    }
    return rep;
}

enum class MzVerdict { NeutralDominates, StableDominates, Violation };

// Dichotomy verdict for a hypothesis-conforming decaying series: either the
// neutral component dominates, with (X+Z)/Y falling below 0.1 over the tail
// (finite-horizon proxy for X+Z = o(Y)), or the stable one does, with
// X + Y <= 100 eps Z pointwise.  The bound X <= 2 eps (Y+Z) is a structural
// consequence checked first: any series violating it is flagged immediately,
// before the hypotheses are consulted.
inline MzVerdict check_conclusion_mz(const ModeSeries& series, double eps,
                                     double s0) {
    detail::require_series(series);
    if (!(eps > 0.0) || !(eps < 0.01))
        throw PreconditionViolated("eps must lie in (0, 1/100)");
    const std::size_t lo = detail::tail_start(series, s0);
    const std::size_t hi = series.size() - 1;

    double scale = 0.0;
    for (std::size_t k = lo; k <= hi; ++k)
        scale = std::max(scale, series.X[k] + series.Y[k] + series.Z[k]);

    for (std::size_t k = lo; k <= hi; ++k)
        if (series.X[k] >
            2.0 * eps * (series.Y[k] + series.Z[k]) + 1e-14 * scale)
            return MzVerdict::Violation;

    auto hyp = check_hypotheses_mz(series, eps, s0);
    if (!hyp.passed)
        throw HypothesesFailed(hyp.log);

    // decay proxy: the total must be non-increasing over the tail
    for (std::size_t k = lo; k < hi; ++k) {
        const double a = series.X[k] + series.Y[k] + series.Z[k];
        const double b = series.X[k + 1] + series.Y[k + 1] + series.Z[k + 1];
        if (b > a + 1e-12 * scale)
            throw HypothesesFailed("series total is not decaying on the tail");
    }

    bool neutral_ok = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k <= hi; ++k) {
        if (!(series.Y[k] > 0.0)) {
            neutral_ok = false;
            break;
        }
        const double ratio = (series.X[k] + series.Z[k]) / series.Y[k];
        if (ratio > prev * (1.0 + 1e-12) + 1e-15) {
            neutral_ok = false;
            break;
        }
        prev = ratio;
    }
    if (neutral_ok && prev < 0.1)
        return MzVerdict::NeutralDominates;

    bool stable_ok = true;
    for (std::size_t k = lo; k <= hi; ++k)
        if (series.X[k] + series.Y[k] >
            100.0 * eps * series.Z[k] + 1e-14 * scale) {
            stable_ok = false;
            break;
        }
    if (stable_ok)
        return MzVerdict::StableDominates;
    return MzVerdict::Violation;
}

struct ChoiSunReport {
    bool passed = false;
    double margin = 0.0;     // min over [-L/2, L/2] of bound minus X+Z
    double slack = 0.0;      // derivative tolerance granted to the hypotheses
    double sigma_gate = 0.0; // the concrete sigma_0 stand-in Lambda/16
    double half_span = 0.0;  // L recovered from the grid
};

// Two-sided variant: on a window [-L, L] with 0 < X+Y+Z < eta, linear rates
// Lambda and coupling sigma <= Lambda/16, the conclusion
//   X + Z <= (8 sigma / Lambda) Y + 4 eta e^{-Lambda L / 4}
// must hold on the inner half window.  Returns the minimal margin.
inline ChoiSunReport check_choi_sun(const ModeSeries& series, double sigma,
                                    double lambda, double eta) {
    detail::require_series(series);
    if (!(lambda > 0.0) || !(eta > 0.0) || !(sigma >= 0.0))
        throw PreconditionViolated("need lambda > 0, eta > 0, sigma >= 0");
    ChoiSunReport rep;
    rep.sigma_gate = lambda / 16.0;
    if (sigma > rep.sigma_gate)
        throw PreconditionViolated("sigma exceeds the Lambda/16 gate");
    if (!(series.s.front() < 0.0) || !(series.s.back() > 0.0))
        throw PreconditionViolated("window must straddle s = 0");
    rep.half_span = std::min(-series.s.front(), series.s.back());

    const std::size_t n = series.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double total = series.X[k] + series.Y[k] + series.Z[k];
        if (!(total > 0.0) || !(total < eta))
            throw EtaBoundViolated("need 0 < X+Y+Z < eta on the window");
    }

    rep.slack = detail::derivative_slack(series, 0, n - 1);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double x = series.X[k], y = series.Y[k], z = series.Z[k];
        const double dx = detail::central(series.X, series.s, k);
        const double dy = detail::central(series.Y, series.s, k);
        const double dz = detail::central(series.Z, series.s, k);
        if (dx < lambda * x - sigma * (y + z) - rep.slack)
            throw HypothesesFailed("dX/ds >= Lambda X - sigma(Y+Z) fails");
        if (std::abs(dy) > sigma * (x + y + z) + rep.slack)
            throw HypothesesFailed("|dY/ds| <= sigma(X+Y+Z) fails");
        if (dz > -lambda * z + sigma * (x + y) + rep.slack)
            throw HypothesesFailed("dZ/ds <= -Lambda Z + sigma(X+Y) fails");
    }

    const double tail_term = 4.0 * eta * std::exp(-lambda * rep.half_span / 4.0);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(series.s[k]) > 0.5 * rep.half_span)
            continue;
        const double bound =
            (8.0 * sigma / lambda) * series.Y[k] + tail_term;
        margin = std::min(margin, bound - series.X[k] - series.Z[k]);
    }
    rep.margin = margin;
    rep.passed = margin >= 0.0;
    return rep;
}

} // namespace extlab
