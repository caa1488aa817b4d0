#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "extlab/errors.hpp"

namespace extlab {

struct RateFit {
    std::pair<double, double> window{0.0, 0.0};
    double slope = 0.0; // decay rate, positive = decay
    double intercept = 0.0;
    double rms_residual = 0.0;
    double drift = 0.0; // |slope(first half) - slope(second half)|
};

namespace detail {

// centered least squares of y against x; returns (slope, intercept, rms)
inline std::tuple<double, double, double> line_fit(const std::vector<double>& x,
                                                   const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    return {slope, intercept, std::sqrt(ss / n)};
}

// rate fit of log(values) against abscissa; slope sign flipped so that
// positive means decay
inline RateFit decay_fit(const std::vector<double>& x, const std::vector<double>& logv) {
    auto [s, a, rms] = line_fit(x, logv);
    RateFit fit;
    fit.window = {x.front(), x.back()};
    fit.slope = -s;
    fit.intercept = a;
    fit.rms_residual = rms;

    const double mid = 0.5 * (x.front() + x.back());
    std::vector<double> xl, yl, xr, yr;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= mid) {
            xl.push_back(x[i]);
            yl.push_back(logv[i]);
        } else {
            xr.push_back(x[i]);
            yr.push_back(logv[i]);
        }
    }
    if (xl.size() < 5 || xr.size() < 5)
        throw WindowTooShort("half-windows need at least 5 samples each");
    auto [sl, al, rl] = line_fit(xl, yl);
    auto [sr, ar, rr] = line_fit(xr, yr);
    (void)al;
    (void)ar;
    (void)rl;
    (void)rr;
    fit.drift = std::abs(sl - sr);
    return fit;
}

} // namespace detail

inline RateFit fit_exponential_rate(const std::vector<double>& times,
                                    const std::vector<double>& values,
                                    std::pair<double, double> window) {
    if (!(window.first < window.second))
        throw PreconditionViolated("window must be ordered");
    std::vector<double> x, logv;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.first || times[i] > window.second)
            continue;
        if (!(values[i] > 0.0))
            throw NonPositiveValues("values must be positive on the fit window");
        x.push_back(times[i]);
        logv.push_back(std::log(values[i]));
    }
    if (x.size() < 20)
        throw WindowTooShort("need at least 20 samples in the window");
    return detail::decay_fit(x, logv);
}

struct DecayThresholds {
    double drift_fraction = 0.05; // a fit qualifies if drift <= fraction*|slope|
    double floor = 0.0;           // solver floor; samples below 100*floor drop out
    double t_value_min = 0.0;     // required lower bound on t*value for algebraic
};

struct DichotomyVerdict {
    enum class Tag { Exponential, AlgebraicOrSlower, Inconclusive };
    Tag tag = Tag::Inconclusive;
    double rate = std::numeric_limits<double>::quiet_NaN();     // exponential
    double exponent = std::numeric_limits<double>::quiet_NaN(); // algebraic
    RateFit exp_fit;
    RateFit alg_fit;
    bool alg_fit_valid = false;
    double min_t_value = std::numeric_limits<double>::quiet_NaN();
    bool truncated = false; // floor truncation was applied
    std::pair<double, double> window_used{0.0, 0.0};
};

// Dichotomy classifier: exponential fit (log value vs t) against algebraic fit
// (log value vs log t) on the late window = last 40% of the samples that sit
// above 100x the declared solver floor.
inline DichotomyVerdict classify_decay(const std::vector<double>& times,
                                       const std::vector<double>& values,
                                       const DecayThresholds& thr = {}) {
    if (times.size() != values.size() || times.size() < 2)
        throw PreconditionViolated("need matching nonempty series");
    if (times.back() - times.front() < 10.0)
        throw WindowTooShort("classification needs a span of at least 10 time units");

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(values[i] > 0.0))
            throw NonPositiveValues("series must be positive");
        if (thr.floor > 0.0 && values[i] < 100.0 * thr.floor)
            continue;
        eligible.push_back(i);
    }

    DichotomyVerdict verdict;
    verdict.truncated = eligible.size() < times.size();
    if (eligible.size() < 20)
        throw WindowTooShort("too few samples above the floor");

    const std::size_t start = eligible.size() - eligible.size() * 2 / 5;
    std::vector<double> t, v;
    for (std::size_t k = (start >= eligible.size() ? 0 : start); k < eligible.size(); ++k) {
        t.push_back(times[eligible[k]]);
        v.push_back(values[eligible[k]]);
    }
    if (t.size() < 20)
        throw WindowTooShort("late window too small");
    verdict.window_used = {t.front(), t.back()};

    std::vector<double> logv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        logv[i] = std::log(v[i]);
    verdict.exp_fit = detail::decay_fit(t, logv);

    bool alg_ok = false;
    std::vector<double> logt, logv2;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0.0)
            continue;
        logt.push_back(std::log(t[i]));
        logv2.push_back(logv[i]);
    }
    if (logt.size() >= 20) {
        try {
            verdict.alg_fit = detail::decay_fit(logt, logv2);
            verdict.alg_fit_valid = true;
        } catch (const WindowTooShort&) {
        }
    }

    const bool exp_q = verdict.exp_fit.slope > 0.0 &&
                       verdict.exp_fit.drift <=
                           thr.drift_fraction * std::abs(verdict.exp_fit.slope);
    bool alg_q = verdict.alg_fit_valid && verdict.alg_fit.slope > 0.0 &&
                 verdict.alg_fit.drift <=
                     thr.drift_fraction * std::abs(verdict.alg_fit.slope);
    if (alg_q) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] > 0.0)
                mn = std::min(mn, t[i] * v[i]);
        verdict.min_t_value = mn;
        if (thr.t_value_min > 0.0 && mn < thr.t_value_min)
            alg_q = false; // not bounded below as the algebraic form requires
        alg_ok = alg_q;
    }

    if (exp_q && (!alg_ok || verdict.exp_fit.rms_residual <=
                                 verdict.alg_fit.rms_residual)) {
        verdict.tag = DichotomyVerdict::Tag::Exponential;
        verdict.rate = verdict.exp_fit.slope;
    } else if (alg_ok) {
        verdict.tag = DichotomyVerdict::Tag::AlgebraicOrSlower;
        verdict.exponent = verdict.alg_fit.slope;
    } else {
        verdict.tag = DichotomyVerdict::Tag::Inconclusive;
    }
    return verdict;
}

} // namespace extlab
