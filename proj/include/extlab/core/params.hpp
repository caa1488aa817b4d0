#pragma once

#include <cmath>

#include "extlab/errors.hpp"

namespace extlab {

// Fast-diffusion exponent bundle.  m is the diffusion exponent, p = 1/m its
// reciprocal, and m_crit = (n-2)/(n+2) the subcriticality threshold below
// which positive stationary profiles need not exist.
struct MediumParams {
    double m;
    double p;
    int n;
    double m_crit;
};

inline MediumParams validate_params(double m, int n) {
    if (n != 1 && n != 2)
        throw UnsupportedDimension("spatial dimension must be 1 or 2");
    if (!std::isfinite(m))
        throw PreconditionViolated("m must be finite");
    const double m_crit = static_cast<double>(n - 2) / static_cast<double>(n + 2);
    if (m <= m_crit)
        throw SubcriticalityViolated("m must exceed (n-2)/(n+2)");
    if (m >= 1.0)
        throw NotFastDiffusion("m must be below 1");
    if (m <= 0.0)
        throw NonPositive("m must be positive");
    return MediumParams{m, 1.0 / m, n, m_crit};
}

} // namespace extlab
