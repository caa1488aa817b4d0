#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "extlab/errors.hpp"

namespace extlab {

// Sampled (unstable, neutral, stable) norm triple over an ascending grid.
struct ModeSeries {
    std::vector<double> s;
    std::vector<double> X, Y, Z;

    std::size_t size() const { return s.size(); }
};

// Coupled three-component ODE system
//   X' =  rate_x X - eps cx (Y + Z)
//   Y' = -eps cy (X + Y + Z) + eps qy X Z / (X + Y + Z)
//   Z' = -rate_z Z + eps cz (X + Y)
// with all components clamped at zero.  The coefficient ranges accepted by
// validate_mode_spec keep the generated flow inside the hypothesis class of
// the verifiers: rate_x, rate_z >= 1 make the linear parts at least unit
// strength, cx, cz <= 1 and cy + qy/4 <= 1 bound the couplings by eps times
// the component sums (the bilinear term obeys XZ <= (X+Y+Z)^2/4).
struct ModeSystemSpec {
    double rate_x = 1.0; // linear growth rate of the unstable component
    double rate_z = 1.0; // linear decay rate of the stable component
    double eps = 5e-3;   // coupling strength
    double cx = 1.0;     // coupling into the X equation
    double cy = 0.5;     // coupling into the Y equation
    double cz = 1.0;     // coupling into the Z equation
    double qy = 0.0;     // bilinear X Z feed into the Y equation
    double x0 = 0.0;
    double y0 = 1e-3;
    double z0 = 1e-3;
};

inline void validate_mode_spec(const ModeSystemSpec& spec) {
    if (!(spec.rate_x >= 1.0) || !(spec.rate_z >= 1.0))
        throw PreconditionViolated("linear rates must be at least 1");
    if (!(spec.eps >= 0.0) || !(spec.eps < 0.01))
        throw PreconditionViolated("coupling eps must lie in [0, 1/100)");
    if (!(spec.cx >= 0.0) || spec.cx > 1.0 || !(spec.cz >= 0.0) || spec.cz > 1.0)
        throw PreconditionViolated("cx and cz must lie in [0, 1]");
    if (!(spec.cy >= 0.0) || !(spec.qy >= 0.0) || spec.cy + 0.25 * spec.qy > 1.0)
        throw PreconditionViolated("need cy, qy >= 0 with cy + qy/4 <= 1");
    if (!(spec.x0 >= 0.0) || !(spec.y0 >= 0.0) || !(spec.z0 >= 0.0))
        throw PreconditionViolated("initial values must be non-negative");
}

namespace detail {

struct ModeState {
    double x, y, z;
};

inline ModeState mode_rhs(const ModeSystemSpec& spec, const ModeState& u) {
    const double sum = u.x + u.y + u.z;
    const double bilinear =
        sum > 0.0 ? spec.qy * spec.eps * u.x * u.z / sum : 0.0;
    return {spec.rate_x * u.x - spec.eps * spec.cx * (u.y + u.z),
            -spec.eps * spec.cy * sum + bilinear,
            -spec.rate_z * u.z + spec.eps * spec.cz * (u.x + u.y)};
}

} // namespace detail

// Classic RK4 with a post-step clamp at zero; the clamp realizes the
// non-negativity the verifiers assume (the components stand for norms).
inline ModeSeries simulate_mode_system(const ModeSystemSpec& spec,
                                       std::pair<double, double> s_span,
                                       double ds) {
    validate_mode_spec(spec);
    if (!(ds > 0.0) || !(s_span.second > s_span.first) ||
        !std::isfinite(s_span.first) || !std::isfinite(s_span.second))
        throw PreconditionViolated("need ds > 0 and a finite ascending span");

    const auto nsteps =
        static_cast<std::size_t>(std::llround((s_span.second - s_span.first) / ds));
    detail::ModeState u{spec.x0, spec.y0, spec.z0};

    ModeSeries series;
    series.s.reserve(nsteps + 1);
    series.X.reserve(nsteps + 1);
    series.Y.reserve(nsteps + 1);
    series.Z.reserve(nsteps + 1);
    auto record = [&](double s) {
        series.s.push_back(s);
        series.X.push_back(u.x);
        series.Y.push_back(u.y);
        series.Z.push_back(u.z);
    };
    record(s_span.first);

    for (std::size_t k = 0; k < nsteps; ++k) {
        auto k1 = detail::mode_rhs(spec, u);
        auto k2 = detail::mode_rhs(spec, {u.x + 0.5 * ds * k1.x,
                                          u.y + 0.5 * ds * k1.y,
                                          u.z + 0.5 * ds * k1.z});
        auto k3 = detail::mode_rhs(spec, {u.x + 0.5 * ds * k2.x,
                                          u.y + 0.5 * ds * k2.y,
                                          u.z + 0.5 * ds * k2.z});
        auto k4 = detail::mode_rhs(
            spec, {u.x + ds * k3.x, u.y + ds * k3.y, u.z + ds * k3.z});
        u.x += ds / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        u.y += ds / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        u.z += ds / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
        u.x = std::max(u.x, 0.0);
        u.y = std::max(u.y, 0.0);
        u.z = std::max(u.z, 0.0);
        if (u.x > 1e12 || u.y > 1e12 || u.z > 1e12)
            throw BlowUp("mode system exceeded 1e12");
        record(s_span.first + ds * static_cast<double>(k + 1));
    }
    return series;
}

} // namespace extlab
