#pragma once

#include <cmath>
#include <numbers>
#include <variant>

#include "extlab/errors.hpp"

namespace extlab {

struct Interval {
    double a, b;
};
struct RadialBall {
    double R;
    int n; // ambient dimension of the ball (1 or 2)
};
struct Rectangle {
    double Lx, Ly;
};
struct Annulus {
    double r0, r1;
};

using DomainSpec = std::variant<Interval, RadialBall, Rectangle, Annulus>;

inline void validate_domain(const DomainSpec& d) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                if (!(s.a < s.b))
                    throw PreconditionViolated("interval needs a < b");
            } else if constexpr (std::is_same_v<T, RadialBall>) {
                if (!(s.R > 0.0))
                    throw PreconditionViolated("ball radius must be positive");
                if (s.n != 1 && s.n != 2)
                    throw UnsupportedDimension("ball dimension must be 1 or 2");
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                if (!(s.Lx > 0.0) || !(s.Ly > 0.0))
                    throw PreconditionViolated("rectangle sides must be positive");
            } else {
                if (!(0.0 < s.r0 && s.r0 < s.r1))
                    throw PreconditionViolated("annulus needs 0 < r0 < r1");
            }
        },
        d);
}

inline double domain_measure(const DomainSpec& d) {
    using std::numbers::pi;
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>)
                return s.b - s.a;
            else if constexpr (std::is_same_v<T, RadialBall>)
                return s.n == 1 ? 2.0 * s.R : pi * s.R * s.R;
            else if constexpr (std::is_same_v<T, Rectangle>)
                return s.Lx * s.Ly;
            else
                return pi * (s.r1 * s.r1 - s.r0 * s.r0);
        },
        d);
}

inline double inradius(const DomainSpec& d) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>)
                return 0.5 * (s.b - s.a);
            else if constexpr (std::is_same_v<T, RadialBall>)
                return s.R;
            else if constexpr (std::is_same_v<T, Rectangle>)
                return 0.5 * std::min(s.Lx, s.Ly);
            else
                return 0.5 * (s.r1 - s.r0);
        },
        d);
}

inline bool same_domain(const DomainSpec& a, const DomainSpec& b) {
    if (a.index() != b.index())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b);
            if constexpr (std::is_same_v<T, Interval>)
                return x.a == y.a && x.b == y.b;
            else if constexpr (std::is_same_v<T, RadialBall>)
                return x.R == y.R && x.n == y.n;
            else if constexpr (std::is_same_v<T, Rectangle>)
                return x.Lx == y.Lx && x.Ly == y.Ly;
            else
                return x.r0 == y.r0 && x.r1 == y.r1;
        },
        a);
}

} // namespace extlab
