#pragma once

#include <cmath>

#include "extlab/core/field.hpp"
#include "extlab/core/params.hpp"
#include "extlab/errors.hpp"

namespace extlab {

// Bidirectional change of variables around the extinction time T:
//   w(x,tau) = ((1-m)(T-tau))^{1/(1-m)} v(x,t)^{1/m},
//   t = m/(1-m) ln(T/(T-tau)).
struct RescaleMaps {
    MediumParams prm;
    double T;

    double amplitude(double tau) const {
        check_tau(tau);
        return std::pow((1.0 - prm.m) * (T - tau), 1.0 / (1.0 - prm.m));
    }

    double to_rescaled_time(double tau) const {
        check_tau(tau);
        return prm.m / (1.0 - prm.m) * std::log(T / (T - tau));
    }

    double to_original_time(double t) const {
        if (t < 0.0)
            throw PreconditionViolated("rescaled time must be non-negative");
        return T * (1.0 - std::exp(-t * (1.0 - prm.m) / prm.m));
    }

    Field to_rescaled(const Field& w, double tau) const {
        if ((w.v.array() < 0.0).any())
            throw PreconditionViolated("original data must be non-negative");
        const double c = amplitude(tau);
        return Field{w.mesh, (w.v.array() / c).pow(prm.m).matrix()};
    }

    Field to_original(const Field& v, double t) const {
        if ((v.v.array() < 0.0).any())
            throw PreconditionViolated("rescaled data must be non-negative");
        const double c = amplitude(to_original_time(t));
        return Field{v.mesh, c * v.v.array().pow(prm.p).matrix()};
    }

  private:
    void check_tau(double tau) const {
        if (tau < 0.0)
            throw PreconditionViolated("time must be non-negative");
        if (tau >= T)
            throw BeyondExtinction("time at or past extinction");
    }
};

inline RescaleMaps rescale_maps(const MediumParams& prm, double T) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw PreconditionViolated("extinction time must be positive and finite");
    return RescaleMaps{prm, T};
}

} // namespace extlab
