#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchlv/coeffs.hpp"

namespace patchlv {

/// Coefficients of the two-patch competition model with dispersal.
/// Patch 1 hosts densities (x1, y1), patch 2 hosts (x2, y2):
///
///   x1' = x1 (r1 - a11 x1 - a12 y1) + D1 (x2 - x1)
///   y1' = y1 (r2 - a21 x1 - a22 y1) + D2 (y2 - y1)
///   x2' = x2 (s1 - b11 x2 - b12 y2) + D1 (x1 - x2)
///   y2' = y2 (s2 - b21 x2 - b22 y2) + D2 (y1 - y2)
///
/// r*, s* are intrinsic growth rates, a*/b* intra- and inter-species
/// competition strengths per patch, D1/D2 species-wise dispersal rates.
struct SystemParams {
    QuasiPeriodicCoefficient r1, r2, s1, s2;
    QuasiPeriodicCoefficient a11, a12, a21, a22;
    QuasiPeriodicCoefficient b11, b12, b21, b22;
    QuasiPeriodicCoefficient D1, D2;
};

/// Component order everywhere (vectors, CSV columns): x1, y1, x2, y2.
struct State {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
};

/// Two copies of the system sharing the same coefficients; used to compare
/// solutions started from different initial densities.
struct PairedState {
    State primary;
    State shadow;
};

using Vec4 = std::array<double, 4>;
using Vec8 = std::array<double, 8>;

inline Vec4 to_array(const State& z) { return {z.x1, z.y1, z.x2, z.y2}; }
inline State state_from_array(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

inline Vec8 to_array(const PairedState& pz) {
    return {pz.primary.x1, pz.primary.y1, pz.primary.x2, pz.primary.y2,
            pz.shadow.x1,  pz.shadow.y1,  pz.shadow.x2,  pz.shadow.y2};
}
inline PairedState paired_from_array(const Vec8& v) {
    return {{v[0], v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7]}};
}

inline bool is_strictly_positive(const State& z) {
    return z.x1 > 0.0 && z.y1 > 0.0 && z.x2 > 0.0 && z.y2 > 0.0 && std::isfinite(z.x1) &&
           std::isfinite(z.y1) && std::isfinite(z.x2) && std::isfinite(z.y2);
}

/// Runs every coefficient through coefficient_violation. Returns one message
/// per rejected coefficient, prefixed with its name; empty means admissible.
inline std::vector<std::string> validate_params(const SystemParams& p) {
    std::vector<std::string> issues;
    const std::pair<const char*, const QuasiPeriodicCoefficient*> named[] = {
        {"r1", &p.r1},   {"r2", &p.r2},   {"s1", &p.s1},   {"s2", &p.s2},
        {"a11", &p.a11}, {"a12", &p.a12}, {"a21", &p.a21}, {"a22", &p.a22},
        {"b11", &p.b11}, {"b12", &p.b12}, {"b21", &p.b21}, {"b22", &p.b22},
        {"D1", &p.D1},   {"D2", &p.D2},
    };
    for (const auto& [name, coeff] : named) {
        if (auto why = coefficient_violation(*coeff))
            issues.push_back(std::string(name) + ": " + *why);
    }
    return issues;
}

namespace detail {

/// Vector-field core without state validation; the integrator guarantees
/// positivity of every state it feeds in.
inline Vec4 rhs_unchecked(const SystemParams& p, double t, const Vec4& z) {
    const double x1 = z[0], y1 = z[1], x2 = z[2], y2 = z[3];
    const double d1 = eval(p.D1, t);
    const double d2 = eval(p.D2, t);
    return {
        x1 * (eval(p.r1, t) - eval(p.a11, t) * x1 - eval(p.a12, t) * y1) + d1 * (x2 - x1),
        y1 * (eval(p.r2, t) - eval(p.a21, t) * x1 - eval(p.a22, t) * y1) + d2 * (y2 - y1),
        x2 * (eval(p.s1, t) - eval(p.b11, t) * x2 - eval(p.b12, t) * y2) + d1 * (x1 - x2),
        y2 * (eval(p.s2, t) - eval(p.b21, t) * x2 - eval(p.b22, t) * y2) + d2 * (y1 - y2),
    };
}

}  // namespace detail

/// Time derivative of the model at state z. The model is only meaningful on
/// the open positive cone, so nonpositive or non-finite states are rejected.
inline Vec4 rhs(const SystemParams& p, double t, const State& z) {
    if (!is_strictly_positive(z))
        throw std::domain_error("rhs: state must be strictly positive and finite");
    return detail::rhs_unchecked(p, t, to_array(z));
}

/// Derivative of two independent copies of the model stacked into one vector.
/// Restricted to either copy this reproduces rhs exactly (same arithmetic).
inline Vec8 adjoint_rhs(const SystemParams& p, double t, const PairedState& pz) {
    if (!is_strictly_positive(pz.primary) || !is_strictly_positive(pz.shadow))
        throw std::domain_error("adjoint_rhs: both states must be strictly positive and finite");
    const Vec4 f = detail::rhs_unchecked(p, t, to_array(pz.primary));
    const Vec4 g = detail::rhs_unchecked(p, t, to_array(pz.shadow));
    return {f[0], f[1], f[2], f[3], g[0], g[1], g[2], g[3]};
}

}  // namespace patchlv
