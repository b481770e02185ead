#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "patchlv/coeffs.hpp"
#include "patchlv/integrator.hpp"
#include "patchlv/model.hpp"

namespace patchlv {

/// One verified inequality lhs < rhs, with margin = rhs - lhs.
struct InequalityRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool holds = false;
};

inline InequalityRecord make_inequality(std::string name, double lhs, double rhs) {
    return {std::move(name), lhs, rhs, rhs - lhs, lhs < rhs};
}

struct DispersalReport {
    std::array<InequalityRecord, 4> inequalities;
    bool all_hold = false;
};

/// Checks that the peak dispersal rate of each species stays below the lowest
/// intrinsic growth rate it meets in either patch: sup D1 < inf r1,
/// sup D1 < inf s1, sup D2 < inf r2, sup D2 < inf s2. When these hold, growth
/// dominates out-flow near zero density, so no population can be drained away
/// entirely and solutions stay in a fixed positive box after a transient.
inline DispersalReport check_dispersal_bound(const SystemParams& p) {
    DispersalReport report;
    report.inequalities = {
        make_inequality("supD1<infr1", sup_bound(p.D1), inf_bound(p.r1)),
        make_inequality("supD2<infr2", sup_bound(p.D2), inf_bound(p.r2)),
        make_inequality("supD1<infs1", sup_bound(p.D1), inf_bound(p.s1)),
        make_inequality("supD2<infs2", sup_bound(p.D2), inf_bound(p.s2)),
    };
    report.all_hold = true;
    for (const auto& rec : report.inequalities) report.all_hold = report.all_hold && rec.holds;
    return report;
}

struct ComponentBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Empirical attracting box: per-component extrema over an ensemble of
/// trajectories after a burn-in, widened by a relative safety margin.
struct RegionEstimate {
    ComponentBounds x1, y1, x2, y2;
    double burn_in = 0.0;
    double horizon = 0.0;
    std::size_t ensemble_size = 0;
    double margin = 0.0;
};

namespace detail {

/// Counter-based mix (splitmix64 finalizer over seed + index * golden gamma).
/// Draw i is a pure function of (seed, i), so ensembles are reproducible
/// regardless of evaluation order and independent of std library internals.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform draw in [0, 1) with 53 random bits.
inline double unit_double_at(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(splitmix64_at(seed, index) >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Initial state of ensemble member `member`: each component drawn uniformly
/// from ic_box using counter 4 * member + component.
inline State ensemble_initial_state(std::uint64_t seed, std::size_t member,
                                    const ComponentBounds& ic_box) {
    const auto draw = [&](std::size_t component) {
        const std::uint64_t counter = static_cast<std::uint64_t>(member) * 4 + component;
        return ic_box.lo + detail::unit_double_at(seed, counter) * (ic_box.hi - ic_box.lo);
    };
    return {draw(0), draw(1), draw(2), draw(3)};
}

/// Estimates the attracting box by integrating `ensemble_size` trajectories
/// from random initial states in ic_box and folding per-component min/max
/// over all accepted states with t >= burn_in. Lower bounds shrink and upper
/// bounds grow by the relative margin. Trajectories are not stored, so memory
/// stays flat in horizon and ensemble size.
///
/// Throws std::invalid_argument for a bad configuration and
/// std::runtime_error if a widened lower bound is not strictly positive
/// (margin >= 1 guarantees that).
inline RegionEstimate estimate_ultimate_bounds(const SystemParams& p, std::uint64_t seed,
                                               std::size_t ensemble_size,
                                               const ComponentBounds& ic_box, double burn_in,
                                               double horizon, double margin,
                                               const IntegrationOptions& opts = {}) {
    if (ensemble_size == 0)
        throw std::invalid_argument("estimate_ultimate_bounds: ensemble_size must be >= 1");
    if (!(ic_box.lo > 0.0) || !(ic_box.hi > ic_box.lo) || !std::isfinite(ic_box.hi))
        throw std::invalid_argument("estimate_ultimate_bounds: ic_box must satisfy 0 < lo < hi");
    if (!(burn_in >= 0.0) || !(horizon > burn_in) || !std::isfinite(horizon))
        throw std::invalid_argument("estimate_ultimate_bounds: need 0 <= burn_in < horizon");
    if (!(margin >= 0.0) || !std::isfinite(margin))
        throw std::invalid_argument("estimate_ultimate_bounds: margin must be >= 0");

    Vec4 lo{}, hi{};
    bool seen = false;
    for (std::size_t member = 0; member < ensemble_size; ++member) {
        const State z0 = ensemble_initial_state(seed, member, ic_box);
        integrate_observe<4>(
            [&p](double t, const Vec4& z) { return detail::rhs_unchecked(p, t, z); },
            to_array(z0), 0.0, horizon, opts,
            [&](std::size_t, double t, const Vec4& y, const Vec4&) {
                if (t < burn_in) return;
                if (!seen) {
                    lo = y;
                    hi = y;
                    seen = true;
                    return;
                }
                for (std::size_t i = 0; i < 4; ++i) {
                    lo[i] = std::min(lo[i], y[i]);
                    hi[i] = std::max(hi[i], y[i]);
                }
            });
    }
    if (!seen)
        throw std::runtime_error(
            "estimate_ultimate_bounds: no accepted states at or after burn_in");

    RegionEstimate est;
    const auto widen = [margin](double lo_v, double hi_v) {
        return ComponentBounds{lo_v * (1.0 - margin), hi_v * (1.0 + margin)};
    };
    est.x1 = widen(lo[0], hi[0]);
    est.y1 = widen(lo[1], hi[1]);
    est.x2 = widen(lo[2], hi[2]);
    est.y2 = widen(lo[3], hi[3]);
    est.burn_in = burn_in;
    est.horizon = horizon;
    est.ensemble_size = ensemble_size;
    est.margin = margin;

    for (const ComponentBounds* b : {&est.x1, &est.y1, &est.x2, &est.y2}) {
        if (!(b->lo > 0.0))
            throw std::runtime_error(
                "estimate_ultimate_bounds: widened lower bound is not strictly positive");
    }
    return est;
}

}  // namespace patchlv
