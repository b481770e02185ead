#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchlv {

enum class PhaseKind { sine, cosine };

struct CoeffTerm {
    double amplitude = 0.0;
    double frequency = 0.0;  // must be finite and > 0
    PhaseKind kind = PhaseKind::sine;
};

/// A time-varying coefficient represented as a finite trigonometric sum
///     constant + sum_k amplitude_k * sin(frequency_k * t)   (or cos).
/// An empty term list models a constant coefficient. Values are immutable
/// after construction and safe to share across threads.
struct QuasiPeriodicCoefficient {
    double constant = 0.0;
    std::vector<CoeffTerm> terms;
};

inline QuasiPeriodicCoefficient constant_coeff(double value) {
    return QuasiPeriodicCoefficient{value, {}};
}

inline double eval(const QuasiPeriodicCoefficient& f, double t) {
    double v = f.constant;
    for (const CoeffTerm& term : f.terms) {
        const double phase = term.frequency * t;
        v += term.amplitude * (term.kind == PhaseKind::sine ? std::sin(phase) : std::cos(phase));
    }
    return v;
}

inline double amplitude_sum(const QuasiPeriodicCoefficient& f) {
    double s = 0.0;
    for (const CoeffTerm& term : f.terms) s += std::abs(term.amplitude);
    return s;
}

/// Lower bound of eval over t in [0, inf): constant - sum |amplitude|.
/// Exact for rationally independent frequencies (by equidistribution the
/// phases come arbitrarily close to any target simultaneously) and for a
/// single term; a conservative outer bound otherwise. Always satisfies
/// inf_bound(f) <= eval(f, t) for every t.
inline double inf_bound(const QuasiPeriodicCoefficient& f) {
    return f.constant - amplitude_sum(f);
}

/// Upper counterpart of inf_bound; same exactness caveats.
inline double sup_bound(const QuasiPeriodicCoefficient& f) {
    return f.constant + amplitude_sum(f);
}

struct GridExtrema {
    double lo = 0.0;
    double hi = 0.0;
};

/// Min/max of eval over the grid {0, step, 2*step, ..., horizon}.
/// Serves as the sampling oracle for inf_bound/sup_bound.
inline GridExtrema empirical_extrema(const QuasiPeriodicCoefficient& f, double horizon,
                                     double step) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("empirical_extrema: horizon must be positive and finite");
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("empirical_extrema: step must be positive and finite");
    const auto n = static_cast<std::size_t>(horizon / step);
    GridExtrema ext{eval(f, 0.0), eval(f, 0.0)};
    for (std::size_t k = 1; k <= n; ++k) {
        const double v = eval(f, static_cast<double>(k) * step);
        ext.lo = std::min(ext.lo, v);
        ext.hi = std::max(ext.hi, v);
    }
    if (static_cast<double>(n) * step < horizon) {
        const double v = eval(f, horizon);
        ext.lo = std::min(ext.lo, v);
        ext.hi = std::max(ext.hi, v);
    }
    return ext;
}

/// Checks the admission rules for a coefficient: finite constant and
/// amplitudes, finite positive frequencies, and constant - sum |amplitude| >= 0
/// (a sufficient condition for eval(t) >= 0 at all t).
/// Returns a description of the first violation, or nullopt if admitted.
inline std::optional<std::string> coefficient_violation(const QuasiPeriodicCoefficient& f) {
    if (!std::isfinite(f.constant)) return "constant is not finite";
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        const CoeffTerm& term = f.terms[i];
        if (!std::isfinite(term.amplitude))
            return "term " + std::to_string(i) + ": amplitude is not finite";
        if (!std::isfinite(term.frequency) || !(term.frequency > 0.0))
            return "term " + std::to_string(i) + ": frequency must be finite and > 0";
    }
    if (inf_bound(f) < 0.0)
        return "constant - sum|amplitude| = " + std::to_string(inf_bound(f)) + " < 0";
    return std::nullopt;
}

}  // namespace patchlv
