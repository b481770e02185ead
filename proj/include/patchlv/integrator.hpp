#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "patchlv/model.hpp"
#include "patchlv/trajectory.hpp"

namespace patchlv {

enum class StepMethod { rk4, rkf45 };

/// Stepping controls shared by both methods. rel_tol only affects rkf45.
/// record_stride thins the stored trajectory: every stride-th accepted step
/// is kept (the initial and final states are always kept).
struct IntegrationOptions {
    StepMethod method = StepMethod::rk4;
    double h_init = 1e-3;
    double h_min = 1e-6;
    double rel_tol = 1e-9;
    std::size_t record_stride = 1;
};

/// Thrown when repeated step rejections push the step size below h_min.
class StepUnderflow : public std::runtime_error {
  public:
    StepUnderflow(double t, double h)
        : std::runtime_error("step size underflow at t = " + std::to_string(t) +
                             " (h = " + std::to_string(h) + " fell below h_min)"),
          time(t),
          step(h) {}

    double time;
    double step;
};

inline void validate_options(const IntegrationOptions& opts) {
    if (!(opts.h_init > 0.0) || !std::isfinite(opts.h_init))
        throw std::invalid_argument("integration options: h_init must be positive and finite");
    if (!(opts.h_min > 0.0) || !(opts.h_min <= opts.h_init))
        throw std::invalid_argument("integration options: need 0 < h_min <= h_init");
    if (opts.method == StepMethod::rkf45 && !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0))
        throw std::invalid_argument("integration options: rel_tol must be in (0, 1)");
    if (opts.record_stride == 0)
        throw std::invalid_argument("integration options: record_stride must be >= 1");
}

namespace detail {

template <std::size_t N>
inline bool positive_and_finite(const std::array<double, N>& y) {
    for (double v : y) {
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    }
    return true;
}

/// Classic fourth-order step. k1 is the derivative at (t, y), reused from the
/// previous acceptance so each step costs three fresh stage evaluations.
template <std::size_t N, class Rhs>
std::array<double, N> rk4_step(Rhs& f, double t, const std::array<double, N>& y,
                               const std::array<double, N>& k1, double h) {
    using Vec = std::array<double, N>;
    Vec u;
    for (std::size_t i = 0; i < N; ++i) u[i] = y[i] + 0.5 * h * k1[i];
    const Vec k2 = f(t + 0.5 * h, u);
    for (std::size_t i = 0; i < N; ++i) u[i] = y[i] + 0.5 * h * k2[i];
    const Vec k3 = f(t + 0.5 * h, u);
    for (std::size_t i = 0; i < N; ++i) u[i] = y[i] + h * k3[i];
    const Vec k4 = f(t + h, u);
    Vec out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Fehlberg embedded 4(5) step; advances with the fifth-order solution and
/// returns the worst componentwise error ratio against rel_tol (<= 1 accepts).
template <std::size_t N, class Rhs>
std::array<double, N> rkf45_step(Rhs& f, double t, const std::array<double, N>& y,
                                 const std::array<double, N>& k1, double h, double rel_tol,
                                 double& err_ratio) {
    using Vec = std::array<double, N>;
    Vec u;
    for (std::size_t i = 0; i < N; ++i) u[i] = y[i] + h * (k1[i] / 4.0);
    const Vec k2 = f(t + h / 4.0, u);
    for (std::size_t i = 0; i < N; ++i)
        u[i] = y[i] + h * (3.0 / 32.0 * k1[i] + 9.0 / 32.0 * k2[i]);
    const Vec k3 = f(t + 3.0 * h / 8.0, u);
    for (std::size_t i = 0; i < N; ++i)
        u[i] = y[i] + h * (1932.0 / 2197.0 * k1[i] - 7200.0 / 2197.0 * k2[i] +
                           7296.0 / 2197.0 * k3[i]);
    const Vec k4 = f(t + 12.0 * h / 13.0, u);
    for (std::size_t i = 0; i < N; ++i)
        u[i] = y[i] + h * (439.0 / 216.0 * k1[i] - 8.0 * k2[i] + 3680.0 / 513.0 * k3[i] -
                           845.0 / 4104.0 * k4[i]);
    const Vec k5 = f(t + h, u);
    for (std::size_t i = 0; i < N; ++i)
        u[i] = y[i] + h * (-8.0 / 27.0 * k1[i] + 2.0 * k2[i] - 3544.0 / 2565.0 * k3[i] +
                           1859.0 / 4104.0 * k4[i] - 11.0 / 40.0 * k5[i]);
    const Vec k6 = f(t + h / 2.0, u);

    Vec out;
    err_ratio = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h * (16.0 / 135.0 * k1[i] + 6656.0 / 12825.0 * k3[i] +
                             28561.0 / 56430.0 * k4[i] - 9.0 / 50.0 * k5[i] + 2.0 / 55.0 * k6[i]);
        const double err = h * (1.0 / 360.0 * k1[i] - 128.0 / 4275.0 * k3[i] -
                                2197.0 / 75240.0 * k4[i] + 1.0 / 50.0 * k5[i] + 2.0 / 55.0 * k6[i]);
        const double scale = rel_tol * std::max({std::abs(y[i]), std::abs(out[i]), 1e-8});
        err_ratio = std::max(err_ratio, std::abs(err) / scale);
    }
    return out;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 (t1 >= t0) and reports every
/// accepted node to `observe(accepted_index, t, y, dy)`, starting with the
/// initial state at index 0. States are confined to the open positive cone:
/// a tentative step whose result has any nonpositive or non-finite component
/// is rejected and retried with half the step size, down to h_min (then
/// StepUnderflow). After rejections the step size recovers, for rk4 by
/// doubling per acceptance up to h_init, for rkf45 via its error controller.
/// The final accepted node lands exactly on t1. The returned value is the
/// state at t1. Identical inputs produce bit-identical results: the step
/// sequence depends only on (f, y0, t0, t1, opts).
template <std::size_t N, class Rhs, class Observer>
std::array<double, N> integrate_observe(Rhs&& f, const std::array<double, N>& y0, double t0,
                                        double t1, const IntegrationOptions& opts,
                                        Observer&& observe) {
    using Vec = std::array<double, N>;
    validate_options(opts);
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0)
        throw std::invalid_argument("integrate: need finite t0 <= t1");
    if (!detail::positive_and_finite<N>(y0))
        throw std::domain_error("integrate: initial state must be strictly positive and finite");

    double t = t0;
    Vec y = y0;
    Vec dy = f(t, y);
    std::size_t accepted = 0;
    observe(accepted, t, y, dy);
    if (t1 == t0) return y;

    double h = opts.h_init;
    while (t < t1) {
        const bool final_step = h >= t1 - t;
        const double h_eff = final_step ? t1 - t : h;

        double err_ratio = 0.0;
        Vec y_new;
        if (opts.method == StepMethod::rk4) {
            y_new = detail::rk4_step<N>(f, t, y, dy, h_eff);
        } else {
            y_new = detail::rkf45_step<N>(f, t, y, dy, h_eff, opts.rel_tol, err_ratio);
        }

        const bool positive = detail::positive_and_finite<N>(y_new);
        const bool accept = positive && (opts.method == StepMethod::rk4 || err_ratio <= 1.0);
        if (accept) {
            t = final_step ? t1 : t + h_eff;
            y = y_new;
            dy = f(t, y);
            observe(++accepted, t, y, dy);
            if (opts.method == StepMethod::rk4) {
                h = std::min(h * 2.0, opts.h_init);
            } else {
                const double grow =
                    err_ratio > 0.0 ? std::clamp(0.9 * std::pow(err_ratio, -0.2), 0.2, 5.0) : 5.0;
                h = std::max(h_eff * grow, opts.h_min);
            }
        } else {
            // Error-based rejections shrink proportionally; positivity or
            // finiteness failures halve outright.
            double shrink = 0.5;
            if (positive && err_ratio > 1.0)
                shrink = std::clamp(0.9 * std::pow(err_ratio, -0.2), 0.1, 0.5);
            h = h_eff * shrink;
            if (h < opts.h_min) throw StepUnderflow(t, h);
        }
    }
    return y;
}

/// integrate_observe variant that stores every record_stride-th accepted node
/// (plus the endpoints) into a Trajectory for dense evaluation.
template <std::size_t N, class Rhs>
Trajectory<N> integrate_dense(Rhs&& f, const std::array<double, N>& y0, double t0, double t1,
                              const IntegrationOptions& opts) {
    validate_options(opts);
    std::vector<TrajectoryNode<N>> nodes;
    const double expected =
        (t1 - t0) / (opts.h_init * static_cast<double>(opts.record_stride)) + 2.0;
    if (expected > 0.0 && expected < 1e8) nodes.reserve(static_cast<std::size_t>(expected));

    TrajectoryNode<N> last{};
    integrate_observe<N>(
        std::forward<Rhs>(f), y0, t0, t1, opts,
        [&](std::size_t idx, double t, const std::array<double, N>& y,
            const std::array<double, N>& dy) {
            last = TrajectoryNode<N>{t, y, dy};
            if (idx % opts.record_stride == 0) nodes.push_back(last);
        });
    if (nodes.back().t != last.t) nodes.push_back(last);
    return Trajectory<N>(std::move(nodes));
}

/// Integrates the two-patch model from a positive initial state.
inline Trajectory<4> integrate(const SystemParams& p, const State& z0, double t0, double t1,
                               const IntegrationOptions& opts = {}) {
    if (!is_strictly_positive(z0))
        throw std::domain_error("integrate: initial state must be strictly positive and finite");
    return integrate_dense<4>(
        [&p](double t, const Vec4& z) { return detail::rhs_unchecked(p, t, z); }, to_array(z0),
        t0, t1, opts);
}

/// Integrates two copies of the model as one stacked system, so both see the
/// same step sequence and can be compared at shared node times.
inline Trajectory<8> integrate_paired(const SystemParams& p, const PairedState& pz0, double t0,
                                      double t1, const IntegrationOptions& opts = {}) {
    if (!is_strictly_positive(pz0.primary) || !is_strictly_positive(pz0.shadow))
        throw std::domain_error(
            "integrate_paired: initial states must be strictly positive and finite");
    return integrate_dense<8>(
        [&p](double t, const Vec8& z) {
            const Vec4 a = detail::rhs_unchecked(p, t, {z[0], z[1], z[2], z[3]});
            const Vec4 b = detail::rhs_unchecked(p, t, {z[4], z[5], z[6], z[7]});
            return Vec8{a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]};
        },
        to_array(pz0), t0, t1, opts);
}

}  // namespace patchlv
