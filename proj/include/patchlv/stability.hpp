#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "patchlv/bounds.hpp"
#include "patchlv/integrator.hpp"
#include "patchlv/model.hpp"

namespace patchlv {

/// Contraction certificate over an attracting box. Each P_i weighs the
/// guaranteed competition felt by one density against the worst-case
/// dispersal coupling relative to the box floor; all four positive means
/// trajectories inside the box draw together at exponential rate c.
struct ConditionReport {
    double P1 = 0.0, P2 = 0.0, P3 = 0.0, P4 = 0.0;
    double eta = 0.0;  // min(P1..P4)
    double c = 0.0;    // eta * smallest box floor
    RegionEstimate region;
    bool holds = false;  // eta > 0
    std::array<InequalityRecord, 4> inequalities;  // dispersal pressure < competition, per P_i
};

inline ConditionReport check_contraction(const SystemParams& p, const RegionEstimate& region) {
    for (const ComponentBounds* b : {&region.x1, &region.y1, &region.x2, &region.y2}) {
        if (!(b->lo > 0.0) || !(b->hi >= b->lo))
            throw std::domain_error("check_contraction: region needs 0 < lo <= hi per component");
    }
    ConditionReport rep;
    rep.region = region;
    rep.inequalities = {
        make_inequality("P1", sup_bound(p.D1) / region.x2.lo,
                        inf_bound(p.a11) + inf_bound(p.a21)),
        make_inequality("P2", sup_bound(p.D1) / region.x1.lo,
                        inf_bound(p.b11) + inf_bound(p.b21)),
        make_inequality("P3", sup_bound(p.D2) / region.y2.lo,
                        inf_bound(p.a12) + inf_bound(p.a22)),
        make_inequality("P4", sup_bound(p.D2) / region.y1.lo,
                        inf_bound(p.b12) + inf_bound(p.b22)),
    };
    rep.P1 = rep.inequalities[0].margin;
    rep.P2 = rep.inequalities[1].margin;
    rep.P3 = rep.inequalities[2].margin;
    rep.P4 = rep.inequalities[3].margin;
    rep.eta = std::min(std::min(rep.P1, rep.P2), std::min(rep.P3, rep.P4));
    rep.c = rep.eta * std::min(std::min(region.x1.lo, region.y1.lo),
                               std::min(region.x2.lo, region.y2.lo));
    rep.holds = rep.eta > 0.0;
    return rep;
}

/// Distance between two positive states in log coordinates:
/// sum over components of |ln z_i - ln ztilde_i|. A metric on the positive
/// cone; zero exactly on equal states.
inline double lyapunov_value(const State& z, const State& zt) {
    if (!is_strictly_positive(z) || !is_strictly_positive(zt))
        throw std::domain_error("lyapunov_value: states must be strictly positive and finite");
    return std::abs(std::log(z.x1) - std::log(zt.x1)) +
           std::abs(std::log(z.y1) - std::log(zt.y1)) +
           std::abs(std::log(z.x2) - std::log(zt.x2)) +
           std::abs(std::log(z.y2) - std::log(zt.y2));
}

/// Observed behaviour of the log-distance V(t) between two solutions.
/// Envelope violations count samples with V(t) > V(t0) * exp(-c (t - t0)) + tol;
/// max_violation is the largest such excess (<= 0 when the envelope holds
/// everywhere). fitted_rate is the least-squares slope of -ln V over time,
/// using only samples above a relative floor of 1e-10 * V(t0) so the flat
/// round-off tail does not bias the fit; NaN when too few samples qualify.
struct DecayReport {
    std::vector<std::pair<double, double>> samples;  // (t, V)
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    std::size_t envelope_violations = 0;
    double max_violation = 0.0;
    double c = 0.0;
    double tol = 0.0;
};

inline DecayReport verify_decay(const SystemParams& p, const State& z0, const State& zt0,
                                double t0, double t1, double c, double tol,
                                const IntegrationOptions& opts = {}) {
    if (!(t1 > t0)) throw std::invalid_argument("verify_decay: need t1 > t0");
    if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("verify_decay: rate c must be >= 0 and finite");
    if (!(tol >= 0.0)) throw std::invalid_argument("verify_decay: tol must be >= 0");

    const Trajectory<8> paired = integrate_paired(p, PairedState{z0, zt0}, t0, t1, opts);

    DecayReport rep;
    rep.c = c;
    rep.tol = tol;
    rep.samples.reserve(paired.size());
    for (const TrajectoryNode<8>& node : paired.nodes()) {
        const PairedState pz = paired_from_array(node.y);
        rep.samples.emplace_back(node.t, lyapunov_value(pz.primary, pz.shadow));
    }

    const double v0 = rep.samples.front().second;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : rep.samples) {
        const double envelope = v0 * std::exp(-c * (t - t0)) + tol;
        const double excess = v - envelope;
        rep.max_violation = std::max(rep.max_violation, excess);
        if (excess > 0.0) ++rep.envelope_violations;
    }

    // Least-squares fit of ln V against t - t0 over the usable samples.
    const double floor = v0 * 1e-10;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const auto& [t, v] : rep.samples) {
        if (!(v > floor) || !(v > 0.0)) continue;
        const double x = t - t0;
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (n >= 2 && denom > 0.0)
        rep.fitted_rate = -(static_cast<double>(n) * sxy - sx * sy) / denom;
    return rep;
}

/// Convergence outcome for one pair of ensemble members. t_converged is the
/// earliest grid time from which the sup-norm difference stays below eps
/// through t_end (NaN when that never happens); max_tail_diff is the largest
/// difference seen at or after t_converged.
struct PairConvergence {
    std::size_t first = 0;
    std::size_t second = 0;
    bool converged = false;
    double t_converged = std::numeric_limits<double>::quiet_NaN();
    double max_tail_diff = std::numeric_limits<double>::quiet_NaN();
};

/// Pairwise sup-norm separation of trajectories started from several initial
/// states, evaluated on a shared uniform grid (spacing h_init * record_stride).
/// Pairs are ordered lexicographically: (0,1), (0,2), ..., (1,2), ...
struct ConvergenceReport {
    std::vector<double> times;
    std::vector<PairConvergence> pairs;
    std::vector<std::vector<double>> sup_diffs;  // one curve per pair
    double eps = 0.0;
};

/// Builds the report from already-integrated trajectories sharing one time
/// range; the comparison grid has spacing approximately dt and always
/// includes both endpoints.
inline ConvergenceReport attractivity_from_trajectories(const std::vector<Trajectory<4>>& trajs,
                                                        double eps, double dt) {
    if (trajs.size() < 2)
        throw std::invalid_argument("attractivity: need at least two trajectories");
    if (!(eps > 0.0)) throw std::invalid_argument("attractivity: eps must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("attractivity: grid spacing must be positive and finite");
    const double t0 = trajs.front().t_begin();
    const double t_end = trajs.front().t_end();
    for (const auto& traj : trajs) {
        if (traj.t_begin() != t0 || traj.t_end() != t_end)
            throw std::invalid_argument("attractivity: trajectories must share one time range");
    }
    if (!(t_end > t0)) throw std::invalid_argument("attractivity: need a nonzero time range");

    const double span = t_end - t0;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(span / dt)));

    ConvergenceReport rep;
    rep.eps = eps;
    rep.times.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        rep.times[k] =
            (k == n) ? t_end : t0 + static_cast<double>(k) * span / static_cast<double>(n);

    for (std::size_t i = 0; i < trajs.size(); ++i) {
        for (std::size_t j = i + 1; j < trajs.size(); ++j) {
            std::vector<double> curve(rep.times.size());
            Trajectory<4>::Cursor ci, cj;
            for (std::size_t k = 0; k < rep.times.size(); ++k) {
                const Vec4 a = trajs[i].sample(rep.times[k], ci);
                const Vec4 b = trajs[j].sample(rep.times[k], cj);
                double d = 0.0;
                for (std::size_t m = 0; m < 4; ++m) d = std::max(d, std::abs(a[m] - b[m]));
                curve[k] = d;
            }

            PairConvergence pc;
            pc.first = i;
            pc.second = j;
            // Suffix maximum locates the earliest grid index from which the
            // difference never climbs back to eps.
            double suffix_max = 0.0;
            std::size_t from = curve.size();
            for (std::size_t k = curve.size(); k-- > 0;) {
                suffix_max = std::max(suffix_max, curve[k]);
                if (suffix_max < eps) from = k;
            }
            if (from < curve.size()) {
                pc.converged = true;
                pc.t_converged = rep.times[from];
                pc.max_tail_diff = 0.0;
                for (std::size_t k = from; k < curve.size(); ++k)
                    pc.max_tail_diff = std::max(pc.max_tail_diff, curve[k]);
            }
            rep.pairs.push_back(pc);
            rep.sup_diffs.push_back(std::move(curve));
        }
    }
    return rep;
}

/// Integrates every initial state over [0, t_end] with shared options and
/// compares the solutions pairwise.
inline ConvergenceReport attractivity_experiment(const SystemParams& p,
                                                 const std::vector<State>& ics, double t_end,
                                                 double eps, const IntegrationOptions& opts = {}) {
    if (ics.size() < 2)
        throw std::invalid_argument("attractivity_experiment: need at least two initial states");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("attractivity_experiment: t_end must be positive and finite");
    std::vector<Trajectory<4>> trajs;
    trajs.reserve(ics.size());
    for (const State& z0 : ics) trajs.push_back(integrate(p, z0, 0.0, t_end, opts));
    return attractivity_from_trajectories(trajs, eps,
                                          opts.h_init * static_cast<double>(opts.record_stride));
}

}  // namespace patchlv
