#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "patchlv/trajectory.hpp"

namespace patchlv {

/// How nearly a trajectory repeats itself after the time shift `shift`:
/// defect is the sup-norm discrepancy sup_t |z(t + shift) - z(t)| over a
/// comparison window. accepted is true exactly when defect <= epsilon.
struct AlmostPeriodCandidate {
    double shift = 0.0;
    double defect = 0.0;
    double epsilon = 0.0;
    bool accepted = false;
};

/// One grid point of a shift scan; accepted marks the shifts that became
/// accepted candidates (local minima of the defect curve below epsilon).
struct ScanPoint {
    double shift = 0.0;
    double defect = 0.0;
    bool accepted = false;
};

/// sup over t in [w0, w1] of the sup-norm |z(t + T) - z(t)|, evaluated on a
/// uniform grid roughly `oversample` times finer than the stored node spacing
/// (dense Hermite output in between nodes). T may be negative. Both the
/// window and its shifted copy must lie inside the trajectory's time range.
inline double defect(const Trajectory<4>& traj, double T, double w0, double w1,
                     std::size_t oversample = 10) {
    if (!(w0 < w1)) throw std::invalid_argument("defect: need w0 < w1");
    if (!std::isfinite(T)) throw std::invalid_argument("defect: shift must be finite");
    if (oversample == 0) throw std::invalid_argument("defect: oversample must be >= 1");
    if (w0 + std::min(T, 0.0) < traj.t_begin() || w1 + std::max(T, 0.0) > traj.t_end())
        throw std::out_of_range("defect: window plus shift exceeds the trajectory range");

    const double spacing = (traj.t_end() - traj.t_begin()) / static_cast<double>(traj.size() - 1);
    const double target = spacing / static_cast<double>(oversample);
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((w1 - w0) / target)));

    Trajectory<4>::Cursor base_cursor, shifted_cursor;
    double worst = 0.0;
    const double span = w1 - w0;
    for (std::size_t k = 0; k <= m; ++k) {
        // Last grid point lands exactly on w1 so the domain check above is
        // airtight; intermediate points stay strictly inside.
        const double t =
            (k == m) ? w1 : w0 + static_cast<double>(k) * span / static_cast<double>(m);
        const Vec4 base = traj.sample(t, base_cursor);
        const Vec4 shifted = traj.sample(t + T, shifted_cursor);
        for (std::size_t i = 0; i < 4; ++i)
            worst = std::max(worst, std::abs(shifted[i] - base[i]));
    }
    return worst;
}

/// Full defect curve plus the candidate shifts it produces.
/// candidates holds every local minimum of the curve (boundary points count
/// when they undercut their single neighbour), sorted by ascending defect;
/// each one is accepted iff its defect is <= epsilon. The curve rows mark the
/// shifts of accepted candidates, ready for export.
struct AlmostPeriodScan {
    std::vector<ScanPoint> curve;
    std::vector<AlmostPeriodCandidate> candidates;
};

inline std::vector<AlmostPeriodCandidate> accepted_candidates(const AlmostPeriodScan& scan) {
    std::vector<AlmostPeriodCandidate> out;
    for (const auto& cand : scan.candidates)
        if (cand.accepted) out.push_back(cand);
    return out;
}

/// Leading candidates by defect, whether or not any were accepted.
inline std::vector<AlmostPeriodCandidate> top_candidates(const AlmostPeriodScan& scan,
                                                         std::size_t count = 3) {
    std::vector<AlmostPeriodCandidate> out(
        scan.candidates.begin(),
        scan.candidates.begin() +
            static_cast<std::ptrdiff_t>(std::min(count, scan.candidates.size())));
    return out;
}

/// Evaluates defect(traj, T, w0, w1) for T on a uniform grid from shift_min
/// to shift_max with spacing approximately shift_step (the count is rounded
/// so the grid ends exactly on shift_max).
inline AlmostPeriodScan almost_period_scan(const Trajectory<4>& traj, double w0, double w1,
                                           double shift_min, double shift_max, double shift_step,
                                           double epsilon, std::size_t oversample = 10) {
    if (!(shift_min <= shift_max))
        throw std::invalid_argument("almost_period_scan: need shift_min <= shift_max");
    if (!(shift_step > 0.0)) throw std::invalid_argument("almost_period_scan: need shift_step > 0");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("almost_period_scan: need epsilon >= 0");

    const double span = shift_max - shift_min;
    const auto n = (span == 0.0)
                       ? std::size_t{0}
                       : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(span / shift_step)));

    AlmostPeriodScan scan;
    scan.curve.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double T = (k == n) ? shift_max
                                  : shift_min + static_cast<double>(k) * span / static_cast<double>(n);
        scan.curve.push_back({T, defect(traj, T, w0, w1, oversample), false});
    }

    const auto d = [&](std::size_t k) { return scan.curve[k].defect; };
    for (std::size_t k = 0; k < scan.curve.size(); ++k) {
        const bool left_ok = (k == 0) || d(k) <= d(k - 1);
        const bool right_ok = (k + 1 == scan.curve.size()) || d(k) <= d(k + 1);
        if (!(left_ok && right_ok)) continue;
        AlmostPeriodCandidate cand{scan.curve[k].shift, d(k), epsilon, d(k) <= epsilon};
        scan.curve[k].accepted = cand.accepted;
        scan.candidates.push_back(cand);
    }
    std::stable_sort(scan.candidates.begin(), scan.candidates.end(),
                     [](const AlmostPeriodCandidate& a, const AlmostPeriodCandidate& b) {
                         return a.defect < b.defect;
                     });
    return scan;
}

}  // namespace patchlv
