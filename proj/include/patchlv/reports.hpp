#pragma once

#include <cstddef>
#include <string>

#include "patchlv/almost_period.hpp"
#include "patchlv/bounds.hpp"
#include "patchlv/csv.hpp"
#include "patchlv/stability.hpp"

namespace patchlv {

/// Plain-text report schema: one "key: value" or "name: fields" line per
/// fact, two-space indentation for members of a section. Stable ordering,
/// so reports diff cleanly across runs.

inline std::string format_inequality(const InequalityRecord& rec) {
    return rec.name + ": lhs=" + format_short(rec.lhs) + " rhs=" + format_short(rec.rhs) +
           " margin=" + format_short(rec.margin) + " holds=" + (rec.holds ? "yes" : "no");
}

inline std::string format_dispersal_report(const DispersalReport& rep) {
    std::string out = "dispersal bounds (peak dispersal below lowest growth)\n";
    for (const auto& rec : rep.inequalities) out += "  " + format_inequality(rec) + "\n";
    out += std::string("  all hold: ") + (rep.all_hold ? "yes" : "no") + "\n";
    return out;
}

inline std::string format_region(const RegionEstimate& region) {
    const auto line = [](const char* name, const ComponentBounds& b) {
        return std::string("  ") + name + " in [" + format_short(b.lo) + ", " +
               format_short(b.hi) + "]\n";
    };
    std::string out = "attracting box (ensemble " + std::to_string(region.ensemble_size) +
                      ", burn-in " + format_short(region.burn_in) + ", horizon " +
                      format_short(region.horizon) + ", margin " + format_short(region.margin) +
                      ")\n";
    out += line("x1", region.x1);
    out += line("y1", region.y1);
    out += line("x2", region.x2);
    out += line("y2", region.y2);
    return out;
}

inline std::string format_condition_report(const ConditionReport& rep) {
    std::string out = format_region(rep.region);
    out += "contraction margins (competition minus dispersal pressure)\n";
    for (const auto& rec : rep.inequalities) out += "  " + format_inequality(rec) + "\n";
    out += "  eta = min(P1..P4) = " + format_full(rep.eta) + "\n";
    out += "  c = eta * min box floor = " + format_full(rep.c) + "\n";
    out += std::string("  holds: ") + (rep.holds ? "yes" : "no") + "\n";
    return out;
}

inline std::string format_decay_report(const DecayReport& rep) {
    const double t0 = rep.samples.front().first;
    const double t1 = rep.samples.back().first;
    const double v0 = rep.samples.front().second;
    std::string out = "log-distance decay\n";
    out += "  window: [" + format_short(t0) + ", " + format_short(t1) + "], " +
           std::to_string(rep.samples.size()) + " samples\n";
    out += "  V(start) = " + format_full(v0) + ", V(end) = " +
           format_full(rep.samples.back().second) + "\n";
    out += "  envelope: V(start)*exp(-c*(t-start)) + tol, c=" + format_full(rep.c) +
           ", tol=" + format_short(rep.tol) + "\n";
    out += "  envelope violations: " + std::to_string(rep.envelope_violations) + " of " +
           std::to_string(rep.samples.size()) + " (max excess " +
           format_short(rep.max_violation) + ")\n";
    out += "  fitted exponential rate: " + format_full(rep.fitted_rate) + "\n";
    out += "  note: the envelope is checked against sampled V directly, so the dispersal\n";
    out += "  comparison terms are covered without a separate per-sign case split.\n";
    return out;
}

inline std::string format_convergence_report(const ConvergenceReport& rep) {
    std::string out = "pairwise attraction (eps = " + format_short(rep.eps) + ")\n";
    for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
        const PairConvergence& pc = rep.pairs[i];
        out += "  pair " + std::to_string(pc.first) + "-" + std::to_string(pc.second) + ": ";
        if (pc.converged) {
            out += "below eps from t = " + format_short(pc.t_converged) +
                   ", max diff after = " + format_short(pc.max_tail_diff) + "\n";
        } else {
            double final_diff = rep.sup_diffs[i].empty() ? 0.0 : rep.sup_diffs[i].back();
            out += "did not stay below eps (final diff " + format_short(final_diff) + ")\n";
        }
    }
    return out;
}

inline std::string format_scan_report(const AlmostPeriodScan& scan) {
    std::string out = "almost-period scan\n";
    if (!scan.curve.empty()) {
        out += "  shifts: [" + format_short(scan.curve.front().shift) + ", " +
               format_short(scan.curve.back().shift) + "], " +
               std::to_string(scan.curve.size()) + " grid points\n";
    }
    const auto accepted = accepted_candidates(scan);
    out += "  local minima: " + std::to_string(scan.candidates.size()) +
           ", accepted: " + std::to_string(accepted.size()) + "\n";
    const auto listed = accepted.empty() ? top_candidates(scan) : accepted;
    out += accepted.empty() ? "  no shift accepted; closest candidates:\n"
                            : "  accepted shifts (by defect):\n";
    for (const auto& cand : listed) {
        out += "    T = " + format_full(cand.shift) + ", defect = " + format_full(cand.defect) +
               (cand.accepted ? " (accepted)\n" : "\n");
    }
    return out;
}

}  // namespace patchlv
