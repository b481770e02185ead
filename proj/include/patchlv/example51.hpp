#pragma once

#include <cmath>

#include "patchlv/scenario.hpp"

namespace patchlv {

/// The built-in benchmark scenario behind the `example51` subcommand: every
/// coefficient oscillates with the incommensurate frequency pair {sqrt(2), 1},
/// so the system is quasi-periodic but not periodic. Both species persist in
/// both patches, the dispersal bounds hold with room to spare, and a near
/// repeat of the state appears close to shifts T with both sqrt(2) T and T
/// near multiples of 2 pi (T = 58 pi is the first strong one in [150, 200],
/// from the continued-fraction convergent 41/29 of sqrt 2).
inline Scenario example51_scenario() {
    const auto qp = [](double constant, double amplitude, PhaseKind kind) {
        QuasiPeriodicCoefficient coeff;
        coeff.constant = constant;
        coeff.terms = {{amplitude, std::sqrt(2.0), kind}, {amplitude, 1.0, kind}};
        return coeff;
    };

    Scenario sc;
    sc.params.r1 = qp(5.0, 0.5, PhaseKind::sine);
    sc.params.a11 = qp(2.5, 0.5, PhaseKind::cosine);
    sc.params.a12 = qp(2.2, 0.3, PhaseKind::sine);
    sc.params.D1 = qp(1.0, 0.1, PhaseKind::cosine);
    sc.params.r2 = qp(5.0, 0.4, PhaseKind::sine);
    sc.params.a21 = qp(2.25, 0.6, PhaseKind::cosine);
    sc.params.a22 = qp(2.4, 0.4, PhaseKind::sine);
    sc.params.D2 = qp(1.0, 0.2, PhaseKind::sine);
    sc.params.s1 = qp(4.0, 0.5, PhaseKind::cosine);
    sc.params.b11 = qp(2.4, 0.7, PhaseKind::sine);
    sc.params.b12 = qp(2.3, 0.5, PhaseKind::cosine);
    sc.params.s2 = qp(4.0, 0.3, PhaseKind::cosine);
    sc.params.b21 = qp(2.3, 0.5, PhaseKind::sine);
    sc.params.b22 = qp(2.5, 0.3, PhaseKind::cosine);

    sc.initial_states = {
        {1.0, 1.0, 1.0, 1.0},
        {3.0, 2.0, 0.5, 1.5},
        {0.2, 0.4, 2.0, 3.0},
    };
    // Integration, region, decay, attract, and scan settings keep the
    // Scenario defaults; see scenario.hpp.
    return sc;
}

}  // namespace patchlv
