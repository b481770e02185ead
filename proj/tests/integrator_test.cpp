#include <patchlv/integrator.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <patchlv/example51.hpp>

#include "test_support.hpp"

using Catch::Approx;
using namespace patchlv;

namespace {

const SystemParams kLogistic = testsupport::logistic_params();
const State kLogisticStart{0.5, 1.0, 1.0, 1.0};

IntegrationOptions rk4_opts(double h) {
    IntegrationOptions opts;
    opts.h_init = h;
    opts.h_min = 1e-9;
    return opts;
}

}  // namespace

TEST_CASE("logistic growth reaches its carrying capacity", "[integrator]") {
    const Trajectory<4> traj = integrate(kLogistic, kLogisticStart, 0.0, 20.0);
    CHECK(traj.t_end() == 20.0);
    const double exact_end = testsupport::logistic_exact(0.5, 20.0);
    CHECK(traj.nodes().back().y[0] == Approx(exact_end).margin(1e-4));

    // Dense output between nodes matches the closed form too.
    const State mid = sample(traj, 10.0);
    CHECK(mid.x1 == Approx(testsupport::logistic_exact(0.5, 10.0)).margin(1e-4));
    CHECK(mid.y1 == Approx(1.0).margin(1e-12));  // frozen companion component
}

TEST_CASE("fixed-step error shrinks at fourth order", "[integrator]") {
    const double exact = testsupport::logistic_exact(0.5, 5.0);
    const auto err = [&](double h) {
        const Trajectory<4> traj = integrate(kLogistic, kLogisticStart, 0.0, 5.0, rk4_opts(h));
        return std::abs(traj.nodes().back().y[0] - exact);
    };
    const double ratio = err(0.05) / err(0.025);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("constant-rate growth is sampled exactly between nodes", "[integrator]") {
    const auto f = [](double, const std::array<double, 1>&) { return std::array<double, 1>{1.0}; };
    const Trajectory<1> traj = integrate_dense<1>(f, {1.0}, 0.0, 2.0, rk4_opts(0.5));
    // The solution is linear, which the cubic interpolant reproduces.
    CHECK(traj.sample(0.25)[0] == Approx(1.25).margin(1e-12));
    CHECK(traj.sample(1.75)[0] == Approx(2.75).margin(1e-12));
    CHECK(traj.sample(2.0)[0] == Approx(3.0).margin(1e-12));
}

TEST_CASE("cubic solutions are reproduced exactly", "[integrator]") {
    // y' = 3 t^2 turns each step into Simpson quadrature (exact for cubics),
    // and the Hermite interpolant is exact on cubics as well.
    const auto f = [](double t, const std::array<double, 1>&) {
        return std::array<double, 1>{3.0 * t * t};
    };
    const Trajectory<1> traj = integrate_dense<1>(f, {1.0}, 0.0, 2.0, rk4_opts(0.25));
    for (double t : {0.3, 0.7, 1.1, 1.9}) CHECK(traj.sample(t)[0] == Approx(1.0 + t * t * t).margin(1e-12));
}

TEST_CASE("zero-length integration yields the single starting node", "[integrator]") {
    const State z0{0.7, 1.3, 2.1, 0.9};
    const Trajectory<4> traj = integrate(kLogistic, z0, 5.0, 5.0);
    REQUIRE(traj.size() == 1);
    CHECK(traj.t_begin() == 5.0);
    CHECK(traj.t_end() == 5.0);
    const State back = sample(traj, 5.0);
    CHECK(back.x1 == z0.x1);
    CHECK(back.y1 == z0.y1);
    CHECK(back.x2 == z0.x2);
    CHECK(back.y2 == z0.y2);
}

TEST_CASE("the last node lands exactly on the requested end time", "[integrator]") {
    // 1.2345 is not a multiple of the step, so this exercises the final
    // shortened step.
    const Trajectory<4> traj = integrate(kLogistic, kLogisticStart, 0.0, 1.2345, rk4_opts(1e-3));
    CHECK(traj.t_end() == 1.2345);
    CHECK(traj.nodes().back().t == 1.2345);
}

TEST_CASE("a state driven to zero raises StepUnderflow", "[integrator]") {
    // y' = -100 crosses zero at t = 0.005; no step size can cross that point
    // while staying positive, so the halving cascade must bottom out.
    const auto f = [](double, const std::array<double, 1>&) {
        return std::array<double, 1>{-100.0};
    };
    IntegrationOptions opts;
    opts.h_init = 1e-3;
    opts.h_min = 1e-6;
    try {
        integrate_dense<1>(f, {0.5}, 0.0, 1.0, opts);
        FAIL("expected StepUnderflow");
    } catch (const StepUnderflow& e) {
        CHECK(e.time == Approx(0.005).margin(0.001));
        CHECK(e.step < opts.h_min);
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("record_stride thins the stored nodes but keeps both endpoints", "[integrator]") {
    // h = 2^-10 makes the accumulated times exact, so the step count is
    // exactly 1024 and the recorded indices are predictable.
    const double h = 1.0 / 1024.0;
    SECTION("stride divides the step count") {
        IntegrationOptions opts = rk4_opts(h);
        opts.record_stride = 128;
        const Trajectory<4> traj = integrate(kLogistic, kLogisticStart, 0.0, 1.0, opts);
        REQUIRE(traj.size() == 9);
        CHECK(traj.t_begin() == 0.0);
        CHECK(traj.t_end() == 1.0);
    }
    SECTION("stride does not divide the step count: end is flushed anyway") {
        IntegrationOptions opts = rk4_opts(h);
        opts.record_stride = 100;
        const Trajectory<4> traj = integrate(kLogistic, kLogisticStart, 0.0, 1.0, opts);
        REQUIRE(traj.size() == 12);
        CHECK(traj.nodes().back().t == 1.0);
    }
}

TEST_CASE("identical inputs give bit-identical trajectories", "[integrator]") {
    const SystemParams p = example51_scenario().params;
    IntegrationOptions opts = rk4_opts(1e-3);
    opts.record_stride = 100;
    for (StepMethod method : {StepMethod::rk4, StepMethod::rkf45}) {
        opts.method = method;
        const Trajectory<4> a = integrate(p, State{1, 1, 1, 1}, 0.0, 10.0, opts);
        const Trajectory<4> b = integrate(p, State{1, 1, 1, 1}, 0.0, 10.0, opts);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(a.nodes()[i].t == b.nodes()[i].t);
            REQUIRE(a.nodes()[i].y == b.nodes()[i].y);
            REQUIRE(a.nodes()[i].dy == b.nodes()[i].dy);
        }
    }
}

TEST_CASE("adaptive stepping is accurate with far fewer steps", "[integrator]") {
    IntegrationOptions adaptive;
    adaptive.method = StepMethod::rkf45;
    adaptive.h_init = 1e-3;
    adaptive.h_min = 1e-9;
    adaptive.rel_tol = 1e-9;
    const Trajectory<4> traj = integrate(kLogistic, kLogisticStart, 0.0, 20.0, adaptive);
    CHECK(traj.t_end() == 20.0);
    CHECK(traj.nodes().back().y[0] ==
          Approx(testsupport::logistic_exact(0.5, 20.0)).margin(1e-6));
    CHECK(traj.size() < 2000);  // rk4 at h = 1e-3 stores 20001 nodes

    // Cross-method agreement on the oscillatory benchmark system.
    const SystemParams p = example51_scenario().params;
    adaptive.rel_tol = 1e-10;
    const Trajectory<4> coarse = integrate(p, State{1, 1, 1, 1}, 0.0, 50.0, adaptive);
    IntegrationOptions fine = rk4_opts(1e-3);
    fine.record_stride = 1000;
    const Trajectory<4> reference = integrate(p, State{1, 1, 1, 1}, 0.0, 50.0, fine);
    const Vec4 a = coarse.nodes().back().y;
    const Vec4 b = reference.nodes().back().y;
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == Approx(b[i]).margin(1e-5));
}

TEST_CASE("invalid stepping options are rejected up front", "[integrator]") {
    const auto run = [&](const IntegrationOptions& opts) {
        integrate(kLogistic, kLogisticStart, 0.0, 1.0, opts);
    };
    IntegrationOptions opts;

    opts.h_init = 0.0;
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
    opts = {};
    opts.h_min = 0.0;
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
    opts = {};
    opts.h_min = 1.0;  // larger than h_init
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
    opts = {};
    opts.record_stride = 0;
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
    opts = {};
    opts.method = StepMethod::rkf45;
    opts.rel_tol = 0.0;
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
    opts.rel_tol = 1.0;  // must be strictly inside (0, 1)
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
    opts.rel_tol = 1.5;
    CHECK_THROWS_AS(run(opts), std::invalid_argument);
}

TEST_CASE("invalid time range and start state are rejected", "[integrator]") {
    CHECK_THROWS_AS(integrate(kLogistic, kLogisticStart, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(kLogistic, State{0.0, 1, 1, 1}, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(integrate(kLogistic, State{1, 1, -2.0, 1}, 0.0, 1.0), std::domain_error);
}

TEST_CASE("benchmark trajectories stay positive and bounded", "[integrator]") {
    const SystemParams p = example51_scenario().params;
    IntegrationOptions opts = rk4_opts(1e-3);
    opts.record_stride = 100;
    const Trajectory<4> traj = integrate(p, State{1, 1, 1, 1}, 0.0, 100.0, opts);
    CHECK(traj.t_end() == 100.0);
    for (const auto& node : traj.nodes()) {
        for (double v : node.y) {
            REQUIRE(v > 0.6);
            REQUIRE(v < 1.6);
        }
    }
}
