#include <doctest.h>

#include <cmath>
#include <random>

#include "hyag/builtins.hpp"
#include "hyag/contracts.hpp"
#include "hyag/scenario.hpp"
#include "hyag/systems.hpp"

using namespace hyag;

namespace {

HybridSystemDesc make_1d(const std::string& f, const std::string& g, const std::string& c, const std::string& d,
                         const std::string& x0 = "(-inf, inf)", const std::string& h = "x1") {
    HybridSystemDesc s;
    s.m = s.n = s.p = 1;
    s.W = s.X = s.Y = BoxSet::whole(1);
    s.C = parse_box(c);
    s.D = parse_box(d, 1);
    s.X0 = parse_box(x0, 1);
    if (!f.empty()) s.F.push_back(parse_vec_expr(f, 1, 1, 1));
    if (!g.empty()) s.G.push_back(parse_vec_expr(g, 1, 1, 1));
    s.h = parse_vec_expr(h, 1, 1, 1);
    return s;
}

HybridSystemDesc builtin_system(const std::string& name) {
    return parse_scenario(builtin_text(name)).systems.at("h");
}

double terminal_error(double dt) {
    HybridSystemDesc s = make_1d("-4*x1", "", "(-inf, inf)", "empty");
    SimPolicy pol;
    pol.dt = dt;
    pol.max_time = 0.5;
    HybridArc a = simulate(s, InputSignal::constant({0.0}), {1.0}, pol);
    const auto& iv = a.intervals().back();
    CHECK(iv.t.back() == 0.5);
    return std::abs(iv.x.back()[0] - std::exp(-2.0));
}

}  // namespace

TEST_CASE("fourth-order convergence on a linear flow") {
    double e1 = terminal_error(1e-3), e2 = terminal_error(5e-4);
    CHECK(e1 < 1e-10);
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("fourth-order convergence on the invariance example flow") {
    // -2x - 2w with w = 0.5: x(t) = -0.5 + 1.5 e^{-2t} from x0 = 1
    HybridSystemDesc s = builtin_system("example4");
    SimPolicy pol;
    pol.max_time = 0.3;
    auto err = [&](double dt) {
        pol.dt = dt;
        HybridArc a = simulate(s, InputSignal::constant({0.5}), {1.0}, pol);
        return std::abs(a.intervals().back().x.back()[0] - (-0.5 + 1.5 * std::exp(-0.6)));
    };
    CHECK(err(1e-2) / err(5e-3) >= 8.0);
}

TEST_CASE("overlap rule decides between jump and flow") {
    HybridSystemDesc s = builtin_system("example1");
    // 0.5 lies in C and in D; the flow with w = 1 is cbrt(1) = 1 and the jump maps to 0.5 w.
    s.X0 = BoxSet::whole(1);
    SimPolicy pol;
    pol.max_time = 0.2;
    pol.max_jumps = 1;
    pol.overlap_rule = OverlapRule::jump_priority;
    HybridArc j = simulate(s, InputSignal::constant({1.0}), {0.5}, pol);
    REQUIRE(j.intervals().size() >= 2);
    CHECK(j.intervals()[0].size() == 1);
    CHECK(j.intervals()[1].x.front()[0] == 0.5);

    pol.overlap_rule = OverlapRule::flow_priority;
    HybridArc f = simulate(s, InputSignal::constant({1.0}), {0.5}, pol);
    CHECK(f.intervals()[0].size() > 1);
    CHECK(f.intervals()[0].x[1][0] > 0.5);
}

TEST_CASE("jump times are located within event_tol") {
    // Timer: flows at rate 1 on [0, 0.7], resets to 0.
    HybridSystemDesc s = make_1d("1", "0", "[0, 0.7]", "[0.7, inf)");
    SimPolicy pol;
    pol.dt = 0.01;
    pol.max_time = 3.0;
    pol.max_jumps = 10;
    HybridArc a = simulate(s, InputSignal::constant({0.0}), {0.0}, pol);
    auto jt = a.domain().jump_times();
    REQUIRE(jt.size() == 4);
    for (std::size_t k = 0; k < jt.size(); ++k) CHECK(std::abs(jt[k] - 0.7 * (k + 1)) < 1e-8);
    CHECK(a.stop == StopReason::max_time);
    CHECK(a.domain().end() == 3.0);
    CHECK_FALSE(replay_check(s, a, pol));
}

TEST_CASE("open-loop square-root flow reaches the jump set at ln 10") {
    // w = 1: x' = 1 - x from 0 hits 0.9 at t = ln 10, then resets to 0.1 w.
    HybridSystemDesc s = builtin_system("example3");
    SimPolicy pol;
    pol.dt = 1e-3;
    pol.max_time = 3.0;
    HybridArc a = simulate(s, InputSignal::constant({1.0}), {0.0}, pol);
    auto jt = a.domain().jump_times();
    REQUIRE(jt.size() == 1);
    CHECK(jt[0] == doctest::Approx(std::log(10.0)).epsilon(1e-8));
    CHECK(a.intervals()[1].x.front()[0] == doctest::Approx(0.1));
    for (const auto& iv : a.intervals())
        for (std::size_t q = 0; q < iv.size(); ++q)
            if (&iv == &a.intervals()[0]) CHECK(iv.x[q][0] == doctest::Approx(1.0 - std::exp(-iv.t[q])).epsilon(1e-9));
    CHECK_FALSE(replay_check(s, a, pol));
}

TEST_CASE("produced arcs replay and have valid domains") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 40; ++i) {
        double a = u(rng), b = u(rng), g = u(rng);
        HybridSystemDesc s = make_1d(render_real(a) + "*x1 + " + render_real(b) + "*w1",
                                     render_real(0.5 * g) + "*x1", "[-1, 1]", "union of (-inf, -1], [1, inf)", "[-1, 1]");
        SimPolicy pol;
        pol.dt = 0.01;
        pol.max_time = 3.0;
        pol.max_jumps = 20;
        for (OverlapRule r : {OverlapRule::jump_priority, OverlapRule::flow_priority}) {
            pol.overlap_rule = r;
            HybridArc arc = simulate(s, InputSignal::from_expr(parse_vec_expr("step(t - 1) - 0.5", 1, 1, 1)), {u(rng) / 2}, pol);
            auto bad = replay_check(s, arc, pol);
            CHECK_MESSAGE(!bad, *bad);
            HybridTimeDomain d = arc.domain();
            CHECK(d.num_intervals() == static_cast<int>(arc.intervals().size()));
        }
    }
}

TEST_CASE("replay rejects tampered arcs") {
    HybridSystemDesc s = make_1d("1", "0", "[0, 0.7]", "[0.7, inf)");
    SimPolicy pol;
    pol.dt = 0.01;
    pol.max_time = 1.0;
    HybridArc a = simulate(s, InputSignal::constant({0.0}), {0.0}, pol);
    HybridArc bad_flow = a;
    bad_flow.intervals()[0].x[5][0] += 0.05;
    CHECK(replay_check(s, bad_flow, pol));
    HybridArc bad_jump = a;
    for (auto& x : bad_jump.intervals()[1].x) x[0] += 0.01;
    CHECK(replay_check(s, bad_jump, pol));
}

TEST_CASE("branch enumeration on the cube-root example") {
    HybridSystemDesc s = builtin_system("example1");
    SimPolicy pol;
    pol.dt = 1e-3;
    pol.max_time = 3.0;
    pol.max_jumps = 10;
    pol.max_branches = 16;
    pol.overlap_rule = OverlapRule::enumerate;
    BranchSet bs = enumerate_branches(s, InputSignal::constant({0.0}), {0.0}, pol);
    REQUIRE_FALSE(bs.arcs.empty());
    AGContract c{parse_box("{0}"), parse_box("{0}"), parse_box("{0}")};
    for (const auto& a : bs.arcs) {
        CHECK_FALSE(replay_check(s, a, pol));
        CHECK(check_weak(a, c).status == Status::satisfied);
    }
}

TEST_CASE("scheduled jumps and interval-relative output") {
    HybridSystemDesc s = builtin_system("example2");
    SimPolicy pol;
    pol.dt = 1e-3;
    HybridArc a = simulate_on_schedule(s, InputSignal::constant({0.0}), {0.0}, {1.0, 2.5}, 4.0, pol);
    auto jt = a.domain().jump_times();
    CHECK(jt == std::vector<double>{1.0, 2.5});
    CHECK(a.domain().end() == 4.0);
    CHECK_THROWS(simulate_on_schedule(s, InputSignal::constant({0.0}), {0.0}, {2.0, 1.0}, 4.0, pol));
    CHECK_THROWS(simulate_on_schedule(s, InputSignal::constant({0.0}), {0.0}, {5.0}, 4.0, pol));

    // Output is zero during the first half of each interval whatever the state.
    HybridSystemDesc lin = make_1d("1", "x1", "[0, inf)", "[0, inf)", "[0, inf)", "x1*step(tau - len/2)");
    HybridArc b = simulate_on_schedule(lin, InputSignal::constant({0.0}), {1.0}, {1.0}, 3.0, pol);
    for (const auto& iv : b.intervals()) {
        double mid = 0.5 * (iv.t.front() + iv.t.back());
        for (std::size_t q = 0; q < iv.size(); ++q) {
            if (iv.t[q] < mid - 1e-9) CHECK(iv.y[q][0] == 0.0);
            if (iv.t[q] > mid + 1e-9) CHECK(iv.y[q][0] == iv.x[q][0]);
        }
    }
}

TEST_CASE("kickstart leaves the rest point") {
    HybridSystemDesc s = builtin_system("example1");
    s.D = parse_box("empty", 1);
    SimPolicy pol;
    pol.dt = 1e-4;
    pol.max_time = 1.0;
    HybridArc still = simulate(s, InputSignal::closed_loop(), {0.0}, pol);
    CHECK(still.intervals().back().x.back()[0] == 0.0);
    pol.kickstart = true;
    HybridArc moved = simulate(s, InputSignal::closed_loop(), {0.0}, pol);
    // x' = cbrt(x): x(t) = (2t/3)^{3/2} from 0
    CHECK(std::abs(moved.intervals().back().x.back()[0] - std::pow(2.0 / 3.0, 1.5)) < 1e-4);
}

TEST_CASE("policy and start validation") {
    HybridSystemDesc s = builtin_system("example4");
    SimPolicy pol;
    pol.dt = 0.0;
    CHECK_THROWS(simulate(s, InputSignal::constant({0.0}), {0.0}, pol));
    pol = SimPolicy{};
    pol.event_tol = 0.0;
    CHECK_THROWS(check_policy(pol));
    pol = SimPolicy{};
    pol.max_branches = 0;
    CHECK_THROWS(check_policy(pol));
    CHECK_THROWS(simulate(s, InputSignal::constant({0.0}), {2.0}, SimPolicy{}));
    CHECK_THROWS(simulate(s, InputSignal::constant({0.0}), {0.0, 1.0}, SimPolicy{}));
    CHECK(parse_overlap("jump") == OverlapRule::jump_priority);
    CHECK_THROWS(parse_overlap("sideways"));

    HybridSystemDesc bad = s;
    bad.C = parse_box("[0,1] x [0,1] x [0,1]");
    CHECK_THROWS(validate(bad));
    bad = s;
    bad.F.push_back(parse_vec_expr("x1; x1", 1, 1, 2));
    CHECK_THROWS(validate(bad));
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("flow set in (x, w)-space") {
    // Flow only while w <= 0.5; the input ramps, so the arc stops when w passes 0.5.
    HybridSystemDesc s = make_1d("1", "", "(-inf, inf) x (-inf, 0.5]", "empty");
    s.D = BoxSet(2);
    SimPolicy pol;
    pol.dt = 0.01;
    pol.max_time = 2.0;
    HybridArc a = simulate(s, InputSignal::from_expr(parse_vec_expr("t", 0, 0, 1)), {0.0}, pol);
    CHECK(a.stop == StopReason::no_continuation);
    CHECK(a.domain().end() == doctest::Approx(0.5).epsilon(1e-8));
}
