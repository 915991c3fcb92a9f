#include <doctest.h>

#include <cmath>
#include <random>

#include "hyag/builtins.hpp"
#include "hyag/composition.hpp"
#include "hyag/scenario.hpp"

using namespace hyag;

namespace {

Scenario builtin(const std::string& name) { return parse_scenario(builtin_text(name)); }

HybridSystemDesc affine_1d(double a, double b, double g, const std::string& x0 = "[-1, 1]") {
    HybridSystemDesc s;
    s.W = s.X = s.Y = BoxSet::whole(1);
    s.C = parse_box("[-1, 1]");
    s.D = parse_box("union of (-inf, -1], [1, inf)");
    s.X0 = parse_box(x0);
    s.F = {parse_vec_expr(render_real(a) + "*x1 + " + render_real(b) + "*w1", 1, 1, 1)};
    s.G = {parse_vec_expr(render_real(g) + "*x1", 1, 1, 1)};
    s.h = parse_vec_expr("x1", 1, 1, 1);
    return s;
}

}  // namespace

TEST_CASE("cascade construction checks interfaces") {
    HybridSystemDesc h1 = affine_1d(-1, 1, 0.5), h2 = affine_1d(-2, 1, 0.5);
    CHECK_NOTHROW(cascade(h1, h2));
    HybridSystemDesc narrow = h2;
    narrow.W = parse_box("[0, 1]");
    CHECK_THROWS(cascade(h1, narrow));
    HybridSystemDesc wide_out = h1;
    wide_out.p = 2;
    wide_out.Y = BoxSet::whole(2);
    wide_out.h = parse_vec_expr("x1; x1", 1, 1, 2);
    CHECK_THROWS(cascade(wide_out, h2));
}

TEST_CASE("cascade feeds y1 into w2 at every grid point") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(-2.0, 2.0), ux(-0.9, 0.9);
    SimPolicy pol;
    pol.dt = 0.01;
    pol.max_time = 3.0;
    pol.max_jumps = 10;
    for (int i = 0; i < 20; ++i) {
        CascadeSystem cs = cascade(affine_1d(u(rng), u(rng), 0.5 * u(rng)), affine_1d(u(rng), u(rng), 0.5 * u(rng)));
        InputSignal in = InputSignal::from_expr(parse_vec_expr("min(1, t) - 0.5", 0, 0, 1));
        for (const CascadeRun& r : run_cascade(cs, in, {ux(rng)}, {ux(rng)}, pol)) {
            REQUIRE(r.arc1.intervals().size() == r.arc2.intervals().size());
            REQUIRE(r.composite.intervals().size() == r.arc2.intervals().size());
            CHECK(r.arc1.domain() == r.arc2.domain());
            for (std::size_t j = 0; j < r.arc2.intervals().size(); ++j) {
                const auto& a1 = r.arc1.intervals()[j];
                const auto& a2 = r.arc2.intervals()[j];
                const auto& c = r.composite.intervals()[j];
                REQUIRE(a1.t == a2.t);
                for (std::size_t q = 0; q < a2.size(); ++q) {
                    CHECK(a2.w[q] == a1.y[q]);
                    CHECK(c.w[q] == a1.w[q]);
                    CHECK(c.x[q] == Vec{a1.x[q][0], a2.x[q][0]});
                    CHECK(c.y[q] == a2.y[q]);
                }
            }
            // Each component replays as an arc of its own system.
            CHECK_FALSE(replay_check(cs.first, r.arc1, pol));
            auto bad2 = replay_check(cs.second, r.arc2, pol);
            CHECK_MESSAGE(!bad2, *bad2);
        }
    }
}

TEST_CASE("cascade contract is the product of the state guarantees") {
    AGContract c1{parse_box("[-1, 1]"), parse_box("[0, 2]"), parse_box("[0, 1]")};
    AGContract c2{parse_box("[-1, 2]"), parse_box("[5, 6]"), parse_box("[3, 4]")};
    AGContract cc = cascade_contract(c1, c2);
    CHECK(cc.AW == c1.AW);
    CHECK(cc.GY == c2.GY);
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> u(-1.0, 7.0);
    for (int i = 0; i < 500; ++i) {
        Vec x{u(rng), u(rng)};
        CHECK(cc.GX.contains(x) == (c1.GX.contains({x[0]}) && c2.GX.contains({x[1]})));
    }
    CHECK_THROWS(cascade_contract(c2, c1));
}

TEST_CASE("feedback construction and closed-loop consistency") {
    HybridSystemDesc h = builtin("example3").systems.at("h");
    FeedbackSystem fs = feedback(h);
    CHECK_FALSE(fs.closed.F[0][0].uses_var('w'));

    HybridSystemDesc reads_w = h;
    reads_w.h = parse_vec_expr("x1 + w1", 1, 1, 1);
    CHECK_THROWS(feedback(reads_w));
    HybridSystemDesc narrow = h;
    narrow.W = parse_box("[0, 1]");
    narrow.Y = parse_box("[0, 2]");
    CHECK_THROWS(feedback(narrow));

    SimPolicy pol;
    pol.max_time = 8.0;
    pol.max_jumps = 20;
    pol.kickstart = true;
    BranchSet bs = run_feedback(fs, {0.0}, pol);
    REQUIRE_FALSE(bs.arcs.empty());
    for (const HybridArc& a : bs.arcs) {
        for (const auto& iv : a.intervals())
            for (std::size_t q = 0; q < iv.size(); ++q) CHECK(iv.w[q] == iv.y[q]);
        CHECK_FALSE(replay_check(h, a, pol));
    }
}

TEST_CASE("square-root feedback arc follows the closed form before its first jump") {
    HybridSystemDesc h = builtin("example3").systems.at("h");
    SimPolicy pol;
    pol.dt = 1e-3;
    pol.max_time = 8.0;
    pol.max_jumps = 20;
    pol.kickstart = true;
    HybridArc a = simulate(h, InputSignal::closed_loop(), {0.0}, pol);
    // x' = sqrt(x) - x from 0: x(t) = (1 - e^{-t/2})^2, reaching 0.9 at t1 = -2 ln(1 - sqrt(0.9)).
    const double t1 = -2.0 * std::log(1.0 - std::sqrt(0.9));
    REQUIRE(a.intervals().size() >= 2);
    const auto& iv = a.intervals()[0];
    CHECK(std::abs(iv.t.back() - t1) < 1e-3);
    double worst = 0.0;
    for (std::size_t q = 0; q < iv.size(); ++q) {
        double e = std::pow(1.0 - std::exp(-iv.t[q] / 2.0), 2.0);
        worst = std::max(worst, std::abs(iv.x[q][0] - e));
    }
    CHECK(worst < 1e-3);
    CHECK(a.intervals()[1].x.front()[0] == doctest::Approx(0.09).epsilon(1e-6));
}

TEST_CASE("half-interval output delay: zero feedback arc and strong cascade") {
    Scenario s = builtin("example2");
    const HybridSystemDesc& h = s.systems.at("h");
    SimPolicy pol = s.policy;
    BranchSet bs = run_feedback(feedback(h), {0.0}, pol);
    AGContract c = s.contracts.at("c");
    for (const HybridArc& a : bs.arcs) {
        for (const auto& iv : a.intervals())
            for (const Vec& x : iv.x) CHECK(x[0] == 0.0);
        CHECK(check_strong(a, c, pol.dt).status == Status::satisfied);
    }
}

TEST_CASE("cascade harness over the built-ins") {
    for (const char* name : {"example1", "example2"}) {
        Scenario s = builtin(name);
        const HybridSystemDesc& h = s.systems.at("h");
        AGContract c = s.contracts.at("c");
        HarnessReport r = harness_cascade_theorem(cascade(h, h), c, c, InputSignal::constant({0.0}), {{0.0}}, {{0.0}},
                                                  s.policy, s.policy.dt);
        CHECK(r.hypotheses_ok);
        CHECK(r.arcs > 0);
        CHECK(r.counterexamples() == 0);
        CHECK(r.checks.size() == 3);
        CHECK(render_harness(r).find("counterexamples: 0") != std::string::npos);
    }
}

TEST_CASE("feedback harness separates weak from strong") {
    Scenario s1 = builtin("example1");
    SimPolicy p1 = s1.policy;
    p1.kickstart = true;
    FeedbackHarnessOptions opt;
    opt.delta_min = p1.dt;
    FeedbackHarnessReport r1 = harness_feedback_theorem(feedback(s1.systems.at("h")), s1.contracts.at("c"), p1, opt);
    CHECK(r1.base.hypotheses_ok);
    CHECK_FALSE(r1.strong_established);
    CHECK(r1.escaping_arc);
    CHECK(r1.base.counterexamples() == 0);

    Scenario s2 = builtin("example2");
    opt.declared_strong = true;
    FeedbackHarnessReport r2 = harness_feedback_theorem(feedback(s2.systems.at("h")), s2.contracts.at("c"), s2.policy, opt);
    CHECK(r2.strong_established);
    CHECK_FALSE(r2.escaping_arc);
    CHECK(r2.base.counterexamples() == 0);

    // G_Y not inside A_W: the harness refuses to run.
    AGContract bad{parse_box("{0}"), parse_box("{0}"), parse_box("[0, 1]")};
    FeedbackHarnessReport r3 = harness_feedback_theorem(feedback(s1.systems.at("h")), bad, p1, opt);
    CHECK_FALSE(r3.base.hypotheses_ok);
    CHECK(r3.base.arcs == 0);
}

TEST_CASE("harnesses on random affine systems") {
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    SimPolicy pol;
    pol.dt = 0.01;
    pol.max_time = 2.0;
    pol.max_jumps = 5;
    pol.max_branches = 4;
    for (int i = 0; i < 10; ++i) {
        HybridSystemDesc h1 = affine_1d(u(rng), u(rng), 0.5 * u(rng)), h2 = affine_1d(u(rng), u(rng), 0.5 * u(rng));
        AGContract c{parse_box("[-1, 1]"), parse_box("[-1, 1]"), parse_box("[-1, 1]")};
        HarnessReport rc = harness_cascade_theorem(cascade(h1, h2), c, c, InputSignal::constant({0.5}), {{-0.5}, {0.5}},
                                                   {{0.0}}, pol, pol.dt);
        CHECK(rc.counterexamples() == 0);
        FeedbackHarnessOptions opt;
        opt.delta_min = pol.dt;
        opt.resolution = 2;
        FeedbackHarnessReport rf = harness_feedback_theorem(feedback(h1), c, pol, opt);
        CHECK(rf.base.counterexamples() == 0);
    }
}
