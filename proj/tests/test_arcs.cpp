#include <doctest.h>

#include <cmath>

#include "arc_gen.hpp"
#include "hyag/arcs.hpp"

using namespace hyag;

namespace {

ArcInterval line(double t0, double t1, int n, double v0, double slope) {
    ArcInterval iv;
    for (int q = 0; q < n; ++q) {
        double t = t0 + (t1 - t0) * q / (n - 1);
        double v = v0 + slope * (t - t0);
        iv.t.push_back(t);
        iv.w.push_back({0.0});
        iv.x.push_back({v});
        iv.y.push_back({v});
    }
    return iv;
}

HybridArc two_piece() {
    HybridArc a(1, 1, 1);
    a.push_interval(line(0.0, 1.0, 5, 0.0, 1.0));
    a.push_interval(line(1.0, 2.0, 5, 0.25, 1.0));
    return a;
}

}  // namespace

TEST_CASE("arc construction rejects malformed intervals") {
    HybridArc a(1, 1, 1);
    CHECK_THROWS(a.push_interval(line(0.5, 1.0, 3, 0.0, 1.0)));
    a.push_interval(line(0.0, 1.0, 3, 0.0, 1.0));
    CHECK_THROWS(a.push_interval(line(1.5, 2.0, 3, 0.0, 1.0)));
    ArcInterval bad = line(1.0, 2.0, 3, 0.0, 1.0);
    bad.t[2] = bad.t[1];
    CHECK_THROWS(a.push_interval(bad));
    ArcInterval ragged = line(1.0, 2.0, 3, 0.0, 1.0);
    ragged.x.pop_back();
    CHECK_THROWS(a.push_interval(ragged));
}

TEST_CASE("eval is exact at nodes and linear between them") {
    std::mt19937 rng(31);
    for (int i = 0; i < 100; ++i) {
        HybridArc a = testing::random_arc(rng);
        for (std::size_t j = 0; j < a.intervals().size(); ++j) {
            const auto& iv = a.intervals()[j];
            for (std::size_t q = 0; q < iv.size(); ++q) {
                // Node values must come back unchanged; a jump time also
                // belongs to the previous interval, so look it up per j.
                ArcSample s = eval(a, iv.t[q], static_cast<int>(j));
                if (q + 1 < iv.size() && iv.t[q + 1] == iv.t[q]) continue;
                CHECK(s.x == iv.x[q]);
                CHECK(s.y == iv.y[q]);
            }
        }
    }
    HybridArc a = two_piece();
    CHECK(eval(a, 0.125, 0).x[0] == doctest::Approx(0.125));
    CHECK(eval(a, 1.0, 0).x[0] == 1.0);
    CHECK(eval(a, 1.0, 1).x[0] == 0.25);
    CHECK_THROWS(eval(a, 1.5, 0));
    CHECK_THROWS(eval(a, 0.5, 2));
}

TEST_CASE("domain and jump variation") {
    HybridArc a = two_piece();
    CHECK(a.domain().jump_times() == std::vector<double>{1.0});
    CHECK(a.domain().end() == 2.0);
    CHECK(max_jump_variation(a) == doctest::Approx(0.75));
    CHECK(a.num_points() == 10);
}

TEST_CASE("reparametrize keeps values and jump variation") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        HybridArc a = testing::random_arc(rng);
        HybridTimeDomain own = a.domain();
        // Insert a foreign jump strictly inside some interval.
        std::vector<double> jumps = own.jump_times();
        int k = std::uniform_int_distribution<int>(0, own.num_intervals() - 1)(rng);
        double s = own.start_of(k), e = own.end_of(k);
        if (e - s < 1e-6) continue;
        double extra = s + (0.2 + 0.6 * u(rng)) * (e - s);
        jumps.insert(jumps.begin() + k, extra);
        HybridTimeDomain target(jumps, own.end(), false);
        HybridArc r = reparametrize(a, target);

        CHECK(max_jump_variation(r) == doctest::Approx(max_jump_variation(a)));
        CHECK(r.held_jumps.size() == jumps.size());
        CHECK(r.held_jumps[k]);
        // Every native node is found at its image hybrid time.
        for (int j = 0; j < own.num_intervals(); ++j) {
            const auto& iv = a.intervals()[j];
            for (std::size_t q = 0; q < iv.size(); ++q) {
                int jj = j > k || (j == k && iv.t[q] > extra) ? j + 1 : j;
                if (j == k && iv.t[q] == extra) continue;
                CHECK(eval(r, iv.t[q], jj).x == eval(a, iv.t[q], j).x);
            }
        }
    }
    HybridArc a = two_piece();
    CHECK_THROWS(reparametrize(a, HybridTimeDomain({}, 2.0, false)));
    CHECK_THROWS(reparametrize(a, HybridTimeDomain({1.0}, 3.0, false)));
}

TEST_CASE("classification") {
    HybridArc a = two_piece();
    a.stop = StopReason::max_time;
    CHECK(classify(a, 2.0, 10).kind == ArcClassification::complete_budget_truncated);
    a.stop = StopReason::no_continuation;
    CHECK(classify(a, 5.0, 10).kind == ArcClassification::compact_maximal_candidate);

    HybridArc z(1, 1, 1);
    z.push_interval(line(0.0, 0.5, 3, 0.0, 1.0));
    double t = 0.5;
    for (int i = 0; i < 5; ++i, t += 1e-3) z.push_interval(line(t, t + 1e-3, 2, 0.0, 1.0));
    CHECK(classify(z, 10.0, 100, 1.0, 3).kind == ArcClassification::zeno_suspect);
}

TEST_CASE("csv layout") {
    HybridArc a = two_piece();
    std::string csv = arc_to_csv(a);
    CHECK(csv.rfind("t,j,w_1,x_1,y_1\n", 0) == 0);
    CHECK(csv.find("1,0,0,1,1\n") != std::string::npos);
    CHECK(csv.find("1,1,0,0.25,0.25\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}
