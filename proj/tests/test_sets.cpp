#include <doctest.h>

#include <cmath>
#include <random>

#include "hyag/sets.hpp"

using namespace hyag;

namespace {

BoxSet random_interval(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::bernoulli_distribution coin(0.5);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return BoxSet::interval(a, b, coin(rng), coin(rng));
}

}  // namespace

TEST_CASE("parse and render box literals") {
    BoxSet a = parse_box("[0, 1]");
    CHECK(a.dims() == 1);
    CHECK(a.contains({0.0}));
    CHECK(a.contains({1.0}));
    CHECK_FALSE(a.contains({1.5}));

    BoxSet b = parse_box("(0, 1]");
    CHECK_FALSE(b.contains({0.0}));
    CHECK(b.contains({1.0}));
    CHECK_FALSE(b.closed());

    BoxSet u = parse_box("union of (-inf,-0.9], [0.9,inf)");
    CHECK(u.pieces().size() == 2);
    CHECK(u.contains({-5.0}));
    CHECK(u.contains({0.9}));
    CHECK_FALSE(u.contains({0.0}));
    CHECK_FALSE(u.bounded());

    BoxSet p = parse_box("[0,1] x [2,3]");
    CHECK(p.dims() == 2);
    CHECK(p.contains({0.5, 2.5}));
    CHECK_FALSE(p.contains({0.5, 1.0}));

    BoxSet pt = parse_box("{0}");
    CHECK(pt.contains({0.0}));
    CHECK_FALSE(pt.contains({1e-12}));

    CHECK(parse_box("empty", 1).empty());
    CHECK_THROWS(parse_box("[1, 0]"));
    CHECK_THROWS(parse_box("[0, 1"));

    for (const char* lit : {"[0, 1]", "(-inf, 2]", "union of [0, 1], (2, 3)", "[0, 1] x (2, inf)"}) {
        BoxSet s = parse_box(lit);
        CHECK(parse_box(render_box(s), s.dims()) == s);
    }
}

TEST_CASE("render_real round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 5.943, 121.0}) CHECK(std::stod(render_real(v)) == v);
}

TEST_CASE("expand by zero is the closure") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        BoxSet s = random_interval(rng);
        CHECK(expand(s, 0.0) == s.closure());
    }
    CHECK_THROWS(expand(BoxSet::interval(0, 1), -1.0));
}

TEST_CASE("contract after expand contains the closure in 1-D") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ue(0.01, 2.0);
    for (int i = 0; i < 200; ++i) {
        BoxSet s = random_interval(rng);
        double e = ue(rng);
        CHECK(subset(s.closure(), contract(expand(s, e), e)));
    }
}

TEST_CASE("expand covers every point within eps") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ux(-8.0, 8.0), ue(0.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        BoxSet s = random_interval(rng);
        double e = ue(rng);
        Vec x{ux(rng)};
        if (distance(x, s) <= e) CHECK(expand(s, e).contains(x));
    }
    // n-D: per-axis widening is an outer approximation of the Euclidean ball.
    BoxSet sq = parse_box("[0,1] x [0,1]");
    BoxSet big = expand(sq, 0.5);
    CHECK(big.outer_approx);
    CHECK(big.contains({1.4, 1.4}));  // distance 0.566 > 0.5, still inside
    CHECK(distance({1.4, 1.4}, sq) > 0.5);
}

TEST_CASE("distance to boxes") {
    BoxSet s = parse_box("[0,1] x [0,1]");
    CHECK(distance({0.5, 0.5}, s) == 0.0);
    CHECK(distance({4.0, 5.0}, s) == doctest::Approx(5.0));
    BoxSet u = parse_box("union of [0,1], [3,4]");
    CHECK(distance({2.5}, u) == doctest::Approx(0.5));
}

TEST_CASE("intersect, product, subset, projection") {
    BoxSet a = parse_box("[0, 2]"), b = parse_box("(1, 3]");
    BoxSet i = intersect(a, b);
    CHECK(i == parse_box("(1, 2]"));
    CHECK(subset(i, a));
    CHECK(subset(i, b));
    CHECK_FALSE(subset(a, b));
    CHECK(subset(parse_box("[0, 1]"), parse_box("union of [-1, 0.5], [0.5, 2]")));
    CHECK_FALSE(subset(parse_box("[0, 121]"), parse_box("[0, 11]")));
    CHECK(subset(BoxSet(1), a));

    BoxSet p = product(a, b);
    CHECK(p.dims() == 2);
    CHECK(p.contains({0.0, 3.0}));
    CHECK(project_front(p, 1) == a);
}

TEST_CASE("tangent cone of a box") {
    BoxSet k = parse_box("[-1,1] x [0,2]");
    SignCone c = tangent_cone(k, {0.0, 1.0});
    for (Sign s : c.axes) CHECK(s == Sign::free);
    SignCone lo = tangent_cone(k, {-1.0, 2.0});
    CHECK(lo.axes[0] == Sign::nonneg);
    CHECK(lo.axes[1] == Sign::nonpos);
    CHECK(in_cone(lo, {1.0, -3.0}));
    CHECK_FALSE(in_cone(lo, {-1e-6, 0.0}));
    CHECK(in_cone(lo, {-1e-10, 0.0}, 1e-9));
    SignCone flat = tangent_cone(parse_box("{0}"), {0.0});
    CHECK(flat.axes[0] == Sign::zero);

    CHECK_THROWS(tangent_cone(parse_box("union of [0,1], [2,3]"), {0.5}));
    CHECK_THROWS(tangent_cone(parse_box("[0,1)"), {0.5}));
    CHECK_THROWS(tangent_cone(k, {3.0, 1.0}));
}

TEST_CASE("cone directions keep x + h v close to K") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uv(-3.0, 3.0);
    BoxSet k = parse_box("[-1, 2]");
    for (const Vec& x : sample_boundary(k, 3)) {
        SignCone c = tangent_cone(k, x);
        for (int i = 0; i < 50; ++i) {
            Vec v{uv(rng)};
            if (!in_cone(c, v)) continue;
            for (double h : {1e-3, 1e-4}) CHECK(distance({x[0] + h * v[0]}, k) <= 1e-12);
        }
    }
}

TEST_CASE("sampling") {
    BoxSet k = parse_box("[0,1] x [0,2]");
    auto bnd = sample_boundary(k, 3);
    CHECK_FALSE(bnd.empty());
    for (const Vec& x : bnd) {
        CHECK(k.contains(x));
        bool on_face = x[0] == 0 || x[0] == 1 || x[1] == 0 || x[1] == 2;
        CHECK(on_face);
    }
    auto grid = sample_grid(k.box(), 4);
    CHECK(grid.size() == 16);
    CHECK(sample_grid(parse_box("{3}").box(), 4).size() == 1);
    CHECK_THROWS(sample_boundary(parse_box("[0, inf)"), 3));
}
