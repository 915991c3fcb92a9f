#ifndef HYAG_TESTS_ARC_GEN_HPP
#define HYAG_TESTS_ARC_GEN_HPP

// Random 1-D arcs and contracts for property tests.

#include <algorithm>
#include <random>

#include "hyag/arcs.hpp"
#include "hyag/contracts.hpp"

namespace hyag::testing {

inline HybridArc random_arc(std::mt19937& rng, int max_jumps = 4) {
    std::uniform_int_distribution<int> nj(0, max_jumps), npts(2, 12);
    std::uniform_real_distribution<double> len(0.0, 1.5), val(-3.0, 3.0), step(0.01, 0.3);
    HybridArc arc(1, 1, 1);
    int jumps = nj(rng);
    double t = 0.0;
    for (int j = 0; j <= jumps; ++j) {
        ArcInterval iv;
        int n = npts(rng);
        // Some intervals are a single point (consecutive jumps at one instant).
        if (j > 0 && len(rng) < 0.2) n = 1;
        for (int q = 0; q < n; ++q) {
            if (q > 0) t += step(rng);
            iv.t.push_back(t);
            iv.w.push_back({val(rng)});
            iv.x.push_back({val(rng)});
            iv.y.push_back({val(rng)});
        }
        arc.push_interval(std::move(iv));
    }
    return arc;
}

inline BoxSet random_interval_set(std::mt19937& rng, double scale = 3.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::bernoulli_distribution coin(0.3);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return BoxSet::interval(a, b, coin(rng), coin(rng));
}

inline AGContract random_contract(std::mt19937& rng) {
    // A_W biased wide so that the assumption horizon is often non-trivial.
    return AGContract{random_interval_set(rng, 4.0), random_interval_set(rng), random_interval_set(rng)};
}

}  // namespace hyag::testing

#endif
