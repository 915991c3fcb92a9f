#include "hyag/hybrid_time.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hyag/sets.hpp"

namespace hyag {

HybridTimeDomain::HybridTimeDomain(std::vector<double> jump_times, double end, bool final_open)
    : jumps_(std::move(jump_times)), end_(end), final_open_(final_open) {
    double prev = 0.0;
    for (double t : jumps_) {
        if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("hybrid time domain: negative or non-finite time");
        if (t < prev) throw std::invalid_argument("hybrid time domain: decreasing jump times");
        prev = t;
    }
    if (!(end_ >= prev)) throw std::invalid_argument("hybrid time domain: end precedes last jump");
}

bool HybridTimeDomain::contains(double t, int j) const {
    if (j < 0 || j >= num_intervals()) return false;
    return t >= start_of(j) && t <= end_of(j);
}

HybridTimeDomain make_domain(const std::vector<double>& times, std::optional<double> horizon) {
    if (times.empty()) {
        if (!horizon) throw std::invalid_argument("make_domain: empty time sequence");
        return HybridTimeDomain({}, *horizon, true);
    }
    if (times.front() != 0.0) throw std::invalid_argument("make_domain: sequence must start at 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0) throw std::invalid_argument("make_domain: negative time");
        if (i && times[i] < times[i - 1]) throw std::invalid_argument("make_domain: decreasing times");
    }
    if (horizon) {
        std::vector<double> jumps(times.begin() + 1, times.end());
        return HybridTimeDomain(std::move(jumps), *horizon, true);
    }
    if (times.size() == 1) return HybridTimeDomain({}, 0.0, false);
    std::vector<double> jumps(times.begin() + 1, times.end() - 1);
    return HybridTimeDomain(std::move(jumps), times.back(), false);
}

SupLength sup_and_length(const HybridTimeDomain& e) {
    return {e.sup_t(), e.sup_j(), e.length()};
}

HybridTimeDomain truncate(const HybridTimeDomain& e, double t, int j) {
    if (!e.contains(t, j)) throw std::invalid_argument("truncate: (" + render_real(t) + ", " + std::to_string(j) + ") not in domain");
    std::vector<double> jumps(e.jump_times().begin(), e.jump_times().begin() + j);
    return HybridTimeDomain(std::move(jumps), t, false);
}

HybridTimeDomain shared_domain(const HybridTimeDomain& a, const HybridTimeDomain& b, bool align) {
    double horizon = std::min(a.end(), b.end());
    std::map<double, std::pair<int, int>> mult;
    for (double t : a.jump_times())
        if (t <= horizon) ++mult[t].first;
    for (double t : b.jump_times())
        if (t <= horizon) ++mult[t].second;
    std::vector<double> merged;
    for (const auto& [t, m] : mult) {
        int n;
        if (m.first == m.second) n = m.first;  // identical jump pattern from both sides
        else if (align) n = std::max(m.first, m.second);
        else n = m.first + m.second;
        merged.insert(merged.end(), static_cast<std::size_t>(n), t);
    }
    bool open = (a.end() == horizon && a.final_open()) || (b.end() == horizon && b.final_open());
    return HybridTimeDomain(std::move(merged), horizon, open);
}

std::string render_domain(const HybridTimeDomain& e) {
    std::string out = "[";
    for (int j = 0; j < e.num_intervals(); ++j) {
        if (j) out += ", ";
        out += "[" + render_real(e.start_of(j)) + ", " + render_real(e.end_of(j)) + ", " + std::to_string(j) + "]";
    }
    return out + "]";
}

}  // namespace hyag
