#ifndef HYAG_ARCS_HPP
#define HYAG_ARCS_HPP

#include <string>
#include <vector>

#include "hyag/hybrid_time.hpp"
#include "hyag/sets.hpp"

namespace hyag {

enum class StopReason { none, max_time, max_jumps, no_continuation, external };

// Samples of (w, x, y) on one flow interval; t includes both endpoints.
struct ArcInterval {
    std::vector<double> t;
    std::vector<Vec> w, x, y;
    std::size_t size() const { return t.size(); }
};

struct ArcSample {
    Vec w, x, y;
};

class HybridArc {
public:
    HybridArc() = default;
    HybridArc(std::size_t m, std::size_t n, std::size_t p) : m_(m), n_(n), p_(p) {}

    std::size_t m() const { return m_; }
    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }

    const std::vector<ArcInterval>& intervals() const { return intervals_; }
    std::vector<ArcInterval>& intervals() { return intervals_; }
    HybridTimeDomain domain() const;

    // Adds a validated interval; its first time must equal the previous interval's last.
    void push_interval(ArcInterval iv);

    StopReason stop = StopReason::none;
    bool final_open = false;
    // One flag per jump: true when the state was held across a jump made by
    // another component (composition) rather than produced by a reset map.
    std::vector<bool> held_jumps;
    // Per interval, the interval index of an arc-valued input (cascade only).
    std::vector<std::size_t> source_index;

    std::size_t num_points() const;
    bool operator==(const HybridArc& o) const;

private:
    std::size_t m_ = 0, n_ = 0, p_ = 0;
    std::vector<ArcInterval> intervals_;
};

struct ArcClassification {
    enum Kind { complete_budget_truncated, compact_maximal_candidate, zeno_suspect } kind;
    double max_time;
    int max_jumps;
};

ArcSample eval(const HybridArc& arc, double t, int j);
HybridArc reparametrize(const HybridArc& arc, const HybridTimeDomain& target);
double max_jump_variation(const HybridArc& arc);
ArcClassification classify(const HybridArc& arc, double max_time, int max_jumps,
                           double zeno_window = 1.0, int zeno_threshold = 100);
const char* kind_name(ArcClassification::Kind k);
const char* stop_name(StopReason r);

std::string arc_to_csv(const HybridArc& arc);

}  // namespace hyag

#endif
