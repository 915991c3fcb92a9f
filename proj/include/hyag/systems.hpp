#ifndef HYAG_SYSTEMS_HPP
#define HYAG_SYSTEMS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyag/arcs.hpp"
#include "hyag/expr.hpp"
#include "hyag/sets.hpp"

namespace hyag {

// C and D live either in x-space (dims n) or in (x, w)-space (dims n + m).
// F and G are finite selection lists; h may read tau/len (interval-relative time).
struct HybridSystemDesc {
    std::string name;
    std::size_t m = 1, n = 1, p = 1;
    BoxSet W, X, Y, C, D, X0;
    std::vector<VecExpr> F, G;
    VecExpr h;
    bool lipschitz = false;   // declared: F and h locally Lipschitz
    bool basic_conditions = false; // declared, never machine-checked
};

enum class OverlapRule { jump_priority, flow_priority, enumerate };

struct SimPolicy {
    double dt = 1e-3;
    double event_tol = 1e-9;
    OverlapRule overlap_rule = OverlapRule::jump_priority;
    double max_time = 10.0;
    int max_jumps = 100;
    int max_branches = 64;
    bool align_coincident_jumps = false;
    bool kickstart = false;
    double zeno_window = 1.0;
    int zeno_threshold = 100;
};

void check_policy(const SimPolicy& p);
const char* overlap_name(OverlapRule r);
OverlapRule parse_overlap(const std::string& s);

// Where w comes from: an expression in (t, j), the system's own output
// (feedback), or the output of another arc (cascade).
struct InputSignal {
    enum Kind { expression, feedback, arc } kind = expression;
    VecExpr expr;
    std::shared_ptr<const HybridArc> source;

    static InputSignal constant(const Vec& w);
    static InputSignal from_expr(VecExpr e);
    static InputSignal closed_loop();
    static InputSignal from_arc(std::shared_ptr<const HybridArc> a);
};

struct BranchSet {
    std::vector<HybridArc> arcs;
    bool truncated = false;
};

bool in_set(const BoxSet& s, const Vec& x, const Vec& w);
void validate(const HybridSystemDesc& d);
HybridArc simulate(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0, const SimPolicy& policy);
BranchSet enumerate_branches(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0, const SimPolicy& policy);
// Flows between prescribed jump times and jumps (first selection) at each of them.
HybridArc simulate_on_schedule(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0,
                               const std::vector<double>& jump_times, double horizon, const SimPolicy& policy);

// (S1)/(S2) replay: returns a description of the first failure, if any.
std::optional<std::string> replay_check(const HybridSystemDesc& d, const HybridArc& arc, const SimPolicy& policy);

// Finite sample points of a possibly unbounded box.
std::vector<Vec> finite_samples(const Box& b, int resolution);

}  // namespace hyag

#endif
