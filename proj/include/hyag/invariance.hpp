#ifndef HYAG_INVARIANCE_HPP
#define HYAG_INVARIANCE_HPP

#include <optional>
#include <string>
#include <vector>

#include "hyag/contracts.hpp"
#include "hyag/systems.hpp"

namespace hyag {

struct InvarianceProblem {
    HybridSystemDesc system;
    AGContract contract;
    BoxSet K;
    int boundary_resolution = 5;
    int aw_resolution = 5;
    int jumpset_resolution = 5;
    std::optional<double> cone_tol;  // default: 0 on the exact path, 1e-9 when sampled
};

enum class CondStatus { verified, falsified, unknown };

struct CondVerdict {
    CondStatus status = CondStatus::verified;
    bool exact = false;
    Vec witness_x, witness_w;  // set when falsified
    std::string detail;
    std::vector<std::string> lines;  // per-face ranges and similar evidence
};

enum class Overall { certified, falsified, unknown };

struct InvarianceVerdict {
    CondVerdict cond_i, cond_ii, cond_iii;
    Overall overall = Overall::unknown;
    bool exact = false;
    bool weak_concluded = false;  // H weakly satisfies the contract
    bool feedback_concluded = false;   // feedback arcs stay in G_X
    std::vector<std::string> notes;
    std::vector<Vec> confirmation_x0;
    std::vector<HybridArc> confirmation_arcs;
    bool confirmation_ok = true;
};

// Throws std::invalid_argument on a non-compact A_W, a K that is not a single
// closed box, or mismatched dimensions.
void check_problem(const InvarianceProblem& p);
bool exact_path_available(const InvarianceProblem& p);

CondVerdict check_condition_i(const InvarianceProblem& p);
CondVerdict check_condition_ii(const InvarianceProblem& p);
CondVerdict check_condition_iii(const InvarianceProblem& p);

// Aggregates (i)-(iii), sets the conclusion flags and runs confirmation
// simulations of the feedback loop from the corners and center of X0.
InvarianceVerdict check_invariant_relative(const InvarianceProblem& p, const SimPolicy& policy);

const char* cond_name(CondStatus s);
const char* overall_name(Overall o);
std::string render_certificate(const InvarianceProblem& p, const InvarianceVerdict& v);

}  // namespace hyag

#endif
