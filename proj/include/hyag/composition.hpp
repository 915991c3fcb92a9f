#ifndef HYAG_COMPOSITION_HPP
#define HYAG_COMPOSITION_HPP

#include <string>
#include <vector>

#include "hyag/contracts.hpp"
#include "hyag/systems.hpp"

namespace hyag {

struct CascadeSystem {
    HybridSystemDesc first, second;
};

// Requires Y1 ⊆ W2 and matching dimensions.
CascadeSystem cascade(const HybridSystemDesc& h1, const HybridSystemDesc& h2);

// One execution of the cascade, every arc on the shared hybrid time domain.
struct CascadeRun {
    HybridArc arc1;       // (w1, x1, y1)
    HybridArc arc2;       // (w2 = y1, x2, y2)
    HybridArc composite;  // (w1, (x1, x2), y2)
};

// H1 runs first; H2 is then driven by y1 and holds its state across H1's jumps.
std::vector<CascadeRun> run_cascade(const CascadeSystem& cs, const InputSignal& in1, const Vec& x01,
                                    const Vec& x02, const SimPolicy& policy, bool* truncated = nullptr);

// Requires G_Y1 ⊆ A_W2.
AGContract cascade_contract(const AGContract& c1, const AGContract& c2);

// Closed loop w = h(x). Requires Y ⊆ W, p == m, and an output map that does not read w.
struct FeedbackSystem {
    HybridSystemDesc open;    // the original system
    HybridSystemDesc closed;  // F_f, G_f with w substituted; m = 0 is not used, w stays recorded
};

FeedbackSystem feedback(const HybridSystemDesc& h);
BranchSet run_feedback(const FeedbackSystem& fs, const Vec& x0, const SimPolicy& policy);

struct HarnessCheck {
    std::string name;     // which implication
    int premises_held = 0;
    int inconclusive = 0; // premise held, conclusion unknown
    int counterexamples = 0;
};

struct HarnessReport {
    bool hypotheses_ok = true;
    std::vector<std::string> notes;
    std::vector<HarnessCheck> checks;
    int arcs = 0;
    std::vector<HybridArc> counterexample_arcs;
    int counterexamples() const;
};

HarnessReport harness_cascade_theorem(const CascadeSystem& cs, const AGContract& c1, const AGContract& c2,
                                      const InputSignal& in1, const std::vector<Vec>& x01s, const std::vector<Vec>& x02s,
                                      const SimPolicy& policy, double delta_min);

struct FeedbackHarnessOptions {
    double delta_min = 1e-3;
    double switch_time = 1.0;    // probes switch from A_W to W \ A_W here
    int resolution = 3;          // samples per axis for probes and initial states
    bool declared_strong = false;  // the scenario asserts h strongly satisfies c
};

struct FeedbackHarnessReport {
    HarnessReport base;
    bool strong_established = false;  // by declaration or by every probe
    std::vector<std::string> probe_failures;
    bool escaping_arc = false;        // some feedback arc leaves G_X
    std::string escape_witness;
};

FeedbackHarnessReport harness_feedback_theorem(const FeedbackSystem& fs, const AGContract& c, const SimPolicy& policy,
                                               const FeedbackHarnessOptions& opt);

std::string render_harness(const HarnessReport& r);

}  // namespace hyag

#endif
