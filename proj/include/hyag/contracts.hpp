#ifndef HYAG_CONTRACTS_HPP
#define HYAG_CONTRACTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "hyag/arcs.hpp"
#include "hyag/sets.hpp"

namespace hyag {

struct AGContract {
    BoxSet AW, GX, GY;
    bool g_y_closed() const { return GY.closed(); }
};

enum class Status { satisfied, violated, unknown };
enum class Which { state, output, initial_output };

struct HybridTime {
    double t = 0.0;
    int j = 0;
};

struct Violation {
    double t;
    int j;
    Which which;
};

struct Verdict {
    Status status = Status::satisfied;
    std::optional<Violation> first_violation;
    std::optional<HybridTime> horizon;  // none when w(0,0) is already outside A_W
    std::optional<double> delta_witness;
    // Per flow interval: delta certified from the interval start (midpoint convention).
    std::vector<double> interval_deltas;
    bool horizon_is_arc_end = false;
};

struct MonitorOptions {
    double face_tol = kFaceTol;
};

Verdict check_weak(const HybridArc& arc, const AGContract& c, const MonitorOptions& opt = {});
Verdict check_strong(const HybridArc& arc, const AGContract& c, double delta_min, const MonitorOptions& opt = {});

struct LiftResult {
    AGContract contract;
    std::vector<std::string> warnings;
};

LiftResult lift_weak_to_strong(const AGContract& c, double beta, double eps, const BoxSet& Y);

struct CompatReport {
    bool compatible;
    bool g_y_closed;
    BoxSet expanded;  // B_eps(G_Y) ∩ Y
};

CompatReport feedback_compat(const AGContract& c, double eps, const BoxSet& Y);

const char* status_name(Status s);
const char* which_name(Which w);
std::string render_verdict(const Verdict& v);
std::string render_contract(const AGContract& c);

}  // namespace hyag

#endif
