#ifndef HYAG_RUNNER_HPP
#define HYAG_RUNNER_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hyag/scenario.hpp"

namespace hyag {

// Command-line overrides; they win over scenario and task settings.
struct PolicyOverrides {
    std::optional<double> dt, event_tol, max_time, delta_min;
    std::optional<int> max_jumps, max_branches, resolution;
    std::optional<OverlapRule> overlap;
};

struct RunOptions {
    std::string out_dir = "hyag_out";
    std::vector<std::string> only_tasks;  // by name; empty runs all
    std::set<std::string> kinds;          // by kind; empty runs all
    PolicyOverrides overrides;
    bool quiet = false;
};

struct TaskOutcome {
    std::string name, kind, status;
};

struct RunResult {
    int exit_code = 0;
    std::vector<TaskOutcome> tasks;
    std::vector<std::pair<std::string, std::string>> manifest;  // file, producing task
    std::string error;
};

// "builtin:<name>" or a file path. Throws ScenarioError or std::runtime_error.
Scenario load_scenario(const std::string& ref);

// Runs the selected tasks in order and writes every output plus manifest.txt.
// Exit code: 0 all satisfied/verified, 1 on any violated/falsified/unknown
// verdict, 2 on an operational error.
RunResult run_scenario(const Scenario& s, const RunOptions& opt, std::ostream* log = nullptr);

}  // namespace hyag

#endif
