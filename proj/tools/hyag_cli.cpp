#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "hyag/builtins.hpp"
#include "hyag/runner.hpp"

namespace {

struct Common {
    std::string scenario;
    hyag::RunOptions run;
    double dt = 0, event_tol = 0, max_time = -1, delta_min = 0;
    int max_jumps = -1, max_branches = 0, resolution = 0;
    std::string overlap;
};

void add_common(CLI::App* sub, Common& c, bool with_task) {
    sub->add_option("scenario", c.scenario, "scenario file or builtin:<name>")->required();
    sub->add_option("--dt", c.dt, "flow step")->check(CLI::PositiveNumber);
    sub->add_option("--event-tol", c.event_tol, "event localization tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-time", c.max_time, "flow time budget")->check(CLI::NonNegativeNumber);
    sub->add_option("--max-jumps", c.max_jumps, "jump budget")->check(CLI::NonNegativeNumber);
    sub->add_option("--max-branches", c.max_branches, "branch budget")->check(CLI::PositiveNumber);
    sub->add_option("--overlap", c.overlap, "overlap rule")->check(CLI::IsMember({"jump", "flow", "enumerate"}));
    sub->add_option("--out", c.run.out_dir, "output directory");
    sub->add_option("--delta-min", c.delta_min, "smallest accepted strong-satisfaction delta")->check(CLI::PositiveNumber);
    sub->add_option("--resolution", c.resolution, "sampling resolution for invariance and harness probes")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", c.run.quiet, "no per-task lines");
    if (with_task) sub->add_option("--task", c.run.only_tasks, "run only the named task (repeatable)");
}

int execute(Common& c, const std::set<std::string>& kinds) {
    auto& o = c.run.overrides;
    if (c.dt > 0) o.dt = c.dt;
    if (c.event_tol > 0) o.event_tol = c.event_tol;
    if (c.max_time >= 0) o.max_time = c.max_time;
    if (c.max_jumps >= 0) o.max_jumps = c.max_jumps;
    if (c.max_branches > 0) o.max_branches = c.max_branches;
    if (c.delta_min > 0) o.delta_min = c.delta_min;
    if (c.resolution > 0) o.resolution = c.resolution;
    if (!c.overlap.empty()) o.overlap = hyag::parse_overlap(c.overlap);
    c.run.kinds = kinds;

    hyag::Scenario s;
    try {
        s = hyag::load_scenario(c.scenario);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    hyag::RunResult r = hyag::run_scenario(s, c.run, &std::cout);
    if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
    if (!c.run.quiet) std::cout << "manifest: " << c.run.out_dir << "/manifest.txt (" << r.manifest.size() << " files)\n";
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid systems under assume-guarantee contracts"};
    app.require_subcommand(1);

    // Each subcommand runs the scenario's tasks of the matching kinds.
    const std::map<std::string, std::pair<std::string, std::set<std::string>>> subs{
        {"run", {"run every task of a scenario", {}}},
        {"simulate", {"run the simulate tasks", {"simulate"}}},
        {"check", {"run the monitor and lift tasks", {"check_weak", "check_strong", "lift"}}},
        {"compose", {"run the cascade, feedback and harness tasks", {"cascade", "feedback", "harness", "lift"}}},
        {"invariance", {"run the invariance tasks", {"invariance"}}},
    };
    std::map<std::string, Common> opts;
    std::map<std::string, CLI::App*> apps;
    for (const auto& [name, info] : subs) {
        apps[name] = app.add_subcommand(name, info.first);
        add_common(apps[name], opts[name], true);
    }
    auto* list = app.add_subcommand("builtins", "list the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& b : hyag::builtins()) std::cout << b.name << "\t" << b.description << "\n";
        return 0;
    }
    for (const auto& [name, info] : subs)
        if (apps[name]->parsed()) return execute(opts[name], info.second);
    return 2;
}
