#ifndef HYAG_SCENARIO_HPP
#define HYAG_SCENARIO_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyag/contracts.hpp"
#include "hyag/systems.hpp"

namespace hyag {

// Load-time failure. line/column are 1-based; 0 when not tied to a position.
struct ScenarioError : std::runtime_error {
    ScenarioError(int line, int column, const std::string& msg);
    int line, column;
};

// A config value: string, number, boolean or a single-line array.
struct Value {
    enum Kind { string, number, boolean, array } kind = string;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<Value> items;
    int line = 0, column = 0;

    static Value of(const std::string& s);
    static Value of(double v);
    static Value of_bool(bool b);
    static Value of(const std::vector<double>& v);
    static Value of(const std::vector<std::string>& v);

    std::string render() const;
    bool operator==(const Value& o) const;
};

struct Task {
    std::string kind, name;
    std::map<std::string, Value> args;
    int line = 0;

    bool has(const std::string& k) const { return args.count(k) > 0; }
    const Value& at(const std::string& k) const;
    std::string text(const std::string& k, const std::string& dflt = "") const;
    double number(const std::string& k, double dflt) const;
    bool flag(const std::string& k, bool dflt) const;
    Vec numbers(const std::string& k) const;
};

struct Scenario {
    std::map<std::string, HybridSystemDesc> systems;
    std::map<std::string, AGContract> contracts;
    std::map<std::string, VecExpr> inputs;
    std::vector<Task> tasks;
    SimPolicy policy;
};

// Line-oriented config: [policy], [system.<name>], [contract.<name>],
// [input.<name>] tables and [[task]] entries of `key = value` lines.
Scenario parse_scenario(const std::string& text);
std::string render_scenario(const Scenario& s);

// Task policy: scenario defaults, then any policy keys set on the task.
SimPolicy task_policy(const Scenario& s, const Task& t);

const std::vector<std::string>& task_kinds();

}  // namespace hyag

#endif
