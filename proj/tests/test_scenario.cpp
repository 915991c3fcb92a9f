#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyag/builtins.hpp"
#include "hyag/runner.hpp"
#include "hyag/scenario.hpp"

using namespace hyag;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"SCN(
[policy]
dt = 0.01
max_time = 2

[system.lin]
dims = [1, 1, 1]
W = "(-inf, inf)"
X = "(-inf, inf)"
Y = "(-inf, inf)"
C = "[-1, 1]"
D = "{0}"
F = ["-2*x1 - 2*w1"]
G = ["0.5*x1"]
h = "x1"
X0 = "[-1, 1]"

[contract.c]
AW = "[-1, 1]"
GX = "[-1, 1]"
GY = "[-1, 1]"

[input.half]
expr = "0.5"

[[task]]
kind = "check_weak"
name = "weak"
system = "lin"
contract = "c"
input = "half"
x0 = [1]
dt = 0.005
)SCN";

int error_line(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.line;
    }
    return -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("parse a small scenario") {
    Scenario s = parse_scenario(kSmall);
    CHECK(s.policy.dt == 0.01);
    CHECK(s.policy.max_time == 2.0);
    REQUIRE(s.systems.count("lin"));
    CHECK(s.systems.at("lin").C == parse_box("[-1, 1]"));
    REQUIRE(s.tasks.size() == 1);
    CHECK(s.tasks[0].kind == "check_weak");
    CHECK(s.tasks[0].numbers("x0") == Vec{1.0});
    SimPolicy tp = task_policy(s, s.tasks[0]);
    CHECK(tp.dt == 0.005);
    CHECK(tp.max_time == 2.0);
}

TEST_CASE("render then parse is a fixed point") {
    std::vector<std::string> texts{kSmall};
    for (const auto& b : builtins()) texts.push_back(builtin_text(b.name));
    for (const auto& t : texts) {
        Scenario a = parse_scenario(t);
        std::string r1 = render_scenario(a);
        Scenario b = parse_scenario(r1);
        CHECK(render_scenario(b) == r1);
        CHECK(a.systems.size() == b.systems.size());
        CHECK(a.contracts.size() == b.contracts.size());
        REQUIRE(a.tasks.size() == b.tasks.size());
        for (std::size_t i = 0; i < a.tasks.size(); ++i) {
            CHECK(a.tasks[i].name == b.tasks[i].name);
            CHECK(a.tasks[i].args == b.tasks[i].args);
        }
        for (const auto& [name, sys] : a.systems) {
            const auto& o = b.systems.at(name);
            CHECK(sys.C == o.C);
            CHECK(sys.D == o.D);
            CHECK(sys.X0 == o.X0);
            CHECK(render_vec_expr(sys.h) == render_vec_expr(o.h));
        }
        for (const auto& [name, c] : a.contracts) {
            CHECK(c.AW == b.contracts.at(name).AW);
            CHECK(c.GY == b.contracts.at(name).GY);
        }
    }
}

TEST_CASE("errors carry line numbers") {
    std::string base = kSmall;
    CHECK(error_line(base + "\n[[task]]\nkind = \"simulate\"\nname = \"x\"\nsystem = \"nope\"\ninput = \"half\"\nx0 = [0]\n") > 0);
    CHECK(error_line("[policy]\ndt = = 3\n") == 2);
    CHECK(error_line("[policy]\ndt = 0.1\n[polcy]\n") == 3);
    CHECK(error_line("[policy]\ndt = 0.1\ndt = 0.2\n") == 3);
    CHECK(error_line("x = 1\n") == 1);
    CHECK(error_line("[policy]\noverlap_rule = \"sideways\"\n") == 2);
    CHECK_THROWS_AS(parse_scenario(base + "\n[[task]]\nkind = \"simulate\"\nname = \"weak\"\nsystem = \"lin\"\ninput = \"half\"\nx0 = [0]\n"),
                    ScenarioError);
    // Expressions are checked at load time.
    std::string bad_expr = base;
    bad_expr.replace(bad_expr.find("-2*x1 - 2*w1"), 12, "-2*x2");
    CHECK(error_line(bad_expr) > 0);
}

TEST_CASE("every built-in loads") {
    CHECK(builtins().size() == 5);
    for (const auto& b : builtins()) CHECK_NOTHROW(load_scenario("builtin:" + b.name));
    CHECK_THROWS(load_scenario("builtin:nope"));
    CHECK_THROWS(load_scenario("/nonexistent/scenario.toml"));
}

TEST_CASE("runner writes a manifest that matches the directory") {
    fs::path out = fs::temp_directory_path() / "hyag_scenario_test";
    fs::remove_all(out);
    RunOptions opt;
    opt.out_dir = out.string();
    opt.quiet = true;
    RunResult r = run_scenario(parse_scenario(kSmall), opt);
    CHECK(r.exit_code == 0);
    REQUIRE(r.tasks.size() == 1);
    CHECK(r.tasks[0].status == "satisfied");
    std::set<std::string> listed, present;
    for (const auto& [file, task] : r.manifest) listed.insert(file);
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().filename() != "manifest.txt") present.insert(e.path().filename().string());
    CHECK(listed == present);

    // A later run with fewer outputs removes files the earlier manifest listed.
    fs::path stale = out / "weak_arc0.csv";
    REQUIRE(fs::exists(stale));
    opt.kinds = {"simulate"};
    CHECK(run_scenario(parse_scenario(kSmall), opt).manifest.empty());
    CHECK_FALSE(fs::exists(stale));
    opt.kinds = {};
    opt.only_tasks = {"no-such-task"};
    CHECK(run_scenario(parse_scenario(kSmall), opt).exit_code == 2);
    fs::remove_all(out);
}

TEST_CASE("exit codes follow verdicts") {
    fs::path out = fs::temp_directory_path() / "hyag_exit_test";
    RunOptions opt;
    opt.out_dir = out.string();
    opt.quiet = true;
    std::string failing = kSmall;
    failing.replace(failing.find("expr = \"0.5\""), 12, "expr = \"0.25\"");
    failing.replace(failing.find("GX = \"[-1, 1]\""), 14, "GX = \"[0, 0.5]\"");
    CHECK(run_scenario(parse_scenario(failing), opt).exit_code == 1);
    opt.only_tasks = {"feedback-weak-check"};
    CHECK(run_scenario(load_scenario("builtin:example1"), opt).exit_code == 1);
    opt.only_tasks = {};
    CHECK(run_scenario(load_scenario("builtin:shared_domain_example"), opt).exit_code == 0);
    fs::remove_all(out);
}

TEST_CASE("reruns are byte-identical") {
    fs::path a = fs::temp_directory_path() / "hyag_det_a", b = fs::temp_directory_path() / "hyag_det_b";
    RunOptions opt;
    opt.quiet = true;
    opt.out_dir = a.string();
    RunResult ra = run_scenario(load_scenario("builtin:example4"), opt);
    opt.out_dir = b.string();
    RunResult rb = run_scenario(load_scenario("builtin:example4"), opt);
    REQUIRE(ra.manifest == rb.manifest);
    for (const auto& [file, task] : ra.manifest) CHECK(slurp(a / file) == slurp(b / file));
    fs::remove_all(a);
    fs::remove_all(b);
}
