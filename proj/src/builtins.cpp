#include "hyag/builtins.hpp"

#include <map>
#include <stdexcept>

namespace hyag {

namespace {

const char* kExample1 = R"SCN(# Cube-root flow driven by the input, halving jump. Weak only.
[policy]
dt = 0.001
max_time = 3
max_jumps = 10
max_branches = 16
overlap_rule = "enumerate"

[system.h]
dims = [1, 1, 1]
W = "[0,inf)"
X = "[0,inf)"
Y = "[0,inf)"
C = "[-1,1]"
D = "(-2,2)"
F = ["cbrt(w1)"]
G = ["0.5*w1"]
h = "x1"
X0 = "{0}"

[contract.c]
AW = "{0}"
GX = "{0}"
GY = "{0}"

[input.zero]
expr = "0"

# zero up to t = 1, then leaves the assumption
[input.leave]
expr = "step(t-1)"

[[task]]
kind = "check_weak"
name = "open-loop-weak"
system = "h"
contract = "c"
input = "zero"
x0 = [0]

[[task]]
kind = "check_strong"
name = "open-loop-strong"
system = "h"
contract = "c"
input = "leave"
x0 = [0]
delta_min = 0.001

[[task]]
kind = "feedback"
name = "feedback-weak-check"
system = "h"
contract = "c"
x0 = [0]
check = "state"
kickstart = true

[[task]]
kind = "harness"
name = "feedback-harness"
theorem = "feedback"
system = "h"
contract = "c"
kickstart = true

[[task]]
kind = "harness"
name = "cascade-harness"
theorem = "cascade"
first = "h"
second = "h"
c1 = "c"
c2 = "c"
input = "zero"
)SCN";

const char* kExample2 = R"SCN(# Same plant, output held at zero for the first half of every flow interval.
[policy]
dt = 0.001
max_time = 5
max_jumps = 10
max_branches = 16
overlap_rule = "enumerate"

[system.h]
dims = [1, 1, 1]
W = "[0,inf)"
X = "[0,inf)"
Y = "[0,inf)"
C = "[-1,1]"
D = "(-2,2)"
F = ["cbrt(w1)"]
G = ["0.5*w1"]
h = "x1*step(tau - len/2)"
X0 = "{0}"

[contract.c]
AW = "{0}"
GX = "{0}"
GY = "{0}"

[input.zero]
expr = "0"

[[task]]
kind = "check_strong"
name = "strong-schedule"
system = "h"
contract = "c"
input = "zero"
x0 = [0]
schedule = [1, 2.5, 3, 4.2]
horizon = 5
delta_min = 0.001

[[task]]
kind = "cascade"
name = "cascade-self"
first = "h"
second = "h"
c1 = "c"
c2 = "c"
input = "zero"
x01 = [0]
x02 = [0]
check = "strong"

[[task]]
kind = "harness"
name = "feedback-harness"
theorem = "feedback"
system = "h"
contract = "c"
declared_strong = true

[[task]]
kind = "harness"
name = "cascade-harness"
theorem = "cascade"
first = "h"
second = "h"
c1 = "c"
c2 = "c"
input = "zero"
)SCN";

const char* kExample3 = R"SCN(# Square-root flow with a = 11; lifted contract for the closed loop.
[policy]
dt = 0.001
max_time = 8
max_jumps = 20
max_branches = 16
overlap_rule = "jump"

[system.h]
dims = [1, 1, 1]
W = "[0,inf)"
X = "[0,inf)"
Y = "[0,inf)"
C = "(-0.9,0.9)"
D = "union of (-inf,-0.9], [0.9,inf)"
F = ["sqrt(w1)-x1"]
G = ["0.1*w1"]
h = "x1"
X0 = "[0,0.1]"

[contract.c]
AW = "[0,121]"
GX = "[0,11]"
GY = "[0,11]"

[[task]]
kind = "lift"
name = "lift"
contract = "c"
beta = 110
eps = 110
system = "h"
as = "c_lift"
feedback = true
x0 = [0]
kickstart = true

[[task]]
kind = "feedback"
name = "feedback"
system = "h"
contract = "c_lift"
x0 = [0]
check = "state"
kickstart = true

[[task]]
kind = "harness"
name = "feedback-harness"
theorem = "feedback"
system = "h"
contract = "c_lift"
kickstart = true
)SCN";

const char* kExample4 = R"SCN(# Linear flow -2x - 2w on [-1,1], jump at the origin. b = 1.
[policy]
dt = 0.001
max_time = 10
max_jumps = 100
max_branches = 16
overlap_rule = "jump"

[system.h]
dims = [1, 1, 1]
W = "(-inf,inf)"
X = "(-inf,inf)"
Y = "(-inf,inf)"
C = "[-1,1]"
D = "{0}"
F = ["-2*x1-2*w1"]
G = ["0.5*x1"]
h = "x1"
X0 = "[-1,1]"
lipschitz = true
basic_conditions = true

[contract.c]
AW = "[-1,1]"
GX = "[-1,1]"
GY = "[-1,1]"

[[task]]
kind = "invariance"
name = "invariance"
system = "h"
contract = "c"
K = "[-1,1]"
boundary_resolution = 5
aw_resolution = 5
jumpset_resolution = 5
)SCN";

const char* kShared = R"SCN(# Two hybrid time domains merged onto a shared one.
[[task]]
kind = "shared_domain"
name = "shared"
times1 = [0, 1, 1.5, 1.5, 2]
times2 = [0, 0.5, 2]
)SCN";

}  // namespace

const std::vector<BuiltinInfo>& builtins() {
    static const std::vector<BuiltinInfo> list{
        {"example1", "cube-root flow; weak contract holds open loop, feedback arc escapes G_X"},
        {"example2", "half-interval output delay; strong satisfaction, zero feedback arc"},
        {"example3", "square-root flow with a = 11; weak-to-strong lift and closed-loop bound"},
        {"example4", "linear flow on [-1,1]; invariance certificate relative to the contract"},
        {"shared_domain_example", "shared hybrid time domain of two jump schedules"},
    };
    return list;
}

const std::string& builtin_text(const std::string& name) {
    static const std::map<std::string, std::string> texts{
        {"example1", kExample1}, {"example2", kExample2}, {"example3", kExample3},
        {"example4", kExample4}, {"shared_domain_example", kShared},
    };
    auto it = texts.find(name);
    if (it == texts.end()) throw std::out_of_range("unknown built-in '" + name + "'");
    return it->second;
}

}  // namespace hyag
