from ._core import (
    ScenarioError,
    SimPolicy,
    box_contains,
    builtin_text,
    builtins,
    check_contract,
    check_invariance,
    expand,
    lift,
    render_box,
    render_scenario,
    run,
    scenario_policy,
    shared_domain,
    simulate,
)

__all__ = [
    "ScenarioError",
    "SimPolicy",
    "box_contains",
    "builtin_text",
    "builtins",
    "check_contract",
    "check_invariance",
    "expand",
    "lift",
    "render_box",
    "render_scenario",
    "run",
    "scenario_policy",
    "shared_domain",
    "simulate",
]
