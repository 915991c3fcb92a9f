#include <pybind11/pybind11.h>
#include <pybind11/stl.h>


#include "hyag/builtins.hpp"
#include "hyag/composition.hpp"
#include "hyag/invariance.hpp"
#include "hyag/runner.hpp"
#include "hyag/scenario.hpp"

namespace py = pybind11;
using namespace hyag;

namespace {

// Arcs cross the boundary as plain dicts: one entry per flow interval.
py::dict arc_to_dict(const HybridArc& a) {
    py::list ivs;
    for (const ArcInterval& iv : a.intervals()) {
        py::dict d;
        d["t"] = iv.t;
        d["w"] = iv.w;
        d["x"] = iv.x;
        d["y"] = iv.y;
        ivs.append(d);
    }
    py::dict out;
    out["intervals"] = ivs;
    out["jump_times"] = a.domain().jump_times();
    out["stop"] = stop_name(a.stop);
    out["csv"] = arc_to_csv(a);
    return out;
}

py::dict verdict_to_dict(const Verdict& v) {
    py::dict d;
    d["status"] = status_name(v.status);
    if (v.first_violation)
        d["first_violation"] = py::make_tuple(v.first_violation->t, v.first_violation->j, which_name(v.first_violation->which));
    else
        d["first_violation"] = py::none();
    d["horizon"] = v.horizon ? py::object(py::make_tuple(v.horizon->t, v.horizon->j)) : py::none();
    d["delta_witness"] = v.delta_witness ? py::object(py::float_(*v.delta_witness)) : py::none();
    d["interval_deltas"] = v.interval_deltas;
    return d;
}

AGContract contract_of(const std::string& aw, const std::string& gx, const std::string& gy) {
    return AGContract{parse_box(aw), parse_box(gx), parse_box(gy)};
}

const Scenario& cached(const std::string& ref) {
    static std::map<std::string, Scenario> cache;
    auto it = cache.find(ref);
    if (it == cache.end()) it = cache.emplace(ref, load_scenario(ref)).first;
    return it->second;
}

InputSignal input_of(const py::object& w, std::size_t m) {
    if (w.is_none()) return InputSignal::closed_loop();
    if (py::isinstance<py::str>(w)) return InputSignal::from_expr(parse_vec_expr(w.cast<std::string>(), 0, 0, m));
    return InputSignal::constant(w.cast<Vec>());
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "hybrid systems with assume-guarantee contracts";

    py::register_exception<ScenarioError>(mod, "ScenarioError", PyExc_ValueError);

    py::class_<SimPolicy>(mod, "SimPolicy")
        .def(py::init<>())
        .def_readwrite("dt", &SimPolicy::dt)
        .def_readwrite("event_tol", &SimPolicy::event_tol)
        .def_readwrite("max_time", &SimPolicy::max_time)
        .def_readwrite("max_jumps", &SimPolicy::max_jumps)
        .def_readwrite("max_branches", &SimPolicy::max_branches)
        .def_readwrite("kickstart", &SimPolicy::kickstart)
        .def_property(
            "overlap_rule", [](const SimPolicy& p) { return std::string(overlap_name(p.overlap_rule)); },
            [](SimPolicy& p, const std::string& s) { p.overlap_rule = parse_overlap(s); });

    mod.def("render_box", [](const std::string& text) { return render_box(parse_box(text)); });
    mod.def("box_contains", [](const std::string& text, const Vec& x) { return parse_box(text).contains(x); });
    mod.def("expand", [](const std::string& text, double eps) { return render_box(expand(parse_box(text), eps)); });

    mod.def(
        "shared_domain",
        [](const std::vector<double>& t1, const std::vector<double>& t2, bool align) {
            HybridTimeDomain e = shared_domain(make_domain(t1), make_domain(t2), align);
            SupLength s = sup_and_length(e);
            py::dict d;
            d["jump_times"] = e.jump_times();
            d["sup"] = py::make_tuple(s.sup_t, s.sup_j);
            d["length"] = s.length;
            d["text"] = render_domain(e);
            return d;
        },
        py::arg("times1"), py::arg("times2"), py::arg("align_coincident_jumps") = false);

    mod.def("builtins", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& b : builtins()) out.emplace_back(b.name, b.description);
        return out;
    });
    mod.def("builtin_text", &builtin_text);
    mod.def("render_scenario", [](const std::string& text) { return render_scenario(parse_scenario(text)); });
    mod.def("scenario_policy", [](const std::string& ref) { return cached(ref).policy; });

    // w: a constant list, an expression in t/j, or None for the closed loop.
    mod.def(
        "simulate",
        [](const std::string& ref, const std::string& system, const Vec& x0, const py::object& w,
           std::optional<SimPolicy> policy) {
            const Scenario& s = cached(ref);
            const HybridSystemDesc& h = s.systems.at(system);
            SimPolicy pol = policy.value_or(s.policy);
            py::list arcs;
            if (w.is_none()) {
                for (const HybridArc& a : run_feedback(feedback(h), x0, pol).arcs) arcs.append(arc_to_dict(a));
            } else {
                InputSignal in = input_of(w, h.m);
                if (pol.overlap_rule == OverlapRule::enumerate)
                    for (const HybridArc& a : enumerate_branches(h, in, x0, pol).arcs) arcs.append(arc_to_dict(a));
                else
                    arcs.append(arc_to_dict(simulate(h, in, x0, pol)));
            }
            return arcs;
        },
        py::arg("scenario"), py::arg("system"), py::arg("x0"), py::arg("w") = py::none(), py::arg("policy") = py::none());

    mod.def(
        "check_contract",
        [](const std::string& ref, const std::string& system, const std::string& contract, const Vec& x0,
           const py::object& w, bool strong, std::optional<double> delta_min) {
            const Scenario& s = cached(ref);
            const HybridSystemDesc& h = s.systems.at(system);
            const AGContract& c = s.contracts.at(contract);
            SimPolicy pol = s.policy;
            std::vector<HybridArc> arcs;
            if (w.is_none()) arcs = run_feedback(feedback(h), x0, pol).arcs;
            else arcs = enumerate_branches(h, input_of(w, h.m), x0, pol).arcs;
            py::list out;
            for (const HybridArc& a : arcs)
                out.append(verdict_to_dict(strong ? check_strong(a, c, delta_min.value_or(pol.dt)) : check_weak(a, c)));
            return out;
        },
        py::arg("scenario"), py::arg("system"), py::arg("contract"), py::arg("x0"), py::arg("w") = py::none(),
        py::arg("strong") = false, py::arg("delta_min") = py::none());

    mod.def(
        "lift",
        [](const std::string& aw, const std::string& gx, const std::string& gy, double beta, double eps,
           const std::string& y) {
            LiftResult r = lift_weak_to_strong(contract_of(aw, gx, gy), beta, eps, parse_box(y));
            py::dict d;
            d["AW"] = render_box(r.contract.AW);
            d["GX"] = render_box(r.contract.GX);
            d["GY"] = render_box(r.contract.GY);
            d["warnings"] = r.warnings;
            return d;
        },
        py::arg("AW"), py::arg("GX"), py::arg("GY"), py::arg("beta"), py::arg("eps"), py::arg("Y") = "[0, inf)");

    mod.def(
        "check_invariance",
        [](const std::string& ref, const std::string& system, const std::string& contract, const std::string& K) {
            const Scenario& s = cached(ref);
            InvarianceProblem p;
            p.system = s.systems.at(system);
            p.contract = s.contracts.at(contract);
            p.K = parse_box(K);
            InvarianceVerdict v = check_invariant_relative(p, s.policy);
            py::dict d;
            d["overall"] = overall_name(v.overall);
            d["exact"] = v.exact;
            d["conditions"] = std::vector<std::string>{cond_name(v.cond_i.status), cond_name(v.cond_ii.status),
                                                       cond_name(v.cond_iii.status)};
            d["weak_concluded"] = v.weak_concluded;
            d["feedback_concluded"] = v.feedback_concluded;
            d["certificate"] = render_certificate(p, v);
            return d;
        },
        py::arg("scenario"), py::arg("system"), py::arg("contract"), py::arg("K"));

    mod.def(
        "run",
        [](const std::string& ref, const std::string& out_dir, const std::vector<std::string>& tasks) {
            RunOptions opt;
            opt.out_dir = out_dir;
            opt.only_tasks = tasks;
            opt.quiet = true;
            RunResult r = run_scenario(load_scenario(ref), opt);
            py::dict d;
            d["exit_code"] = r.exit_code;
            std::vector<std::tuple<std::string, std::string, std::string>> ts;
            for (const auto& t : r.tasks) ts.emplace_back(t.name, t.kind, t.status);
            d["tasks"] = ts;
            d["files"] = r.manifest;
            d["error"] = r.error;
            return d;
        },
        py::arg("scenario"), py::arg("out_dir"), py::arg("tasks") = std::vector<std::string>{});
}
