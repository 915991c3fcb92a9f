#include "hyag/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "hyag/builtins.hpp"
#include "hyag/composition.hpp"
#include "hyag/hybrid_time.hpp"
#include "hyag/invariance.hpp"

namespace fs = std::filesystem;

namespace hyag {

namespace {

std::string render_point(const Vec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render_real(v[i]);
    return s + "]";
}

std::string render_policy(const SimPolicy& p) {
    return "{dt: " + render_real(p.dt) + ", event_tol: " + render_real(p.event_tol) + ", overlap_rule: " +
           overlap_name(p.overlap_rule) + ", max_time: " + render_real(p.max_time) + ", max_jumps: " +
           std::to_string(p.max_jumps) + ", max_branches: " + std::to_string(p.max_branches) +
           ", kickstart: " + (p.kickstart ? "true" : "false") + "}";
}

int severity(const std::string& status) {
    if (status == "violated" || status == "falsified") return 3;
    if (status == "unknown" || status == "skipped") return 2;
    return 0;
}

std::string worst(const std::vector<std::string>& statuses, const std::string& fallback) {
    std::string w = fallback;
    for (const auto& s : statuses)
        if (severity(s) > severity(w)) w = s;
    return w;
}

std::string indent(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out += "  " + line + "\n";
    return out;
}

class Runner {
public:
    Runner(const Scenario& s, const RunOptions& opt, RunResult& res) : s_(s), opt_(opt), res_(res), contracts_(s.contracts) {}

    std::string run(const Task& t) {
        task_ = &t;
        pol_ = task_policy(s_, t);
        const auto& o = opt_.overrides;
        if (o.dt) pol_.dt = *o.dt;
        if (o.event_tol) pol_.event_tol = *o.event_tol;
        if (o.max_time) pol_.max_time = *o.max_time;
        if (o.max_jumps) pol_.max_jumps = *o.max_jumps;
        if (o.max_branches) pol_.max_branches = *o.max_branches;
        if (o.overlap) pol_.overlap_rule = *o.overlap;
        check_policy(pol_);
        delta_min_ = o.delta_min ? *o.delta_min : t.number("delta_min", pol_.dt);

        report_ = "task: " + t.name + "\nkind: " + t.kind + "\npolicy: " + render_policy(pol_) + "\n";
        std::string status;
        if (t.kind == "simulate") status = simulate();
        else if (t.kind == "check_weak" || t.kind == "check_strong") status = check();
        else if (t.kind == "lift") status = lift();
        else if (t.kind == "cascade") status = cascade_task();
        else if (t.kind == "feedback") status = feedback_task();
        else if (t.kind == "invariance") status = invariance();
        else if (t.kind == "harness") status = harness();
        else if (t.kind == "shared_domain") status = shared();
        else throw std::invalid_argument("unknown task kind " + t.kind);
        if (t.kind != "invariance") {
            report_ += "status: " + status + "\n";
            write(t.name + ".report.txt", report_);
        }
        return status;
    }

private:
    void write(const std::string& file, const std::string& content) {
        fs::path p = fs::path(opt_.out_dir) / file;
        std::ofstream out(p, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + p.string());
        res_.manifest.emplace_back(file, task_->name);
    }

    void write_arc(const std::string& file, const HybridArc& arc) { write(file, arc_to_csv(arc)); }

    const HybridSystemDesc& system(const std::string& key) const { return s_.systems.at(task_->text(key)); }

    const AGContract& contract(const std::string& key) const {
        auto it = contracts_.find(task_->text(key));
        if (it == contracts_.end()) throw std::runtime_error("contract '" + task_->text(key) + "' is not available (was its lift task skipped?)");
        return it->second;
    }

    InputSignal input(const std::string& key = "input") const {
        if (task_->flag("feedback", false)) return InputSignal::closed_loop();
        return InputSignal::from_expr(s_.inputs.at(task_->text(key)));
    }

    std::vector<Vec> starts(const HybridSystemDesc& d, const std::string& key) const {
        if (task_->has(key)) return {task_->numbers(key)};
        std::vector<Vec> out;
        for (const Box& b : d.X0.pieces())
            for (Vec& v : finite_samples(b, 3))
                if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
        return out;
    }

    std::vector<HybridArc> arcs(const HybridSystemDesc& d, const InputSignal& in, const std::vector<Vec>& x0s) {
        std::vector<HybridArc> out;
        for (const Vec& x0 : x0s) {
            if (task_->has("schedule")) {
                out.push_back(simulate_on_schedule(d, in, x0, task_->numbers("schedule"), task_->number("horizon", 0.0), pol_));
            } else if (pol_.overlap_rule == OverlapRule::enumerate) {
                BranchSet bs = enumerate_branches(d, in, x0, pol_);
                if (bs.truncated) report_ += "note: branch budget reached from x0=" + render_point(x0) + "\n";
                for (auto& a : bs.arcs) out.push_back(std::move(a));
            } else {
                out.push_back(hyag::simulate(d, in, x0, pol_));
            }
        }
        return out;
    }

    void describe(std::size_t k, const HybridArc& a) {
        ArcClassification c = classify(a, pol_.max_time, pol_.max_jumps, pol_.zeno_window, pol_.zeno_threshold);
        const auto& first = a.intervals().front();
        report_ += "arc " + std::to_string(k) + ": x0=" + render_point(first.x.front()) + " jumps=" +
                   std::to_string(a.intervals().size() - 1) + " end_t=" + render_real(a.intervals().back().t.back()) +
                   " stop=" + stop_name(a.stop) + " class=" + kind_name(c.kind) + "\n";
    }

    std::string simulate() {
        const HybridSystemDesc& d = system("system");
        auto as = arcs(d, input(), starts(d, "x0"));
        for (std::size_t k = 0; k < as.size(); ++k) {
            describe(k, as[k]);
            write_arc(task_->name + "_arc" + std::to_string(k) + ".csv", as[k]);
        }
        return "done";
    }

    std::string check() {
        const HybridSystemDesc& d = system("system");
        const AGContract& c = contract("contract");
        bool strong = task_->kind == "check_strong";
        auto as = arcs(d, input(), starts(d, "x0"));
        std::vector<std::string> statuses;
        if (strong) report_ += "delta_min: " + render_real(delta_min_) + "\n";
        for (std::size_t k = 0; k < as.size(); ++k) {
            describe(k, as[k]);
            Verdict v = strong ? check_strong(as[k], c, delta_min_) : check_weak(as[k], c);
            report_ += indent(render_verdict(v));
            statuses.push_back(status_name(v.status));
            write_arc(task_->name + "_arc" + std::to_string(k) + ".csv", as[k]);
        }
        return worst(statuses, "satisfied");
    }

    std::string lift() {
        const HybridSystemDesc& d = system("system");
        const AGContract& c = contract("contract");
        LiftResult r = lift_weak_to_strong(c, task_->number("beta", 0.0), task_->number("eps", 0.0), d.Y);
        for (const auto& w : r.warnings) report_ += "warning: " + w + "\n";
        report_ += "lifted:\n" + indent(render_contract(r.contract));
        report_ += "guarantee_equals_assumption: " + std::string(r.contract.GY == r.contract.AW ? "true" : "false") + "\n";
        CompatReport cr = feedback_compat(r.contract, 0.0, d.Y);
        report_ += "feedback_compatible: " + std::string(cr.compatible && cr.g_y_closed ? "true" : "false") + "\n";
        if (task_->has("input") || task_->flag("feedback", false)) {
            double beta_hat = 0.0;
            for (const HybridArc& a : arcs(d, input(), starts(d, "x0"))) beta_hat = std::max(beta_hat, max_jump_variation(a));
            report_ += "empirical_beta: " + render_real(beta_hat) + "\n";
            if (beta_hat > task_->number("beta", 0.0)) report_ += "note: declared beta is below the empirical jump variation\n";
        }
        contracts_[task_->text("as")] = r.contract;
        return "done";
    }

    std::string cascade_task() {
        CascadeSystem cs = cascade(system("first"), system("second"));
        std::string mode = task_->text("check", "none");
        std::optional<AGContract> cc;
        if (mode != "none") cc = cascade_contract(contract("c1"), contract("c2"));
        if (cc) report_ += "composite contract:\n" + indent(render_contract(*cc));
        std::vector<std::string> statuses;
        std::size_t k = 0;
        for (const Vec& x01 : starts(cs.first, "x01")) {
            for (const Vec& x02 : starts(cs.second, "x02")) {
                bool trunc = false;
                for (const CascadeRun& run : run_cascade(cs, input(), x01, x02, pol_, &trunc)) {
                    bool feed = true;
                    for (const auto& iv : run.arc2.intervals())
                        for (std::size_t q = 0; q < iv.size(); ++q) feed = feed && iv.w[q] == run.arc1.intervals()[&iv - &run.arc2.intervals()[0]].y[q];
                    report_ += "run " + std::to_string(k) + ": x01=" + render_point(x01) + " x02=" + render_point(x02) +
                               " jumps=" + std::to_string(run.composite.intervals().size() - 1) +
                               " feed_consistent=" + (feed ? "true" : "false") + "\n";
                    if (!feed) statuses.push_back("violated");
                    if (cc) {
                        Verdict v = mode == "strong" ? check_strong(run.composite, *cc, delta_min_) : check_weak(run.composite, *cc);
                        report_ += indent(render_verdict(v));
                        statuses.push_back(status_name(v.status));
                    }
                    std::string base = task_->name + "_run" + std::to_string(k);
                    write_arc(base + "_composite.csv", run.composite);
                    write_arc(base + "_first.csv", run.arc1);
                    write_arc(base + "_second.csv", run.arc2);
                    ++k;
                }
                if (trunc) report_ += "note: branch budget reached\n";
            }
        }
        return worst(statuses, mode == "none" ? "done" : "satisfied");
    }

    std::string feedback_task() {
        FeedbackSystem fsys = feedback(system("system"));
        std::string mode = task_->text("check", "none");
        std::vector<std::string> statuses;
        std::size_t k = 0;
        const double tol = std::max(kFaceTol, 10.0 * pol_.event_tol);
        for (const Vec& x0 : starts(fsys.open, "x0")) {
            BranchSet bs = run_feedback(fsys, x0, pol_);
            if (bs.truncated) report_ += "note: branch budget reached from x0=" + render_point(x0) + "\n";
            for (const HybridArc& a : bs.arcs) {
                describe(k, a);
                if (mode == "state") {
                    const AGContract& c = contract("contract");
                    std::string first = "none";
                    for (std::size_t j = 0; j < a.intervals().size() && first == "none"; ++j) {
                        const auto& iv = a.intervals()[j];
                        for (std::size_t q = 0; q < iv.size(); ++q)
                            if (!c.GX.contains(iv.x[q]) && distance(iv.x[q], c.GX) > tol) {
                                first = "{t: " + render_real(iv.t[q]) + ", j: " + std::to_string(j) + ", which: state}";
                                break;
                            }
                    }
                    std::string st = first == "none" ? "satisfied" : "violated";
                    report_ += "  status: " + st + "\n  first_violation: " + first + "\n";
                    statuses.push_back(st);
                } else if (mode == "weak" || mode == "strong") {
                    const AGContract& c = contract("contract");
                    Verdict v = mode == "strong" ? check_strong(a, c, delta_min_) : check_weak(a, c);
                    report_ += indent(render_verdict(v));
                    statuses.push_back(status_name(v.status));
                }
                write_arc(task_->name + "_arc" + std::to_string(k) + ".csv", a);
                ++k;
            }
        }
        return worst(statuses, mode == "none" ? "done" : "satisfied");
    }

    std::string invariance() {
        InvarianceProblem p;
        p.system = system("system");
        p.contract = contract("contract");
        p.K = parse_box(task_->text("K"), p.system.n);
        int res = opt_.overrides.resolution.value_or(0);
        p.boundary_resolution = res ? res : static_cast<int>(task_->number("boundary_resolution", 5));
        p.aw_resolution = res ? res : static_cast<int>(task_->number("aw_resolution", 5));
        p.jumpset_resolution = res ? res : static_cast<int>(task_->number("jumpset_resolution", 5));
        if (task_->has("cone_tol")) p.cone_tol = task_->number("cone_tol", 0.0);
        InvarianceVerdict v = check_invariant_relative(p, pol_);
        std::string cert = "task: " + task_->name + "\n" + render_certificate(p, v);
        for (std::size_t k = 0; k < v.confirmation_arcs.size(); ++k) {
            cert += "confirmation " + std::to_string(k) + ": x0=" + render_point(v.confirmation_x0[k]) + " file=" + task_->name +
                    "_confirm" + std::to_string(k) + ".csv\n";
            write_arc(task_->name + "_confirm" + std::to_string(k) + ".csv", v.confirmation_arcs[k]);
        }
        std::string status = v.overall == Overall::certified ? "verified" : v.overall == Overall::falsified ? "falsified" : "unknown";
        if (!v.confirmation_ok && status == "verified") status = "unknown";
        cert += "status: " + status + "\n";
        write(task_->name + ".certificate.txt", cert);
        return status;
    }

    std::string harness() {
        std::string status;
        if (task_->text("theorem") == "feedback") {
            FeedbackSystem fsys = feedback(system("system"));
            FeedbackHarnessOptions o;
            o.delta_min = delta_min_;
            o.declared_strong = task_->flag("declared_strong", false);
            o.switch_time = task_->number("switch_time", o.switch_time);
            o.resolution = opt_.overrides.resolution.value_or(static_cast<int>(task_->number("resolution", o.resolution)));
            FeedbackHarnessReport r = harness_feedback_theorem(fsys, contract("contract"), pol_, o);
            report_ += "theorem: feedback\n" + render_harness(r.base);
            report_ += "strong_established: " + std::string(r.strong_established ? "true" : "false") +
                       (o.declared_strong ? " (declared)" : "") + "\n";
            for (const auto& f : r.probe_failures) report_ += "probe_failure: " + f + "\n";
            report_ += "escaping_arc: " + std::string(r.escaping_arc ? r.escape_witness : "none") + "\n";
            status = !r.base.hypotheses_ok ? "skipped" : r.base.counterexamples() ? "violated" : "satisfied";
            dump(r.base);
        } else {
            CascadeSystem cs = cascade(system("first"), system("second"));
            std::vector<Vec> x01s = starts(cs.first, "x01"), x02s = starts(cs.second, "x02");
            HarnessReport r = harness_cascade_theorem(cs, contract("c1"), contract("c2"), input(), x01s, x02s, pol_, delta_min_);
            report_ += "theorem: cascade\n" + render_harness(r);
            status = !r.hypotheses_ok ? "skipped" : r.counterexamples() ? "violated" : "satisfied";
            dump(r);
        }
        return status;
    }

    void dump(const HarnessReport& r) {
        for (std::size_t k = 0; k < r.counterexample_arcs.size(); ++k) {
            std::string f = task_->name + "_counterexample" + std::to_string(k) + ".csv";
            report_ += "counterexample_file: " + f + "\n";
            write_arc(f, r.counterexample_arcs[k]);
        }
    }

    std::string shared() {
        HybridTimeDomain e1 = make_domain(task_->numbers("times1"));
        HybridTimeDomain e2 = make_domain(task_->numbers("times2"));
        HybridTimeDomain e12 = shared_domain(e1, e2, task_->flag("align", false));
        for (auto [label, e] : {std::pair{"E1", &e1}, std::pair{"E2", &e2}, std::pair{"E12", &e12}}) {
            SupLength sl = sup_and_length(*e);
            report_ += std::string(label) + ": " + render_domain(*e) + "\n" + label + "_jumps: " + render_point(e->jump_times()) +
                       "\n" + label + "_sup: {t: " + render_real(sl.sup_t) + ", j: " + std::to_string(sl.sup_j) + "}\n";
        }
        return "done";
    }

    const Scenario& s_;
    const RunOptions& opt_;
    RunResult& res_;
    std::map<std::string, AGContract> contracts_;
    const Task* task_ = nullptr;
    SimPolicy pol_;
    double delta_min_ = 1e-3;
    std::string report_;
};

// Files named by a previous manifest in this directory, so reruns leave no orphans.
void remove_previous(const fs::path& dir) {
    std::ifstream in(dir / "manifest.txt");
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        std::string f = line.substr(0, tab);
        if (f.empty() || f.find('/') != std::string::npos || f.find("..") != std::string::npos) continue;
        std::error_code ec;
        fs::remove(dir / f, ec);
    }
}

}  // namespace

Scenario load_scenario(const std::string& ref) {
    const std::string prefix = "builtin:";
    if (ref.rfind(prefix, 0) == 0) {
        try {
            return parse_scenario(builtin_text(ref.substr(prefix.size())));
        } catch (const std::out_of_range& e) {
            throw std::runtime_error(e.what());
        }
    }
    std::ifstream in(ref, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario '" + ref + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt, std::ostream* log) {
    RunResult res;
    for (const auto& name : opt.only_tasks)
        if (std::none_of(s.tasks.begin(), s.tasks.end(), [&](const Task& t) { return t.name == name; })) {
            res.exit_code = 2;
            res.error = "no task named '" + name + "'";
            return res;
        }
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        res.exit_code = 2;
        res.error = "cannot create output directory '" + opt.out_dir + "'";
        return res;
    }
    remove_previous(dir);
    Runner runner(s, opt, res);
    int worst_sev = 0;
    for (const Task& t : s.tasks) {
        if (!opt.only_tasks.empty() && std::find(opt.only_tasks.begin(), opt.only_tasks.end(), t.name) == opt.only_tasks.end()) continue;
        if (!opt.kinds.empty() && !opt.kinds.count(t.kind)) continue;
        std::string status;
        try {
            status = runner.run(t);
        } catch (const std::exception& e) {
            res.exit_code = 2;
            res.error = "task '" + t.name + "': " + e.what();
            break;
        }
        res.tasks.push_back({t.name, t.kind, status});
        worst_sev = std::max(worst_sev, severity(status));
        if (log && !opt.quiet) *log << t.name << " (" << t.kind << "): " << status << "\n";
    }
    std::string manifest;
    for (const auto& [file, task] : res.manifest) manifest += file + "\t" + task + "\n";
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    out << manifest;
    if (!out && res.exit_code != 2) {
        res.exit_code = 2;
        res.error = "cannot write manifest";
    }
    if (res.exit_code != 2) res.exit_code = worst_sev > 0 ? 1 : 0;
    return res;
}

}  // namespace hyag
