#include "hyag/composition.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace hyag {

namespace {

Vec concat(const Vec& a, const Vec& b) {
    Vec r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

BranchSet runs_of(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0, const SimPolicy& pol) {
    if (pol.overlap_rule == OverlapRule::enumerate) return enumerate_branches(d, in, x0, pol);
    BranchSet b;
    b.arcs.push_back(simulate(d, in, x0, pol));
    return b;
}

// Puts arc1 and arc2 (driven by arc1) onto arc2's domain, which already
// contains every jump of both components.
CascadeRun merge(const HybridArc& a1, const HybridArc& a2) {
    CascadeRun r{HybridArc(a1.m(), a1.n(), a1.p()), HybridArc(a2.m(), a2.n(), a2.p()),
                 HybridArc(a1.m(), a1.n() + a2.n(), a2.p())};
    const auto& iv2 = a2.intervals();
    for (std::size_t i = 0; i < iv2.size(); ++i) {
        std::size_t k = a2.source_index.at(i);
        const auto& src1 = a1.intervals().at(k);
        double s = iv2[i].t.front(), e = iv2[i].t.back();
        std::vector<double> ts = iv2[i].t;
        for (double t : src1.t)
            if (t > s && t < e) ts.push_back(t);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

        ArcInterval b1, b2, bc;
        for (double t : ts) {
            ArcSample p1 = eval(a1, std::clamp(t, src1.t.front(), src1.t.back()), static_cast<int>(k));
            ArcSample p2 = eval(a2, t, static_cast<int>(i));
            for (ArcInterval* b : {&b1, &b2, &bc}) b->t.push_back(t);
            b1.w.push_back(p1.w);
            b1.x.push_back(p1.x);
            b1.y.push_back(p1.y);
            b2.w.push_back(p1.y);
            b2.x.push_back(p2.x);
            b2.y.push_back(p2.y);
            bc.w.push_back(p1.w);
            bc.x.push_back(concat(p1.x, p2.x));
            bc.y.push_back(p2.y);
        }
        if (i > 0) {
            bool foreign = a2.held_jumps.at(i - 1);
            bool h1_jumped = a2.source_index[i] != a2.source_index[i - 1];
            r.arc1.held_jumps.push_back(!h1_jumped);
            r.arc2.held_jumps.push_back(foreign);
            r.composite.held_jumps.push_back(false);
        }
        r.arc1.push_interval(std::move(b1));
        r.arc2.push_interval(std::move(b2));
        r.composite.push_interval(std::move(bc));
    }
    for (HybridArc* a : {&r.arc1, &r.arc2, &r.composite}) {
        a->stop = a2.stop;
        a->final_open = a2.final_open;
    }
    return r;
}

std::string render_point(const Vec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render_real(v[i]);
    return s + "]";
}

bool within(const BoxSet& s, const Vec& v, double tol) {
    return s.contains(v) || (!s.empty() && distance(v, s) <= tol);
}

}  // namespace

CascadeSystem cascade(const HybridSystemDesc& h1, const HybridSystemDesc& h2) {
    validate(h1);
    validate(h2);
    if (h1.p != h2.m) throw std::invalid_argument("cascade: output dimension of the first system does not match the input of the second");
    if (!subset(h1.Y, h2.W)) throw std::invalid_argument("cascade: Y1 is not contained in W2");
    return {h1, h2};
}

std::vector<CascadeRun> run_cascade(const CascadeSystem& cs, const InputSignal& in1, const Vec& x01,
                                    const Vec& x02, const SimPolicy& policy, bool* truncated) {
    std::vector<CascadeRun> out;
    BranchSet first = runs_of(cs.first, in1, x01, policy);
    bool trunc = first.truncated;
    for (const HybridArc& a1 : first.arcs) {
        auto src = std::make_shared<const HybridArc>(a1);
        SimPolicy pol2 = policy;
        pol2.max_time = std::min(policy.max_time, a1.intervals().back().t.back());
        BranchSet second = runs_of(cs.second, InputSignal::from_arc(src), x02, pol2);
        trunc = trunc || second.truncated;
        for (const HybridArc& a2 : second.arcs) {
            if (static_cast<int>(out.size()) >= policy.max_branches) {
                trunc = true;
                break;
            }
            out.push_back(merge(a1, a2));
        }
    }
    if (truncated) *truncated = trunc;
    return out;
}

AGContract cascade_contract(const AGContract& c1, const AGContract& c2) {
    if (!subset(c1.GY, c2.AW)) throw std::invalid_argument("cascade contract: G_Y1 is not contained in A_W2");
    return {c1.AW, product(c1.GX, c2.GX), c2.GY};
}

FeedbackSystem feedback(const HybridSystemDesc& h) {
    validate(h);
    if (h.p != h.m) throw std::invalid_argument("feedback: output and input dimensions differ");
    if (!subset(h.Y, h.W)) throw std::invalid_argument("feedback: Y is not contained in W");
    for (const Expr& e : h.h)
        if (e.uses_var('w')) throw std::invalid_argument("feedback: output map reads the input");
    FeedbackSystem fs{h, h};
    fs.closed.name = h.name + "_feedback";
    for (auto& f : fs.closed.F)
        for (auto& e : f) e = e.substitute_w(h.h);
    for (auto& g : fs.closed.G)
        for (auto& e : g) e = e.substitute_w(h.h);
    return fs;
}

BranchSet run_feedback(const FeedbackSystem& fs, const Vec& x0, const SimPolicy& policy) {
    return runs_of(fs.open, InputSignal::closed_loop(), x0, policy);
}

int HarnessReport::counterexamples() const {
    int n = 0;
    for (const auto& c : checks) n += c.counterexamples;
    return n;
}

HarnessReport harness_cascade_theorem(const CascadeSystem& cs, const AGContract& c1, const AGContract& c2,
                                      const InputSignal& in1, const std::vector<Vec>& x01s, const std::vector<Vec>& x02s,
                                      const SimPolicy& policy, double delta_min) {
    HarnessReport rep;
    AGContract cc;
    try {
        cc = cascade_contract(c1, c2);
    } catch (const std::invalid_argument& e) {
        rep.hypotheses_ok = false;
        rep.notes.push_back(e.what());
        return rep;
    }
    rep.checks = {{"weak+weak=>weak", 0, 0, 0}, {"strong+weak=>strong", 0, 0, 0}, {"weak+strong=>strong", 0, 0, 0}};
    auto tally = [&](HarnessCheck& c, bool premise, const Verdict& concl, const CascadeRun& run) {
        if (!premise) return;
        ++c.premises_held;
        if (concl.status == Status::unknown) ++c.inconclusive;
        if (concl.status == Status::violated) {
            ++c.counterexamples;
            rep.counterexample_arcs.push_back(run.composite);
            const auto& v = *concl.first_violation;
            rep.notes.push_back(c.name + " counterexample at t=" + render_real(v.t) + " j=" + std::to_string(v.j) +
                                " (composite has " + std::to_string(run.composite.intervals().size()) + " intervals)");
        }
    };
    for (const Vec& x01 : x01s) {
        for (const Vec& x02 : x02s) {
            for (const CascadeRun& run : run_cascade(cs, in1, x01, x02, policy)) {
                ++rep.arcs;
                bool w1 = check_weak(run.arc1, c1).status == Status::satisfied;
                bool w2 = check_weak(run.arc2, c2).status == Status::satisfied;
                bool s1 = check_strong(run.arc1, c1, delta_min).status == Status::satisfied;
                bool s2 = check_strong(run.arc2, c2, delta_min).status == Status::satisfied;
                Verdict cw = check_weak(run.composite, cc);
                Verdict cs_ = check_strong(run.composite, cc, delta_min);
                tally(rep.checks[0], w1 && w2, cw, run);
                tally(rep.checks[1], s1 && w2, cs_, run);
                tally(rep.checks[2], w1 && s2, cs_, run);
            }
        }
    }
    return rep;
}

FeedbackHarnessReport harness_feedback_theorem(const FeedbackSystem& fs, const AGContract& c, const SimPolicy& policy,
                                               const FeedbackHarnessOptions& opt) {
    FeedbackHarnessReport r;
    HarnessReport& rep = r.base;
    const HybridSystemDesc& h = fs.open;
    CompatReport compat = feedback_compat(c, 0.0, h.Y);
    if (!compat.compatible) {
        rep.hypotheses_ok = false;
        rep.notes.push_back("G_Y is not contained in A_W");
    }
    if (!compat.g_y_closed) {
        rep.hypotheses_ok = false;
        rep.notes.push_back("G_Y is not closed");
    }
    if (!rep.hypotheses_ok) {
        rep.notes.push_back("harness skipped");
        return r;
    }
    SimPolicy pol = policy;
    pol.overlap_rule = OverlapRule::enumerate;

    std::vector<Vec> x0s;
    for (const Box& b : h.X0.pieces())
        for (Vec& v : finite_samples(b, opt.resolution)) x0s.push_back(std::move(v));

    // Open-loop probes: inputs that stay in A_W, and inputs that leave it at switch_time.
    std::vector<Vec> inside, outside;
    for (const Box& b : c.AW.pieces())
        for (Vec& v : finite_samples(b, opt.resolution)) inside.push_back(std::move(v));
    for (const Box& b : h.W.pieces())
        for (Vec& v : finite_samples(b, opt.resolution))
            if (!c.AW.contains(v)) outside.push_back(std::move(v));
    auto probe_input = [&](const Vec& a, const Vec* b) {
        VecExpr e;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!b) {
                e.push_back(Expr::constant(a[i]));
                continue;
            }
            std::string s = "(" + render_real(a[i]) + ")+((" + render_real((*b)[i]) + ")-(" + render_real(a[i]) +
                            "))*step(t-(" + render_real(opt.switch_time) + "))";
            e.push_back(Expr::parse(s, h.n, h.m));
        }
        return InputSignal::from_expr(std::move(e));
    };
    bool probes_ok = true;
    for (const Vec& x0 : x0s) {
        for (const Vec& a : inside) {
            std::vector<InputSignal> ins{probe_input(a, nullptr)};
            for (const Vec& b : outside) ins.push_back(probe_input(a, &b));
            for (const InputSignal& in : ins) {
                BranchSet bs;
                try {
                    bs = enumerate_branches(h, in, x0, pol);
                } catch (const EvalError& e) {
                    continue;  // probe leaves the maps' domain
                }
                for (const HybridArc& arc : bs.arcs) {
                    Verdict v = check_strong(arc, c, opt.delta_min);
                    if (v.status == Status::satisfied) continue;
                    probes_ok = false;
                    if (r.probe_failures.size() < 8) {
                        std::string msg = "probe x0=" + render_point(x0) + " w: " + render_vec_expr(in.expr) + " -> " +
                                          status_name(v.status);
                        if (v.first_violation)
                            msg += " at t=" + render_real(v.first_violation->t) + " j=" + std::to_string(v.first_violation->j) +
                                   " (" + which_name(v.first_violation->which) + ")";
                        if (std::find(r.probe_failures.begin(), r.probe_failures.end(), msg) == r.probe_failures.end())
                            r.probe_failures.push_back(msg);
                    }
                }
            }
        }
    }
    r.strong_established = opt.declared_strong || probes_ok;
    if (!r.strong_established) rep.notes.push_back("strong satisfaction not established: open-loop probes fail");

    HarnessCheck replay{"replayed-strong=>G_X invariant", 0, 0, 0};
    HarnessCheck probed{"probed-strong=>G_X invariant", 0, 0, 0};
    HarnessCheck declared{"declared-strong=>G_X invariant", 0, 0, 0};
    const double tol = std::max(kFaceTol, 10.0 * policy.event_tol);
    for (const Vec& x0 : x0s) {
        BranchSet bs = run_feedback(fs, x0, pol);
        for (const HybridArc& arc : bs.arcs) {
            ++rep.arcs;
            std::optional<std::string> escape;
            for (std::size_t j = 0; j < arc.intervals().size() && !escape; ++j) {
                const auto& iv = arc.intervals()[j];
                for (std::size_t q = 0; q < iv.size(); ++q)
                    if (!within(c.GX, iv.x[q], tol)) {
                        escape = "x0=" + render_point(x0) + " leaves G_X at t=" + render_real(iv.t[q]) +
                                 " j=" + std::to_string(j) + " x=" + render_point(iv.x[q]);
                        break;
                    }
            }
            if (escape && !r.escaping_arc) {
                r.escaping_arc = true;
                r.escape_witness = *escape;
            }
            // The closed-loop arc is itself an open-loop arc of h with w = y.
            Verdict v = check_strong(arc, c, opt.delta_min);
            if (v.status == Status::satisfied) {
                ++replay.premises_held;
                if (escape) {
                    ++replay.counterexamples;
                    rep.counterexample_arcs.push_back(arc);
                    rep.notes.push_back("counterexample: " + *escape);
                }
            }
            if (probes_ok) {
                ++probed.premises_held;
                if (escape) {
                    ++probed.counterexamples;
                    rep.counterexample_arcs.push_back(arc);
                    rep.notes.push_back("probes passed but: " + *escape);
                }
            }
            if (opt.declared_strong) {
                ++declared.premises_held;
                if (escape) {
                    ++declared.counterexamples;
                    rep.counterexample_arcs.push_back(arc);
                    rep.notes.push_back("declaration contradicted: " + *escape);
                }
            }
        }
    }
    rep.checks = {replay, probed, declared};
    if (r.escaping_arc) rep.notes.push_back("escaping arc: " + r.escape_witness);
    return r;
}

std::string render_harness(const HarnessReport& r) {
    std::string out = "hypotheses: " + std::string(r.hypotheses_ok ? "ok" : "fail") + "\n";
    out += "arcs: " + std::to_string(r.arcs) + "\n";
    for (const auto& c : r.checks)
        out += "check " + c.name + ": premises=" + std::to_string(c.premises_held) + " inconclusive=" +
               std::to_string(c.inconclusive) + " counterexamples=" + std::to_string(c.counterexamples) + "\n";
    for (const auto& n : r.notes) out += "note: " + n + "\n";
    out += "counterexamples: " + std::to_string(r.counterexamples()) + "\n";
    return out;
}

}  // namespace hyag
