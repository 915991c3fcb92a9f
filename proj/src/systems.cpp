#include "hyag/systems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyag {

namespace {

constexpr double kTimeTol = 1e-12;
constexpr double kKick = 1e-12;

double norm_diff(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

Vec axpy(const Vec& x, double a, const Vec& y) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

struct Partial {
    HybridArc arc;
    ArcInterval cur;  // y is filled when the interval closes
    double t = 0.0;
    double t_start = 0.0;
    int j = 0;
    int own_jumps = 0;
    std::size_t k = 0;  // interval index of an arc-valued input
    std::size_t sched = 0;
    Vec x;
    int flow_sel = 0;
    bool committed = false;
};

struct Step {
    enum Kind { full, event, blocked } kind;
    double t;
    Vec x;
};

class Engine {
public:
    Engine(const HybridSystemDesc& d, const InputSignal& in, const SimPolicy& pol)
        : d_(d), in_(in), pol_(pol), cbar_(d.C.closure()) {
        horizon_ = pol.max_time;
        if (in.kind == InputSignal::arc) {
            if (!in.source) throw std::invalid_argument("arc input without a source arc");
            double src_end = in.source->intervals().back().t.back();
            if (src_end < horizon_) {
                horizon_ = src_end;
                source_limited_ = true;
            }
        }
    }

    bool enumerate = false;
    bool scheduled = false;
    std::vector<double> schedule;
    BranchSet out;
    int leaves = 0;

    Partial start(const Vec& x0) const {
        Partial p;
        p.arc = HybridArc(d_.m, d_.n, d_.p);
        p.x = x0;
        push_point(p, 0.0, x0);
        return p;
    }

    void run(Partial p) {
        while (true) {
            if (out.truncated) return;
            if (p.t >= horizon_ - kTimeTol) {
                finish(p, source_limited_ ? StopReason::external : StopReason::max_time, true);
                return;
            }
            Vec w = input(p, p.t, p.x);
            bool in_c = in_set(cbar_, p.x, w);
            bool in_d = in_set(d_.D, p.x, w);
            bool at_foreign = next_foreign(p) <= p.t + kTimeTol;

            if (scheduled) {
                if (p.sched < schedule.size() && schedule[p.sched] <= p.t + kTimeTol) {
                    if (!in_d) throw std::runtime_error("scheduled jump at t=" + render_real(p.t) + " outside the jump set");
                    ++p.sched;
                    own_jump(p, 0, w, at_foreign);
                    continue;
                }
                if (at_foreign) { foreign_jump(p); continue; }
                if (!in_c) throw std::runtime_error("scheduled flow leaves the flow set at t=" + render_real(p.t));
                Step s = attempt(p, 0, false);
                if (s.kind == Step::blocked) throw std::runtime_error("scheduled flow blocked at t=" + render_real(p.t));
                advance(p, s);
                continue;
            }

            if (!enumerate) {
                bool jump_first = pol_.overlap_rule == OverlapRule::jump_priority && in_d;
                if (jump_first) {
                    if (!own_jump(p, 0, w, at_foreign)) return;
                    continue;
                }
                if (at_foreign) { foreign_jump(p); continue; }
                if (in_c) {
                    Step s = attempt(p, 0, pol_.overlap_rule == OverlapRule::jump_priority);
                    if (s.kind != Step::blocked) { advance(p, s); continue; }
                }
                if (in_d) {
                    if (!own_jump(p, 0, w, at_foreign)) return;
                    continue;
                }
                finish(p, StopReason::no_continuation, false);
                return;
            }

            if (p.committed) {
                if (at_foreign) {
                    foreign_jump(p);
                    continue;
                }
                if (in_c) {
                    Step s = attempt(p, p.flow_sel, false);
                    if (s.kind != Step::blocked) { advance(p, s); continue; }
                }
                p.committed = false;
            }

            // Decision point: flow branches first, then jump branches, each in declaration order.
            struct Option { bool jump; int sel; Step step; };
            std::vector<Option> opts;
            if (at_foreign) {
                opts.push_back({false, -1, Step{Step::full, p.t, p.x}});
            } else if (in_c) {
                for (int s = 0; s < static_cast<int>(d_.F.size()); ++s) {
                    Step st = attempt(p, s, false);
                    if (st.kind != Step::blocked) opts.push_back({false, s, st});
                }
            }
            bool can_flow = !opts.empty();
            bool jump_budget_hit = false;
            if (in_d) {
                for (int g = 0; g < static_cast<int>(d_.G.size()); ++g) {
                    Vec xp = reset(p, g, w);
                    if (can_flow && xp == p.x) continue;  // identity jump adds no behaviour
                    if (p.own_jumps >= pol_.max_jumps) { jump_budget_hit = true; continue; }
                    opts.push_back({true, g, Step{Step::full, p.t, xp}});
                }
            }
            if (opts.empty()) {
                if (jump_budget_hit) finish(p, StopReason::max_jumps, true);
                else finish(p, StopReason::no_continuation, false);
                return;
            }
            for (std::size_t i = 0; i + 1 < opts.size(); ++i) {
                if (leaves >= pol_.max_branches) { out.truncated = true; return; }
                Partial c = p;
                apply(c, opts[i].jump, opts[i].sel, opts[i].step, w, at_foreign);
                run(std::move(c));
            }
            if (out.truncated) return;
            if (leaves >= pol_.max_branches) { out.truncated = true; return; }
            apply(p, opts.back().jump, opts.back().sel, opts.back().step, w, at_foreign);
        }
    }

private:
    const HybridSystemDesc& d_;
    const InputSignal& in_;
    SimPolicy pol_;
    BoxSet cbar_;
    double horizon_;
    bool source_limited_ = false;

    void apply(Partial& p, bool jump, int sel, const Step& st, const Vec& w, bool at_foreign) {
        if (jump) {
            own_jump(p, sel, w, at_foreign);
        } else if (sel < 0) {
            foreign_jump(p);
        } else {
            p.committed = true;
            p.flow_sel = sel;
            advance(p, st);
        }
    }

    double next_foreign(const Partial& p) const {
        if (in_.kind != InputSignal::arc) return kInf;
        const auto& ivs = in_.source->intervals();
        if (p.k + 1 >= ivs.size()) return kInf;
        return ivs[p.k].t.back();
    }

    Vec input(const Partial& p, double t, const Vec& x) const {
        switch (in_.kind) {
            case InputSignal::expression: {
                Bindings b;
                b.t = t;
                b.j = p.j;
                b.tau = t - p.t_start;
                Vec w = eval_vec(in_.expr, b);
                if (w.size() != d_.m) throw std::invalid_argument("input dimension mismatch");
                return w;
            }
            case InputSignal::feedback: {
                Bindings b;
                b.x = &x;
                b.t = t;
                b.j = p.j;
                b.tau = t - p.t_start;
                b.len = pol_.max_time - p.t_start;  // provisional; the interval is still open
                return eval_vec(d_.h, b);
            }
            case InputSignal::arc: {
                const auto& iv = in_.source->intervals()[p.k];
                double tc = std::clamp(t, iv.t.front(), iv.t.back());
                return eval(*in_.source, tc, static_cast<int>(p.k)).y;
            }
        }
        return {};
    }

    Vec field(const Partial& p, int sel, double t, const Vec& x) const {
        Vec w = input(p, t, x);
        Bindings b;
        b.x = &x;
        b.w = &w;
        b.t = t;
        b.j = p.j;
        b.tau = t - p.t_start;
        return eval_vec(d_.F[sel], b);
    }

    Vec rk4(const Partial& p, int sel, double h) const {
        const Vec& x = p.x;
        double t = p.t;
        Vec k1 = field(p, sel, t, x);
        Vec k2 = field(p, sel, t + 0.5 * h, axpy(x, 0.5 * h, k1));
        Vec k3 = field(p, sel, t + 0.5 * h, axpy(x, 0.5 * h, k2));
        Vec k4 = field(p, sel, t + h, axpy(x, h, k3));
        Vec r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return r;
    }

    Vec reset(const Partial& p, int g, const Vec& w) const {
        Bindings b;
        b.x = &p.x;
        b.w = &w;
        b.t = p.t;
        b.j = p.j;
        b.tau = p.t - p.t_start;
        return eval_vec(d_.G[g], b);
    }

    Step attempt(const Partial& p, int sel, bool watch_d) const {
        double limit = std::min(horizon_, next_foreign(p));
        if (scheduled && p.sched < schedule.size()) limit = std::min(limit, schedule[p.sched]);
        double h = pol_.dt;
        bool to_limit = false;
        if (p.t + h >= limit - 1e-9 * pol_.dt) {
            h = limit - p.t;
            to_limit = true;
        }
        if (!(h > 0.0)) return {Step::blocked, p.t, p.x};
        double t_end = to_limit ? limit : p.t + h;
        if (!to_limit) {
            // Keep grid times at t_start + k*dt instead of accumulating rounding.
            double g = p.t_start + std::round((t_end - p.t_start) / pol_.dt) * pol_.dt;
            if (std::abs(g - t_end) < 1e-6 * pol_.dt && g > p.t) {
                t_end = g;
                h = t_end - p.t;
            }
        }
        Vec x1 = rk4(p, sel, h);
        bool d_start = watch_d && in_set(d_.D, p.x, input(p, p.t, p.x));
        auto bad = [&](double t, const Vec& x) {
            Vec w = input(p, t, x);
            if (!in_set(cbar_, x, w)) return true;
            return watch_d && !d_start && in_set(d_.D, x, w);
        };
        if (!bad(t_end, x1)) return {Step::full, t_end, x1};
        double lo = 0.0, hi = h;
        Vec xlo = p.x, xhi = x1;
        while (norm_diff(xhi, xlo) > pol_.event_tol && hi - lo > 1e-15 * std::max(1.0, p.t)) {
            double mid = 0.5 * (lo + hi);
            Vec xm = rk4(p, sel, mid);
            if (bad(p.t + mid, xm)) { hi = mid; xhi = std::move(xm); }
            else { lo = mid; xlo = std::move(xm); }
        }
        Vec whi = input(p, p.t + hi, xhi);
        bool exited = !in_set(cbar_, xhi, whi);
        if (lo == 0.0 && exited) return {Step::blocked, p.t, p.x};
        if (!(p.t + hi > p.t)) return {Step::blocked, p.t, p.x};
        return {Step::event, p.t + hi, xhi};
    }

    void push_point(Partial& p, double t, const Vec& x) const {
        p.cur.t.push_back(t);
        p.cur.x.push_back(x);
        p.cur.w.push_back(input(p, t, x));
    }

    void advance(Partial& p, const Step& s) const {
        p.t = s.t;
        p.x = s.x;
        push_point(p, p.t, p.x);
    }

    // `held` describes the jump that ends this interval; the last interval has none.
    void close_interval(Partial& p, bool held, bool last = false) const {
        ArcInterval& iv = p.cur;
        double len = iv.t.back() - iv.t.front();
        iv.y.clear();
        for (std::size_t q = 0; q < iv.size(); ++q) {
            Bindings b;
            b.x = &iv.x[q];
            b.w = &iv.w[q];
            b.t = iv.t[q];
            b.j = p.j;
            b.tau = iv.t[q] - iv.t.front();
            b.len = len;
            iv.y.push_back(eval_vec(d_.h, b));
        }
        if (!last) p.arc.held_jumps.push_back(held);
        if (in_.kind == InputSignal::arc) p.arc.source_index.push_back(p.k);
        p.arc.push_interval(std::move(iv));
        p.cur = ArcInterval{};
    }

    void begin_interval(Partial& p, const Vec& x) const {
        ++p.j;
        p.t_start = p.t;
        p.x = x;
        p.committed = false;
        push_point(p, p.t, p.x);
    }

    // Returns false when the jump budget ends the arc.
    bool own_jump(Partial& p, int g, const Vec& w, bool at_foreign) {
        if (p.own_jumps >= pol_.max_jumps) {
            finish(p, StopReason::max_jumps, true);
            return false;
        }
        Vec xp = reset(p, g, w);
        close_interval(p, false);
        ++p.own_jumps;
        if (at_foreign && pol_.align_coincident_jumps) ++p.k;
        begin_interval(p, xp);
        return true;
    }

    void foreign_jump(Partial& p) const {
        Vec x = p.x;
        close_interval(p, true);
        ++p.k;
        begin_interval(p, x);
    }

    void finish(Partial& p, StopReason why, bool open) {
        close_interval(p, false, true);
        p.arc.stop = why;
        p.arc.final_open = open;
        ++leaves;
        for (const auto& a : out.arcs)
            if (a == p.arc) return;
        out.arcs.push_back(std::move(p.arc));
    }
};

void check_start(const HybridSystemDesc& d, const Vec& x0, const SimPolicy& policy) {
    check_policy(policy);
    if (x0.size() != d.n) throw std::invalid_argument("x0 dimension mismatch");
    if (!d.X0.contains(x0)) throw std::invalid_argument("x0 outside the initial set X0");
}

Vec kicked(const Vec& x0) {
    Vec r = x0;
    for (double& v : r) v += kKick;
    return r;
}

}  // namespace

void check_policy(const SimPolicy& p) {
    if (!(p.dt > 0.0)) throw std::invalid_argument("policy: dt must be positive");
    if (!(p.event_tol > 0.0)) throw std::invalid_argument("policy: event_tol must be positive");
    if (p.max_branches < 1) throw std::invalid_argument("policy: max_branches must be at least 1");
    if (!(p.max_time >= 0.0) || !std::isfinite(p.max_time)) throw std::invalid_argument("policy: max_time must be finite and non-negative");
    if (p.max_jumps < 0) throw std::invalid_argument("policy: max_jumps must be non-negative");
}

const char* overlap_name(OverlapRule r) {
    switch (r) {
        case OverlapRule::jump_priority: return "jump_priority";
        case OverlapRule::flow_priority: return "flow_priority";
        case OverlapRule::enumerate: return "enumerate";
    }
    return "?";
}

OverlapRule parse_overlap(const std::string& s) {
    if (s == "jump" || s == "jump_priority") return OverlapRule::jump_priority;
    if (s == "flow" || s == "flow_priority") return OverlapRule::flow_priority;
    if (s == "enumerate") return OverlapRule::enumerate;
    throw std::invalid_argument("unknown overlap rule '" + s + "'");
}

InputSignal InputSignal::constant(const Vec& w) {
    InputSignal s;
    for (double v : w) s.expr.push_back(Expr::constant(v));
    return s;
}

InputSignal InputSignal::from_expr(VecExpr e) {
    InputSignal s;
    s.expr = std::move(e);
    return s;
}

InputSignal InputSignal::closed_loop() {
    InputSignal s;
    s.kind = feedback;
    return s;
}

InputSignal InputSignal::from_arc(std::shared_ptr<const HybridArc> a) {
    InputSignal s;
    s.kind = arc;
    s.source = std::move(a);
    return s;
}

bool in_set(const BoxSet& s, const Vec& x, const Vec& w) {
    if (s.dims() == x.size()) return s.contains(x);
    Vec xw = x;
    xw.insert(xw.end(), w.begin(), w.end());
    return s.contains(xw);
}

std::vector<Vec> finite_samples(const Box& b, int resolution) {
    Box fin = b;
    std::vector<Vec> extra;
    for (Face& f : fin.faces) {
        if (std::isinf(f.lo) && std::isinf(f.hi)) f.lo = f.hi = 0.0;
        else if (std::isinf(f.lo)) f.lo = f.hi - 1.0;
        else if (std::isinf(f.hi)) f.hi = f.lo + 1.0;
    }
    std::vector<Vec> pts = sample_grid(fin, resolution);
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](const Vec& v) { return !b.contains(v); }), pts.end());
    if (pts.empty()) pts.push_back(fin.center());
    return pts;
}

void validate(const HybridSystemDesc& d) {
    auto need = [&](const BoxSet& s, std::size_t dims, const char* what) {
        if (s.dims() != dims) throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(s.dims()) + ", expected " + std::to_string(dims));
    };
    if (d.n == 0) throw std::invalid_argument("system needs at least one state");
    need(d.W, d.m, "W");
    need(d.X, d.n, "X");
    need(d.Y, d.p, "Y");
    need(d.X0, d.n, "X0");
    for (const BoxSet* s : {&d.C, &d.D})
        if (s->dims() != d.n && s->dims() != d.n + d.m)
            throw std::invalid_argument("flow/jump set must live in x- or (x,w)-space");
    if (d.F.empty() && d.G.empty()) throw std::invalid_argument("system has neither flow nor jump maps");
    for (const auto& f : d.F)
        if (f.size() != d.n) throw std::invalid_argument("flow map dimension mismatch");
    for (const auto& g : d.G)
        if (g.size() != d.n) throw std::invalid_argument("jump map dimension mismatch");
    if (d.h.size() != d.p) throw std::invalid_argument("output map dimension mismatch");
    if (d.X0.empty()) throw std::invalid_argument("initial set X0 is empty");

    BoxSet cbar = d.C.closure();
    std::vector<Vec> ws = d.m ? finite_samples(d.W.empty() ? Box{} : d.W.pieces().front(), 3) : std::vector<Vec>{Vec{}};
    bool any = false;
    for (const Box& b : d.X0.pieces()) {
        for (const Vec& x : finite_samples(b, 3)) {
            for (const Vec& w : ws)
                if (in_set(cbar, x, w) || in_set(d.D, x, w)) any = true;
            bool causal = std::none_of(d.h.begin(), d.h.end(), [](const Expr& e) { return e.uses_interval_vars() || e.uses_var('w'); });
            if (causal) {
                Bindings bd;
                bd.x = &x;
                Vec y = eval_vec(d.h, bd);
                if (!d.Y.contains(y)) throw std::invalid_argument("output h(x) leaves Y at x=" + render_real(x[0]));
            }
        }
    }
    if (!any) throw std::invalid_argument("initial set lies outside the closure of C and outside D at every sample");
}

HybridArc simulate(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0, const SimPolicy& policy) {
    check_start(d, x0, policy);
    SimPolicy pol = policy;
    if (pol.overlap_rule == OverlapRule::enumerate) pol.overlap_rule = OverlapRule::jump_priority;
    Engine e(d, in, pol);
    e.run(e.start(pol.kickstart ? kicked(x0) : x0));
    return std::move(e.out.arcs.front());
}

BranchSet enumerate_branches(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0, const SimPolicy& policy) {
    check_start(d, x0, policy);
    Engine e(d, in, policy);
    e.enumerate = true;
    e.run(e.start(x0));
    if (policy.kickstart && !e.out.truncated) e.run(e.start(kicked(x0)));
    return std::move(e.out);
}

HybridArc simulate_on_schedule(const HybridSystemDesc& d, const InputSignal& in, const Vec& x0,
                               const std::vector<double>& jump_times, double horizon, const SimPolicy& policy) {
    check_start(d, x0, policy);
    if (!std::is_sorted(jump_times.begin(), jump_times.end())) throw std::invalid_argument("schedule must be nondecreasing");
    if (!jump_times.empty() && jump_times.back() > horizon) throw std::invalid_argument("schedule extends past the horizon");
    SimPolicy pol = policy;
    pol.max_time = horizon;
    pol.max_jumps = static_cast<int>(jump_times.size());
    Engine e(d, in, pol);
    e.scheduled = true;
    e.schedule = jump_times;
    e.run(e.start(x0));
    return std::move(e.out.arcs.front());
}

std::optional<std::string> replay_check(const HybridSystemDesc& d, const HybridArc& arc, const SimPolicy& policy) {
    BoxSet cbar = d.C.closure();
    const auto& ivs = arc.intervals();
    double ctol = 10.0 * policy.event_tol;
    for (std::size_t j = 0; j < ivs.size(); ++j) {
        const auto& iv = ivs[j];
        if (iv.size() >= 2) {
            for (std::size_t q = 0; q < iv.size(); ++q) {
                Vec xw = iv.x[q];
                if (cbar.dims() != d.n) xw.insert(xw.end(), iv.w[q].begin(), iv.w[q].end());
                if (distance(xw, cbar) > ctol)
                    return "flow point outside the flow set at (" + render_real(iv.t[q]) + ", " + std::to_string(j) + ")";
            }
            for (std::size_t q = 0; q + 1 < iv.size(); ++q) {
                double dt = iv.t[q + 1] - iv.t[q];
                Vec xm(d.n), wm(d.m), sec(d.n);
                for (std::size_t i = 0; i < d.n; ++i) {
                    xm[i] = 0.5 * (iv.x[q][i] + iv.x[q + 1][i]);
                    sec[i] = (iv.x[q + 1][i] - iv.x[q][i]) / dt;
                }
                for (std::size_t i = 0; i < d.m; ++i) wm[i] = 0.5 * (iv.w[q][i] + iv.w[q + 1][i]);
                // The input may switch inside the step, so the secant is
                // compared against the hull of the field at both end inputs.
                bool ok = false;
                for (const auto& f : d.F) {
                    Bindings b;
                    b.x = &xm;
                    b.t = iv.t[q] + 0.5 * dt;
                    b.j = static_cast<double>(j);
                    b.tau = b.t - iv.t.front();
                    Vec lo, hi;
                    for (const Vec* w : std::initializer_list<const Vec*>{&wm, &iv.w[q], &iv.w[q + 1]}) {
                        b.w = w;
                        Vec v = eval_vec(f, b);
                        if (lo.empty()) lo = hi = v;
                        for (std::size_t i = 0; i < d.n; ++i) {
                            lo[i] = std::min(lo[i], v[i]);
                            hi[i] = std::max(hi[i], v[i]);
                        }
                    }
                    double mag = 0.0;
                    for (std::size_t i = 0; i < d.n; ++i) mag = std::max({mag, std::abs(lo[i]), std::abs(hi[i])});
                    double tol = 10.0 * policy.dt * std::max(1.0, mag);
                    bool fits = true;
                    for (std::size_t i = 0; i < d.n; ++i)
                        if (sec[i] < lo[i] - tol || sec[i] > hi[i] + tol) fits = false;
                    if (fits) ok = true;
                }
                if (!ok) return "derivative mismatch at (" + render_real(iv.t[q]) + ", " + std::to_string(j) + ")";
            }
        }
        if (j + 1 < ivs.size()) {
            bool held = j < arc.held_jumps.size() && arc.held_jumps[j];
            const Vec& xpre = iv.x.back();
            const Vec& wpre = iv.w.back();
            const Vec& xpost = ivs[j + 1].x.front();
            if (held) {
                if (xpre != xpost) return "held jump changed the state at jump " + std::to_string(j);
                continue;
            }
            if (!in_set(d.D, xpre, wpre)) return "jump from outside the jump set at jump " + std::to_string(j);
            bool ok = false;
            for (const auto& g : d.G) {
                Bindings b;
                b.x = &xpre;
                b.w = &wpre;
                b.t = iv.t.back();
                b.j = static_cast<double>(j);
                b.tau = iv.t.back() - iv.t.front();
                if (eval_vec(g, b) == xpost) ok = true;
            }
            if (!ok) return "post-jump state matches no reset selection at jump " + std::to_string(j);
        }
    }
    return std::nullopt;
}

}  // namespace hyag
