#include "hyag/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hyag/composition.hpp"

namespace hyag {

namespace {

constexpr double kSampledConeTol = 1e-9;

struct Region {
    Box x, w;
};

Box closure_of(Box b) {
    for (Face& f : b.faces) f.lo_strict = f.hi_strict = false;
    return b;
}

Box slice(const Box& b, std::size_t from, std::size_t count) {
    Box r;
    r.faces.assign(b.faces.begin() + static_cast<std::ptrdiff_t>(from), b.faces.begin() + static_cast<std::ptrdiff_t>(from + count));
    return r;
}

const Box& k_box(const InvarianceProblem& p) { return p.K.box(); }

std::vector<Box> aw_boxes(const InvarianceProblem& p) {
    if (p.system.m == 0) return {Box{}};
    return p.contract.AW.pieces();
}

// (K ∩ D) x A_W, split back into state and input parts.
std::vector<Region> jump_regions(const InvarianceProblem& p) {
    const auto& d = p.system;
    std::vector<Region> out;
    if (d.D.dims() == d.n) {
        for (const Box& b : intersect(d.D, p.K).pieces())
            for (const Box& w : aw_boxes(p)) out.push_back({b, w});
    } else {
        for (const Box& aw : aw_boxes(p)) {
            BoxSet kw = product(p.K, BoxSet::from_box(aw));
            for (const Box& b : intersect(d.D, kw).pieces()) out.push_back({slice(b, 0, d.n), slice(b, d.n, d.m)});
        }
    }
    return out;
}

// Closure of K ∩ C when C is state-only; K itself otherwise (samples are then
// filtered by membership in the closure of C).
std::optional<Box> flow_region(const InvarianceProblem& p) {
    const auto& d = p.system;
    if (d.C.dims() != d.n) return k_box(p);
    BoxSet b = intersect(d.C.closure(), p.K);
    if (b.empty()) return std::nullopt;
    if (!b.single_box()) throw std::invalid_argument("invariance: K ∩ C is not a single box");
    return b.box();
}

std::optional<Affine> affine_of(const Expr& e, const HybridSystemDesc& d) {
    if (e.uses_interval_vars() || e.uses_var('t') || e.uses_var('j')) return std::nullopt;
    return e.affine(d.n, d.m);
}

bool all_affine(const std::vector<VecExpr>& maps, const HybridSystemDesc& d) {
    for (const auto& f : maps)
        for (const auto& e : f)
            if (!affine_of(e, d)) return false;
    return true;
}

Vec eval_at(const VecExpr& f, const Vec& x, const Vec& w) {
    Bindings b;
    b.x = &x;
    b.w = &w;
    return eval_vec(f, b);
}

std::vector<Vec> grid_in(const Box& b, int res) {
    std::vector<Vec> pts = sample_grid(closure_of(b), res);
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](const Vec& v) { return !b.contains(v); }), pts.end());
    return pts;
}

std::string render_vec(const Vec& v) {
    if (v.size() == 1) return render_real(v[0]);
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render_real(v[i]);
    return s + ")";
}

std::string face_range(const Face& f) { return "[" + render_real(f.lo) + ", " + render_real(f.hi) + "]"; }

bool face_within(const Face& r, const Face& target) { return target.contains(r.lo) && target.contains(r.hi); }

CondVerdict falsified(Vec x, Vec w, std::string detail) {
    CondVerdict v;
    v.status = CondStatus::falsified;
    v.witness_x = std::move(x);
    v.witness_w = std::move(w);
    v.detail = std::move(detail);
    return v;
}

CondVerdict unknown(std::string detail) {
    CondVerdict v;
    v.status = CondStatus::unknown;
    v.detail = std::move(detail);
    return v;
}

// Witnesses come from the upper end of the grid first.
std::optional<Vec> find_outside(const BoxSet& from, const BoxSet& in, int res) {
    for (const Box& b : from.pieces()) {
        std::vector<Vec> pts = finite_samples(b, std::max(res, 2));
        for (auto it = pts.rbegin(); it != pts.rend(); ++it)
            if (!in.contains(*it)) return *it;
    }
    return std::nullopt;
}

double cone_tol_of(const InvarianceProblem& p, bool exact) {
    if (p.cone_tol) return *p.cone_tol;
    return exact ? 0.0 : kSampledConeTol;
}

bool h_in_gy(const InvarianceProblem& p, const Vec& x) {
    Vec w(p.system.m, 0.0);
    return p.contract.GY.contains(eval_at(p.system.h, x, w));
}

bool jump_ok(const InvarianceProblem& p, const VecExpr& g, const Vec& x, const Vec& w) {
    return p.K.contains(eval_at(g, x, w));
}

bool flow_ok(const Box& region, const Vec& x, const Vec& v, double tol) {
    return in_cone(tangent_cone(BoxSet::from_box(region), x), v, tol);
}

}  // namespace

void check_problem(const InvarianceProblem& p) {
    validate(p.system);
    const auto& d = p.system;
    const auto& c = p.contract;
    if (c.AW.dims() != d.m || c.GX.dims() != d.n || c.GY.dims() != d.p)
        throw std::invalid_argument("invariance: contract alphabets do not match the system");
    if (d.m > 0 && (c.AW.empty() || !c.AW.bounded() || !c.AW.closed()))
        throw std::invalid_argument("invariance: A_W must be compact (bounded with closed faces); the result assumes a compact set of assumptions");
    if (p.K.dims() != d.n) throw std::invalid_argument("invariance: K has the wrong dimension");
    if (!p.K.single_box() || !p.K.closed()) throw std::invalid_argument("invariance: K must be a single closed box");
    if (!p.K.bounded()) throw std::invalid_argument("invariance: K must be bounded");
    if (p.boundary_resolution < 2 || p.aw_resolution < 1 || p.jumpset_resolution < 1)
        throw std::invalid_argument("invariance: resolutions too small");
}

bool exact_path_available(const InvarianceProblem& p) {
    const auto& d = p.system;
    if (d.C.dims() != d.n) return false;
    if (d.m > 0 && !p.contract.AW.single_box()) return false;
    if (!all_affine(d.F, d) || !all_affine(d.G, d)) return false;
    for (const auto& e : d.h) {
        auto a = affine_of(e, d);
        if (!a || std::any_of(a->bw.begin(), a->bw.end(), [](double v) { return v != 0.0; })) return false;
    }
    return true;
}

CondVerdict check_condition_i(const InvarianceProblem& p) {
    check_problem(p);
    const auto& d = p.system;
    if (!subset(d.X0, p.K)) {
        auto x = find_outside(d.X0, p.K, p.boundary_resolution);
        return falsified(x.value_or(Vec{}), {}, "X0 is not contained in K");
    }
    if (!subset(p.K, p.contract.GX)) {
        auto x = find_outside(p.K, p.contract.GX, p.boundary_resolution);
        return falsified(x.value_or(Vec{}), {}, "K is not contained in G_X");
    }
    const Box& k = k_box(p);
    if (exact_path_available(p) && p.contract.GY.single_box()) {
        CondVerdict v;
        v.exact = true;
        Box none;
        bool ok = true;
        for (std::size_t i = 0; i < d.p && ok; ++i) {
            Face r = affine_range(*affine_of(d.h[i], d), k, none);
            ok = face_within(r, p.contract.GY.box().faces[i]);
            v.lines.push_back("h" + std::to_string(i + 1) + "(K) in " + face_range(r));
        }
        if (ok) return v;
    }
    std::vector<Vec> pts = sample_grid(k, p.boundary_resolution);
    try {
        for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
            if (h_in_gy(p, *it)) continue;
            if (h_in_gy(p, *it)) return unknown("witness did not reproduce");
            return falsified(*it, {}, "h(x) leaves G_Y");
        }
    } catch (const EvalError& e) {
        return unknown(std::string("evaluation failed: ") + e.what());
    }
    return CondVerdict{};
}

CondVerdict check_condition_ii(const InvarianceProblem& p) {
    check_problem(p);
    const auto& d = p.system;
    std::vector<Region> regions = jump_regions(p);
    if (regions.empty()) {
        CondVerdict v;
        v.exact = true;
        v.lines.push_back("K ∩ D is empty");
        return v;
    }
    if (exact_path_available(p)) {
        CondVerdict v;
        v.exact = true;
        bool ok = true;
        for (const Region& r : regions) {
            for (std::size_t g = 0; g < d.G.size() && ok; ++g)
                for (std::size_t i = 0; i < d.n && ok; ++i) {
                    Face rg = affine_range(*affine_of(d.G[g][i], d), closure_of(r.x), closure_of(r.w));
                    ok = face_within(rg, k_box(p).faces[i]);
                    v.lines.push_back("G" + std::to_string(g + 1) + "_" + std::to_string(i + 1) + " over " +
                                      render_box(BoxSet::from_box(r.x)) + " in " + face_range(rg));
                }
        }
        if (ok) return v;
    }
    try {
        for (const Region& r : regions) {
            for (const Vec& x : grid_in(r.x, p.jumpset_resolution))
                for (const Vec& w : grid_in(r.w, p.aw_resolution))
                    for (const VecExpr& g : d.G) {
                        if (jump_ok(p, g, x, w)) continue;
                        if (jump_ok(p, g, x, w)) return unknown("witness did not reproduce");
                        return falsified(x, w, "jump image " + render_vec(eval_at(g, x, w)) + " leaves K");
                    }
        }
    } catch (const EvalError& e) {
        return unknown(std::string("evaluation failed: ") + e.what());
    }
    return CondVerdict{};
}

CondVerdict check_condition_iii(const InvarianceProblem& p) {
    check_problem(p);
    const auto& d = p.system;
    std::optional<Box> region = flow_region(p);
    if (!region || d.F.empty()) {
        CondVerdict v;
        v.exact = true;
        v.lines.push_back("no flow on K");
        return v;
    }
    const Box& b = *region;
    if (exact_path_available(p)) {
        const double tol = cone_tol_of(p, true);
        CondVerdict v;
        v.exact = true;
        bool ok = true;
        Box aw = d.m ? p.contract.AW.box() : Box{};
        for (std::size_t i = 0; i < d.n && ok; ++i) {
            const Face& f = b.faces[i];
            for (int side = 0; side < 2 && ok; ++side) {
                double at = side == 0 ? f.lo : f.hi;
                if (side == 1 && f.hi == f.lo) break;
                Box face = b;
                face.faces[i] = Face{at, at, false, false};
                bool zero = f.lo == f.hi;
                for (std::size_t s = 0; s < d.F.size() && ok; ++s) {
                    Face r = affine_range(*affine_of(d.F[s][i], d), face, aw);
                    bool good = zero ? (r.lo >= -tol && r.hi <= tol) : side == 0 ? r.lo >= -tol : r.hi <= tol;
                    ok = good;
                    v.lines.push_back("x" + std::to_string(i + 1) + "=" + render_real(at) + ": F" +
                                      (d.F.size() > 1 ? std::to_string(s + 1) + "_" : std::string()) + std::to_string(i + 1) +
                                      " in " + face_range(r) + (zero ? " (need 0)" : side == 0 ? " (need >= 0)" : " (need <= 0)"));
                }
            }
        }
        if (ok) return v;
    }
    const double tol = cone_tol_of(p, false);
    std::vector<Vec> ws;
    for (const Box& aw : aw_boxes(p))
        for (Vec& w : grid_in(aw, p.aw_resolution)) ws.push_back(std::move(w));
    BoxSet cbar = d.C.closure();
    try {
        std::vector<Vec> xs = sample_boundary(BoxSet::from_box(b), p.boundary_resolution);
        for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
            const Vec& x = *it;
            for (const Vec& w : ws) {
                if (!in_set(cbar, x, w)) continue;
                for (const VecExpr& f : d.F) {
                    Vec v = eval_at(f, x, w);
                    if (flow_ok(b, x, v, tol)) continue;
                    if (flow_ok(b, x, eval_at(f, x, w), tol)) return unknown("witness did not reproduce");
                    return falsified(x, w, "flow direction " + render_vec(v) + " leaves the tangent cone");
                }
            }
        }
    } catch (const EvalError& e) {
        return unknown(std::string("evaluation failed: ") + e.what());
    }
    return CondVerdict{};
}

InvarianceVerdict check_invariant_relative(const InvarianceProblem& p, const SimPolicy& policy) {
    check_problem(p);
    const auto& d = p.system;
    InvarianceVerdict v;
    v.cond_i = check_condition_i(p);
    v.cond_ii = check_condition_ii(p);
    v.cond_iii = check_condition_iii(p);
    const CondVerdict* all[] = {&v.cond_i, &v.cond_ii, &v.cond_iii};
    if (std::any_of(std::begin(all), std::end(all), [](const CondVerdict* c) { return c->status == CondStatus::falsified; }))
        v.overall = Overall::falsified;
    else if (std::all_of(std::begin(all), std::end(all), [](const CondVerdict* c) { return c->status == CondStatus::verified; }))
        v.overall = Overall::certified;
    v.exact = std::all_of(std::begin(all), std::end(all), [](const CondVerdict* c) { return c->exact; });

    // K ⊆ closure(C) ∪ D, sampled.
    for (const Vec& x : sample_grid(k_box(p), p.boundary_resolution)) {
        bool covered = false;
        for (const Box& aw : aw_boxes(p)) {
            Vec w = aw.dims() ? closure_of(aw).center() : Vec{};
            covered = covered || in_set(d.C.closure(), x, w) || in_set(d.D, x, w);
        }
        if (!covered) {
            v.notes.push_back("K is not covered by the closure of C and D at x=" + render_vec(x));
            break;
        }
    }

    if (v.overall == Overall::certified) {
        v.weak_concluded = d.basic_conditions;
        if (!d.basic_conditions) v.notes.push_back("conclusions withheld: basic_conditions not declared");
        bool gy_in_aw = subset(p.contract.GY, p.contract.AW);
        v.feedback_concluded = v.weak_concluded && d.lipschitz && gy_in_aw && subset(d.Y, d.W);
        if (v.weak_concluded && !d.lipschitz) v.notes.push_back("feedback conclusion withheld: F and h not declared locally Lipschitz");
        if (v.weak_concluded && !gy_in_aw) v.notes.push_back("feedback conclusion withheld: G_Y is not contained in A_W");
        if (d.basic_conditions) v.notes.push_back("basic_conditions: declared, not verified");
    }

    // Confirmation runs of the feedback loop from the corners and center of X0.
    std::optional<FeedbackSystem> fs;
    try {
        fs = feedback(d);
    } catch (const std::invalid_argument& e) {
        v.notes.push_back(std::string("no confirmation runs: ") + e.what());
    }
    if (fs) {
        for (const Box& b : d.X0.pieces()) {
            std::vector<Vec> starts;
            if (b.bounded()) {
                Box cb = closure_of(b);
                std::size_t n = cb.dims();
                for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                    Vec x(n);
                    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i & 1) ? cb.faces[i].hi : cb.faces[i].lo;
                    starts.push_back(x);
                }
                starts.push_back(cb.center());
            } else {
                starts = finite_samples(b, 2);
            }
            std::sort(starts.begin(), starts.end());
            starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
            for (const Vec& x0 : starts) {
                if (!b.contains(x0)) continue;
                HybridArc arc = simulate(d, InputSignal::closed_loop(), x0, policy);
                const double tol = std::max(kFaceTol, 10.0 * policy.event_tol);
                for (const auto& iv : arc.intervals())
                    for (const Vec& x : iv.x)
                        if (!p.contract.GX.contains(x) && distance(x, p.contract.GX) > tol) v.confirmation_ok = false;
                v.confirmation_x0.push_back(x0);
                v.confirmation_arcs.push_back(std::move(arc));
            }
        }
        if (!v.confirmation_ok) v.notes.push_back("a confirmation run leaves G_X");
    }
    return v;
}

const char* cond_name(CondStatus s) {
    switch (s) {
        case CondStatus::verified: return "verified";
        case CondStatus::falsified: return "falsified";
        case CondStatus::unknown: return "unknown";
    }
    return "?";
}

const char* overall_name(Overall o) {
    switch (o) {
        case Overall::certified: return "pre_invariant_certified_at_resolution";
        case Overall::falsified: return "falsified";
        case Overall::unknown: return "unknown";
    }
    return "?";
}

std::string render_certificate(const InvarianceProblem& p, const InvarianceVerdict& v) {
    std::string out = "K: " + render_box(p.K) + "\n";
    out += "arithmetic: " + std::string(v.exact ? "exact" : "sampled") + "\n";
    out += "resolution: {boundary: " + std::to_string(p.boundary_resolution) + ", aw: " + std::to_string(p.aw_resolution) +
           ", jumpset: " + std::to_string(p.jumpset_resolution) + "}\n";
    out += "cone_tol: " + render_real(cone_tol_of(p, v.exact)) + "\n";
    auto cond = [&](const char* name, const CondVerdict& c) {
        out += std::string(name) + ": " + cond_name(c.status) + (c.exact ? " (exact)" : "") + "\n";
        for (const auto& l : c.lines) out += "  " + l + "\n";
        if (!c.detail.empty()) out += "  detail: " + c.detail + "\n";
        if (c.status == CondStatus::falsified) {
            out += "  witness_x: " + render_vec(c.witness_x) + "\n";
            if (!c.witness_w.empty()) out += "  witness_w: " + render_vec(c.witness_w) + "\n";
        }
    };
    cond("condition_i", v.cond_i);
    cond("condition_ii", v.cond_ii);
    cond("condition_iii", v.cond_iii);
    out += "overall: " + std::string(overall_name(v.overall)) + "\n";
    out += "weak_satisfaction: " + std::string(v.weak_concluded ? "true" : "false") + "\n";
    out += "feedback_containment: " + std::string(v.feedback_concluded ? "true" : "false") + "\n";
    out += "confirmation_runs: " + std::to_string(v.confirmation_arcs.size()) + ", " +
           (v.confirmation_ok ? "all in G_X" : "some leave G_X") + "\n";
    for (const auto& n : v.notes) out += "note: " + n + "\n";
    return out;
}

}  // namespace hyag
