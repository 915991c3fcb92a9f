#include "hyag/contracts.hpp"

#include <algorithm>
#include <stdexcept>

namespace hyag {

namespace {

enum class Member { in, near, out };

Member member(const BoxSet& s, const Vec& v, double tol) {
    if (s.contains(v)) return Member::in;
    if (!s.empty() && distance(v, s) <= tol) return Member::near;
    return Member::out;
}

void check_alphabets(const HybridArc& arc, const AGContract& c) {
    if (c.AW.dims() != arc.m() || c.GX.dims() != arc.n() || c.GY.dims() != arc.p())
        throw std::invalid_argument("contract alphabets do not match the arc");
}

struct Cursor {
    std::size_t j, q;
};

// Walks the assumption prefix and checks state/output guarantees on it.
struct PrefixScan {
    std::optional<Cursor> horizon;
    std::optional<Violation> clear;
    std::optional<Violation> fuzzy;
};

PrefixScan scan_prefix(const HybridArc& arc, const AGContract& c, double tol) {
    PrefixScan r;
    const auto& ivs = arc.intervals();
    for (std::size_t j = 0; j < ivs.size(); ++j) {
        const auto& iv = ivs[j];
        for (std::size_t q = 0; q < iv.size(); ++q) {
            if (!c.AW.contains(iv.w[q])) return r;
            r.horizon = Cursor{j, q};
            if (r.clear) continue;
            Member mx = member(c.GX, iv.x[q], tol);
            Member my = member(c.GY, iv.y[q], tol);
            int jj = static_cast<int>(j);
            if (mx == Member::out) r.clear = Violation{iv.t[q], jj, Which::state};
            else if (my == Member::out) r.clear = Violation{iv.t[q], jj, Which::output};
            if (!r.fuzzy && mx == Member::near) r.fuzzy = Violation{iv.t[q], jj, Which::state};
            if (!r.fuzzy && my == Member::near) r.fuzzy = Violation{iv.t[q], jj, Which::output};
        }
    }
    return r;
}

Verdict from_scan(const HybridArc& arc, const PrefixScan& s) {
    Verdict v;
    if (s.horizon) {
        const auto& iv = arc.intervals()[s.horizon->j];
        v.horizon = HybridTime{iv.t[s.horizon->q], static_cast<int>(s.horizon->j)};
        v.horizon_is_arc_end = s.horizon->j + 1 == arc.intervals().size() && s.horizon->q + 1 == iv.size();
    }
    if (s.clear) {
        v.status = Status::violated;
        v.first_violation = s.clear;
    } else if (s.fuzzy) {
        v.status = Status::unknown;
        v.first_violation = s.fuzzy;
    }
    return v;
}

}  // namespace

Verdict check_weak(const HybridArc& arc, const AGContract& c, const MonitorOptions& opt) {
    check_alphabets(arc, c);
    return from_scan(arc, scan_prefix(arc, c, opt.face_tol));
}

Verdict check_strong(const HybridArc& arc, const AGContract& c, double delta_min, const MonitorOptions& opt) {
    if (!(delta_min > 0.0)) throw std::invalid_argument("check_strong: delta_min must be positive");
    check_alphabets(arc, c);
    const auto& ivs = arc.intervals();
    const double tol = opt.face_tol;

    Member m0 = member(c.GY, ivs.front().y.front(), tol);
    PrefixScan s = scan_prefix(arc, c, tol);
    Verdict v = from_scan(arc, s);
    if (m0 == Member::out) {
        v.status = Status::violated;
        v.first_violation = Violation{0.0, 0, Which::initial_output};
        return v;
    }
    if (v.status == Status::violated) return v;
    if (m0 == Member::near && v.status == Status::satisfied) {
        v.status = Status::unknown;
        v.first_violation = Violation{0.0, 0, Which::initial_output};
    }
    if (!s.horizon) return v;

    // Extent of output membership from (t_j, j) or from the horizon, along interval j.
    auto extent_from = [&](std::size_t j, std::size_t q0, std::optional<Violation>* hit) {
        const auto& iv = ivs[j];
        double last = iv.t[q0];
        for (std::size_t q = q0 + 1; q < iv.size(); ++q) {
            Member my = member(c.GY, iv.y[q], tol);
            if (my != Member::in) {
                if (hit && my == Member::out && q == q0 + 1) *hit = Violation{iv.t[q], static_cast<int>(j), Which::output};
                break;
            }
            last = iv.t[q];
        }
        return last - iv.t[q0];
    };

    const Cursor h = *s.horizon;
    for (std::size_t j = 0; j <= h.j; ++j) {
        const auto& iv = ivs[j];
        double len = iv.t.back() - iv.t.front();
        if (len <= 0.0) continue;
        if (j < h.j || v.horizon_is_arc_end) v.interval_deltas.push_back(std::min(extent_from(j, 0, nullptr), 0.5 * len));
    }

    if (v.horizon_is_arc_end) {
        if (!v.interval_deltas.empty())
            v.delta_witness = *std::min_element(v.interval_deltas.begin(), v.interval_deltas.end());
        return v;
    }
    const auto& hv = ivs[h.j];
    if (h.q + 1 == hv.size()) {
        // A jump follows the horizon: the output must stay guaranteed through (T, J+1).
        const auto& next = ivs[h.j + 1];
        Member my = member(c.GY, next.y.front(), tol);
        if (my == Member::out) {
            v.status = Status::violated;
            v.first_violation = Violation{next.t.front(), static_cast<int>(h.j + 1), Which::output};
        } else if (my == Member::near && v.status == Status::satisfied) {
            v.status = Status::unknown;
            v.first_violation = Violation{next.t.front(), static_cast<int>(h.j + 1), Which::output};
        }
        return v;
    }
    std::optional<Violation> hit;
    double ext = extent_from(h.j, h.q, &hit);
    if (hit) {
        v.status = Status::violated;
        v.first_violation = hit;
        return v;
    }
    if (ext + 1e-12 < delta_min) {
        v.status = Status::unknown;
        return v;
    }
    v.delta_witness = ext;
    return v;
}

LiftResult lift_weak_to_strong(const AGContract& c, double beta, double eps, const BoxSet& Y) {
    if (!(beta >= 0.0)) throw std::invalid_argument("lift: beta must be non-negative");
    if (eps < beta) throw std::invalid_argument("lift: eps (" + render_real(eps) + ") is below beta (" + render_real(beta) + ")");
    LiftResult r{AGContract{c.AW, c.GX, intersect(expand(c.GY, eps), Y)}, {}};
    if (eps == beta) r.warnings.push_back("strict: eps equals beta; the weak-to-strong lift is stated for eps > beta");
    return r;
}

CompatReport feedback_compat(const AGContract& c, double eps, const BoxSet& Y) {
    BoxSet e = intersect(expand(c.GY, eps), Y);
    return {subset(e, c.AW), c.g_y_closed(), e};
}

const char* status_name(Status s) {
    switch (s) {
        case Status::satisfied: return "satisfied";
        case Status::violated: return "violated";
        case Status::unknown: return "unknown";
    }
    return "?";
}

const char* which_name(Which w) {
    switch (w) {
        case Which::state: return "state";
        case Which::output: return "output";
        case Which::initial_output: return "initial_output";
    }
    return "?";
}

std::string render_verdict(const Verdict& v) {
    std::string out = "status: " + std::string(status_name(v.status)) + "\n";
    if (v.first_violation)
        out += "first_violation: {t: " + render_real(v.first_violation->t) + ", j: " + std::to_string(v.first_violation->j) +
               ", which: " + which_name(v.first_violation->which) + "}\n";
    else
        out += "first_violation: none\n";
    if (v.horizon)
        out += "horizon: {t: " + render_real(v.horizon->t) + ", j: " + std::to_string(v.horizon->j) + "}\n";
    else
        out += "horizon: none\n";
    out += "delta_witness: " + (v.delta_witness ? render_real(*v.delta_witness) : std::string("none")) + "\n";
    return out;
}

std::string render_contract(const AGContract& c) {
    return "AW: " + render_box(c.AW) + "\nGX: " + render_box(c.GX) + "\nGY: " + render_box(c.GY) + "\n";
}

}  // namespace hyag
