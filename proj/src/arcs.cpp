#include "hyag/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyag {

namespace {

constexpr double kTimeTol = 1e-12;

Vec lerp(const Vec& a, const Vec& b, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * (b[i] - a[i]);
    return r;
}

ArcSample sample_at(const ArcInterval& iv, double t) {
    if (iv.size() == 1 || t <= iv.t.front()) return {iv.w.front(), iv.x.front(), iv.y.front()};
    if (t >= iv.t.back()) return {iv.w.back(), iv.x.back(), iv.y.back()};
    auto it = std::upper_bound(iv.t.begin(), iv.t.end(), t);
    std::size_t k = static_cast<std::size_t>(it - iv.t.begin());
    if (iv.t[k - 1] == t) return {iv.w[k - 1], iv.x[k - 1], iv.y[k - 1]};
    double s = (t - iv.t[k - 1]) / (iv.t[k] - iv.t[k - 1]);
    return {lerp(iv.w[k - 1], iv.w[k], s), lerp(iv.x[k - 1], iv.x[k], s), lerp(iv.y[k - 1], iv.y[k], s)};
}

void push_sample(ArcInterval& iv, double t, const ArcSample& s) {
    iv.t.push_back(t);
    iv.w.push_back(s.w);
    iv.x.push_back(s.x);
    iv.y.push_back(s.y);
}

double norm_diff(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

}  // namespace

HybridTimeDomain HybridArc::domain() const {
    if (intervals_.empty()) throw std::logic_error("arc has no samples");
    std::vector<double> jumps;
    for (std::size_t j = 0; j + 1 < intervals_.size(); ++j) jumps.push_back(intervals_[j].t.back());
    return HybridTimeDomain(std::move(jumps), intervals_.back().t.back(), final_open);
}

void HybridArc::push_interval(ArcInterval iv) {
    if (iv.t.empty()) throw std::invalid_argument("arc interval without samples");
    if (iv.w.size() != iv.size() || iv.x.size() != iv.size() || iv.y.size() != iv.size())
        throw std::invalid_argument("arc interval with ragged samples");
    for (std::size_t i = 1; i < iv.size(); ++i)
        if (!(iv.t[i] > iv.t[i - 1])) throw std::invalid_argument("arc interval grid not strictly increasing");
    for (std::size_t i = 0; i < iv.size(); ++i)
        if (iv.w[i].size() != m_ || iv.x[i].size() != n_ || iv.y[i].size() != p_)
            throw std::invalid_argument("arc sample dimension mismatch");
    if (intervals_.empty() && iv.t.front() != 0.0) throw std::invalid_argument("arc must start at t = 0");
    if (!intervals_.empty() && iv.t.front() != intervals_.back().t.back())
        throw std::invalid_argument("arc interval does not start at the previous jump time");
    intervals_.push_back(std::move(iv));
}

std::size_t HybridArc::num_points() const {
    std::size_t n = 0;
    for (const auto& iv : intervals_) n += iv.size();
    return n;
}

bool HybridArc::operator==(const HybridArc& o) const {
    if (m_ != o.m_ || n_ != o.n_ || p_ != o.p_ || intervals_.size() != o.intervals_.size()) return false;
    for (std::size_t j = 0; j < intervals_.size(); ++j) {
        const auto& a = intervals_[j];
        const auto& b = o.intervals_[j];
        if (a.t != b.t || a.w != b.w || a.x != b.x || a.y != b.y) return false;
    }
    return true;
}

ArcSample eval(const HybridArc& arc, double t, int j) {
    if (j < 0 || j >= static_cast<int>(arc.intervals().size()))
        throw std::out_of_range("eval: jump index " + std::to_string(j) + " outside arc domain");
    const ArcInterval& iv = arc.intervals()[j];
    if (t < iv.t.front() - kTimeTol || t > iv.t.back() + kTimeTol)
        throw std::out_of_range("eval: (" + render_real(t) + ", " + std::to_string(j) + ") outside arc domain");
    return sample_at(iv, t);
}

HybridArc reparametrize(const HybridArc& arc, const HybridTimeDomain& target) {
    const auto& native = arc.intervals();
    const double arc_end = native.back().t.back();
    if (target.end() > arc_end + kTimeTol) throw std::invalid_argument("reparametrize: target extends past the arc");
    HybridArc out(arc.m(), arc.n(), arc.p());
    std::size_t k = 0;  // native interval index
    for (int i = 0; i < target.num_intervals(); ++i) {
        double s = target.start_of(i), e = target.end_of(i);
        if (i > 0) {
            // Decide whether the jump entering interval i is native to the arc.
            double tj = target.jump_times()[i - 1];
            if (k + 1 < native.size() && native[k].t.back() == tj) ++k;
        }
        const ArcInterval& src = native[k];
        if (s < src.t.front() - kTimeTol || e > src.t.back() + kTimeTol)
            throw std::invalid_argument("reparametrize: target domain is missing a jump of the arc");
        ArcInterval iv;
        push_sample(iv, s, sample_at(src, s));
        for (std::size_t q = 0; q < src.size(); ++q)
            if (src.t[q] > s && src.t[q] < e) push_sample(iv, src.t[q], {src.w[q], src.x[q], src.y[q]});
        if (e > s) push_sample(iv, e, sample_at(src, e));
        out.push_interval(std::move(iv));
    }
    if (k + 1 < native.size() && native[k].t.back() < target.end())
        throw std::invalid_argument("reparametrize: target domain is missing a jump of the arc");
    out.final_open = target.final_open();
    out.stop = arc.stop;
    // Mark jumps that the arc did not make itself.
    {
        std::size_t kk = 0;
        for (int i = 1; i < target.num_intervals(); ++i) {
            double tj = target.jump_times()[i - 1];
            bool own = kk + 1 < native.size() && native[kk].t.back() == tj;
            if (own) {
                out.held_jumps.push_back(kk < arc.held_jumps.size() ? arc.held_jumps[kk] : false);
                ++kk;
            } else {
                out.held_jumps.push_back(true);
            }
        }
    }
    return out;
}

double max_jump_variation(const HybridArc& arc) {
    double best = 0.0;
    const auto& ivs = arc.intervals();
    for (std::size_t j = 0; j + 1 < ivs.size(); ++j)
        best = std::max(best, norm_diff(ivs[j].y.back(), ivs[j + 1].y.front()));
    return best;
}

ArcClassification classify(const HybridArc& arc, double max_time, int max_jumps, double zeno_window, int zeno_threshold) {
    ArcClassification c{ArcClassification::compact_maximal_candidate, max_time, max_jumps};
    auto jumps = arc.domain().jump_times();
    if (zeno_threshold > 0 && static_cast<int>(jumps.size()) >= zeno_threshold) {
        for (std::size_t a = 0; a + zeno_threshold - 1 < jumps.size(); ++a) {
            if (jumps[a + zeno_threshold - 1] - jumps[a] <= zeno_window) {
                c.kind = ArcClassification::zeno_suspect;
                return c;
            }
        }
    }
    bool budget_hit;
    if (arc.stop == StopReason::none) {
        double end = arc.intervals().back().t.back();
        budget_hit = end >= max_time - kTimeTol || static_cast<int>(jumps.size()) >= max_jumps;
    } else {
        budget_hit = arc.stop == StopReason::max_time || arc.stop == StopReason::max_jumps;
    }
    if (budget_hit) c.kind = ArcClassification::complete_budget_truncated;
    return c;
}

const char* kind_name(ArcClassification::Kind k) {
    switch (k) {
        case ArcClassification::complete_budget_truncated: return "complete_budget_truncated";
        case ArcClassification::compact_maximal_candidate: return "compact_maximal_candidate";
        case ArcClassification::zeno_suspect: return "zeno_suspect";
    }
    return "?";
}

const char* stop_name(StopReason r) {
    switch (r) {
        case StopReason::none: return "none";
        case StopReason::max_time: return "max_time";
        case StopReason::max_jumps: return "max_jumps";
        case StopReason::no_continuation: return "no_continuation";
        case StopReason::external: return "external";
    }
    return "?";
}

std::string arc_to_csv(const HybridArc& arc) {
    std::string out = "t,j";
    for (std::size_t i = 1; i <= arc.m(); ++i) out += ",w_" + std::to_string(i);
    for (std::size_t i = 1; i <= arc.n(); ++i) out += ",x_" + std::to_string(i);
    for (std::size_t i = 1; i <= arc.p(); ++i) out += ",y_" + std::to_string(i);
    out += '\n';
    const auto& ivs = arc.intervals();
    for (std::size_t j = 0; j < ivs.size(); ++j) {
        const auto& iv = ivs[j];
        for (std::size_t q = 0; q < iv.size(); ++q) {
            out += render_real(iv.t[q]) + "," + std::to_string(j);
            for (double v : iv.w[q]) out += "," + render_real(v);
            for (double v : iv.x[q]) out += "," + render_real(v);
            for (double v : iv.y[q]) out += "," + render_real(v);
            out += '\n';
        }
    }
    return out;
}

}  // namespace hyag
