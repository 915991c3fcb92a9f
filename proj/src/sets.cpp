#include "hyag/sets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hyag {

bool Box::empty() const {
    return std::any_of(faces.begin(), faces.end(), [](const Face& f) { return f.empty(); });
}

bool Box::closed() const {
    return std::all_of(faces.begin(), faces.end(), [](const Face& f) { return f.closed(); });
}

bool Box::bounded() const {
    return std::all_of(faces.begin(), faces.end(),
                       [](const Face& f) { return std::isfinite(f.lo) && std::isfinite(f.hi); });
}

bool Box::contains(const Vec& x) const {
    for (std::size_t i = 0; i < faces.size(); ++i)
        if (!faces[i].contains(x[i])) return false;
    return true;
}

Vec Box::center() const {
    Vec c(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const Face& f = faces[i];
        if (std::isfinite(f.lo) && std::isfinite(f.hi)) c[i] = 0.5 * (f.lo + f.hi);
        else if (std::isfinite(f.lo)) c[i] = f.lo;
        else if (std::isfinite(f.hi)) c[i] = f.hi;
        else c[i] = 0.0;
    }
    return c;
}

BoxSet::BoxSet(std::size_t dims, std::vector<Box> pieces) : dims_(dims) {
    for (auto& b : pieces) {
        if (b.dims() != dims) throw std::invalid_argument("box dimension mismatch");
        for (const Face& f : b.faces)
            if (f.lo > f.hi) throw std::invalid_argument("box with lo > hi");
        if (!b.empty()) pieces_.push_back(std::move(b));
    }
}

BoxSet BoxSet::interval(double lo, double hi, bool lo_strict, bool hi_strict) {
    return BoxSet(1, {Box{{Face{lo, hi, lo_strict, hi_strict}}}});
}

BoxSet BoxSet::from_box(Box b) {
    std::size_t d = b.dims();
    return BoxSet(d, {std::move(b)});
}

BoxSet BoxSet::point(const Vec& p) {
    Box b;
    for (double v : p) b.faces.push_back(Face{v, v, false, false});
    return from_box(std::move(b));
}

BoxSet BoxSet::whole(std::size_t dims) {
    return from_box(Box{std::vector<Face>(dims)});
}

BoxSet BoxSet::nonneg(std::size_t dims) {
    return from_box(Box{std::vector<Face>(dims, Face{0.0, kInf, false, false})});
}

bool BoxSet::closed() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Box& b) { return b.closed(); });
}

bool BoxSet::bounded() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Box& b) { return b.bounded(); });
}

const Box& BoxSet::box() const {
    if (pieces_.size() != 1) throw std::invalid_argument("expected a single box");
    return pieces_.front();
}

bool BoxSet::contains(const Vec& x) const {
    if (x.size() != dims_) throw std::invalid_argument("contains: dimension mismatch");
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Box& b) { return b.contains(x); });
}

BoxSet BoxSet::closure() const {
    std::vector<Box> out = pieces_;
    for (auto& b : out)
        for (auto& f : b.faces) f.lo_strict = f.hi_strict = false;
    BoxSet r(dims_, std::move(out));
    r.outer_approx = outer_approx;
    r.inner_approx = inner_approx;
    return r;
}

BoxSet expand(const BoxSet& s, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("expand: negative eps");
    std::vector<Box> out;
    for (Box b : s.pieces()) {
        for (auto& f : b.faces) {
            // Round outward so that contracting by eps gives the face back.
            double lo = f.lo - eps, hi = f.hi + eps;
            while (std::isfinite(lo) && lo + eps > f.lo) lo = std::nextafter(lo, -kInf);
            while (std::isfinite(hi) && hi - eps < f.hi) hi = std::nextafter(hi, kInf);
            f.lo = lo;
            f.hi = hi;
            f.lo_strict = f.hi_strict = false;
        }
        out.push_back(std::move(b));
    }
    BoxSet r(s.dims(), std::move(out));
    r.outer_approx = s.outer_approx || (s.dims() > 1 && eps > 0.0);
    return r;
}

BoxSet contract(const BoxSet& s, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("contract: eps must be positive");
    std::vector<Box> out;
    for (Box b : s.pieces()) {
        bool keep = true;
        for (auto& f : b.faces) {
            if (f.hi - f.lo < 2.0 * eps) { keep = false; break; }
            f.lo += eps;
            f.hi -= eps;
        }
        if (keep) out.push_back(std::move(b));
    }
    BoxSet r(s.dims(), std::move(out));
    r.inner_approx = s.inner_approx || s.dims() > 1;
    return r;
}

double distance(const Vec& x, const BoxSet& s) {
    if (s.empty()) throw std::invalid_argument("distance: empty set");
    if (x.size() != s.dims()) throw std::invalid_argument("distance: dimension mismatch");
    double best = kInf;
    for (const Box& b : s.pieces()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = std::max({b.faces[i].lo - x[i], 0.0, x[i] - b.faces[i].hi});
            acc += d * d;
        }
        best = std::min(best, std::sqrt(acc));
    }
    return best;
}

static Face intersect_face(const Face& a, const Face& b) {
    Face r;
    if (a.lo > b.lo) { r.lo = a.lo; r.lo_strict = a.lo_strict; }
    else if (b.lo > a.lo) { r.lo = b.lo; r.lo_strict = b.lo_strict; }
    else { r.lo = a.lo; r.lo_strict = a.lo_strict || b.lo_strict; }
    if (a.hi < b.hi) { r.hi = a.hi; r.hi_strict = a.hi_strict; }
    else if (b.hi < a.hi) { r.hi = b.hi; r.hi_strict = b.hi_strict; }
    else { r.hi = a.hi; r.hi_strict = a.hi_strict || b.hi_strict; }
    return r;
}

BoxSet intersect(const BoxSet& a, const BoxSet& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("intersect: dimension mismatch");
    std::vector<Box> out;
    for (const Box& pa : a.pieces())
        for (const Box& pb : b.pieces()) {
            Box r;
            bool ok = true;
            for (std::size_t i = 0; i < a.dims(); ++i) {
                Face f = intersect_face(pa.faces[i], pb.faces[i]);
                if (f.empty()) { ok = false; break; }
                r.faces.push_back(f);
            }
            if (ok) out.push_back(std::move(r));
        }
    BoxSet r(a.dims(), std::move(out));
    r.outer_approx = a.outer_approx || b.outer_approx;
    r.inner_approx = a.inner_approx || b.inner_approx;
    return r;
}

BoxSet product(const BoxSet& a, const BoxSet& b) {
    std::vector<Box> out;
    for (const Box& pa : a.pieces())
        for (const Box& pb : b.pieces()) {
            Box r = pa;
            r.faces.insert(r.faces.end(), pb.faces.begin(), pb.faces.end());
            out.push_back(std::move(r));
        }
    return BoxSet(a.dims() + b.dims(), std::move(out));
}

BoxSet project_front(const BoxSet& s, std::size_t k) {
    std::vector<Box> out;
    for (const Box& p : s.pieces())
        out.push_back(Box{std::vector<Face>(p.faces.begin(), p.faces.begin() + k)});
    return BoxSet(k, std::move(out));
}

static bool face_within(const Face& a, const Face& b) {
    bool lo_ok = a.lo > b.lo || (a.lo == b.lo && (!b.lo_strict || a.lo_strict));
    bool hi_ok = a.hi < b.hi || (a.hi == b.hi && (!b.hi_strict || a.hi_strict));
    return lo_ok && hi_ok;
}

// 1-D cover walk: advance a cursor over `a` using the piece of `b` that reaches furthest.
static bool covered_1d(const Face& a, const std::vector<Box>& b) {
    double cur = a.lo;
    bool need_point = !a.lo_strict;  // whether `cur` itself still has to be covered
    for (std::size_t guard = 0; guard <= b.size() + 1; ++guard) {
        if (cur > a.hi || (cur == a.hi && (!need_point || a.hi_strict))) return true;
        const Face* best = nullptr;
        for (const Box& pb : b) {
            const Face& f = pb.faces[0];
            bool starts = f.lo < cur || (f.lo == cur && (!f.lo_strict || !need_point));
            bool reaches = f.hi > cur || (f.hi == cur && need_point && !f.hi_strict);
            if (!starts || !reaches) continue;
            if (!best || f.hi > best->hi || (f.hi == best->hi && best->hi_strict && !f.hi_strict))
                best = &f;
        }
        if (!best) return false;
        if (std::isinf(best->hi)) return true;
        bool progressed = best->hi > cur || (need_point && !best->hi_strict);
        if (!progressed) return false;
        cur = best->hi;
        need_point = best->hi_strict;
    }
    return false;
}

bool subset(const BoxSet& a, const BoxSet& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("subset: dimension mismatch");
    for (const Box& pa : a.pieces()) {
        if (a.dims() == 1) {
            if (!covered_1d(pa.faces[0], b.pieces())) return false;
            continue;
        }
        bool inside = std::any_of(b.pieces().begin(), b.pieces().end(), [&](const Box& pb) {
            for (std::size_t i = 0; i < a.dims(); ++i)
                if (!face_within(pa.faces[i], pb.faces[i])) return false;
            return true;
        });
        if (!inside) return false;
    }
    return true;
}

SignCone tangent_cone(const BoxSet& k, const Vec& x) {
    if (k.pieces().size() != 1) throw std::invalid_argument("tangent_cone: needs a single box");
    const Box& b = k.pieces().front();
    if (!b.closed()) throw std::invalid_argument("tangent_cone: box must be closed");
    if (x.size() != k.dims()) throw std::invalid_argument("tangent_cone: dimension mismatch");
    SignCone c;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Face& f = b.faces[i];
        if (x[i] < f.lo - kFaceTol || x[i] > f.hi + kFaceTol)
            throw std::invalid_argument("tangent_cone: point outside the box");
        bool at_lo = std::abs(x[i] - f.lo) <= kFaceTol;
        bool at_hi = std::abs(x[i] - f.hi) <= kFaceTol;
        if (f.lo == f.hi) c.axes.push_back(Sign::zero);
        else if (at_lo && at_hi) c.axes.push_back(Sign::zero);
        else if (at_lo) c.axes.push_back(Sign::nonneg);
        else if (at_hi) c.axes.push_back(Sign::nonpos);
        else c.axes.push_back(Sign::free);
    }
    return c;
}

bool in_cone(const SignCone& c, const Vec& v, double tol) {
    if (v.size() != c.axes.size()) throw std::invalid_argument("in_cone: dimension mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) {
        switch (c.axes[i]) {
            case Sign::free: break;
            case Sign::nonneg: if (v[i] < -tol) return false; break;
            case Sign::nonpos: if (v[i] > tol) return false; break;
            case Sign::zero: if (std::abs(v[i]) > tol) return false; break;
        }
    }
    return true;
}

static std::vector<double> axis_points(const Face& f, int res) {
    if (f.lo == f.hi || res <= 1) return {f.lo == f.hi ? f.lo : 0.5 * (f.lo + f.hi)};
    std::vector<double> pts;
    for (int i = 0; i < res; ++i) {
        if (i == res - 1) pts.push_back(f.hi);
        else pts.push_back(f.lo + (f.hi - f.lo) * i / (res - 1));
    }
    return pts;
}

std::vector<Vec> sample_grid(const Box& b, int resolution) {
    std::vector<Vec> out{Vec{}};
    for (const Face& f : b.faces) {
        std::vector<Vec> next;
        for (const Vec& p : out)
            for (double v : axis_points(f, resolution)) {
                Vec q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<Vec> sample_boundary(const BoxSet& k, int resolution) {
    if (resolution < 1) throw std::invalid_argument("sample_boundary: resolution must be positive");
    const Box& b = k.box();
    if (!b.bounded()) throw std::invalid_argument("sample_boundary: unbounded box");
    int res = std::max(resolution, 2);
    std::vector<Vec> grid;
    // Full grid with endpoints on every axis, keeping points lying on some face.
    std::vector<Vec> all{Vec{}};
    for (const Face& f : b.faces) {
        std::vector<double> ax;
        if (f.lo == f.hi) ax = {f.lo};
        else for (int i = 0; i < res; ++i) ax.push_back(i == res - 1 ? f.hi : f.lo + (f.hi - f.lo) * i / (res - 1));
        std::vector<Vec> next;
        for (const Vec& p : all)
            for (double v : ax) {
                Vec q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        all = std::move(next);
    }
    for (const Vec& p : all) {
        bool on_face = false;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] == b.faces[i].lo || p[i] == b.faces[i].hi) on_face = true;
        if (on_face) grid.push_back(p);
    }
    return grid;
}

const char* sign_name(Sign s) {
    switch (s) {
        case Sign::free: return "free";
        case Sign::nonneg: return "nonneg";
        case Sign::nonpos: return "nonpos";
        case Sign::zero: return "zero";
    }
    return "?";
}

std::string render_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_box(const BoxSet& s) {
    if (s.empty()) return "empty";
    auto one = [](const Box& b) {
        std::string out;
        for (std::size_t i = 0; i < b.faces.size(); ++i) {
            const Face& f = b.faces[i];
            if (i) out += " x ";
            out += f.lo_strict ? "(" : "[";
            out += render_real(f.lo) + ", " + render_real(f.hi);
            out += f.hi_strict ? ")" : "]";
        }
        return out;
    };
    if (s.pieces().size() == 1) return one(s.pieces().front());
    std::string out = "union of ";
    for (std::size_t i = 0; i < s.pieces().size(); ++i) {
        if (i) out += ", ";
        out += s.dims() > 1 ? "{" + one(s.pieces()[i]) + "}" : one(s.pieces()[i]);
    }
    return out;
}

namespace {

struct BoxParser {
    const std::string& s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("set literal '" + s + "' at column " + std::to_string(pos + 1) + ": " + what);
    }
    void ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    bool eat_word(const std::string& w) {
        ws();
        if (s.compare(pos, w.size(), w) == 0) {
            std::size_t end = pos + w.size();
            if (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_')) return false;
            pos = end;
            return true;
        }
        return false;
    }
    double number() {
        ws();
        bool neg = false;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) { neg = s[pos] == '-'; ++pos; ws(); }
        if (eat_word("inf")) return neg ? -kInf : kInf;
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos += used;
        return neg ? -v : v;
    }
    Face face() {
        ws();
        Face f;
        if (eat('{')) {
            double v = number();
            if (!eat('}')) fail("expected '}'");
            return Face{v, v, false, false};
        }
        if (eat('[')) f.lo_strict = false;
        else if (eat('(')) f.lo_strict = true;
        else fail("expected '[' or '('");
        f.lo = number();
        if (!eat(',')) fail("expected ','");
        f.hi = number();
        if (eat(']')) f.hi_strict = false;
        else if (eat(')')) f.hi_strict = true;
        else fail("expected ']' or ')'");
        if (std::isinf(f.lo)) f.lo_strict = false;
        if (std::isinf(f.hi)) f.hi_strict = false;
        if (f.lo > f.hi) fail("lower bound exceeds upper bound");
        return f;
    }
    Box box() {
        Box b;
        ws();
        bool grouped = false;
        if (pos < s.size() && s[pos] == '{') {
            std::size_t look = pos + 1;
            while (look < s.size() && std::isspace(static_cast<unsigned char>(s[look]))) ++look;
            if (look < s.size() && (s[look] == '[' || s[look] == '(')) {
                grouped = true;
                pos = look;
            }
        }
        b.faces.push_back(face());
        while (true) {
            std::size_t save = pos;
            if (eat('x') || eat('*')) {
                b.faces.push_back(face());
                continue;
            }
            pos = save;
            break;
        }
        if (grouped && !eat('}')) fail("expected '}'");
        return b;
    }
};

}  // namespace

BoxSet parse_box(const std::string& text, std::size_t dims_hint) {
    BoxParser p{text};
    p.ws();
    if (p.eat_word("empty")) {
        p.ws();
        if (p.pos != text.size()) p.fail("trailing characters");
        return BoxSet(dims_hint == 0 ? 1 : dims_hint);
    }
    std::vector<Box> boxes;
    if (p.eat_word("union")) {
        if (!p.eat_word("of")) p.fail("expected 'of'");
        boxes.push_back(p.box());
        while (p.eat(',')) boxes.push_back(p.box());
    } else {
        boxes.push_back(p.box());
    }
    p.ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    std::size_t d = boxes.front().dims();
    for (const Box& b : boxes)
        if (b.dims() != d) p.fail("pieces of differing dimension");
    if (dims_hint != 0 && d != dims_hint) {
        // A 1-D literal broadcasts to every axis.
        if (d == 1) {
            for (Box& b : boxes) b.faces.assign(dims_hint, b.faces.front());
            d = dims_hint;
        } else {
            p.fail("dimension " + std::to_string(d) + " does not match " + std::to_string(dims_hint));
        }
    }
    return BoxSet(d, std::move(boxes));
}

}  // namespace hyag
