#ifndef HYAG_SETS_HPP
#define HYAG_SETS_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace hyag {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFaceTol = 1e-9;

// One coordinate of a box. Strict faces exclude the bound itself.
struct Face {
    double lo = -kInf;
    double hi = kInf;
    bool lo_strict = false;
    bool hi_strict = false;

    bool closed() const { return !lo_strict && !hi_strict; }
    bool empty() const { return lo > hi || (lo == hi && (lo_strict || hi_strict)); }
    bool contains(double v) const {
        if (lo_strict ? !(v > lo) : !(v >= lo)) return false;
        if (hi_strict ? !(v < hi) : !(v <= hi)) return false;
        return true;
    }
    bool operator==(const Face&) const = default;
};

struct Box {
    std::vector<Face> faces;

    std::size_t dims() const { return faces.size(); }
    bool empty() const;
    bool closed() const;
    bool bounded() const;
    bool contains(const Vec& x) const;
    Vec center() const;
    bool operator==(const Box&) const = default;
};

// Finite union of axis-aligned boxes. The approximation tags record that an
// n-D epsilon operation was done per axis rather than in the Euclidean norm.
class BoxSet {
public:
    BoxSet() = default;
    explicit BoxSet(std::size_t dims) : dims_(dims) {}
    BoxSet(std::size_t dims, std::vector<Box> pieces);

    static BoxSet interval(double lo, double hi, bool lo_strict = false, bool hi_strict = false);
    static BoxSet from_box(Box b);
    static BoxSet point(const Vec& p);
    static BoxSet whole(std::size_t dims);
    static BoxSet nonneg(std::size_t dims);

    std::size_t dims() const { return dims_; }
    const std::vector<Box>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }
    bool closed() const;
    bool bounded() const;
    bool single_box() const { return pieces_.size() == 1; }
    const Box& box() const;

    bool contains(const Vec& x) const;
    BoxSet closure() const;

    bool outer_approx = false;
    bool inner_approx = false;

    bool operator==(const BoxSet& o) const { return dims_ == o.dims_ && pieces_ == o.pieces_; }

private:
    std::size_t dims_ = 0;
    std::vector<Box> pieces_;
};

BoxSet expand(const BoxSet& s, double eps);
BoxSet contract(const BoxSet& s, double eps);
double distance(const Vec& x, const BoxSet& s);
BoxSet intersect(const BoxSet& a, const BoxSet& b);
BoxSet product(const BoxSet& a, const BoxSet& b);
// Exact for 1-D unions; in n-D each piece of a must fit in a single piece of b.
bool subset(const BoxSet& a, const BoxSet& b);
// Projection onto the first k coordinates.
BoxSet project_front(const BoxSet& s, std::size_t k);

enum class Sign { free, nonneg, nonpos, zero };

struct SignCone {
    std::vector<Sign> axes;
};

SignCone tangent_cone(const BoxSet& k, const Vec& x);
bool in_cone(const SignCone& c, const Vec& v, double tol = 0.0);
std::vector<Vec> sample_boundary(const BoxSet& k, int resolution);
// Uniform grid with `resolution` points per bounded axis (center only for degenerate axes).
std::vector<Vec> sample_grid(const Box& b, int resolution);

const char* sign_name(Sign s);

// Literal syntax: "[lo, hi]", "(lo, hi]", products "[0,1] x [2,3]",
// unions "union of [0,1], [2,3]", "empty" and "{v}" for a point.
BoxSet parse_box(const std::string& text, std::size_t dims_hint = 0);
std::string render_box(const BoxSet& s);
std::string render_real(double v);

}  // namespace hyag

#endif
