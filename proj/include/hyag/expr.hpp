#ifndef HYAG_EXPR_HPP
#define HYAG_EXPR_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyag/sets.hpp"

namespace hyag {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything an evaluator may read. `tau` is time since the current interval
// began and `len` that interval's length (acausal; only known once it closes).
struct Bindings {
    const Vec* x = nullptr;
    const Vec* w = nullptr;
    double t = 0.0;
    double j = 0.0;
    double tau = 0.0;
    double len = 0.0;
};

struct ExprNode;

// Affine form c0 + sum a_i x_i + sum b_k w_k.
struct Affine {
    double c0 = 0.0;
    Vec ax;
    Vec bw;
};

class Expr {
public:
    Expr() = default;
    static Expr parse(const std::string& text, std::size_t n, std::size_t m);
    static Expr constant(double v);

    double eval(const Bindings& b) const;
    const std::string& source() const { return src_; }
    std::string render() const;
    bool valid() const { return root_ != nullptr; }

    // Replaces each w_k with subs[k].
    Expr substitute_w(const std::vector<Expr>& subs) const;
    std::optional<Affine> affine(std::size_t n, std::size_t m) const;
    // Reads tau or len.
    bool uses_interval_vars() const;
    bool uses_var(char kind) const;

private:
    std::shared_ptr<const ExprNode> root_;
    std::string src_;
};

using VecExpr = std::vector<Expr>;

Vec eval_vec(const VecExpr& f, const Bindings& b);
std::vector<std::string> split_components(const std::string& text);
VecExpr parse_vec_expr(const std::string& text, std::size_t n, std::size_t m, std::size_t out_dims);
std::string render_vec_expr(const VecExpr& f);
// Exact range of an affine form over a box in (x, w).
Face affine_range(const Affine& a, const Box& xbox, const Box& wbox);

}  // namespace hyag

#endif
