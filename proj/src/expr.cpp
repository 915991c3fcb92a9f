#include "hyag/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>

namespace hyag {

enum class Op { num, var_x, var_w, var_t, var_j, var_tau, var_len, neg, add, sub, mul, div, pow, call };

struct ExprNode {
    Op op = Op::num;
    double value = 0.0;
    std::size_t index = 0;
    std::string fn;
    std::vector<std::shared_ptr<const ExprNode>> args;
};

using NodeP = std::shared_ptr<const ExprNode>;

namespace {

NodeP make(Op op, std::vector<NodeP> args = {}) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->args = std::move(args);
    return n;
}

NodeP make_num(double v) {
    auto n = std::make_shared<ExprNode>();
    n->value = v;
    return n;
}

struct Parser {
    const std::string& s;
    std::size_t n, m;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression '" + s + "' at column " + std::to_string(pos + 1) + ": " + what);
    }
    void ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    NodeP expr() {
        NodeP lhs = term();
        while (true) {
            if (eat('+')) lhs = make(Op::add, {lhs, term()});
            else if (eat('-')) lhs = make(Op::sub, {lhs, term()});
            else return lhs;
        }
    }
    NodeP term() {
        NodeP lhs = unary();
        while (true) {
            if (eat('*')) lhs = make(Op::mul, {lhs, unary()});
            else if (eat('/')) lhs = make(Op::div, {lhs, unary()});
            else return lhs;
        }
    }
    NodeP unary() {
        if (eat('-')) return make(Op::neg, {unary()});
        if (eat('+')) return unary();
        NodeP base = primary();
        if (eat('^')) return make(Op::pow, {base, unary()});
        return base;
    }
    NodeP primary() {
        ws();
        if (pos >= s.size()) fail("unexpected end");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            NodeP e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = std::stod(s.substr(pos), &used);
            pos += used;
            return make_num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
            std::string id = s.substr(start, pos - start);
            if (eat('(')) return call(id, start);
            return variable(id, start);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
    NodeP call(const std::string& id, std::size_t start) {
        static const std::vector<std::pair<std::string, std::size_t>> fns = {
            {"sqrt", 1}, {"cbrt", 1}, {"exp", 1}, {"abs", 1}, {"step", 1},
            {"pow", 2},  {"min", 2},  {"max", 2}};
        std::size_t arity = 0;
        for (const auto& [name, a] : fns)
            if (name == id) arity = a;
        if (arity == 0) { pos = start; fail("unknown function '" + id + "'"); }
        std::vector<NodeP> args;
        if (!eat(')')) {
            args.push_back(expr());
            while (eat(',')) args.push_back(expr());
            if (!eat(')')) fail("expected ')'");
        }
        if (args.size() != arity) { pos = start; fail("'" + id + "' takes " + std::to_string(arity) + " argument(s)"); }
        if (id == "pow") return make(Op::pow, std::move(args));
        auto node = std::make_shared<ExprNode>();
        node->op = Op::call;
        node->fn = id;
        node->args = std::move(args);
        return node;
    }
    NodeP variable(const std::string& id, std::size_t start) {
        if (id == "t") return make(Op::var_t);
        if (id == "j") return make(Op::var_j);
        if (id == "tau") return make(Op::var_tau);
        if (id == "len") return make(Op::var_len);
        if (id == "pi") return make_num(M_PI);
        if ((id[0] == 'x' || id[0] == 'w') && id.size() > 1 &&
            std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            std::size_t k = std::stoul(id.substr(1));
            std::size_t limit = id[0] == 'x' ? n : m;
            if (k < 1 || k > limit) { pos = start; fail("variable '" + id + "' outside declared dimension " + std::to_string(limit)); }
            auto node = std::make_shared<ExprNode>();
            node->op = id[0] == 'x' ? Op::var_x : Op::var_w;
            node->index = k - 1;
            return node;
        }
        pos = start;
        fail("unknown variable '" + id + "'");
    }
};

double eval_node(const ExprNode& e, const Bindings& b) {
    auto a0 = [&] { return eval_node(*e.args[0], b); };
    auto a1 = [&] { return eval_node(*e.args[1], b); };
    switch (e.op) {
        case Op::num: return e.value;
        case Op::var_x:
            if (!b.x || e.index >= b.x->size()) throw EvalError("unbound variable x" + std::to_string(e.index + 1));
            return (*b.x)[e.index];
        case Op::var_w:
            if (!b.w || e.index >= b.w->size()) throw EvalError("unbound variable w" + std::to_string(e.index + 1));
            return (*b.w)[e.index];
        case Op::var_t: return b.t;
        case Op::var_j: return b.j;
        case Op::var_tau: return b.tau;
        case Op::var_len: return b.len;
        case Op::neg: return -a0();
        case Op::add: return a0() + a1();
        case Op::sub: return a0() - a1();
        case Op::mul: return a0() * a1();
        case Op::div: {
            double num = a0(), den = a1();
            if (den == 0.0) throw EvalError("division by zero");
            return num / den;
        }
        case Op::pow: {
            double r = std::pow(a0(), a1());
            if (!std::isfinite(r)) throw EvalError("pow: non-finite result");
            return r;
        }
        case Op::call: {
            double v = a0();
            if (e.fn == "sqrt") {
                if (v < 0.0) throw EvalError("sqrt of negative value");
                return std::sqrt(v);
            }
            if (e.fn == "cbrt") return std::cbrt(v);
            if (e.fn == "exp") return std::exp(v);
            if (e.fn == "abs") return std::abs(v);
            if (e.fn == "step") return v > 0.0 ? 1.0 : 0.0;
            if (e.fn == "min") return std::min(v, a1());
            if (e.fn == "max") return std::max(v, a1());
            throw EvalError("unknown function " + e.fn);
        }
    }
    return 0.0;
}

int precedence(Op op) {
    switch (op) {
        case Op::add: case Op::sub: return 1;
        case Op::mul: case Op::div: return 2;
        case Op::neg: return 3;
        default: return 4;
    }
}

std::string render_node(const ExprNode& e) {
    auto sub = [&](const NodeP& c, int min_prec) {
        std::string r = render_node(*c);
        return precedence(c->op) < min_prec ? "(" + r + ")" : r;
    };
    switch (e.op) {
        case Op::num: return e.value < 0 ? "(" + render_real(e.value) + ")" : render_real(e.value);
        case Op::var_x: return "x" + std::to_string(e.index + 1);
        case Op::var_w: return "w" + std::to_string(e.index + 1);
        case Op::var_t: return "t";
        case Op::var_j: return "j";
        case Op::var_tau: return "tau";
        case Op::var_len: return "len";
        case Op::neg: return "-" + sub(e.args[0], 4);
        case Op::add: return sub(e.args[0], 1) + "+" + sub(e.args[1], 1);
        case Op::sub: return sub(e.args[0], 1) + "-" + sub(e.args[1], 2);
        case Op::mul: return sub(e.args[0], 2) + "*" + sub(e.args[1], 3);
        case Op::div: return sub(e.args[0], 2) + "/" + sub(e.args[1], 3);
        case Op::pow: return "pow(" + render_node(*e.args[0]) + ", " + render_node(*e.args[1]) + ")";
        case Op::call: {
            std::string r = e.fn + "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) r += (i ? ", " : "") + render_node(*e.args[i]);
            return r + ")";
        }
    }
    return "";
}

NodeP subst(const NodeP& e, const std::vector<NodeP>& subs) {
    if (e->op == Op::var_w) {
        if (e->index >= subs.size()) throw std::invalid_argument("substitute: missing replacement for w" + std::to_string(e->index + 1));
        return subs[e->index];
    }
    if (e->args.empty()) return e;
    auto copy = std::make_shared<ExprNode>(*e);
    for (auto& a : copy->args) a = subst(a, subs);
    return copy;
}

bool any_node(const ExprNode& e, const std::function<bool(const ExprNode&)>& pred) {
    if (pred(e)) return true;
    for (const auto& a : e.args)
        if (any_node(*a, pred)) return true;
    return false;
}

// Returns nullopt when the subtree is not affine in (x, w).
std::optional<Affine> affine_node(const ExprNode& e, std::size_t n, std::size_t m) {
    Affine r{0.0, Vec(n, 0.0), Vec(m, 0.0)};
    auto is_const = [](const Affine& a) {
        for (double v : a.ax) if (v != 0.0) return false;
        for (double v : a.bw) if (v != 0.0) return false;
        return true;
    };
    auto scale = [](Affine a, double k) {
        a.c0 *= k;
        for (double& v : a.ax) v *= k;
        for (double& v : a.bw) v *= k;
        return a;
    };
    auto combine = [](Affine a, const Affine& b, double k) {
        a.c0 += k * b.c0;
        for (std::size_t i = 0; i < a.ax.size(); ++i) a.ax[i] += k * b.ax[i];
        for (std::size_t i = 0; i < a.bw.size(); ++i) a.bw[i] += k * b.bw[i];
        return a;
    };
    switch (e.op) {
        case Op::num: r.c0 = e.value; return r;
        case Op::var_x: r.ax[e.index] = 1.0; return r;
        case Op::var_w: r.bw[e.index] = 1.0; return r;
        case Op::neg: {
            auto a = affine_node(*e.args[0], n, m);
            if (!a) return std::nullopt;
            return scale(*a, -1.0);
        }
        case Op::add: case Op::sub: {
            auto a = affine_node(*e.args[0], n, m), b = affine_node(*e.args[1], n, m);
            if (!a || !b) return std::nullopt;
            return combine(*a, *b, e.op == Op::add ? 1.0 : -1.0);
        }
        case Op::mul: {
            auto a = affine_node(*e.args[0], n, m), b = affine_node(*e.args[1], n, m);
            if (!a || !b) return std::nullopt;
            if (is_const(*a)) return scale(*b, a->c0);
            if (is_const(*b)) return scale(*a, b->c0);
            return std::nullopt;
        }
        case Op::div: {
            auto a = affine_node(*e.args[0], n, m), b = affine_node(*e.args[1], n, m);
            if (!a || !b || !is_const(*b) || b->c0 == 0.0) return std::nullopt;
            return scale(*a, 1.0 / b->c0);
        }
        default: return std::nullopt;
    }
}

}  // namespace

Expr Expr::parse(const std::string& text, std::size_t n, std::size_t m) {
    Parser p{text, n, m};
    NodeP root = p.expr();
    p.ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    Expr e;
    e.root_ = std::move(root);
    e.src_ = text;
    return e;
}

Expr Expr::constant(double v) {
    Expr e;
    e.root_ = make_num(v);
    e.src_ = render_real(v);
    return e;
}

double Expr::eval(const Bindings& b) const {
    if (!root_) throw EvalError("empty expression");
    double v = eval_node(*root_, b);
    if (!std::isfinite(v)) throw EvalError("non-finite value from '" + src_ + "'");
    return v;
}

std::string Expr::render() const { return root_ ? render_node(*root_) : ""; }

Expr Expr::substitute_w(const std::vector<Expr>& subs) const {
    std::vector<NodeP> nodes;
    for (const auto& s : subs) nodes.push_back(s.root_);
    Expr e;
    e.root_ = subst(root_, nodes);
    e.src_ = render_node(*e.root_);
    return e;
}

std::optional<Affine> Expr::affine(std::size_t n, std::size_t m) const {
    if (!root_) return std::nullopt;
    return affine_node(*root_, n, m);
}

bool Expr::uses_interval_vars() const {
    return root_ && any_node(*root_, [](const ExprNode& e) { return e.op == Op::var_tau || e.op == Op::var_len; });
}

bool Expr::uses_var(char kind) const {
    Op want = kind == 'x' ? Op::var_x : kind == 'w' ? Op::var_w : kind == 't' ? Op::var_t : Op::var_j;
    return root_ && any_node(*root_, [want](const ExprNode& e) { return e.op == want; });
}

Vec eval_vec(const VecExpr& f, const Bindings& b) {
    Vec out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].eval(b);
    return out;
}

std::vector<std::string> split_components(const std::string& text) {
    // Components are separated by ';' so that commas stay free for min/max/pow.
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ';') { parts.push_back(cur); cur.clear(); }
        else cur += c;
    }
    parts.push_back(cur);
    for (auto& p : parts) {
        std::size_t a = p.find_first_not_of(" \t"), b = p.find_last_not_of(" \t");
        p = a == std::string::npos ? "" : p.substr(a, b - a + 1);
    }
    return parts;
}

VecExpr parse_vec_expr(const std::string& text, std::size_t n, std::size_t m, std::size_t out_dims) {
    auto parts = split_components(text);
    if (parts.size() != out_dims)
        throw std::invalid_argument("expression '" + text + "' has " + std::to_string(parts.size()) +
                                    " component(s), expected " + std::to_string(out_dims));
    VecExpr out;
    for (const auto& p : parts) out.push_back(Expr::parse(p, n, m));
    return out;
}

std::string render_vec_expr(const VecExpr& f) {
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "; " : "") + f[i].source();
    return out;
}

Face affine_range(const Affine& a, const Box& xbox, const Box& wbox) {
    double lo = a.c0, hi = a.c0;
    auto acc = [&](double k, const Face& f) {
        if (k == 0.0) return;
        double p = k * f.lo, q = k * f.hi;
        lo += std::min(p, q);
        hi += std::max(p, q);
    };
    for (std::size_t i = 0; i < a.ax.size(); ++i) acc(a.ax[i], xbox.faces[i]);
    for (std::size_t i = 0; i < a.bw.size(); ++i) acc(a.bw[i], wbox.faces[i]);
    return Face{lo, hi, false, false};
}

}  // namespace hyag
