#pragma once
/// Univariate expression trees: parsing, evaluation in any floating type,
/// symbolic differentiation and kink detection.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ineqforge/error.hpp"

namespace ineqforge {

/// Opaque callable leaf used for numerically defined functions.
struct NativeFunction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> slope;  // empty: finite differences
    std::vector<double> kinks;
};

class ScalarFunction {
public:
    enum class Op : std::uint8_t {
        Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Abs, Min, Max,
        Sin, Cos, Sqrt, Tanh, Cosh, Sign, IfNonneg, Native
    };

    struct Node {
        Op op = Op::Const;
        double value = 0.0;
        std::shared_ptr<const Node> a, b, c;
        std::shared_ptr<const NativeFunction> native;
    };
    using NodePtr = std::shared_ptr<const Node>;

    ScalarFunction() : ScalarFunction(make_const(0.0)) {}
    explicit ScalarFunction(NodePtr root) : root_(std::move(root)) { compile(); }

    static ScalarFunction constant(double v) { return ScalarFunction(make_const(v)); }
    static ScalarFunction variable() {
        auto n = std::make_shared<Node>();
        n->op = Op::Var;
        return ScalarFunction(n);
    }
    static ScalarFunction native(NativeFunction fn) {
        auto n = std::make_shared<Node>();
        n->op = Op::Native;
        n->native = std::make_shared<const NativeFunction>(std::move(fn));
        return ScalarFunction(n);
    }
    static ScalarFunction parse(std::string_view text);

    template <class T>
    T operator()(T x) const {
        return eval<T>(x);
    }

    template <class T>
    T eval(T x) const {
        constexpr std::size_t kStack = 64;
        if (depth_ > kStack) return eval_node<T>(*root_, x);
        T st[kStack];
        std::size_t sp = 0;
        for (const auto& ins : prog_) {
            switch (ins.op) {
                case Op::Const: st[sp++] = static_cast<T>(ins.value); break;
                case Op::Var: st[sp++] = x; break;
                case Op::Native: st[sp++] = static_cast<T>(ins.native->value(static_cast<double>(x))); break;
                case Op::Add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
                case Op::Sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
                case Op::Mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
                case Op::Div: --sp; st[sp - 1] = st[sp - 1] / st[sp]; break;
                case Op::Pow: --sp; st[sp - 1] = pow_real(st[sp - 1], st[sp]); break;
                case Op::Min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
                case Op::Max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
                case Op::IfNonneg:
                    sp -= 2;
                    st[sp - 1] = st[sp - 1] >= T(0) ? st[sp] : st[sp + 1];
                    break;
                default: st[sp - 1] = unary<T>(ins.op, st[sp - 1]); break;
            }
        }
        return st[0];
    }

    ScalarFunction derivative() const { return ScalarFunction(diff(root_)); }

    /// Points in [lo, hi] where a piecewise branch switches (abs, min, max,
    /// sign, if) or a native kink sits. Found by scanning plus bisection.
    std::vector<double> kinks(double lo, double hi, int scan = 4096) const;

    std::string to_string() const { return print(*root_, 0); }

    bool is_constant() const { return root_->op == Op::Const; }
    double constant_value() const { return root_->value; }
    const NodePtr& root() const { return root_; }
    bool has_native() const { return has_native_; }

    // Builders with light constant folding.
    friend ScalarFunction operator+(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Add, a.root_, b.root_));
    }
    friend ScalarFunction operator-(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Sub, a.root_, b.root_));
    }
    friend ScalarFunction operator*(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Mul, a.root_, b.root_));
    }
    friend ScalarFunction operator/(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Div, a.root_, b.root_));
    }
    friend ScalarFunction operator-(const ScalarFunction& a) { return ScalarFunction(un(Op::Neg, a.root_)); }
    friend ScalarFunction operator+(const ScalarFunction& a, double b) { return a + constant(b); }
    friend ScalarFunction operator+(double a, const ScalarFunction& b) { return constant(a) + b; }
    friend ScalarFunction operator-(const ScalarFunction& a, double b) { return a - constant(b); }
    friend ScalarFunction operator-(double a, const ScalarFunction& b) { return constant(a) - b; }
    friend ScalarFunction operator*(const ScalarFunction& a, double b) { return a * constant(b); }
    friend ScalarFunction operator*(double a, const ScalarFunction& b) { return constant(a) * b; }
    friend ScalarFunction operator/(const ScalarFunction& a, double b) { return a / constant(b); }
    friend ScalarFunction operator/(double a, const ScalarFunction& b) { return constant(a) / b; }

    friend ScalarFunction pow(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Pow, a.root_, b.root_));
    }
    friend ScalarFunction pow(const ScalarFunction& a, double b) { return pow(a, constant(b)); }
    friend ScalarFunction exp(const ScalarFunction& a) { return ScalarFunction(un(Op::Exp, a.root_)); }
    friend ScalarFunction log(const ScalarFunction& a) { return ScalarFunction(un(Op::Log, a.root_)); }
    friend ScalarFunction abs(const ScalarFunction& a) { return ScalarFunction(un(Op::Abs, a.root_)); }
    friend ScalarFunction sin(const ScalarFunction& a) { return ScalarFunction(un(Op::Sin, a.root_)); }
    friend ScalarFunction cos(const ScalarFunction& a) { return ScalarFunction(un(Op::Cos, a.root_)); }
    friend ScalarFunction sqrt(const ScalarFunction& a) { return ScalarFunction(un(Op::Sqrt, a.root_)); }
    friend ScalarFunction tanh(const ScalarFunction& a) { return ScalarFunction(un(Op::Tanh, a.root_)); }
    friend ScalarFunction cosh(const ScalarFunction& a) { return ScalarFunction(un(Op::Cosh, a.root_)); }
    friend ScalarFunction sign(const ScalarFunction& a) { return ScalarFunction(un(Op::Sign, a.root_)); }
    friend ScalarFunction min(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Min, a.root_, b.root_));
    }
    friend ScalarFunction max(const ScalarFunction& a, const ScalarFunction& b) {
        return ScalarFunction(bin(Op::Max, a.root_, b.root_));
    }
    /// cond >= 0 ? then : otherwise
    static ScalarFunction if_nonneg(const ScalarFunction& cond, const ScalarFunction& then,
                                    const ScalarFunction& otherwise) {
        auto n = std::make_shared<Node>();
        n->op = Op::IfNonneg;
        n->a = cond.root_;
        n->b = then.root_;
        n->c = otherwise.root_;
        return ScalarFunction(n);
    }
    /// Substitute `inner` for the variable.
    ScalarFunction compose(const ScalarFunction& inner) const { return ScalarFunction(subst(root_, inner.root_)); }

private:
    struct Instr {
        Op op;
        double value;
        const NativeFunction* native;
    };

    NodePtr root_;
    std::vector<Instr> prog_;
    std::size_t depth_ = 0;
    bool has_native_ = false;

    static NodePtr make_const(double v) {
        auto n = std::make_shared<Node>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }

    static bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

    static int arity(Op op) {
        switch (op) {
            case Op::Const: case Op::Var: case Op::Native: return 0;
            case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: case Op::Min: case Op::Max:
                return 2;
            case Op::IfNonneg: return 3;
            default: return 1;
        }
    }

    template <class T>
    static T pow_real(T a, T b) {
        using std::pow;
        if (a < T(0)) {
            T r = std::round(b);
            if (r == b) return pow(a, b);
            return std::numeric_limits<T>::quiet_NaN();
        }
        return pow(a, b);
    }

    template <class T>
    static T unary(Op op, T v) {
        using std::abs, std::cos, std::cosh, std::exp, std::log, std::sin, std::sqrt, std::tanh;
        switch (op) {
            case Op::Neg: return -v;
            case Op::Exp: return exp(v);
            case Op::Log: return log(v);
            case Op::Abs: return abs(v);
            case Op::Sin: return sin(v);
            case Op::Cos: return cos(v);
            case Op::Sqrt: return sqrt(v);
            case Op::Tanh: return tanh(v);
            case Op::Cosh: return cosh(v);
            case Op::Sign: return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
            default: return v;
        }
    }

    template <class T>
    static T eval_node(const Node& n, T x) {
        switch (n.op) {
            case Op::Const: return static_cast<T>(n.value);
            case Op::Var: return x;
            case Op::Native: return static_cast<T>(n.native->value(static_cast<double>(x)));
            case Op::Add: return eval_node<T>(*n.a, x) + eval_node<T>(*n.b, x);
            case Op::Sub: return eval_node<T>(*n.a, x) - eval_node<T>(*n.b, x);
            case Op::Mul: return eval_node<T>(*n.a, x) * eval_node<T>(*n.b, x);
            case Op::Div: return eval_node<T>(*n.a, x) / eval_node<T>(*n.b, x);
            case Op::Pow: return pow_real(eval_node<T>(*n.a, x), eval_node<T>(*n.b, x));
            case Op::Min: return std::min(eval_node<T>(*n.a, x), eval_node<T>(*n.b, x));
            case Op::Max: return std::max(eval_node<T>(*n.a, x), eval_node<T>(*n.b, x));
            case Op::IfNonneg:
                return eval_node<T>(*n.a, x) >= T(0) ? eval_node<T>(*n.b, x) : eval_node<T>(*n.c, x);
            default: return unary<T>(n.op, eval_node<T>(*n.a, x));
        }
    }

    void compile() {
        prog_.clear();
        std::size_t cur = 0;
        emit(*root_, cur);
    }

    void emit(const Node& n, std::size_t& cur) {
        int k = arity(n.op);
        if (k >= 1) emit(*n.a, cur);
        if (k >= 2) emit(*n.b, cur);
        if (k >= 3) emit(*n.c, cur);
        if (n.op == Op::Native) has_native_ = true;
        prog_.push_back({n.op, n.value, n.native.get()});
        if (k == 0) {
            ++cur;
        } else {
            cur -= static_cast<std::size_t>(k - 1);
        }
        depth_ = std::max(depth_, cur + 2);
    }

    static NodePtr un(Op op, const NodePtr& a) {
        if (a->op == Op::Const) return make_const(unary<double>(op, a->value));
        if (op == Op::Neg && a->op == Op::Neg) return a->a;
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = a;
        return n;
    }

    static NodePtr bin(Op op, const NodePtr& a, const NodePtr& b) {
        if (a->op == Op::Const && b->op == Op::Const) {
            double x = a->value, y = b->value, r = 0;
            switch (op) {
                case Op::Add: r = x + y; break;
                case Op::Sub: r = x - y; break;
                case Op::Mul: r = x * y; break;
                case Op::Div: r = x / y; break;
                case Op::Pow: r = pow_real(x, y); break;
                case Op::Min: r = std::min(x, y); break;
                case Op::Max: r = std::max(x, y); break;
                default: break;
            }
            return make_const(r);
        }
        switch (op) {
            case Op::Add:
                if (is_const(a, 0)) return b;
                if (is_const(b, 0)) return a;
                break;
            case Op::Sub:
                if (is_const(b, 0)) return a;
                if (is_const(a, 0)) return un(Op::Neg, b);
                break;
            case Op::Mul:
                if (is_const(a, 0) || is_const(b, 0)) return make_const(0.0);
                if (is_const(a, 1)) return b;
                if (is_const(b, 1)) return a;
                break;
            case Op::Div:
                if (is_const(a, 0)) return make_const(0.0);
                if (is_const(b, 1)) return a;
                break;
            case Op::Pow:
                if (is_const(b, 1)) return a;
                if (is_const(b, 0)) return make_const(1.0);
                break;
            default: break;
        }
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = a;
        n->b = b;
        return n;
    }

    static NodePtr subst(const NodePtr& n, const NodePtr& inner) {
        switch (n->op) {
            case Op::Var: return inner;
            case Op::Const: return n;
            case Op::Native: {
                auto f = n->native;
                ScalarFunction g(inner);
                NativeFunction comp{f->name + "(...)", [f, g](double x) { return f->value(g(x)); }, {}, {}};
                return native(comp).root_;
            }
            default: break;
        }
        auto out = std::make_shared<Node>(*n);
        int k = arity(n->op);
        if (k >= 1) out->a = subst(n->a, inner);
        if (k >= 2) out->b = subst(n->b, inner);
        if (k >= 3) out->c = subst(n->c, inner);
        return out;
    }

    static NodePtr diff(const NodePtr& n);
    static std::string print(const Node& n, int parent_prec);
    static void collect_switches(const NodePtr& n, std::vector<NodePtr>& out, std::vector<double>& fixed);
};

// ---------------------------------------------------------------------------

inline ScalarFunction::NodePtr ScalarFunction::diff(const NodePtr& n) {
    auto S = [](const NodePtr& p) { return ScalarFunction(p); };
    const ScalarFunction zero = constant(0.0);
    switch (n->op) {
        case Op::Const: return make_const(0.0);
        case Op::Var: return make_const(1.0);
        case Op::Add: return bin(Op::Add, diff(n->a), diff(n->b));
        case Op::Sub: return bin(Op::Sub, diff(n->a), diff(n->b));
        case Op::Neg: return un(Op::Neg, diff(n->a));
        case Op::Mul:
            return (S(diff(n->a)) * S(n->b) + S(n->a) * S(diff(n->b))).root_;
        case Op::Div: {
            auto u = S(n->a), v = S(n->b);
            return ((S(diff(n->a)) * v - u * S(diff(n->b))) / (v * v)).root_;
        }
        case Op::Pow: {
            auto u = S(n->a), v = S(n->b);
            if (n->b->op == Op::Const) {
                double k = n->b->value;
                return (k * pow(u, k - 1.0) * S(diff(n->a))).root_;
            }
            return (pow(u, v) * (S(diff(n->b)) * log(u) + v * S(diff(n->a)) / u)).root_;
        }
        case Op::Exp: return (S(n) * S(diff(n->a))).root_;
        case Op::Log: return (S(diff(n->a)) / S(n->a)).root_;
        case Op::Abs: return (sign(S(n->a)) * S(diff(n->a))).root_;
        case Op::Sin: return (cos(S(n->a)) * S(diff(n->a))).root_;
        case Op::Cos: return (-sin(S(n->a)) * S(diff(n->a))).root_;
        case Op::Sqrt: return (S(diff(n->a)) / (2.0 * S(n))).root_;
        case Op::Tanh: {
            auto t = S(n);
            return ((1.0 - t * t) * S(diff(n->a))).root_;
        }
        case Op::Cosh: {
            auto u = S(n->a);
            return (((exp(u) - exp(-u)) / 2.0) * S(diff(n->a))).root_;
        }
        case Op::Sign: return make_const(0.0);
        case Op::Min:
            return if_nonneg(S(n->b) - S(n->a), S(diff(n->a)), S(diff(n->b))).root_;
        case Op::Max:
            return if_nonneg(S(n->a) - S(n->b), S(diff(n->a)), S(diff(n->b))).root_;
        case Op::IfNonneg:
            return if_nonneg(S(n->a), S(diff(n->b)), S(diff(n->c))).root_;
        case Op::Native: {
            auto f = n->native;
            if (f->slope) {
                return native(NativeFunction{f->name + "'", f->slope, {}, f->kinks}).root_;
            }
            auto g = f->value;
            auto fd = [g](double x) {
                double h = 1e-3 * (1.0 + std::abs(x));
                return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h);
            };
            return native(NativeFunction{f->name + "'", fd, {}, f->kinks}).root_;
        }
    }
    (void)zero;
    return make_const(0.0);
}

inline std::string ScalarFunction::print(const Node& n, int parent_prec) {
    auto num = [](double v) {
        if (v == std::floor(v) && std::abs(v) < 1e15) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.0f", v);
            return std::string(buf);
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto wrap = [&](const std::string& s, int prec) { return prec < parent_prec ? "(" + s + ")" : s; };
    auto fn = [&](const char* name, std::initializer_list<const Node*> args) {
        std::string s = name;
        s += "(";
        bool first = true;
        for (auto* a : args) {
            if (!first) s += ", ";
            s += print(*a, 0);
            first = false;
        }
        return s + ")";
    };
    switch (n.op) {
        case Op::Const: return n.value < 0 ? wrap(num(n.value), 3) : num(n.value);
        case Op::Var: return "x";
        case Op::Native: return "<" + n.native->name + ">";
        case Op::Add: return wrap(print(*n.a, 1) + " + " + print(*n.b, 2), 1);
        case Op::Sub: return wrap(print(*n.a, 1) + " - " + print(*n.b, 2), 1);
        case Op::Mul: return wrap(print(*n.a, 2) + "*" + print(*n.b, 3), 2);
        case Op::Div: return wrap(print(*n.a, 2) + "/" + print(*n.b, 3), 2);
        case Op::Neg: return wrap("-" + print(*n.a, 4), 3);
        case Op::Pow: return wrap(print(*n.a, 5) + "^" + print(*n.b, 4), 4);
        case Op::Exp: return fn("exp", {n.a.get()});
        case Op::Log: return fn("log", {n.a.get()});
        case Op::Abs: return fn("abs", {n.a.get()});
        case Op::Sin: return fn("sin", {n.a.get()});
        case Op::Cos: return fn("cos", {n.a.get()});
        case Op::Sqrt: return fn("sqrt", {n.a.get()});
        case Op::Tanh: return fn("tanh", {n.a.get()});
        case Op::Cosh: return fn("cosh", {n.a.get()});
        case Op::Sign: return fn("sign", {n.a.get()});
        case Op::Min: return fn("min", {n.a.get(), n.b.get()});
        case Op::Max: return fn("max", {n.a.get(), n.b.get()});
        case Op::IfNonneg: return fn("if", {n.a.get(), n.b.get(), n.c.get()});
    }
    return "?";
}

inline void ScalarFunction::collect_switches(const NodePtr& n, std::vector<NodePtr>& out,
                                             std::vector<double>& fixed) {
    switch (n->op) {
        case Op::Abs: case Op::Sign: case Op::Sqrt: out.push_back(n->a); break;
        case Op::Min: case Op::Max: out.push_back(bin(Op::Sub, n->a, n->b)); break;
        case Op::IfNonneg: out.push_back(n->a); break;
        case Op::Pow:
            if (n->b->op == Op::Const && n->b->value != std::round(n->b->value)) out.push_back(n->a);
            break;
        case Op::Native:
            fixed.insert(fixed.end(), n->native->kinks.begin(), n->native->kinks.end());
            break;
        default: break;
    }
    int k = arity(n->op);
    if (k >= 1) collect_switches(n->a, out, fixed);
    if (k >= 2) collect_switches(n->b, out, fixed);
    if (k >= 3) collect_switches(n->c, out, fixed);
}

inline std::vector<double> ScalarFunction::kinks(double lo, double hi, int scan) const {
    std::vector<NodePtr> sw;
    std::vector<double> pts;
    collect_switches(root_, sw, pts);
    std::vector<double> out;
    for (double p : pts)
        if (p >= lo && p <= hi) out.push_back(p);
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) return out;
    for (const auto& s : sw) {
        ScalarFunction g(s);
        if (g.is_constant()) continue;
        double prev_x = lo, prev = g(lo);
        if (prev == 0.0) out.push_back(lo);
        for (int i = 1; i <= scan; ++i) {
            double x = lo + (hi - lo) * i / scan;
            double v = g(x);
            if (v == 0.0) {
                out.push_back(x);
            } else if (std::isfinite(v) && std::isfinite(prev) && prev != 0.0 && ((v > 0) != (prev > 0))) {
                double a = prev_x, b = x, fa = prev;
                for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
                    double m = 0.5 * (a + b);
                    double fm = g(m);
                    if (fm == 0.0) { a = b = m; break; }
                    if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else { b = m; }
                }
                out.push_back(0.5 * (a + b));
            }
            prev_x = x;
            prev = v;
        }
    }
    std::sort(out.begin(), out.end());
    std::vector<double> uniq;
    for (double p : out)
        if (uniq.empty() || p - uniq.back() > 1e-12 * (1.0 + std::abs(p))) uniq.push_back(p);
    return uniq;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over + - * / ^, unary minus, calls, comparisons
// inside if(...).

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    ScalarFunction run() {
        auto e = expr();
        skip();
        if (i_ != s_.size()) error("unexpected trailing input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::ParseError, msg + " at position " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) error(std::string("expected '") + c + "'");
    }

    ScalarFunction expr() {
        auto lhs = term();
        for (;;) {
            if (eat('+')) lhs = lhs + term();
            else if (eat('-')) lhs = lhs - term();
            else return lhs;
        }
    }
    ScalarFunction term() {
        auto lhs = unary();
        for (;;) {
            if (eat('*')) lhs = lhs * unary();
            else if (eat('/')) lhs = lhs / unary();
            else return lhs;
        }
    }
    ScalarFunction unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    ScalarFunction power() {
        auto base = primary();
        if (eat('^')) return pow(base, unary());
        return base;
    }
    ScalarFunction comparison() {
        auto lhs = expr();
        skip();
        if (i_ < s_.size() && (s_[i_] == '<' || s_[i_] == '>')) {
            bool less = s_[i_] == '<';
            ++i_;
            if (i_ < s_.size() && s_[i_] == '=') ++i_;
            auto rhs = expr();
            return less ? rhs - lhs : lhs - rhs;
        }
        return lhs;
    }
    ScalarFunction primary() {
        skip();
        if (i_ >= s_.size()) error("unexpected end of input");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.data() + i_;
            char* end = nullptr;
            std::string tmp(s_.substr(i_));
            double v = std::strtod(tmp.c_str(), &end);
            std::size_t used = static_cast<std::size_t>(end - tmp.c_str());
            if (used == 0) error("bad number");
            (void)begin;
            i_ += used;
            return ScalarFunction::constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            std::string name(s_.substr(start, i_ - start));
            if (name == "x") return ScalarFunction::variable();
            if (name == "pi") return ScalarFunction::constant(3.14159265358979323846);
            if (name == "e") return ScalarFunction::constant(2.71828182845904523536);
            expect('(');
            if (name == "if") {
                auto cond = comparison();
                expect(',');
                auto a = expr();
                expect(',');
                auto b = expr();
                expect(')');
                return ScalarFunction::if_nonneg(cond, a, b);
            }
            std::vector<ScalarFunction> args;
            args.push_back(expr());
            while (eat(',')) args.push_back(expr());
            expect(')');
            auto need = [&](std::size_t n) {
                if (args.size() != n) error("function '" + name + "' expects " + std::to_string(n) + " argument(s)");
            };
            if (name == "exp") { need(1); return exp(args[0]); }
            if (name == "log") { need(1); return log(args[0]); }
            if (name == "abs") { need(1); return abs(args[0]); }
            if (name == "sin") { need(1); return sin(args[0]); }
            if (name == "cos") { need(1); return cos(args[0]); }
            if (name == "sqrt") { need(1); return sqrt(args[0]); }
            if (name == "tanh") { need(1); return tanh(args[0]); }
            if (name == "cosh") { need(1); return cosh(args[0]); }
            if (name == "sign") { need(1); return sign(args[0]); }
            if (name == "min") { need(2); return min(args[0], args[1]); }
            if (name == "max") { need(2); return max(args[0], args[1]); }
            if (name == "pow") { need(2); return pow(args[0], args[1]); }
            error("unknown function '" + name + "'");
        }
        error(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace detail

inline ScalarFunction ScalarFunction::parse(std::string_view text) { return detail::ExprParser(text).run(); }

}  // namespace ineqforge
