#pragma once

#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cotlift/error.hpp"

namespace cotlift {

// Integer power by binary exponentiation. Negative exponents divide at the
// end; 0^negative raises DomainError. Shared by the tree evaluator and the
// compiled evaluator so both produce bit-identical results.
double pow_int(double base, int exponent);

enum class ExprOp {
    Constant,
    Variable,
    Add,
    Mul,
    Neg,
    Pow,  // integer exponent
    Sin,
    Cos,
    Exp,
    Sqrt,
};

// Immutable symbolic expression. Nodes are shared; construction folds
// constants and the 0/1 neutral elements but performs no other rewriting.
// Safe to copy and evaluate concurrently.
class Expr {
public:
    struct Node {
        ExprOp op;
        double value = 0.0;        // Constant
        std::string name;          // Variable
        int exponent = 0;          // Pow
        std::shared_ptr<const Node> a;
        std::shared_ptr<const Node> b;
    };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double value);
    static Expr variable(std::string name);

    ExprOp op() const { return node_->op; }
    const Node& node() const { return *node_; }
    const std::shared_ptr<const Node>& node_ptr() const { return node_; }

    bool is_constant() const { return node_->op == ExprOp::Constant; }
    double constant_value() const { return node_->value; }

    // Exact partial derivative with respect to `var`. Total on the whole
    // language; sqrt differentiates through pow(sqrt(u), -1).
    Expr diff(std::string_view var) const;

    // Replaces variables by expressions (simultaneous substitution).
    Expr substitute(const std::map<std::string, Expr, std::less<>>& repl) const;

    void collect_variables(std::set<std::string>& out) const;
    std::set<std::string> free_variables() const;
    bool depends_on(std::string_view var) const;

    // Structural equality (same tree shape, names, constants bit-for-bit).
    bool same_tree(const Expr& other) const;

    std::string to_string() const;

    std::size_t node_count() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Expr make(Node node);

    std::shared_ptr<const Node> node_;

    friend Expr pow(const Expr& base, int exponent);
    friend Expr sin(const Expr& e);
    friend Expr cos(const Expr& e);
    friend Expr exp(const Expr& e);
    friend Expr sqrt(const Expr& e);
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr sqrt(const Expr& e);

inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }

// Ordered (name, value) pairs; names unique. Lookup is linear, bindings in
// this library stay small (a chart's worth of coordinates).
class VarBinding {
public:
    VarBinding() = default;
    VarBinding(std::initializer_list<std::pair<std::string, double>> init);

    // Inserts or overwrites, keeping first-insertion order.
    void set(std::string_view name, double value);
    double get(std::string_view name) const;  // throws UnboundVariableError
    const double* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    std::size_t size() const { return entries_.size(); }
    const std::pair<std::string, double>& entry(std::size_t i) const { return entries_[i]; }

private:
    std::vector<std::pair<std::string, double>> entries_;
};

// Evaluates the tree at the binding. Every free variable must be bound.
double eval(const Expr& e, const VarBinding& binding);

std::vector<Expr> gradient(const Expr& e, const std::vector<std::string>& vars);
std::vector<std::vector<Expr>> hessian(const Expr& e, const std::vector<std::string>& vars);

}  // namespace cotlift
