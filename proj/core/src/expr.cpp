#include "cotlift/expr.hpp"

#include <cmath>
#include <sstream>

namespace cotlift {

double pow_int(double base, int exponent) {
    if (exponent == 0) return 1.0;
    bool negative = exponent < 0;
    // careful with INT_MIN: widen before negating
    long long n = negative ? -static_cast<long long>(exponent) : exponent;
    double result = 1.0;
    double factor = base;
    while (n > 0) {
        if (n & 1) result *= factor;
        n >>= 1;
        if (n) factor *= factor;
    }
    if (negative) {
        if (base == 0.0) throw DomainError("0 raised to a negative power");
        return 1.0 / result;
    }
    return result;
}

Expr Expr::make(Node node) {
    return Expr(std::make_shared<const Node>(std::move(node)));
}

Expr Expr::constant(double value) {
    Node n;
    n.op = ExprOp::Constant;
    n.value = value;
    return make(std::move(n));
}

Expr Expr::variable(std::string name) {
    Node n;
    n.op = ExprOp::Variable;
    n.name = std::move(name);
    return make(std::move(n));
}

namespace {

bool is_const(const Expr& e, double v) {
    return e.is_constant() && e.constant_value() == v;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() + b.constant_value());
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    Expr::Node n;
    n.op = ExprOp::Add;
    n.a = a.node_ptr();
    n.b = b.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.op() == ExprOp::Neg) return Expr(a.node().a);
    Expr::Node n;
    n.op = ExprOp::Neg;
    n.a = a.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() * b.constant_value());
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return -b;
    if (is_const(b, -1.0)) return -a;
    Expr::Node n;
    n.op = ExprOp::Mul;
    n.a = a.node_ptr();
    n.b = b.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr pow(const Expr& base, int exponent) {
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return base;
    if (base.is_constant()) return Expr::constant(pow_int(base.constant_value(), exponent));
    Expr::Node n;
    n.op = ExprOp::Pow;
    n.exponent = exponent;
    n.a = base.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr sin(const Expr& e) {
    if (e.is_constant()) return Expr::constant(std::sin(e.constant_value()));
    Expr::Node n;
    n.op = ExprOp::Sin;
    n.a = e.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr cos(const Expr& e) {
    if (e.is_constant()) return Expr::constant(std::cos(e.constant_value()));
    Expr::Node n;
    n.op = ExprOp::Cos;
    n.a = e.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr exp(const Expr& e) {
    if (e.is_constant()) return Expr::constant(std::exp(e.constant_value()));
    Expr::Node n;
    n.op = ExprOp::Exp;
    n.a = e.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

Expr sqrt(const Expr& e) {
    if (e.is_constant()) {
        double v = e.constant_value();
        if (v < 0.0) throw DomainError("sqrt of negative constant");
        return Expr::constant(std::sqrt(v));
    }
    Expr::Node n;
    n.op = ExprOp::Sqrt;
    n.a = e.node_ptr();
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

namespace {

double eval_node(const Expr::Node& n, const VarBinding& b) {
    switch (n.op) {
        case ExprOp::Constant:
            return n.value;
        case ExprOp::Variable:
            return b.get(n.name);
        case ExprOp::Add:
            return eval_node(*n.a, b) + eval_node(*n.b, b);
        case ExprOp::Mul:
            return eval_node(*n.a, b) * eval_node(*n.b, b);
        case ExprOp::Neg:
            return -eval_node(*n.a, b);
        case ExprOp::Pow:
            return pow_int(eval_node(*n.a, b), n.exponent);
        case ExprOp::Sin:
            return std::sin(eval_node(*n.a, b));
        case ExprOp::Cos:
            return std::cos(eval_node(*n.a, b));
        case ExprOp::Exp:
            return std::exp(eval_node(*n.a, b));
        case ExprOp::Sqrt: {
            double v = eval_node(*n.a, b);
            if (v < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(v);
        }
    }
    throw Error("corrupt expression node");
}

}  // namespace

double eval(const Expr& e, const VarBinding& binding) { return eval_node(e.node(), binding); }

Expr Expr::diff(std::string_view var) const {
    const Node& n = *node_;
    switch (n.op) {
        case ExprOp::Constant:
            return constant(0.0);
        case ExprOp::Variable:
            return constant(n.name == var ? 1.0 : 0.0);
        case ExprOp::Add:
            return Expr(n.a).diff(var) + Expr(n.b).diff(var);
        case ExprOp::Mul: {
            Expr a(n.a), b(n.b);
            return a.diff(var) * b + a * b.diff(var);
        }
        case ExprOp::Neg:
            return -Expr(n.a).diff(var);
        case ExprOp::Pow: {
            Expr base(n.a);
            return constant(static_cast<double>(n.exponent)) * pow(base, n.exponent - 1) *
                   base.diff(var);
        }
        case ExprOp::Sin:
            return cos(Expr(n.a)) * Expr(n.a).diff(var);
        case ExprOp::Cos:
            return -(sin(Expr(n.a)) * Expr(n.a).diff(var));
        case ExprOp::Exp:
            return exp(Expr(n.a)) * Expr(n.a).diff(var);
        case ExprOp::Sqrt: {
            // d sqrt(u) = u' * (1/2) * sqrt(u)^(-1)
            Expr u(n.a);
            return u.diff(var) * constant(0.5) * pow(sqrt(u), -1);
        }
    }
    throw Error("corrupt expression node");
}

Expr Expr::substitute(const std::map<std::string, Expr, std::less<>>& repl) const {
    const Node& n = *node_;
    switch (n.op) {
        case ExprOp::Constant:
            return *this;
        case ExprOp::Variable: {
            auto it = repl.find(n.name);
            return it == repl.end() ? *this : it->second;
        }
        case ExprOp::Add:
            return Expr(n.a).substitute(repl) + Expr(n.b).substitute(repl);
        case ExprOp::Mul:
            return Expr(n.a).substitute(repl) * Expr(n.b).substitute(repl);
        case ExprOp::Neg:
            return -Expr(n.a).substitute(repl);
        case ExprOp::Pow:
            return pow(Expr(n.a).substitute(repl), n.exponent);
        case ExprOp::Sin:
            return sin(Expr(n.a).substitute(repl));
        case ExprOp::Cos:
            return cos(Expr(n.a).substitute(repl));
        case ExprOp::Exp:
            return exp(Expr(n.a).substitute(repl));
        case ExprOp::Sqrt:
            return sqrt(Expr(n.a).substitute(repl));
    }
    throw Error("corrupt expression node");
}

void Expr::collect_variables(std::set<std::string>& out) const {
    const Node& n = *node_;
    if (n.op == ExprOp::Variable) {
        out.insert(n.name);
        return;
    }
    if (n.a) Expr(n.a).collect_variables(out);
    if (n.b) Expr(n.b).collect_variables(out);
}

std::set<std::string> Expr::free_variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
}

bool Expr::depends_on(std::string_view var) const {
    const Node& n = *node_;
    if (n.op == ExprOp::Variable) return n.name == var;
    if (n.a && Expr(n.a).depends_on(var)) return true;
    if (n.b && Expr(n.b).depends_on(var)) return true;
    return false;
}

bool Expr::same_tree(const Expr& other) const {
    if (node_ == other.node_) return true;
    const Node& x = *node_;
    const Node& y = *other.node_;
    if (x.op != y.op) return false;
    switch (x.op) {
        case ExprOp::Constant:
            return x.value == y.value;
        case ExprOp::Variable:
            return x.name == y.name;
        case ExprOp::Pow:
            if (x.exponent != y.exponent) return false;
            break;
        default:
            break;
    }
    if (static_cast<bool>(x.a) != static_cast<bool>(y.a)) return false;
    if (static_cast<bool>(x.b) != static_cast<bool>(y.b)) return false;
    if (x.a && !Expr(x.a).same_tree(Expr(y.a))) return false;
    if (x.b && !Expr(x.b).same_tree(Expr(y.b))) return false;
    return true;
}

std::size_t Expr::node_count() const {
    const Node& n = *node_;
    std::size_t c = 1;
    if (n.a) c += Expr(n.a).node_count();
    if (n.b) c += Expr(n.b).node_count();
    return c;
}

namespace {

void print_node(const Expr::Node& n, std::ostringstream& os);

void print_child(const Expr::Node& n, std::ostringstream& os, bool parens) {
    if (parens) os << '(';
    print_node(n, os);
    if (parens) os << ')';
}

int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add:
            return 1;
        case ExprOp::Neg:
            return 2;
        case ExprOp::Mul:
            return 3;
        case ExprOp::Pow:
            return 4;
        default:
            return 5;
    }
}

void print_node(const Expr::Node& n, std::ostringstream& os) {
    switch (n.op) {
        case ExprOp::Constant: {
            if (n.value < 0) {
                os << '(' << n.value << ')';
            } else {
                os << n.value;
            }
            return;
        }
        case ExprOp::Variable:
            os << n.name;
            return;
        case ExprOp::Add:
            print_child(*n.a, os, precedence(n.a->op) < 1);
            os << " + ";
            print_child(*n.b, os, precedence(n.b->op) < 1);
            return;
        case ExprOp::Neg:
            os << '-';
            print_child(*n.a, os, precedence(n.a->op) <= 2);
            return;
        case ExprOp::Mul:
            print_child(*n.a, os, precedence(n.a->op) < 3);
            os << '*';
            print_child(*n.b, os, precedence(n.b->op) < 3);
            return;
        case ExprOp::Pow:
            print_child(*n.a, os, precedence(n.a->op) < 5);
            os << '^';
            if (n.exponent < 0)
                os << '(' << n.exponent << ')';
            else
                os << n.exponent;
            return;
        case ExprOp::Sin:
            os << "sin(";
            print_node(*n.a, os);
            os << ')';
            return;
        case ExprOp::Cos:
            os << "cos(";
            print_node(*n.a, os);
            os << ')';
            return;
        case ExprOp::Exp:
            os << "exp(";
            print_node(*n.a, os);
            os << ')';
            return;
        case ExprOp::Sqrt:
            os << "sqrt(";
            print_node(*n.a, os);
            os << ')';
            return;
    }
}

}  // namespace

std::string Expr::to_string() const {
    std::ostringstream os;
    os.precision(17);
    print_node(*node_, os);
    return os.str();
}

VarBinding::VarBinding(std::initializer_list<std::pair<std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
}

void VarBinding::set(std::string_view name, double value) {
    for (auto& e : entries_) {
        if (e.first == name) {
            e.second = value;
            return;
        }
    }
    entries_.emplace_back(std::string(name), value);
}

const double* VarBinding::find(std::string_view name) const {
    for (const auto& e : entries_) {
        if (e.first == name) return &e.second;
    }
    return nullptr;
}

double VarBinding::get(std::string_view name) const {
    const double* v = find(name);
    if (!v) throw UnboundVariableError(std::string(name));
    return *v;
}

std::vector<Expr> gradient(const Expr& e, const std::vector<std::string>& vars) {
    std::vector<Expr> out;
    out.reserve(vars.size());
    for (const auto& v : vars) out.push_back(e.diff(v));
    return out;
}

std::vector<std::vector<Expr>> hessian(const Expr& e, const std::vector<std::string>& vars) {
    std::vector<std::vector<Expr>> out(vars.size());
    std::vector<Expr> grad = gradient(e, vars);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out[i].reserve(vars.size());
        for (const auto& v : vars) out[i].push_back(grad[i].diff(v));
    }
    return out;
}

}  // namespace cotlift
