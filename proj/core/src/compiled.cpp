#include "cotlift/compiled.hpp"

#include <cmath>

namespace cotlift {

namespace {

int find_slot(std::span<const std::string> order, const std::string& name) {
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] == name) return static_cast<int>(i);
    }
    throw UnboundVariableError(name);
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> variable_order) {
    // Iterative postorder flattening; left child before right child to match
    // the recursive evaluator's operand order.
    struct Frame {
        const Expr::Node* node;
        int state;
    };
    std::vector<Frame> work;
    work.push_back({&e.node(), 0});
    while (!work.empty()) {
        Frame& f = work.back();
        const Expr::Node& n = *f.node;
        if (f.state == 0) {
            f.state = 1;
            if (n.a) {
                work.push_back({n.a.get(), 0});
                continue;
            }
        }
        if (f.state == 1) {
            f.state = 2;
            if (n.b) {
                work.push_back({n.b.get(), 0});
                continue;
            }
        }
        Instr ins;
        ins.op = n.op;
        switch (n.op) {
            case ExprOp::Constant:
                ins.value = n.value;
                break;
            case ExprOp::Variable:
                ins.slot = find_slot(variable_order, n.name);
                break;
            case ExprOp::Pow:
                ins.exponent = n.exponent;
                break;
            default:
                break;
        }
        code_.push_back(ins);
        work.pop_back();
    }
    int depth = 0;
    max_stack_ = 1;
    for (const Instr& ins : code_) {
        if (ins.op == ExprOp::Constant || ins.op == ExprOp::Variable)
            ++depth;
        else if (ins.op == ExprOp::Add || ins.op == ExprOp::Mul)
            --depth;
        if (depth > max_stack_) max_stack_ = depth;
    }
}

double CompiledExpr::eval(std::span<const double> values) const {
    // Per-thread scratch keeps eval reentrant and allocation-free in loops.
    thread_local std::vector<double> stack;
    if (static_cast<int>(stack.size()) < max_stack_) stack.resize(max_stack_);
    double* sp = stack.data();
    for (const Instr& ins : code_) {
        switch (ins.op) {
            case ExprOp::Constant:
                *sp++ = ins.value;
                break;
            case ExprOp::Variable:
                *sp++ = values[ins.slot];
                break;
            case ExprOp::Add: {
                double b = *--sp;
                sp[-1] = sp[-1] + b;
                break;
            }
            case ExprOp::Mul: {
                double b = *--sp;
                sp[-1] = sp[-1] * b;
                break;
            }
            case ExprOp::Neg:
                sp[-1] = -sp[-1];
                break;
            case ExprOp::Pow:
                sp[-1] = pow_int(sp[-1], ins.exponent);
                break;
            case ExprOp::Sin:
                sp[-1] = std::sin(sp[-1]);
                break;
            case ExprOp::Cos:
                sp[-1] = std::cos(sp[-1]);
                break;
            case ExprOp::Exp:
                sp[-1] = std::exp(sp[-1]);
                break;
            case ExprOp::Sqrt: {
                if (sp[-1] < 0.0) throw DomainError("sqrt of negative value");
                sp[-1] = std::sqrt(sp[-1]);
                break;
            }
        }
    }
    return stack[0];
}

std::vector<CompiledExpr> compile_all(std::span<const Expr> exprs,
                                      std::span<const std::string> variable_order) {
    std::vector<CompiledExpr> out;
    out.reserve(exprs.size());
    for (const Expr& e : exprs) out.emplace_back(e, variable_order);
    return out;
}

}  // namespace cotlift
