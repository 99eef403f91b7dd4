#pragma once

#include <span>
#include <string>
#include <vector>

#include "cotlift/expr.hpp"

namespace cotlift {

// Flat postorder program for fast repeated evaluation of one Expr against a
// fixed variable ordering. Executes the same floating-point operations in the
// same order as the tree evaluator, so results are bit-identical.
class CompiledExpr {
public:
    CompiledExpr() = default;
    // Throws UnboundVariableError if the expression uses a variable that is
    // not in `variable_order`.
    CompiledExpr(const Expr& e, std::span<const std::string> variable_order);

    double eval(std::span<const double> values) const;

    std::size_t program_size() const { return code_.size(); }

private:
    struct Instr {
        ExprOp op;
        double value = 0.0;  // Constant
        int slot = 0;        // Variable: index into values
        int exponent = 0;    // Pow
    };
    std::vector<Instr> code_;
    int max_stack_ = 1;
};

// Convenience: compile a whole component vector against one ordering.
std::vector<CompiledExpr> compile_all(std::span<const Expr> exprs,
                                      std::span<const std::string> variable_order);

}  // namespace cotlift
