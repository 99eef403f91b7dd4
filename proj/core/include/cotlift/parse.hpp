#pragma once

#include <string_view>

#include "cotlift/expr.hpp"

namespace cotlift {

// Infix expression parser for the CLI file format and tests.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-'|'+') factor | power
//   power  := atom ('^' ['-'] integer)?
//   atom   := number | func '(' expr ')' | name | '(' expr ')'
//   func   := 'sin' | 'cos' | 'exp' | 'sqrt'
//   name   := [a-zA-Z_][a-zA-Z0-9_]*
//
// Division desugars to multiplication by pow(rhs, -1). Errors throw
// ParseError with 1-based line and column.
Expr parse_expression(std::string_view text);

// Same, but token positions are reported relative to (line0, col0); used by
// the system-file parser so locations point into the enclosing file.
Expr parse_expression_at(std::string_view text, int line0, int col0);

}  // namespace cotlift
