#pragma once

#include <string>

#include "cas/cdl/ast.hpp"

namespace cas::cdl {

// Canonical text. parse(unparse(d)) is structurally equal to d for every
// valid document.
std::string unparse(const Document& doc);
std::string unparse(const Statement& statement);

std::string format_term(const Term& term);
std::string format_atom(const Atom& atom);
std::string format_condition(const Condition& condition);
std::string format_bool_expr(const BoolExpr& expr);
std::string format_step(const Step& step);

}  // namespace cas::cdl
