#pragma once

#include <string>

#include "impan/ast.hpp"

namespace impan {

// Statement text in the canonical concrete syntax: every top-level
// statement ';'-terminated, the last statement of a block body bare.
// parse_fragment(render(s)) gives back s for well-sorted concrete trees.
// Abstract leaves render as display forms (signs as Z+/Z-/0/Z, languages
// as regular expressions) and are not re-parseable.
std::string render(const Stmt& s);
std::string render_expr(const Expr& e);

}  // namespace impan
