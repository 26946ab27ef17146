#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "impan/ast.hpp"
#include "impan/lexer.hpp"

namespace impan {

// The text is not a complete executable statement sequence (syntax or sort
// failure); concrete eval discards such strings.
struct NotExecutable : std::runtime_error {
  explicit NotExecutable(const std::string& why) : std::runtime_error(why) {}
};

struct SortError : std::runtime_error {
  explicit SortError(const std::string& why) : std::runtime_error("sort error: " + why) {}
};

LabeledProgram parse_program(const std::string& text);
Stmt parse_fragment(const std::string& text);

// Infers variable sorts across the whole tree, rewrites string-sorted Add
// nodes to Concat, and rejects mixed-sort expressions. Unconstrained
// variables default to integers.
std::map<std::string, VarSort> resolve_sorts(Stmt& root);

// Assigns pre/post program points in left-to-right preorder starting at 1;
// returns the total number of labels (the root's post label).
int assign_labels(Stmt& root);

}  // namespace impan
