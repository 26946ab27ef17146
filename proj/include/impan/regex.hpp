#pragma once

#include <string>

#include "impan/dfa.hpp"

namespace impan {

// Regular-expression display string for L(a), via state elimination on the
// minimized automaton. Metacharacters ( ) | * \ are backslash-escaped.
// The empty language prints as "[]" and the empty-string language as "()".
std::string dfa_to_regex(const Dfa& a);

}  // namespace impan
