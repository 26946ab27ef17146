#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "impan/ast.hpp"
#include "impan/memory.hpp"

namespace impan {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& why) : std::runtime_error(why) {}
};

// Big-step concrete evaluation. Throws EvalError on sort clashes, unbound
// variables, and abstract leaves.
Concrete eval_concrete_expr(const Expr& e, const ConcreteMemory& env);

// Clamping substring shared by the concrete and abstract string semantics:
// both indices clamp into [0, len-1]; the result is empty only for a crossed
// clamped range or an empty subject.
std::string concrete_substr(const std::string& s, long long i, long long j);

// Per-sort slices of a value. Top contributes a full slice; a wrong-tagged
// value an empty one.
Sign int_slice(const Value& v);
BoolSet bool_slice(const Value& v);
std::optional<Dfa> str_slice(const Value& v);

// Sound abstract evaluation over the coalesced domain. Operators act on the
// per-sort slices of their operands (Top contributes a full slice), so a
// definitely wrong-sorted operand yields Bot, exactly like the concrete
// semantics getting stuck.
Value eval_abstract_expr(const Expr& e, const AbstractMemory& m);

// Like eval_abstract_expr, but '+' is read as the join of the integer and
// the string interpretations. Labels synthesized from string automata carry
// unresolved '+' nodes: the same spelling runs as addition in words whose
// sort inference picks integers and as concatenation in words that pick
// strings, and a sound effect must cover both.
Value eval_poly_expr(const Expr& e, const AbstractMemory& m);

// All values the expression can take under one environment when abstract
// leaves range over their bounds-limited concretizations. Variables resolve
// consistently through env; each abstract leaf draws independently. Stuck
// combinations contribute nothing.
std::set<Concrete> eval_expr_set(const Expr& e, const ConcreteMemory& env, const Bounds& b);

}  // namespace impan
