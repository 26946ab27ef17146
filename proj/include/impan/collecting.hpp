#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "impan/ast.hpp"
#include "impan/expr_eval.hpp"
#include "impan/memory.hpp"

namespace impan {

// The oracle could not decide this instance within its step budget. Tests
// treat it as a skip, never as a verdict.
struct FuelExhausted : std::runtime_error {
  FuelExhausted() : std::runtime_error("fuel exhausted") {}
};

// Cartesian collecting state: per variable, the finite set of values it can
// hold. Normalized like AbstractMemory: binding a variable to the empty set
// collapses the state to bottom, and bottom holds no entries. A variable
// never bound reads as the empty set, so expressions over it are stuck;
// harnesses seed every program variable up front.
struct CollectingMemory {
  bool bottom = false;
  std::map<std::string, std::set<Concrete>> vars;

  static CollectingMemory bot() { return {true, {}}; }
  bool is_bot() const { return bottom; }
  std::set<Concrete> get(const std::string& name) const;
  void set(const std::string& name, std::set<Concrete> vals);
};

CollectingMemory coll_join(const CollectingMemory& a, const CollectingMemory& b);
bool coll_leq(const CollectingMemory& a, const CollectingMemory& b);
bool coll_eq(const CollectingMemory& a, const CollectingMemory& b);
std::string coll_name(const CollectingMemory& m);

// Pointwise abstraction; unbound variables stay unconstrained.
AbstractMemory alpha_collecting(const CollectingMemory& m);

// Exact additive lift: every value e can take when each variable draws
// consistently from its set, so x+x over x ↦ {0,4} gives {0,8}, not {4}.
// Abstract leaves still draw independently within the bounds.
std::set<Concrete> eval_collecting_expr(const Expr& e, const CollectingMemory& m,
                                        const Bounds& b);

// Set-of-environments interpreter, the trusted concrete oracle. Each
// environment step burns one unit of fuel. eval draws every string value,
// discards the ones that fail to parse as statements, and runs the rest.
MemorySet run_envs(const Stmt& s, MemorySet envs, const Bounds& b, long long& fuel);

// Edge-sized pieces of the same semantics, for composing along graph paths.
MemorySet assign_envs(const std::string& var, const Expr& rhs, const MemorySet& envs,
                      const Bounds& b, long long& fuel);
MemorySet filter_envs(const Expr& cond, bool want, const MemorySet& envs, const Bounds& b,
                      long long& fuel);
MemorySet eval_envs(const Expr& arg, const MemorySet& envs, const Bounds& b, long long& fuel);

// Cartesian boundary: expand every combination, run, recombine per variable.
// Recombination keeps only variables bound in every surviving environment.
MemorySet expand_memory(const CollectingMemory& m, long long& fuel);
CollectingMemory to_cartesian(const MemorySet& envs);
CollectingMemory collecting_run(const Stmt& s, const CollectingMemory& m, const Bounds& b,
                                long long fuel);

}  // namespace impan
