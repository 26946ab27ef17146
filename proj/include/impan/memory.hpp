#pragma once

#include <map>
#include <set>
#include <string>

#include "impan/value.hpp"

namespace impan {

// Non-relational abstract store. Unlisted variables are unconstrained (Top);
// the unreachable store is a distinguished bottom. Kept normalized: no Top
// entries, and no entries at all when bottom.
struct AbstractMemory {
  bool bottom = false;
  std::map<std::string, Value> vars;

  static AbstractMemory bot() { return {true, {}}; }
  static AbstractMemory top() { return {}; }

  bool is_bot() const { return bottom; }
  Value get(const std::string& name) const;
  // Binding any variable to the empty value makes the whole store bottom.
  void set(const std::string& name, Value v);
};

AbstractMemory mem_join(const AbstractMemory& a, const AbstractMemory& b);
AbstractMemory mem_meet(const AbstractMemory& a, const AbstractMemory& b);
AbstractMemory mem_widen(const AbstractMemory& a, const AbstractMemory& b, int k);
bool mem_leq(const AbstractMemory& a, const AbstractMemory& b);
bool mem_eq(const AbstractMemory& a, const AbstractMemory& b);
std::string mem_name(const AbstractMemory& m);

// One concrete environment; a collecting state is a set of them. The empty
// set is the unreachable state, {{}} the reachable state binding nothing.
using ConcreteMemory = std::map<std::string, Concrete>;
using MemorySet = std::set<ConcreteMemory>;

// Per-variable abstraction of a collecting state. A variable missing from
// some environment stays unconstrained.
AbstractMemory alpha_memories(const MemorySet& ms);

// Exact concretization membership: the environment must bind every variable
// the store constrains, to a member of that value's concretization.
bool mem_contains(const AbstractMemory& m, const ConcreteMemory& env);

}  // namespace impan
