#include "impan/memory.hpp"

namespace impan {

Value AbstractMemory::get(const std::string& name) const {
  if (bottom) return Value::bot();
  auto it = vars.find(name);
  return it == vars.end() ? Value::top() : it->second;
}

void AbstractMemory::set(const std::string& name, Value v) {
  if (bottom) return;
  if (v.is_bot()) {
    *this = bot();
    return;
  }
  if (v.is_top())
    vars.erase(name);
  else
    vars[name] = std::move(v);
}

namespace {

template <typename Combine>
AbstractMemory pointwise(const AbstractMemory& a, const AbstractMemory& b, Combine combine) {
  AbstractMemory out;
  for (auto& [name, va] : a.vars) {
    auto it = b.vars.find(name);
    if (it == b.vars.end()) continue;  // other side is Top there
    Value v = combine(va, it->second);
    if (!v.is_top()) out.vars.emplace(name, std::move(v));
  }
  return out;
}

}  // namespace

AbstractMemory mem_join(const AbstractMemory& a, const AbstractMemory& b) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  return pointwise(a, b, [](const Value& x, const Value& y) { return value_join(x, y); });
}

AbstractMemory mem_meet(const AbstractMemory& a, const AbstractMemory& b) {
  if (a.is_bot() || b.is_bot()) return AbstractMemory::bot();
  AbstractMemory out = a;
  for (auto& [name, vb] : b.vars) {
    out.set(name, value_meet(out.get(name), vb));
    if (out.is_bot()) return out;
  }
  return out;
}

AbstractMemory mem_widen(const AbstractMemory& a, const AbstractMemory& b, int k) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  return pointwise(a, b, [k](const Value& x, const Value& y) { return value_widen(x, y, k); });
}

bool mem_leq(const AbstractMemory& a, const AbstractMemory& b) {
  if (a.is_bot()) return true;
  if (b.is_bot()) return false;
  for (auto& [name, vb] : b.vars)
    if (!value_leq(a.get(name), vb)) return false;
  return true;
}

bool mem_eq(const AbstractMemory& a, const AbstractMemory& b) {
  return mem_leq(a, b) && mem_leq(b, a);
}

std::string mem_name(const AbstractMemory& m) {
  if (m.is_bot()) return "⊥";
  if (m.vars.empty()) return "⊤";
  std::string out = "{";
  bool first = true;
  for (auto& [name, v] : m.vars) {
    if (!first) out += ", ";
    first = false;
    out += name + " ↦ " + value_name(v);
  }
  return out + "}";
}

AbstractMemory alpha_memories(const MemorySet& ms) {
  if (ms.empty()) return AbstractMemory::bot();
  std::map<std::string, std::set<Concrete>> per_var;
  for (auto& env : ms)
    for (auto& [name, c] : env) per_var[name].insert(c);
  AbstractMemory out;
  for (auto& [name, values] : per_var) {
    bool everywhere = true;
    for (auto& env : ms) everywhere = everywhere && env.count(name);
    if (everywhere) out.set(name, alpha(values));
  }
  return out;
}

bool mem_contains(const AbstractMemory& m, const ConcreteMemory& env) {
  if (m.is_bot()) return false;
  for (auto& [name, v] : m.vars) {
    auto it = env.find(name);
    if (it == env.end() || !value_contains(v, it->second)) return false;
  }
  return true;
}

}  // namespace impan
