#include "impan/collecting.hpp"

#include <utility>

#include "impan/parser.hpp"

namespace impan {

namespace {

void burn(long long& fuel, long long n = 1) {
  fuel -= n;
  if (fuel < 0) throw FuelExhausted();
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) out.insert(e.text);
  for (auto& k : e.kids) collect_vars(k, out);
}

}  // namespace

std::set<Concrete> CollectingMemory::get(const std::string& name) const {
  if (bottom) return {};
  auto it = vars.find(name);
  return it == vars.end() ? std::set<Concrete>{} : it->second;
}

void CollectingMemory::set(const std::string& name, std::set<Concrete> vals) {
  if (bottom) return;
  if (vals.empty()) {
    *this = bot();
    return;
  }
  vars[name] = std::move(vals);
}

CollectingMemory coll_join(const CollectingMemory& a, const CollectingMemory& b) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  CollectingMemory out = a;
  for (auto& [name, vals] : b.vars) out.vars[name].insert(vals.begin(), vals.end());
  return out;
}

bool coll_leq(const CollectingMemory& a, const CollectingMemory& b) {
  if (a.is_bot()) return true;
  if (b.is_bot()) return false;
  for (auto& [name, vals] : a.vars) {
    auto bv = b.get(name);
    for (auto& v : vals)
      if (!bv.count(v)) return false;
  }
  return true;
}

bool coll_eq(const CollectingMemory& a, const CollectingMemory& b) {
  return coll_leq(a, b) && coll_leq(b, a);
}

std::string coll_name(const CollectingMemory& m) {
  if (m.is_bot()) return "⊥";
  std::string out = "{";
  bool first_var = true;
  for (auto& [name, vals] : m.vars) {
    if (!first_var) out += ", ";
    first_var = false;
    out += name + " ↦ {";
    bool first_val = true;
    for (auto& v : vals) {
      if (!first_val) out += ", ";
      first_val = false;
      out += concrete_name(v);
    }
    out += "}";
  }
  return out + "}";
}

AbstractMemory alpha_collecting(const CollectingMemory& m) {
  if (m.is_bot()) return AbstractMemory::bot();
  AbstractMemory out;
  for (auto& [name, vals] : m.vars) out.set(name, alpha(vals));
  return out;
}

MemorySet expand_memory(const CollectingMemory& m, long long& fuel) {
  if (m.is_bot()) return {};
  MemorySet acc{ConcreteMemory{}};
  for (auto& [name, vals] : m.vars) {
    MemorySet next;
    for (auto& env : acc)
      for (auto& v : vals) {
        burn(fuel);
        ConcreteMemory e = env;
        e[name] = v;
        next.insert(std::move(e));
      }
    acc = std::move(next);
  }
  return acc;
}

CollectingMemory to_cartesian(const MemorySet& envs) {
  if (envs.empty()) return CollectingMemory::bot();
  CollectingMemory out;
  for (auto& [name, v] : *envs.begin()) {
    bool everywhere = true;
    std::set<Concrete> vals;
    for (auto& env : envs) {
      auto it = env.find(name);
      if (it == env.end()) {
        everywhere = false;
        break;
      }
      vals.insert(it->second);
    }
    if (everywhere) out.set(name, std::move(vals));
  }
  return out;
}

std::set<Concrete> eval_collecting_expr(const Expr& e, const CollectingMemory& m,
                                        const Bounds& b) {
  if (m.is_bot()) return {};
  std::set<std::string> names;
  collect_vars(e, names);
  CollectingMemory restricted;
  for (auto& name : names) restricted.set(name, m.get(name));
  long long fuel = 1'000'000;
  std::set<Concrete> out;
  for (auto& env : expand_memory(restricted, fuel)) {
    auto vals = eval_expr_set(e, env, b);
    out.insert(vals.begin(), vals.end());
  }
  return out;
}

MemorySet assign_envs(const std::string& var, const Expr& rhs, const MemorySet& envs,
                      const Bounds& b, long long& fuel) {
  MemorySet out;
  for (auto& env : envs) {
    burn(fuel);
    for (auto& v : eval_expr_set(rhs, env, b)) {
      ConcreteMemory e = env;
      e[var] = v;
      out.insert(std::move(e));
    }
  }
  return out;
}

MemorySet filter_envs(const Expr& cond, bool want, const MemorySet& envs, const Bounds& b,
                      long long& fuel) {
  MemorySet out;
  for (auto& env : envs) {
    burn(fuel);
    if (eval_expr_set(cond, env, b).count(Concrete{want})) out.insert(env);
  }
  return out;
}

MemorySet eval_envs(const Expr& arg, const MemorySet& envs, const Bounds& b, long long& fuel) {
  MemorySet out;
  for (auto& env : envs) {
    burn(fuel);
    for (auto& v : eval_expr_set(arg, env, b)) {
      if (!std::holds_alternative<std::string>(v)) continue;
      Stmt frag;
      try {
        frag = parse_fragment(std::get<std::string>(v));
      } catch (const NotExecutable&) {
        continue;
      }
      for (auto& e : run_envs(frag, MemorySet{env}, b, fuel)) out.insert(e);
    }
  }
  return out;
}

MemorySet run_envs(const Stmt& s, MemorySet envs, const Bounds& b, long long& fuel) {
  if (envs.empty()) return envs;
  switch (s.kind) {
    case StmtKind::Skip:
      return envs;
    case StmtKind::Assign:
      return assign_envs(s.var, s.exprs[0], envs, b, fuel);
    case StmtKind::Seq:
      return run_envs(s.kids[1], run_envs(s.kids[0], std::move(envs), b, fuel), b, fuel);
    case StmtKind::If: {
      MemorySet out = run_envs(s.kids[0], filter_envs(s.exprs[0], true, envs, b, fuel), b, fuel);
      for (auto& e : run_envs(s.kids[1], filter_envs(s.exprs[0], false, envs, b, fuel), b, fuel))
        out.insert(e);
      return out;
    }
    case StmtKind::While: {
      MemorySet active = std::move(envs);
      MemorySet out;
      while (!active.empty()) {
        for (auto& e : filter_envs(s.exprs[0], false, active, b, fuel)) out.insert(e);
        active = run_envs(s.kids[0], filter_envs(s.exprs[0], true, active, b, fuel), b, fuel);
      }
      return out;
    }
    case StmtKind::Eval:
      return eval_envs(s.exprs[0], envs, b, fuel);
  }
  return {};
}

CollectingMemory collecting_run(const Stmt& s, const CollectingMemory& m, const Bounds& b,
                                long long fuel) {
  return to_cartesian(run_envs(s, expand_memory(m, fuel), b, fuel));
}

}  // namespace impan
