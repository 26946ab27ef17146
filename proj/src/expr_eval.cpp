#include "impan/expr_eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>
#include <vector>

namespace impan {

std::string concrete_substr(const std::string& s, long long i, long long j) {
  if (s.empty()) return "";
  long long n = static_cast<long long>(s.size());
  long long lo = std::clamp(i, 0ll, n - 1);
  long long hi = std::clamp(j, 0ll, n - 1);
  if (lo > hi) return "";
  return s.substr(static_cast<size_t>(lo), static_cast<size_t>(hi - lo + 1));
}

Sign int_slice(const Value& v) {
  if (v.is_top()) return Sign::Top;
  return v.tag == Value::Tag::Int ? v.sign : Sign::Bot;
}

BoolSet bool_slice(const Value& v) {
  if (v.is_top()) return bool_both();
  return v.tag == Value::Tag::Bool ? v.bools : bool_none();
}

std::optional<Dfa> str_slice(const Value& v) {
  if (v.is_top()) return any_string();
  if (v.tag == Value::Tag::Str) return *v.lang;
  return std::nullopt;
}

static Value eval_core(const Expr& e, const AbstractMemory& m, bool flex_add);

namespace {

// Shared concrete operator kernel; nullopt when the operation is stuck.
std::optional<Concrete> apply_op(ExprKind k, const std::vector<Concrete>& args) {
  auto as_int = [&](size_t i) { return std::get_if<long long>(&args[i]); };
  auto as_bool = [&](size_t i) { return std::get_if<bool>(&args[i]); };
  auto as_str = [&](size_t i) { return std::get_if<std::string>(&args[i]); };
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      auto *l = as_int(0), *r = as_int(1);
      if (!l || !r) return std::nullopt;
      long long v = k == ExprKind::Add ? *l + *r : k == ExprKind::Sub ? *l - *r : *l * *r;
      return conc_int(v);
    }
    case ExprKind::CmpLt:
    case ExprKind::CmpGt: {
      auto *l = as_int(0), *r = as_int(1);
      if (!l || !r) return std::nullopt;
      return conc_bool(k == ExprKind::CmpLt ? *l < *r : *l > *r);
    }
    case ExprKind::CmpEq:
      if (args[0].index() != args[1].index()) return std::nullopt;
      return conc_bool(args[0] == args[1]);
    case ExprKind::And: {
      auto *l = as_bool(0), *r = as_bool(1);
      if (!l || !r) return std::nullopt;
      return conc_bool(*l && *r);
    }
    case ExprKind::Not: {
      auto* v = as_bool(0);
      if (!v) return std::nullopt;
      return conc_bool(!*v);
    }
    case ExprKind::Concat: {
      auto *l = as_str(0), *r = as_str(1);
      if (!l || !r) return std::nullopt;
      return conc_str(*l + *r);
    }
    case ExprKind::Substr: {
      auto* s = as_str(0);
      auto *i = as_int(1), *j = as_int(2);
      if (!s || !i || !j) return std::nullopt;
      return conc_str(concrete_substr(*s, *i, *j));
    }
    default:
      return std::nullopt;
  }
}

// Representatives covering every achievable comparison outcome per sign.
std::vector<long long> sign_reps(Sign s) {
  switch (s) {
    case Sign::Bot: return {};
    case Sign::Zero: return {0};
    case Sign::Pos: return {1, 2};
    case Sign::Neg: return {-1, -2};
    case Sign::Top: return {-2, -1, 0, 1, 2};
  }
  return {};
}

BoolSet cmp_int_outcomes(ExprKind k, Sign a, Sign b) {
  BoolSet out = bool_none();
  for (long long x : sign_reps(a))
    for (long long y : sign_reps(b)) {
      bool r = k == ExprKind::CmpLt ? x < y : k == ExprKind::CmpGt ? x > y : x == y;
      (r ? out.can_true : out.can_false) = true;
    }
  return out;
}

BoolSet bool_eq_outcomes(BoolSet a, BoolSet b) {
  BoolSet out = bool_none();
  out.can_true = (a.can_true && b.can_true) || (a.can_false && b.can_false);
  out.can_false = (a.can_true && b.can_false) || (a.can_false && b.can_true);
  return out;
}

BoolSet str_eq_outcomes(const std::optional<Dfa>& a, const std::optional<Dfa>& b) {
  if (!a || !b || is_empty(*a) || is_empty(*b)) return bool_none();
  BoolSet out = bool_none();
  out.can_true = !is_empty(intersect(*a, *b));
  auto wa = singleton_word(*a);
  auto wb = singleton_word(*b);
  out.can_false = !(wa && wb && *wa == *wb);
  return out;
}

BoolSet and_outcomes(BoolSet a, BoolSet b) {
  if (a.empty() || b.empty()) return bool_none();
  return {a.can_true && b.can_true, a.can_false || b.can_false};
}

// Index abstraction for substring: a literal index is exact; otherwise only
// a definitely-zero value is. A stuck index (no integer slice) is absent.
std::optional<IndexAbs> index_of(const Expr& e, const AbstractMemory& m, bool flex_add) {
  if (e.kind == ExprKind::IntLit) return IndexAbs{e.int_val};
  Sign s = int_slice(eval_core(e, m, flex_add));
  if (s == Sign::Bot) return std::nullopt;
  if (s == Sign::Zero) return IndexAbs{0};
  return IndexAbs{std::nullopt};
}

}  // namespace

Concrete eval_concrete_expr(const Expr& e, const ConcreteMemory& env) {
  switch (e.kind) {
    case ExprKind::IntLit:
      return conc_int(e.int_val);
    case ExprKind::StrLit:
      return conc_str(e.text);
    case ExprKind::BoolLit:
      return conc_bool(e.bool_val);
    case ExprKind::Var: {
      auto it = env.find(e.text);
      if (it == env.end()) throw EvalError("unbound variable " + e.text);
      return it->second;
    }
    case ExprKind::AbsNum:
    case ExprKind::AbsBool:
    case ExprKind::AbsStr:
    case ExprKind::BulkNum:
    case ExprKind::BulkStr:
      throw EvalError("abstract label has no concrete value");
    default: {
      std::vector<Concrete> args;
      args.reserve(e.kids.size());
      for (auto& k : e.kids) args.push_back(eval_concrete_expr(k, env));
      auto r = apply_op(e.kind, args);
      if (!r) throw EvalError("ill-sorted operands");
      return *r;
    }
  }
}

static Value eval_core(const Expr& e, const AbstractMemory& m, bool flex_add) {
  if (m.is_bot()) return Value::bot();
  switch (e.kind) {
    case ExprKind::IntLit:
      return Value::of_sign(sign_of(e.int_val));
    case ExprKind::StrLit:
      return Value::of_lang(from_literal(e.text));
    case ExprKind::BoolLit:
      return Value::of_bools(bool_only(e.bool_val));
    case ExprKind::Var:
      return m.get(e.text);
    case ExprKind::AbsNum:
      return Value::of_sign(e.sign);
    case ExprKind::AbsBool:
      return Value::of_bools(e.bools);
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
      return Value::of_lang(*e.lang);
    case ExprKind::BulkNum:
      return Value::of_sign(numeral_language_sign(*e.lang));
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      Value lv = eval_core(e.kids[0], m, flex_add);
      Value rv = eval_core(e.kids[1], m, flex_add);
      Sign l = int_slice(lv);
      Sign r = int_slice(rv);
      Sign s = e.kind == ExprKind::Add   ? sign_add(l, r)
               : e.kind == ExprKind::Sub ? sign_sub(l, r)
                                         : sign_mul(l, r);
      Value out = Value::of_sign(s);
      if (flex_add && e.kind == ExprKind::Add) {
        auto sl = str_slice(lv);
        auto sr = str_slice(rv);
        if (sl && sr) out = value_join(out, Value::of_lang(concat(*sl, *sr)));
      }
      return out;
    }
    case ExprKind::CmpLt:
    case ExprKind::CmpGt: {
      Sign l = int_slice(eval_core(e.kids[0], m, flex_add));
      Sign r = int_slice(eval_core(e.kids[1], m, flex_add));
      return Value::of_bools(cmp_int_outcomes(e.kind, l, r));
    }
    case ExprKind::CmpEq: {
      Value l = eval_core(e.kids[0], m, flex_add);
      Value r = eval_core(e.kids[1], m, flex_add);
      BoolSet out = cmp_int_outcomes(ExprKind::CmpEq, int_slice(l), int_slice(r));
      out = bool_join(out, bool_eq_outcomes(bool_slice(l), bool_slice(r)));
      out = bool_join(out, str_eq_outcomes(str_slice(l), str_slice(r)));
      return Value::of_bools(out);
    }
    case ExprKind::And: {
      BoolSet l = bool_slice(eval_core(e.kids[0], m, flex_add));
      BoolSet r = bool_slice(eval_core(e.kids[1], m, flex_add));
      return Value::of_bools(and_outcomes(l, r));
    }
    case ExprKind::Not: {
      BoolSet v = bool_slice(eval_core(e.kids[0], m, flex_add));
      return Value::of_bools({v.can_false, v.can_true});
    }
    case ExprKind::Concat: {
      auto l = str_slice(eval_core(e.kids[0], m, flex_add));
      auto r = str_slice(eval_core(e.kids[1], m, flex_add));
      if (!l || !r) return Value::bot();
      return Value::of_lang(concat(*l, *r));
    }
    case ExprKind::Substr: {
      auto subject = str_slice(eval_core(e.kids[0], m, flex_add));
      if (!subject) return Value::bot();
      auto i = index_of(e.kids[1], m, flex_add);
      auto j = index_of(e.kids[2], m, flex_add);
      if (!i || !j) return Value::bot();
      return Value::of_lang(substring_overapprox(*subject, *i, *j));
    }
  }
  return Value::top();
}

Value eval_abstract_expr(const Expr& e, const AbstractMemory& m) {
  return eval_core(e, m, false);
}

Value eval_poly_expr(const Expr& e, const AbstractMemory& m) {
  return eval_core(e, m, true);
}

namespace {

// Largest numeral spelling worth enumerating for the given bounds.
int numeral_len(const Bounds& b) {
  long long m = std::max(std::llabs(b.int_lo), std::llabs(b.int_hi));
  return static_cast<int>(std::to_string(m).size()) + 1;
}

std::optional<long long> numeral_value(const std::string& w) {
  size_t start = w.size() > 1 && w[0] == '-' ? 1 : 0;
  if (w.size() == start) return std::nullopt;
  for (size_t i = start; i < w.size(); ++i)
    if (w[i] < '0' || w[i] > '9') return std::nullopt;
  return std::stoll(w);
}

}  // namespace

std::set<Concrete> eval_expr_set(const Expr& e, const ConcreteMemory& env, const Bounds& b) {
  switch (e.kind) {
    case ExprKind::IntLit:
      return {conc_int(e.int_val)};
    case ExprKind::StrLit:
      return {conc_str(e.text)};
    case ExprKind::BoolLit:
      return {conc_bool(e.bool_val)};
    case ExprKind::Var: {
      auto it = env.find(e.text);
      if (it == env.end()) return {};
      return {it->second};
    }
    case ExprKind::AbsNum:
      return gamma_bounded(Value::of_sign(e.sign), b);
    case ExprKind::AbsBool:
      return gamma_bounded(Value::of_bools(e.bools), b);
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
      return gamma_bounded(Value::of_lang(*e.lang), b);
    case ExprKind::BulkNum: {
      std::set<Concrete> out;
      for (auto& w : enumerate(*e.lang, numeral_len(b)))
        if (auto v = numeral_value(w))
          if (*v >= b.int_lo && *v <= b.int_hi) out.insert(conc_int(*v));
      return out;
    }
    default: {
      std::vector<std::set<Concrete>> kid_sets;
      kid_sets.reserve(e.kids.size());
      for (auto& k : e.kids) kid_sets.push_back(eval_expr_set(k, env, b));
      std::set<Concrete> out;
      std::vector<Concrete> args(e.kids.size(), conc_int(0));
      std::function<void(size_t)> walk = [&](size_t i) {
        if (i == kid_sets.size()) {
          if (auto r = apply_op(e.kind, args)) out.insert(*r);
          return;
        }
        for (auto& c : kid_sets[i]) {
          args[i] = c;
          walk(i + 1);
        }
      };
      walk(0);
      return out;
    }
  }
}

}  // namespace impan
