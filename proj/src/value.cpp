#include "impan/value.hpp"

#include <algorithm>

#include "impan/regex.hpp"

namespace impan {

Sign sign_of(long long n) { return n == 0 ? Sign::Zero : n > 0 ? Sign::Pos : Sign::Neg; }

Sign sign_join(Sign a, Sign b) {
  if (a == Sign::Bot) return b;
  if (b == Sign::Bot) return a;
  if (a == b) return a;
  return Sign::Top;
}

Sign sign_meet(Sign a, Sign b) {
  if (a == Sign::Top) return b;
  if (b == Sign::Top) return a;
  if (a == b) return a;
  return Sign::Bot;
}

bool sign_leq(Sign a, Sign b) { return sign_join(a, b) == b; }

std::string sign_name(Sign s) {
  switch (s) {
    case Sign::Bot: return "⊥";
    case Sign::Zero: return "0";
    case Sign::Pos: return "+";
    case Sign::Neg: return "−";
    case Sign::Top: return "⊤";
  }
  return "?";
}

namespace {

bool strict(Sign s) { return s == Sign::Pos || s == Sign::Neg || s == Sign::Zero; }

Sign flip(Sign s) { return s == Sign::Pos ? Sign::Neg : s == Sign::Neg ? Sign::Pos : s; }

}  // namespace

Sign sign_add(Sign a, Sign b) {
  if (a == Sign::Bot || b == Sign::Bot) return Sign::Bot;
  if (a == Sign::Zero) return b;
  if (b == Sign::Zero) return a;
  if (a == b && strict(a)) return a;
  return Sign::Top;
}

Sign sign_sub(Sign a, Sign b) { return sign_add(a, flip(b)); }

Sign sign_mul(Sign a, Sign b) {
  if (a == Sign::Bot || b == Sign::Bot) return Sign::Bot;
  if (a == Sign::Zero || b == Sign::Zero) return Sign::Zero;
  if (a == Sign::Top || b == Sign::Top) return Sign::Top;
  return a == b ? Sign::Pos : Sign::Neg;
}

std::string bool_set_name(BoolSet b) {
  if (b.empty()) return "{}";
  if (b.can_true && b.can_false) return "{false,true}";
  return b.can_true ? "{true}" : "{false}";
}

std::string concrete_name(const Concrete& c) {
  if (auto* n = std::get_if<long long>(&c)) return std::to_string(*n);
  if (auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return "\"" + std::get<std::string>(c) + "\"";
}

Value Value::of_sign(Sign s) {
  if (s == Sign::Bot) return bot();
  return {Tag::Int, s, {}, std::nullopt};
}

Value Value::of_bools(BoolSet b) {
  if (b.empty()) return bot();
  return {Tag::Bool, Sign::Bot, b, std::nullopt};
}

Value Value::of_lang(Dfa d) {
  if (is_empty(d)) return bot();
  Value v{Tag::Str, Sign::Bot, {}, std::nullopt};
  v.lang = minimize(d);
  return v;
}

Value value_join(const Value& a, const Value& b) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  if (a.is_top() || b.is_top()) return Value::top();
  if (a.tag != b.tag) return Value::top();
  switch (a.tag) {
    case Value::Tag::Int: return Value::of_sign(sign_join(a.sign, b.sign));
    case Value::Tag::Bool: return Value::of_bools(bool_join(a.bools, b.bools));
    default: return Value::of_lang(lang_union(*a.lang, *b.lang));
  }
}

Value value_meet(const Value& a, const Value& b) {
  if (a.is_bot() || b.is_bot()) return Value::bot();
  if (a.is_top()) return b;
  if (b.is_top()) return a;
  if (a.tag != b.tag) return Value::bot();
  switch (a.tag) {
    case Value::Tag::Int: return Value::of_sign(sign_meet(a.sign, b.sign));
    case Value::Tag::Bool: return Value::of_bools(bool_meet(a.bools, b.bools));
    default: return Value::of_lang(intersect(*a.lang, *b.lang));
  }
}

bool value_leq(const Value& a, const Value& b) {
  if (a.is_bot() || b.is_top()) return true;
  if (b.is_bot() || a.is_top()) return false;
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case Value::Tag::Int: return sign_leq(a.sign, b.sign);
    case Value::Tag::Bool: return bool_leq(a.bools, b.bools);
    default: return includes(*b.lang, *a.lang);
  }
}

bool value_eq(const Value& a, const Value& b) { return value_leq(a, b) && value_leq(b, a); }

Value value_widen(const Value& a, const Value& b, int k) {
  if (a.is_bot()) return b;
  if (b.is_bot()) return a;
  if (a.tag == Value::Tag::Str && b.tag == Value::Tag::Str)
    return Value::of_lang(widen(*a.lang, *b.lang, k));
  return value_join(a, b);
}

std::string value_name(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Bot: return "⊥";
    case Value::Tag::Top: return "⊤";
    case Value::Tag::Int: return sign_name(v.sign);
    case Value::Tag::Bool: return bool_set_name(v.bools);
    default: return "\"" + dfa_to_regex(*v.lang) + "\"";
  }
}

Value alpha(const std::set<Concrete>& values) {
  Value acc = Value::bot();
  for (const auto& c : values) {
    Value v;
    if (auto* n = std::get_if<long long>(&c))
      v = Value::of_sign(sign_of(*n));
    else if (auto* b = std::get_if<bool>(&c))
      v = Value::of_bools(bool_only(*b));
    else
      v = Value::of_lang(from_literal(std::get<std::string>(c)));
    acc = value_join(acc, v);
  }
  return acc;
}

bool value_contains(const Value& v, const Concrete& c) {
  switch (v.tag) {
    case Value::Tag::Bot:
      return false;
    case Value::Tag::Top:
      return true;
    case Value::Tag::Int: {
      auto* n = std::get_if<long long>(&c);
      return n && sign_leq(sign_of(*n), v.sign);
    }
    case Value::Tag::Bool: {
      auto* b = std::get_if<bool>(&c);
      return b && (*b ? v.bools.can_true : v.bools.can_false);
    }
    default: {
      auto* s = std::get_if<std::string>(&c);
      return s && accepts(*v.lang, *s);
    }
  }
  return false;
}

Sign numeral_language_sign(const Dfa& d) {
  if (is_empty(d)) return Sign::Bot;
  Dfa digits = digits_nonempty();
  Dfa zeros = zeros_nonempty();
  Dfa minus = from_literal("-");
  Dfa positive = difference(digits, zeros);
  if (!is_empty(difference(d, lang_union(digits, concat(minus, digits))))) return Sign::Top;
  Sign s = Sign::Bot;
  if (!is_empty(intersect(d, lang_union(zeros, concat(minus, zeros))))) s = sign_join(s, Sign::Zero);
  if (!is_empty(intersect(d, positive))) s = sign_join(s, Sign::Pos);
  if (!is_empty(intersect(d, concat(minus, positive)))) s = sign_join(s, Sign::Neg);
  return s;
}

namespace {

void all_words(const std::string& alpha, int max_len, std::string& cur,
               std::set<Concrete>& out) {
  out.insert(conc_str(cur));
  if (static_cast<int>(cur.size()) == max_len) return;
  for (char c : alpha) {
    cur.push_back(c);
    all_words(alpha, max_len, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::set<Concrete> gamma_bounded(const Value& v, const Bounds& b) {
  std::set<Concrete> out;
  auto ints = [&](Sign s) {
    for (long long n = b.int_lo; n <= b.int_hi; ++n)
      if (sign_leq(sign_of(n), s)) out.insert(conc_int(n));
  };
  switch (v.tag) {
    case Value::Tag::Bot:
      break;
    case Value::Tag::Int:
      ints(v.sign);
      break;
    case Value::Tag::Bool:
      if (v.bools.can_true) out.insert(conc_bool(true));
      if (v.bools.can_false) out.insert(conc_bool(false));
      break;
    case Value::Tag::Str:
      for (auto& w : enumerate(*v.lang, b.str_len)) out.insert(conc_str(w));
      break;
    case Value::Tag::Top: {
      ints(Sign::Top);
      out.insert(conc_bool(true));
      out.insert(conc_bool(false));
      std::string cur;
      all_words(b.str_alphabet, b.str_len, cur, out);
      break;
    }
  }
  return out;
}

}  // namespace impan
