#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>

#include "impan/dfa.hpp"

namespace impan {

// Five-point sign domain over the integers.
enum class Sign { Bot, Zero, Pos, Neg, Top };

Sign sign_of(long long n);
Sign sign_join(Sign a, Sign b);
Sign sign_meet(Sign a, Sign b);
bool sign_leq(Sign a, Sign b);
// "⊥", "0", "+", "−", "⊤"
std::string sign_name(Sign s);

Sign sign_add(Sign a, Sign b);
Sign sign_sub(Sign a, Sign b);
Sign sign_mul(Sign a, Sign b);

// Subset of {true, false}.
struct BoolSet {
  bool can_true = false;
  bool can_false = false;

  bool operator==(const BoolSet&) const = default;
  bool empty() const { return !can_true && !can_false; }
};

inline BoolSet bool_both() { return {true, true}; }
inline BoolSet bool_only(bool b) { return {b, !b}; }
inline BoolSet bool_none() { return {false, false}; }
inline BoolSet bool_join(BoolSet a, BoolSet b) {
  return {a.can_true || b.can_true, a.can_false || b.can_false};
}
inline BoolSet bool_meet(BoolSet a, BoolSet b) {
  return {a.can_true && b.can_true, a.can_false && b.can_false};
}
inline bool bool_leq(BoolSet a, BoolSet b) {
  return (!a.can_true || b.can_true) && (!a.can_false || b.can_false);
}
std::string bool_set_name(BoolSet b);

// A concrete runtime value: integer, boolean, or string.
using Concrete = std::variant<long long, bool, std::string>;

inline Concrete conc_int(long long n) { return Concrete(std::in_place_type<long long>, n); }
inline Concrete conc_bool(bool b) { return Concrete(std::in_place_type<bool>, b); }
inline Concrete conc_str(std::string s) {
  return Concrete(std::in_place_type<std::string>, std::move(s));
}
std::string concrete_name(const Concrete& c);

// Coalesced sum of the three sorted abstractions. Bot is the unique bottom
// (every empty per-sort element normalizes to it); Top covers all sorts, so
// it is strictly above IntAbs(Sign::Top) and friends.
struct Value {
  enum class Tag { Bot, Top, Int, Bool, Str };
  Tag tag = Tag::Bot;
  Sign sign = Sign::Bot;
  BoolSet bools{};
  std::optional<Dfa> lang;

  static Value bot() { return {}; }
  static Value top() { return {Tag::Top, Sign::Bot, {}, std::nullopt}; }
  static Value of_sign(Sign s);
  static Value of_bools(BoolSet b);
  static Value of_lang(Dfa d);

  bool is_bot() const { return tag == Tag::Bot; }
  bool is_top() const { return tag == Tag::Top; }
};

Value value_join(const Value& a, const Value& b);
Value value_meet(const Value& a, const Value& b);
bool value_leq(const Value& a, const Value& b);
bool value_eq(const Value& a, const Value& b);
// Pointwise widening carrier: signs and booleans are finite (join), string
// languages go through the automaton widening.
Value value_widen(const Value& a, const Value& b, int k);
std::string value_name(const Value& v);

Value alpha(const std::set<Concrete>& values);

// Exact concretization membership (no bounds involved).
bool value_contains(const Value& v, const Concrete& c);

// Sign of the integers a language of numeral spellings denotes. Accepts an
// optional leading '-'; any non-numeral word degrades the result to Top.
Sign numeral_language_sign(const Dfa& d);

// Finite slice of a concretization: integers within [int_lo, int_hi],
// strings over str_alphabet up to length str_len.
struct Bounds {
  long long int_lo = -3;
  long long int_hi = 3;
  int str_len = 3;
  std::string str_alphabet = "ab5";
};

std::set<Concrete> gamma_bounded(const Value& v, const Bounds& b);

}  // namespace impan
