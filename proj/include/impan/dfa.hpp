#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace impan {

// Alphabet: the 95 printable ASCII characters.
constexpr char kAlphabetLo = 0x20;
constexpr char kAlphabetHi = 0x7e;

inline bool in_alphabet(char c) { return c >= kAlphabetLo && c <= kAlphabetHi; }

struct AlphabetError : std::runtime_error {
  explicit AlphabetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic finite automaton with a partial transition map: a missing
// entry rejects. State 0 is the initial state. minimize() yields a canonical
// form (trimmed, language-minimal, states numbered in BFS order over sorted
// edge characters), so equal languages give structurally identical automata.
struct Dfa {
  std::vector<std::map<char, int>> trans;
  std::vector<bool> accepting;
  int initial = 0;

  int num_states() const { return static_cast<int>(trans.size()); }
};

Dfa empty_language();
Dfa epsilon_language();
Dfa from_literal(const std::string& sigma);
// Length-1 words over the given characters.
Dfa one_of(const std::string& chars);
// One or more characters drawn from the given set.
Dfa chars_plus(const std::string& chars);
Dfa chars_star(const std::string& chars);
Dfa any_string();
Dfa digits_nonempty();
Dfa zeros_nonempty();

bool accepts(const Dfa& a, const std::string& sigma);
Dfa concat(const Dfa& a, const Dfa& b);
Dfa lang_union(const Dfa& a, const Dfa& b);
Dfa intersect(const Dfa& a, const Dfa& b);
Dfa star(const Dfa& a);
Dfa complement(const Dfa& a);
// L(a) \ L(b)
Dfa difference(const Dfa& a, const Dfa& b);
Dfa minimize(const Dfa& a);
bool is_empty(const Dfa& a);
bool is_infinite(const Dfa& a);
// L(a) superset-or-equal of L(b)
bool includes(const Dfa& a, const Dfa& b);
bool equivalent(const Dfa& a, const Dfa& b);
// All accepted words of length <= max_len, sorted.
std::vector<std::string> enumerate(const Dfa& a, int max_len);
// The unique accepted word, if the language is a singleton.
std::optional<std::string> singleton_word(const Dfa& a);
// Stable identity for a language: serialization of the canonical form.
std::string canonical_key(const Dfa& a);

// State-equivalence widening: merges states of the (minimized) union whose
// k-bounded tail behavior coincides, then re-determinizes; repeats while the
// automaton shrinks. Guarantees L(result) >= L(a) u L(b) and returns a
// unchanged once it already covers b, which makes increasing chains stall.
Dfa widen(const Dfa& a, const Dfa& b, int k);

// All factors (contiguous substrings, including the empty one) of L(a).
Dfa factor_automaton(const Dfa& a);

// Decimal numerals of L(a) with leading zeros stripped: the canonical
// numerals of the integer values the language denotes. Non-numeral words are
// dropped; any all-zero numeral contributes "0".
Dfa digit_value_language(const Dfa& a);

// An index known either exactly or not at all (the caller has already folded
// any sign information into `exact` being absent).
struct IndexAbs {
  std::optional<long long> exact;
};

// Image of the substring operation over L(a). Exact for two concrete
// indices under clamping semantics (each index clamps into [0, len-1];
// empty only for a crossed clamped range or an empty subject); the factor
// automaton otherwise.
Dfa substring_overapprox(const Dfa& a, const IndexAbs& i, const IndexAbs& j);

}  // namespace impan
