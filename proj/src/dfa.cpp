#include "impan/dfa.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace impan {

namespace {

// NFA with epsilon moves and multiple start states; the construction
// vehicle for the regular operations.
struct Nfa {
  std::vector<std::multimap<char, int>> trans;
  std::vector<std::vector<int>> eps;
  std::vector<bool> accepting;
  std::vector<int> starts;

  int add_state(bool acc = false) {
    trans.emplace_back();
    eps.emplace_back();
    accepting.push_back(acc);
    return static_cast<int>(trans.size()) - 1;
  }
};

// Copies d into n, returning the offset of d's states.
int splice(Nfa& n, const Dfa& d) {
  int base = static_cast<int>(n.trans.size());
  for (int q = 0; q < d.num_states(); ++q) n.add_state(d.accepting[q]);
  for (int q = 0; q < d.num_states(); ++q)
    for (auto [c, r] : d.trans[q]) n.trans[base + q].emplace(c, base + r);
  return base;
}

void eps_close(const Nfa& n, std::set<int>& s) {
  std::deque<int> work(s.begin(), s.end());
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int r : n.eps[q])
      if (s.insert(r).second) work.push_back(r);
  }
}

Dfa determinize(const Nfa& n) {
  Dfa d;
  std::map<std::set<int>, int> ids;
  std::deque<std::set<int>> work;

  auto intern = [&](std::set<int> s) {
    eps_close(n, s);
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(ids.size());
    ids.emplace(s, id);
    bool acc = false;
    for (int q : s) acc = acc || n.accepting[q];
    d.trans.emplace_back();
    d.accepting.push_back(acc);
    work.push_back(std::move(s));
    return id;
  };

  std::set<int> start(n.starts.begin(), n.starts.end());
  intern(std::move(start));
  while (!work.empty()) {
    std::set<int> s = work.front();
    work.pop_front();
    int sid = ids.at(s);
    std::map<char, std::set<int>> moves;
    for (int q : s)
      for (auto [c, r] : n.trans[q]) moves[c].insert(r);
    for (auto& [c, t] : moves) d.trans[sid][c] = intern(std::move(t));
  }
  return d;
}

// Drops states that are unreachable or cannot reach acceptance. An emptied
// automaton collapses to the one-state reject form.
Dfa trim(const Dfa& a) {
  int n = a.num_states();
  std::vector<bool> reach(n, false);
  std::deque<int> work{a.initial};
  reach[a.initial] = true;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (auto [c, r] : a.trans[q])
      if (!reach[r]) {
        reach[r] = true;
        work.push_back(r);
      }
  }
  std::vector<std::vector<int>> rev(n);
  for (int q = 0; q < n; ++q)
    for (auto [c, r] : a.trans[q]) rev[r].push_back(q);
  std::vector<bool> live(n, false);
  for (int q = 0; q < n; ++q)
    if (a.accepting[q] && reach[q]) {
      live[q] = true;
      work.push_back(q);
    }
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int p : rev[q])
      if (reach[p] && !live[p]) {
        live[p] = true;
        work.push_back(p);
      }
  }
  if (!live[a.initial]) return empty_language();
  std::vector<int> remap(n, -1);
  Dfa out;
  for (int q = 0; q < n; ++q)
    if (live[q]) {
      remap[q] = out.num_states();
      out.trans.emplace_back();
      out.accepting.push_back(a.accepting[q]);
    }
  for (int q = 0; q < n; ++q)
    if (live[q])
      for (auto [c, r] : a.trans[q])
        if (live[r]) out.trans[remap[q]][c] = remap[r];
  out.initial = remap[a.initial];
  return out;
}

// Renumbers states in BFS order from the initial state, edges taken in
// character order. Equivalent minimized automata become identical.
Dfa canonicalize(const Dfa& a) {
  std::vector<int> order(a.num_states(), -1);
  std::deque<int> work{a.initial};
  order[a.initial] = 0;
  int next = 1;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (auto [c, r] : a.trans[q])
      if (order[r] < 0) {
        order[r] = next++;
        work.push_back(r);
      }
  }
  Dfa out;
  out.trans.resize(next);
  out.accepting.resize(next);
  for (int q = 0; q < a.num_states(); ++q) {
    if (order[q] < 0) continue;
    out.accepting[order[q]] = a.accepting[q];
    for (auto [c, r] : a.trans[q]) out.trans[order[q]][c] = order[r];
  }
  return out;
}

std::string alphabet_chars() {
  std::string s;
  for (char c = kAlphabetLo;; ++c) {
    s.push_back(c);
    if (c == kAlphabetHi) break;
  }
  return s;
}

// Words of length lmin..lmax; lmax < 0 means no upper bound.
Dfa length_window(int lmin, int lmax) {
  const std::string alpha = alphabet_chars();
  int n = lmax < 0 ? lmin : lmax;
  Dfa d;
  d.trans.resize(n + 1);
  d.accepting.assign(n + 1, false);
  for (int q = 0; q < n; ++q)
    for (char c : alpha) d.trans[q][c] = q + 1;
  if (lmax < 0)
    for (char c : alpha) d.trans[n][c] = n;
  for (int q = lmin; q <= n; ++q) d.accepting[q] = true;
  return d;
}

// Tail signature: accepted words shorter than k plus all length-k words
// with a defined run, from state q.
std::set<std::string> k_tails(const Dfa& d, int q0, int k) {
  std::set<std::string> out;
  std::string word;
  std::function<void(int)> walk = [&](int q) {
    if (static_cast<int>(word.size()) == k) {
      out.insert(word);
      return;
    }
    if (d.accepting[q]) out.insert(word);
    for (auto [c, r] : d.trans[q]) {
      word.push_back(c);
      walk(r);
      word.pop_back();
    }
  };
  walk(q0);
  return out;
}

}  // namespace

Dfa empty_language() {
  Dfa d;
  d.trans.resize(1);
  d.accepting.assign(1, false);
  return d;
}

Dfa epsilon_language() {
  Dfa d;
  d.trans.resize(1);
  d.accepting.assign(1, true);
  return d;
}

Dfa from_literal(const std::string& sigma) {
  for (char c : sigma)
    if (!in_alphabet(c))
      throw AlphabetError("character outside the printable alphabet in literal");
  Dfa d;
  int n = static_cast<int>(sigma.size());
  d.trans.resize(n + 1);
  d.accepting.assign(n + 1, false);
  d.accepting[n] = true;
  for (int i = 0; i < n; ++i) d.trans[i][sigma[i]] = i + 1;
  return d;
}

Dfa one_of(const std::string& chars) {
  Dfa d;
  d.trans.resize(2);
  d.accepting = {false, true};
  for (char c : chars) {
    if (!in_alphabet(c)) throw AlphabetError("character outside the printable alphabet");
    d.trans[0][c] = 1;
  }
  return d;
}

Dfa chars_plus(const std::string& chars) {
  Dfa d = one_of(chars);
  for (char c : chars) d.trans[1][c] = 1;
  return d;
}

Dfa chars_star(const std::string& chars) {
  Dfa d;
  d.trans.resize(1);
  d.accepting.assign(1, true);
  for (char c : chars) {
    if (!in_alphabet(c)) throw AlphabetError("character outside the printable alphabet");
    d.trans[0][c] = 0;
  }
  return d;
}

Dfa any_string() { return chars_star(alphabet_chars()); }

Dfa digits_nonempty() { return chars_plus("0123456789"); }

Dfa zeros_nonempty() { return chars_plus("0"); }

bool accepts(const Dfa& a, const std::string& sigma) {
  int q = a.initial;
  for (char c : sigma) {
    auto it = a.trans[q].find(c);
    if (it == a.trans[q].end()) return false;
    q = it->second;
  }
  return a.accepting[q];
}

Dfa concat(const Dfa& a, const Dfa& b) {
  Nfa n;
  int ba = splice(n, a);
  int bb = splice(n, b);
  for (int q = 0; q < a.num_states(); ++q)
    if (a.accepting[q]) {
      n.accepting[ba + q] = false;
      n.eps[ba + q].push_back(bb + b.initial);
    }
  n.starts = {ba + a.initial};
  return minimize(determinize(n));
}

Dfa lang_union(const Dfa& a, const Dfa& b) {
  Nfa n;
  int ba = splice(n, a);
  int bb = splice(n, b);
  int s = n.add_state();
  n.eps[s] = {ba + a.initial, bb + b.initial};
  n.starts = {s};
  return minimize(determinize(n));
}

Dfa star(const Dfa& a) {
  Nfa n;
  int ba = splice(n, a);
  int s = n.add_state(true);
  n.eps[s].push_back(ba + a.initial);
  for (int q = 0; q < a.num_states(); ++q)
    if (a.accepting[q]) n.eps[ba + q].push_back(s);
  n.starts = {s};
  return minimize(determinize(n));
}

Dfa intersect(const Dfa& a, const Dfa& b) {
  Dfa d;
  std::map<std::pair<int, int>, int> ids;
  std::deque<std::pair<int, int>> work;
  auto intern = [&](std::pair<int, int> pq) {
    auto it = ids.find(pq);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(ids.size());
    ids.emplace(pq, id);
    d.trans.emplace_back();
    d.accepting.push_back(a.accepting[pq.first] && b.accepting[pq.second]);
    work.push_back(pq);
    return id;
  };
  intern({a.initial, b.initial});
  while (!work.empty()) {
    auto [p, q] = work.front();
    work.pop_front();
    int id = ids.at({p, q});
    for (auto [c, pr] : a.trans[p]) {
      auto it = b.trans[q].find(c);
      if (it != b.trans[q].end()) d.trans[id][c] = intern({pr, it->second});
    }
  }
  return minimize(d);
}

Dfa complement(const Dfa& a) {
  Dfa d = a;
  int sink = d.num_states();
  d.trans.emplace_back();
  d.accepting.push_back(false);
  const std::string alpha = alphabet_chars();
  for (int q = 0; q <= sink; ++q)
    for (char c : alpha)
      if (!d.trans[q].count(c)) d.trans[q][c] = sink;
  for (int q = 0; q <= sink; ++q) d.accepting[q] = !d.accepting[q];
  return minimize(d);
}

Dfa difference(const Dfa& a, const Dfa& b) { return intersect(a, complement(b)); }

Dfa minimize(const Dfa& a) {
  Dfa t = trim(a);
  int n = t.num_states();
  // Moore refinement; an undefined transition is its own behavior class.
  std::vector<int> cls(n);
  for (int q = 0; q < n; ++q) cls[q] = t.accepting[q] ? 1 : 0;
  for (;;) {
    std::map<std::pair<int, std::vector<std::pair<char, int>>>, int> sig_ids;
    std::vector<int> next(n);
    for (int q = 0; q < n; ++q) {
      std::vector<std::pair<char, int>> edge_sig;
      for (auto [c, r] : t.trans[q]) edge_sig.emplace_back(c, cls[r]);
      auto key = std::make_pair(cls[q], std::move(edge_sig));
      auto [it, inserted] = sig_ids.emplace(std::move(key), static_cast<int>(sig_ids.size()));
      next[q] = it->second;
    }
    if (next == cls) break;
    cls = next;
  }
  int num_cls = *std::max_element(cls.begin(), cls.end()) + 1;
  Dfa q;
  q.trans.resize(num_cls);
  q.accepting.assign(num_cls, false);
  for (int s = 0; s < n; ++s) {
    if (t.accepting[s]) q.accepting[cls[s]] = true;
    for (auto [c, r] : t.trans[s]) q.trans[cls[s]][c] = cls[r];
  }
  q.initial = cls[t.initial];
  return canonicalize(q);
}

bool is_empty(const Dfa& a) {
  std::vector<bool> seen(a.num_states(), false);
  std::deque<int> work{a.initial};
  seen[a.initial] = true;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    if (a.accepting[q]) return false;
    for (auto [c, r] : a.trans[q])
      if (!seen[r]) {
        seen[r] = true;
        work.push_back(r);
      }
  }
  return true;
}

bool is_infinite(const Dfa& a) {
  Dfa t = trim(a);
  // A cycle among useful states pumps arbitrarily long words.
  std::vector<int> state(t.num_states(), 0);
  std::function<bool(int)> dfs = [&](int q) {
    state[q] = 1;
    for (auto [c, r] : t.trans[q]) {
      if (state[r] == 1) return true;
      if (state[r] == 0 && dfs(r)) return true;
    }
    state[q] = 2;
    return false;
  };
  return dfs(t.initial);
}

bool includes(const Dfa& a, const Dfa& b) { return is_empty(difference(b, a)); }

bool equivalent(const Dfa& a, const Dfa& b) { return includes(a, b) && includes(b, a); }

std::vector<std::string> enumerate(const Dfa& a, int max_len) {
  std::vector<std::string> out;
  std::string word;
  std::function<void(int)> walk = [&](int q) {
    if (a.accepting[q]) out.push_back(word);
    if (static_cast<int>(word.size()) == max_len) return;
    for (auto [c, r] : a.trans[q]) {
      word.push_back(c);
      walk(r);
      word.pop_back();
    }
  };
  walk(a.initial);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> singleton_word(const Dfa& a) {
  Dfa m = minimize(a);
  if (is_empty(m) || is_infinite(m)) return std::nullopt;
  // Finite language: every word fits within num_states - 1 letters.
  auto words = enumerate(m, m.num_states());
  if (words.size() != 1) return std::nullopt;
  return words[0];
}

std::string canonical_key(const Dfa& a) {
  Dfa m = minimize(a);
  std::ostringstream os;
  os << m.num_states() << '#';
  for (int q = 0; q < m.num_states(); ++q) {
    os << (m.accepting[q] ? 'A' : '.');
    for (auto [c, r] : m.trans[q]) os << c << r << ';';
    os << '|';
  }
  return os.str();
}

Dfa widen(const Dfa& a, const Dfa& b, int k) {
  Dfa am = minimize(a);
  if (includes(am, b)) return am;
  Dfa cur = minimize(lang_union(a, b));
  // Merge-until-all-signatures-distinct, re-determinizing between rounds.
  // An automaton whose k-tail signatures are pairwise distinct has boundedly
  // many states, and language growth is monotone, so chains widened through
  // here stall. Rounds are capped per k; if a level fails to settle, a
  // coarser k merges more (k = 0 collapses to a single state).
  for (int kk = k; kk >= 0; --kk) {
    for (int round = 0; round < 8; ++round) {
      std::map<std::set<std::string>, std::vector<int>> groups;
      for (int q = 0; q < cur.num_states(); ++q) groups[k_tails(cur, q, kk)].push_back(q);
      if (groups.size() == static_cast<size_t>(cur.num_states())) return cur;
      std::vector<int> grp(cur.num_states());
      int gid = 0;
      for (auto& [sig, members] : groups) {
        for (int q : members) grp[q] = gid;
        ++gid;
      }
      Nfa n;
      for (int g = 0; g < gid; ++g) n.add_state();
      for (int q = 0; q < cur.num_states(); ++q) {
        if (cur.accepting[q]) n.accepting[grp[q]] = true;
        for (auto [c, r] : cur.trans[q]) n.trans[grp[q]].emplace(c, grp[r]);
      }
      n.starts = {grp[cur.initial]};
      cur = minimize(determinize(n));
    }
  }
  return cur;
}

Dfa factor_automaton(const Dfa& a) {
  Dfa t = trim(a);
  if (is_empty(t)) return empty_language();
  // Every state of the trimmed automaton lies on an accepting path, so any
  // path segment between any two states is a factor.
  Nfa n;
  int base = splice(n, t);
  for (int q = 0; q < t.num_states(); ++q) n.accepting[base + q] = true;
  int s = n.add_state(true);
  for (int q = 0; q < t.num_states(); ++q) n.eps[s].push_back(base + q);
  n.starts = {s};
  return minimize(determinize(n));
}

Dfa digit_value_language(const Dfa& a) {
  Dfa d = minimize(intersect(a, digits_nonempty()));
  if (is_empty(d)) return empty_language();
  Nfa n;
  int base = splice(n, d);
  // States reachable from the start by zero-edges alone: canonical numerals
  // begin with a nonzero digit read from one of these.
  std::set<int> zreach{d.initial};
  std::deque<int> work{d.initial};
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    auto it = d.trans[q].find('0');
    if (it != d.trans[q].end() && zreach.insert(it->second).second) work.push_back(it->second);
  }
  int s = n.add_state(false);
  for (int z : zreach)
    for (auto [c, r] : d.trans[z])
      if (c >= '1' && c <= '9') n.trans[s].emplace(c, base + r);
  bool has_zero_numeral = false;
  for (int z : zreach)
    if (z != d.initial && d.accepting[z]) has_zero_numeral = true;
  n.starts = {s};
  Dfa out = minimize(determinize(n));
  if (has_zero_numeral) out = lang_union(out, from_literal("0"));
  return minimize(out);
}

namespace {

// { sigma[0] : sigma in L(t), |sigma| >= 1 } for trimmed t.
Dfa first_chars(const Dfa& t) {
  std::string cs;
  for (auto [c, r] : t.trans[t.initial]) cs.push_back(c);
  return minimize(one_of(cs));
}

// { last character of sigma : sigma in L(t), |sigma| >= 1 } for trimmed t.
Dfa last_chars(const Dfa& t) {
  std::set<char> cs;
  for (int q = 0; q < t.num_states(); ++q)
    for (auto [c, r] : t.trans[q])
      if (t.accepting[r]) cs.insert(c);
  return minimize(one_of(std::string(cs.begin(), cs.end())));
}

// { sigma[lo .. min(hi, |sigma|-1)] : sigma in L(t), |sigma| >= lo+1 } for
// trimmed t, 0 <= lo <= hi.
Dfa window_slices(const Dfa& t, int lo, int hi) {
  int span = hi - lo + 1;
  // States reachable by exactly lo characters.
  std::set<int> layer{t.initial};
  for (int step = 0; step < lo && !layer.empty(); ++step) {
    std::set<int> next;
    for (int q : layer)
      for (auto [c, r] : t.trans[q]) next.insert(r);
    layer = std::move(next);
  }
  // Layered copies: position l within the slice window. Stopping with l >= 1
  // is allowed where the source word itself ends; a full window accepts
  // anywhere because a trimmed remainder always completes some word.
  Nfa n;
  std::vector<std::vector<int>> id(span + 1, std::vector<int>(t.num_states(), -1));
  auto state_at = [&](int l, int q) {
    if (id[l][q] < 0) id[l][q] = n.add_state(l == span || (l >= 1 && t.accepting[q]));
    return id[l][q];
  };
  int s = n.add_state(false);
  n.starts = {s};
  for (int q : layer) {
    int tgt = state_at(0, q);
    n.eps[s].push_back(tgt);
  }
  for (int l = 0; l < span; ++l)
    for (int q = 0; q < t.num_states(); ++q) {
      if (id[l][q] < 0) continue;
      for (auto [c, r] : t.trans[q]) {
        int tgt = state_at(l + 1, r);
        n.trans[id[l][q]].emplace(c, tgt);
      }
    }
  return minimize(determinize(n));
}

}  // namespace

Dfa substring_overapprox(const Dfa& a, const IndexAbs& i, const IndexAbs& j) {
  Dfa t = trim(a);
  if (is_empty(t)) return empty_language();
  if (!i.exact || !j.exact) return factor_automaton(t);
  long long I = *i.exact, J = *j.exact;
  // Exactness is only worth the per-length analysis for source-sized
  // indices; beyond that the factor automaton is still sound.
  if (std::max(std::llabs(I), std::llabs(J)) > 4096) return factor_automaton(t);

  // Substring semantics: both indices clamp into [0, len-1]; empty result
  // only when the clamped range is empty (or the subject is empty). The
  // clamping makes the image depend on the subject length, so short and
  // long words contribute separately.
  bool eps = accepts(t, "");
  auto done = [&](Dfa d) {
    if (eps) d = lang_union(d, epsilon_language());
    return minimize(d);
  };
  if (I > J) {
    if (I <= 0) return done(first_chars(t));
    if (J >= 0) {
      // Words up to length J+1 clamp both indices to len-1; longer words
      // have a genuinely empty range.
      Dfa shorts = minimize(intersect(t, length_window(1, static_cast<int>(J) + 1)));
      bool long_words = !is_empty(intersect(t, length_window(static_cast<int>(J) + 2, -1)));
      eps = eps || long_words;
      return done(last_chars(trim(shorts)));
    }
    // I >= 1, J < 0: only one-character words have a nonempty range.
    eps = eps || !is_empty(intersect(t, length_window(2, -1)));
    return done(intersect(t, length_window(1, 1)));
  }
  if (J < 0) return done(first_chars(t));
  int lo = static_cast<int>(std::max(I, 0ll));
  Dfa out = window_slices(t, lo, static_cast<int>(J));
  if (lo >= 1) {
    // Words of length 1..lo clamp both indices to len-1.
    Dfa shorts = minimize(intersect(t, length_window(1, lo)));
    if (!is_empty(shorts)) out = lang_union(out, last_chars(trim(shorts)));
  }
  return done(out);
}

}  // namespace impan
