#include "impan/regex.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace impan {

namespace {

// Precedence-tagged regex fragment: 0 = atom (safe to star or juxtapose),
// 1 = concatenation, 2 = union.
struct Re {
  std::string s;
  int prec = 0;
};

std::string escaped(char c) {
  if (c == '(' || c == ')' || c == '|' || c == '*' || c == '\\')
    return std::string("\\") + c;
  return std::string(1, c);
}

std::string grouped(const Re& r, int max_prec) {
  if (r.prec <= max_prec) return r.s;
  return "(" + r.s + ")";
}

Re re_concat(const Re& a, const Re& b) {
  if (a.s.empty()) return b;
  if (b.s.empty()) return a;
  return {grouped(a, 1) + grouped(b, 1), 1};
}

Re re_star(const Re& a) {
  if (a.s.empty()) return a;
  // Starring a single displayed character needs no parentheses.
  bool single = a.prec == 0 && (a.s.size() == 1 || (a.s.size() == 2 && a.s[0] == '\\'));
  return {single ? a.s + "*" : "(" + a.s + ")*", 0};
}

Re re_union(const Re& a, const Re& b) {
  if (a.s == b.s) return a;
  return {grouped(a, 2) + "|" + grouped(b, 2), 2};
}

}  // namespace

std::string dfa_to_regex(const Dfa& a) {
  Dfa m = minimize(a);
  if (is_empty(m)) return "[]";

  // Generalized NFA with a fresh start and a fresh final state; edges hold
  // regex fragments, absent edge means no path.
  int n = m.num_states();
  int start = n, final_st = n + 1;
  std::map<std::pair<int, int>, Re> edge;
  auto add = [&](int p, int q, const Re& r) {
    auto it = edge.find({p, q});
    if (it == edge.end())
      edge.emplace(std::make_pair(p, q), r);
    else
      it->second = re_union(it->second, r);
  };
  for (int q = 0; q < n; ++q)
    for (auto [c, r] : m.trans[q]) add(q, r, {escaped(c), 0});
  add(start, m.initial, {"", 1});
  for (int q = 0; q < n; ++q)
    if (m.accepting[q]) add(q, final_st, {"", 1});

  std::set<int> alive;
  for (int q = 0; q < n; ++q) alive.insert(q);
  while (!alive.empty()) {
    // Rip the state with the fewest in/out pairs to keep fragments short.
    int best = -1;
    long best_cost = -1;
    for (int q : alive) {
      long ins = 0, outs = 0;
      for (auto& [pq, r] : edge) {
        if (pq.second == q && pq.first != q) ++ins;
        if (pq.first == q && pq.second != q) ++outs;
      }
      long cost = ins * outs;
      if (best < 0 || cost < best_cost) {
        best = q;
        best_cost = cost;
      }
    }
    alive.erase(best);

    std::optional<Re> self;
    std::vector<std::pair<int, Re>> ins, outs;
    for (auto& [pq, r] : edge) {
      if (pq.first == best && pq.second == best)
        self = r;
      else if (pq.second == best)
        ins.emplace_back(pq.first, r);
      else if (pq.first == best)
        outs.emplace_back(pq.second, r);
    }
    std::erase_if(edge, [&](auto& kv) { return kv.first.first == best || kv.first.second == best; });
    Re loop = self ? re_star(*self) : Re{"", 1};
    for (auto& [p, rin] : ins)
      for (auto& [t, rout] : outs) add(p, t, re_concat(re_concat(rin, loop), rout));
  }

  auto it = edge.find({start, final_st});
  if (it == edge.end()) return "[]";
  if (it->second.s.empty()) return "()";
  return it->second.s;
}

}  // namespace impan
