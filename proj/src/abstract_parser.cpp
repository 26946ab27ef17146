#include "impan/abstract_parser.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "impan/ast.hpp"
#include "impan/parser.hpp"
#include "impan/regex.hpp"
#include "impan/render.hpp"
#include "impan/value.hpp"

namespace impan {

int ExtendedDfa::add_state(bool acc) {
  accepting.push_back(acc);
  chars.emplace_back();
  bulks.emplace_back();
  return num_states() - 1;
}

namespace {

std::vector<std::vector<int>> strongly_connected(const std::vector<std::map<char, int>>& g) {
  int n = static_cast<int>(g.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int next = 0;

  // Iterative Tarjan; frame second component is the position in the
  // successor list.
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<int, std::map<char, int>::const_iterator>> frames;
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = true;
    frames.push_back({root, g[root].begin()});
    while (!frames.empty()) {
      auto& [v, it] = frames.back();
      if (it != g[v].end()) {
        int w = it->second;
        ++it;
        if (index[w] < 0) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, g[w].begin()});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          std::vector<int> comp;
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == v) break;
          }
          comps.push_back(std::move(comp));
        }
        int finished = v;
        frames.pop_back();
        if (!frames.empty()) {
          int parent = frames.back().first;
          low[parent] = std::min(low[parent], low[finished]);
        }
      }
    }
  }
  return comps;
}

bool fragment_parses(const std::string& text) {
  try {
    parse_fragment(text);
    return true;
  } catch (const NotExecutable&) {
    return false;
  }
}

}  // namespace

ExtendedDfa reduce_cycles(const Dfa& input) {
  Dfa a = minimize(input);
  ExtendedDfa ext;
  ext.initial = a.initial;
  ext.accepting = a.accepting;
  ext.chars.resize(a.num_states());
  ext.bulks.resize(a.num_states());
  for (int s = 0; s < a.num_states(); ++s)
    for (auto [c, t] : a.trans[s]) ext.chars[s].push_back({c, t});

  auto comps = strongly_connected(a.trans);
  for (const auto& comp : comps) {
    bool self_loop = false;
    if (comp.size() == 1) {
      int s = comp[0];
      auto it = a.trans[s].begin();
      for (; it != a.trans[s].end(); ++it)
        if (it->second == s) self_loop = true;
    }
    if (comp.size() == 1 && !self_loop) continue;

    std::set<int> in_c(comp.begin(), comp.end());

    // The interior must be one simple loop: every state exactly one
    // successor inside the component.
    std::map<int, std::pair<char, int>> succ;
    for (int s : comp) {
      for (auto [c, t] : a.trans[s]) {
        if (!in_c.count(t)) continue;
        if (succ.count(s))
          throw UnreducibleCycles("cycle interior branches at state " + std::to_string(s));
        succ[s] = {c, t};
      }
    }
    if (succ.size() != comp.size())
      throw UnreducibleCycles("cycle interior is not one simple loop");

    std::set<int> entries;
    if (in_c.count(a.initial)) entries.insert(a.initial);
    for (int s = 0; s < a.num_states(); ++s) {
      if (in_c.count(s)) continue;
      for (auto [c, t] : a.trans[s])
        if (in_c.count(t)) entries.insert(t);
    }
    if (entries.empty()) continue;
    if (entries.size() > 1) throw UnreducibleCycles("cycle has several entry states");
    int entry = *entries.begin();

    // Walk the ring from the entry, collecting the spelled word.
    int k = static_cast<int>(comp.size());
    std::vector<int> ring;
    std::string w;
    int at = entry;
    for (int step = 0; step < k; ++step) {
      ring.push_back(at);
      auto [c, t] = succ.at(at);
      w.push_back(c);
      at = t;
    }
    if (at != entry) throw UnreducibleCycles("cycle interior is not one simple loop");

    // Cut the edge closing the ring; the remaining chain keeps one partial
    // traversal readable, with interior acceptance and exits intact.
    auto& closing = ext.chars[ring[k - 1]];
    closing.erase(std::remove(closing.begin(), closing.end(),
                              std::make_pair(w[k - 1], ring[0])),
                  closing.end());

    auto copy_externals = [&](int from_state, int onto) {
      for (auto [c, t] : a.trans[from_state])
        if (!in_c.count(t)) ext.chars[onto].push_back({c, t});
    };

    // A chain spelling one full turn of the ring starting after `origin`
    // (ring position j): mirrors acceptance and exit transitions of the
    // states passed, so words ending part way through a final traversal
    // stay readable.
    auto clone_turn = [&](int from_state, int j) {
      int cur = from_state;
      for (int m = 0; m < k; ++m) {
        int mirrored = ring[(j + m + 1) % k];
        int fresh = ext.add_state(a.accepting[mirrored]);
        ext.chars[cur].push_back({w[(j + m) % k], fresh});
        copy_externals(mirrored, fresh);
        cur = fresh;
      }
    };

    // Prefer a rotation of the spelled word that reads as a complete
    // statement list: the cycle then becomes an explicit loop statement.
    int anchor = -1;
    std::string rot;
    for (int j = 0; j < k; ++j) {
      std::string r = w.substr(j) + w.substr(0, j);
      if (fragment_parses(r)) {
        anchor = j;
        rot = std::move(r);
        break;
      }
    }

    if (anchor >= 0) {
      int aj = ring[anchor];
      std::string spell = "while(true){" + rot + "}";
      int cur = aj;
      for (char c : spell) {
        int fresh = ext.add_state(false);
        ext.chars[cur].push_back({c, fresh});
        cur = fresh;
      }
      int z = cur;  // reads like the anchor after any number of turns
      ext.accepting[z] = a.accepting[aj];
      copy_externals(aj, z);
      clone_turn(z, anchor);
      ext.synthetic_whiles.insert(aj);
    } else {
      int f = ext.add_state(a.accepting[entry]);
      copy_externals(entry, f);
      ext.bulks[entry].push_back({minimize(star(from_literal(w))), f});
      clone_turn(f, 0);
    }
  }
  return ext;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string extended_dfa_to_dot(const ExtendedDfa& a) {
  std::string out = "digraph extended {\n  rankdir=LR;\n  start [shape=point];\n";
  for (int s = 0; s < a.num_states(); ++s) {
    out += "  q" + std::to_string(s) + " [shape=" +
           (a.accepting[s] ? "doublecircle" : "circle");
    if (a.synthetic_whiles.count(s)) out += ", style=dashed";
    out += "];\n";
  }
  out += "  start -> q" + std::to_string(a.initial) + ";\n";
  for (int s = 0; s < a.num_states(); ++s) {
    for (auto [c, t] : a.chars[s])
      out += "  q" + std::to_string(s) + " -> q" + std::to_string(t) + " [label=\"" +
             dot_escape(std::string(1, c)) + "\"];\n";
    for (const auto& [lang, t] : a.bulks[s])
      out += "  q" + std::to_string(s) + " -> q" + std::to_string(t) + " [label=\"" +
             dot_escape(dfa_to_regex(lang)) + "\", style=dashed];\n";
  }
  out += "}\n";
  return out;
}

namespace {

const std::set<std::string> kStmtKeywords = {"if",   "else", "while", "skip",
                                             "eval", "true", "false", "substr"};

std::string printable_without_quote() {
  std::string s;
  for (char c = kAlphabetLo; c <= kAlphabetHi; ++c)
    if (c != '"') s.push_back(c);
  return s;
}

// Reads statements from an extended automaton. All reading functions return
// every variant consistent with some accepted word; parse failures simply
// contribute no variants. Emission of edges and merges happens once per
// state through the stmt memo.
class StmtReader {
 public:
  explicit StmtReader(const ExtendedDfa& a) : a_(a) {}

  enum class How { Terminated, AtBrace, AtAccept, BareBlock };
  struct Span {
    int resume;
    How how;
    bool operator<(const Span& o) const {
      return std::tie(resume, how) < std::tie(o.resume, o.how);
    }
  };

  ReadPieces pieces;
  std::set<std::pair<int, int>> consumed_bulks;

  const std::vector<Span>& stmt_spans(int q) {
    auto it = memo_stmt_.find(q);
    if (it != memo_stmt_.end()) return it->second;
    std::set<Span> out;
    for (int s : ws(q)) {
      read_skip(q, s, out);
      read_assign(q, s, out);
      read_eval(q, s, out);
      read_if(q, s, out);
      read_while(q, s, out);
    }
    auto [pos, inserted] =
        memo_stmt_.emplace(q, std::vector<Span>(out.begin(), out.end()));
    (void)inserted;
    return pos->second;
  }

  // Accepting states reachable from a span resume across separators count as
  // program ends only at top level; the caller decides when that holds.
  void note_top_level(const Span& sp) {
    if (sp.how == How::AtBrace) return;
    for (int t : ws(sp.resume)) {
      if (a_.accepting[t]) {
        pieces.ends.insert(t);
        merge(sp.resume, t);
      }
    }
    if (sp.how == How::Terminated || sp.how == How::BareBlock)
      pieces.continuations.insert(sp.resume);
  }

 private:
  using ExprVars = std::vector<std::pair<Expr, int>>;

  const ExtendedDfa& a_;
  std::map<int, std::vector<Span>> memo_stmt_;
  std::map<int, std::vector<int>> memo_ws_;
  std::map<std::pair<int, int>, ExprVars> memo_expr_;
  std::map<int, std::vector<std::pair<int, int>>> memo_block_;
  std::set<std::tuple<int, int, std::string>> seen_edges_;

  // ---- primitive motion ----

  std::vector<int> follow(int s, char c) const {
    std::vector<int> out;
    for (auto [d, t] : a_.chars[s])
      if (d == c) out.push_back(t);
    return out;
  }

  const std::vector<int>& ws(int q) {
    auto it = memo_ws_.find(q);
    if (it != memo_ws_.end()) return it->second;
    std::vector<int> seen{q};
    for (size_t i = 0; i < seen.size(); ++i)
      for (int t : follow(seen[i], ' '))
        if (std::find(seen.begin(), seen.end(), t) == seen.end()) seen.push_back(t);
    std::sort(seen.begin(), seen.end());
    return memo_ws_.emplace(q, std::move(seen)).first->second;
  }

  std::vector<int> match_text(int s, const std::string& text) const {
    std::vector<int> frontier{s};
    for (char c : text) {
      std::vector<int> next;
      for (int f : frontier)
        for (int t : follow(f, c)) next.push_back(t);
      frontier = std::move(next);
      if (frontier.empty()) break;
    }
    return frontier;
  }

  void merge(int x, int y) {
    if (x != y) pieces.merges.push_back({x, y});
  }

  void emit(int from, EdgeLabel label, int to) {
    auto key = std::make_tuple(from, to, edge_label_name(label));
    if (!seen_edges_.insert(key).second) return;
    pieces.edges.push_back({from, std::move(label), to});
  }

  // ---- token-level readers ----

  // Maximal runs are the word's business, not the reader's: a variant is
  // emitted at every state, and consumers fail on words that continue with
  // a character they cannot use.
  std::vector<std::pair<std::string, int>> read_ident(int s) const {
    std::vector<std::pair<std::string, int>> out;
    std::vector<std::pair<std::string, int>> frontier{{"", s}};
    while (!frontier.empty()) {
      std::vector<std::pair<std::string, int>> next;
      for (auto& [name, at] : frontier) {
        for (auto [c, t] : a_.chars[at]) {
          if (c < 'a' || c > 'z') continue;
          std::string n2 = name + std::string(1, c);
          if (!kStmtKeywords.count(n2)) out.push_back({n2, t});
          next.push_back({std::move(n2), t});
        }
      }
      frontier = std::move(next);
    }
    return out;
  }

  struct NumRead {
    std::string lit;           // digits when no bulk was consumed
    std::optional<Dfa> lang;   // numeral language once a bulk joins in
    int at;
  };

  void scan_number(int s, std::vector<NumRead>& out) {
    std::vector<NumRead> frontier{{"", std::nullopt, s}};
    Dfa digit_star = chars_star("0123456789");
    while (!frontier.empty()) {
      std::vector<NumRead> next;
      for (auto& r : frontier) {
        for (auto [c, t] : a_.chars[r.at]) {
          if (c < '0' || c > '9') continue;
          NumRead n2 = r;
          n2.lit.push_back(c);
          if (n2.lang) n2.lang = concat(*n2.lang, from_literal(std::string(1, c)));
          n2.at = t;
          if (!n2.lang && n2.lit.size() > 18) continue;  // lexer's literal cap
          out.push_back(n2);
          next.push_back(std::move(n2));
        }
        int idx = 0;
        for (const auto& [lang, t] : a_.bulks[r.at]) {
          int my_idx = idx++;
          Dfa slice = intersect(lang, digit_star);
          if (is_empty(slice)) continue;
          if (!is_empty(difference(slice, epsilon_language())))
            consumed_bulks.insert({r.at, my_idx});
          NumRead n2;
          n2.lit = "";
          Dfa base = r.lang ? *r.lang : from_literal(r.lit);
          n2.lang = minimize(concat(base, slice));
          n2.at = t;
          out.push_back(n2);
          next.push_back(std::move(n2));
        }
      }
      frontier = std::move(next);
    }
  }

  // Digit runs, possibly with pumped repetition folded in. Either a plain
  // literal or a bulk numeral whose language keeps only nonempty digit
  // words.
  ExprVars read_number(int s) {
    std::vector<NumRead> reads;
    scan_number(s, reads);
    ExprVars out;
    for (auto& r : reads) {
      if (!r.lang) {
        if (!r.lit.empty()) out.push_back({int_lit(std::stoll(r.lit)), r.at});
        continue;
      }
      Dfa numerals = minimize(intersect(*r.lang, digits_nonempty()));
      if (!is_empty(numerals)) out.push_back({bulk_num(numerals), r.at});
    }
    return out;
  }

  ExprVars read_string(int s) {
    ExprVars out;
    static const Dfa contents_star = chars_star(printable_without_quote());
    struct StrRead {
      std::string text;
      std::optional<Dfa> lang;
      int at;
    };
    std::vector<StrRead> frontier;
    for (int t : follow(s, '"')) frontier.push_back({"", std::nullopt, t});
    while (!frontier.empty()) {
      std::vector<StrRead> next;
      for (auto& r : frontier) {
        for (int t : follow(r.at, '"')) {
          if (r.lang)
            out.push_back({bulk_str(minimize(*r.lang)), t});
          else
            out.push_back({str_lit(r.text), t});
        }
        for (auto [c, t] : a_.chars[r.at]) {
          if (c == '"') continue;
          StrRead n2 = r;
          n2.text.push_back(c);
          if (n2.lang) n2.lang = concat(*n2.lang, from_literal(std::string(1, c)));
          n2.at = t;
          next.push_back(std::move(n2));
        }
        int idx = 0;
        for (const auto& [lang, t] : a_.bulks[r.at]) {
          int my_idx = idx++;
          Dfa slice = intersect(lang, contents_star);
          if (is_empty(slice)) continue;
          if (!is_empty(difference(slice, epsilon_language())))
            consumed_bulks.insert({r.at, my_idx});
          StrRead n2;
          Dfa base = r.lang ? *r.lang : from_literal(r.text);
          n2.lang = minimize(concat(base, slice));
          n2.at = t;
          next.push_back(std::move(n2));
        }
      }
      frontier = std::move(next);
    }
    return out;
  }

  // ---- expression grammar, mirroring the text parser's precedence ----
  // 0 conjunction, 1 negation, 2 comparison, 3 additive, 4 multiplicative.

  void add_variant(std::map<std::pair<std::string, int>, Expr>& acc, Expr e, int at) {
    acc.emplace(std::make_pair(render_expr(e), at), std::move(e));
  }

  ExprVars expr(int q, int lvl) {
    auto key = std::make_pair(q, lvl);
    auto it = memo_expr_.find(key);
    if (it != memo_expr_.end()) return it->second;
    memo_expr_[key] = {};  // cut off accidental re-entry; the graph is acyclic
    std::map<std::pair<std::string, int>, Expr> acc;
    switch (lvl) {
      case 0: {
        // Left-associative closure over '&&'.
        std::vector<std::pair<Expr, int>> grow(expr(q, 1));
        std::set<std::pair<std::string, int>> in_grow;
        for (auto& [e, s] : grow) {
          add_variant(acc, e, s);
          in_grow.insert({render_expr(e), s});
        }
        for (size_t i = 0; i < grow.size(); ++i) {
          auto [e, s] = grow[i];
          for (int t : ws(s))
            for (int u : match_text(t, "&&"))
              for (auto& [e2, s2] : expr(u, 1)) {
                Expr joined = binary(ExprKind::And, Expr(e), Expr(e2));
                add_variant(acc, joined, s2);
                if (in_grow.insert({render_expr(joined), s2}).second)
                  grow.push_back({std::move(joined), s2});
              }
        }
        break;
      }
      case 1: {
        for (auto& [e, s] : expr(q, 2)) add_variant(acc, e, s);
        for (int t : ws(q))
          for (int u : follow(t, '!'))
            for (auto& [e, s] : expr(u, 1)) add_variant(acc, not_of(Expr(e)), s);
        break;
      }
      case 2: {
        for (auto& [e, s] : expr(q, 3)) {
          add_variant(acc, e, s);
          for (int t : ws(s)) {
            for (auto [c, u] : a_.chars[t]) {
              ExprKind k;
              if (c == '=')
                k = ExprKind::CmpEq;
              else if (c == '<')
                k = ExprKind::CmpLt;
              else if (c == '>')
                k = ExprKind::CmpGt;
              else
                continue;
              for (auto& [e2, s2] : expr(u, 3))
                add_variant(acc, binary(k, Expr(e), Expr(e2)), s2);
            }
          }
        }
        break;
      }
      case 3: {
        std::vector<std::pair<Expr, int>> grow(expr(q, 4));
        std::set<std::pair<std::string, int>> in_grow;
        for (auto& [e, s] : grow) {
          add_variant(acc, e, s);
          in_grow.insert({render_expr(e), s});
        }
        for (size_t i = 0; i < grow.size(); ++i) {
          auto [e, s] = grow[i];
          for (int t : ws(s)) {
            for (auto [c, u] : a_.chars[t]) {
              if (c != '+' && c != '-') continue;
              ExprKind k = c == '+' ? ExprKind::Add : ExprKind::Sub;
              for (auto& [e2, s2] : expr(u, 4)) {
                Expr joined = binary(k, Expr(e), Expr(e2));
                add_variant(acc, joined, s2);
                if (in_grow.insert({render_expr(joined), s2}).second)
                  grow.push_back({std::move(joined), s2});
              }
            }
          }
        }
        break;
      }
      default: {
        std::vector<std::pair<Expr, int>> grow(atom(q));
        std::set<std::pair<std::string, int>> in_grow;
        for (auto& [e, s] : grow) {
          add_variant(acc, e, s);
          in_grow.insert({render_expr(e), s});
        }
        for (size_t i = 0; i < grow.size(); ++i) {
          auto [e, s] = grow[i];
          for (int t : ws(s))
            for (int u : follow(t, '*'))
              for (auto& [e2, s2] : atom(u)) {
                Expr joined = binary(ExprKind::Mul, Expr(e), Expr(e2));
                add_variant(acc, joined, s2);
                if (in_grow.insert({render_expr(joined), s2}).second)
                  grow.push_back({std::move(joined), s2});
              }
        }
        break;
      }
    }
    ExprVars out;
    for (auto& [k2, e] : acc) out.push_back({std::move(e), k2.second});
    memo_expr_[key] = out;
    return out;
  }

  ExprVars atom(int q) {
    std::map<std::pair<std::string, int>, Expr> acc;
    for (int s : ws(q)) {
      for (auto& [e, at] : read_number(s)) add_variant(acc, e, at);
      for (int t : follow(s, '-'))
        for (int u : ws(t))
          for (auto& [e, at] : read_number(u)) {
            if (e.kind == ExprKind::IntLit)
              add_variant(acc, int_lit(-e.int_val), at);
            else
              add_variant(acc, binary(ExprKind::Sub, int_lit(0), Expr(e)), at);
          }
      for (auto& [e, at] : read_string(s)) add_variant(acc, e, at);
      for (int t : match_text(s, "true")) add_variant(acc, bool_lit(true), t);
      for (int t : match_text(s, "false")) add_variant(acc, bool_lit(false), t);
      for (auto& [name, t] : read_ident(s)) add_variant(acc, var_ref(name), t);
      for (int t : match_text(s, "substr"))
        for (int t2 : ws(t))
          for (int p : follow(t2, '('))
            for (auto& [e1, s1] : expr(p, 0))
              for (int c1 : ws(s1))
                for (int p2 : follow(c1, ','))
                  for (auto& [e2, s2] : expr(p2, 0))
                    for (int c2 : ws(s2))
                      for (int p3 : follow(c2, ','))
                        for (auto& [e3, s3] : expr(p3, 0))
                          for (int c3 : ws(s3))
                            for (int fin : follow(c3, ')'))
                              add_variant(acc,
                                          substr_of(Expr(e1), Expr(e2), Expr(e3)),
                                          fin);
      for (int p : follow(s, '('))
        for (auto& [e, s1] : expr(p, 0))
          for (int c : ws(s1))
            for (int fin : follow(c, ')')) add_variant(acc, e, fin);
    }
    ExprVars out;
    for (auto& [k, e] : acc) out.push_back({std::move(e), k.second});
    return out;
  }

  // ---- statement terminators ----

  // A primitive statement ending at `e` may consume ';', stop before '}',
  // or stop where the word ends.
  std::set<Span> term_variants(int e) {
    std::set<Span> out;
    for (int t : ws(e)) {
      if (a_.accepting[t]) out.insert({t, How::AtAccept});
      for (auto [c, u] : a_.chars[t]) {
        if (c == ';') out.insert({u, How::Terminated});
        if (c == '}') out.insert({t, How::AtBrace});
      }
    }
    return out;
  }

  // After a block statement the separator is optional in every position.
  std::set<Span> term_variants_block(int ab) {
    std::set<Span> out = term_variants(ab);
    out.insert({ab, How::BareBlock});
    return out;
  }

  // ---- statement forms ----

  void finish_primitive(int q, std::optional<EdgeLabel> label, int end,
                        std::set<Span>& out) {
    for (const Span& sp : term_variants(end)) {
      if (label)
        emit(q, *label, end);
      else
        merge(q, end);  // skip reads collapse onto one point
      merge(end, sp.resume);
      out.insert(sp);
    }
  }

  void read_skip(int q, int s, std::set<Span>& out) {
    for (int e : match_text(s, "skip")) finish_primitive(q, std::nullopt, e, out);
  }

  void read_assign(int q, int s, std::set<Span>& out) {
    for (auto& [name, s1] : read_ident(s)) {
      for (int t : ws(s1)) {
        std::vector<int> after_op = match_text(t, ":=");
        for (int u : follow(t, '=')) after_op.push_back(u);
        for (int u : after_op)
          for (auto& [e, s2] : expr(u, 0))
            finish_primitive(q, EdgeLabel::assign(name, Expr(e)), s2, out);
      }
    }
  }

  void read_eval(int q, int s, std::set<Span>& out) {
    for (int t : match_text(s, "eval"))
      for (int t2 : ws(t))
        for (int p : follow(t2, '('))
          for (auto& [arg, s2] : expr(p, 0))
            for (int c : ws(s2))
              for (int fin : follow(c, ')'))
                finish_primitive(q, EdgeLabel::eval(Expr(arg)), fin, out);
  }

  // Block contents: one or more statements, then the closing brace. Yields
  // (last statement's resume, state after '}').
  const std::vector<std::pair<int, int>>& block(int q0) {
    auto it = memo_block_.find(q0);
    if (it != memo_block_.end()) return it->second;
    memo_block_[q0] = {};
    std::set<std::pair<int, int>> out;
    for (const Span& sp : stmt_spans(q0)) {
      if (sp.how == How::AtAccept) continue;
      for (int t : ws(sp.resume))
        for (int u : follow(t, '}')) out.insert({sp.resume, u});
      if (sp.how == How::Terminated || sp.how == How::BareBlock)
        for (auto& [r2, ab2] : block(sp.resume)) out.insert({r2, ab2});
    }
    return memo_block_
        .insert_or_assign(q0, std::vector<std::pair<int, int>>(out.begin(), out.end()))
        .first->second;
  }

  void read_if(int q, int s, std::set<Span>& out) {
    for (int t : match_text(s, "if"))
      for (int t2 : ws(t))
        for (int g : follow(t2, '('))
          for (auto& [cond, s1] : expr(g, 0))
            for (int c : ws(s1))
              for (int p : follow(c, ')'))
                for (int p2 : ws(p))
                  for (int thenq : follow(p2, '{'))
                    for (auto& [tend, tab] : block(thenq)) {
                      std::vector<int> else_opens;
                      for (int x : ws(tab)) {
                        for (int eo : follow(x, '{')) else_opens.push_back(eo);
                        for (int y : match_text(x, "else"))
                          for (int y2 : ws(y))
                            for (int eo : follow(y2, '{')) else_opens.push_back(eo);
                      }
                      for (int elseq : else_opens)
                        for (auto& [eend, eab] : block(elseq))
                          for (const Span& sp : term_variants_block(eab)) {
                            emit(q, EdgeLabel::guard(Expr(cond), true), thenq);
                            emit(q, EdgeLabel::guard(Expr(cond), false), elseq);
                            merge(tend, eab);
                            merge(eend, eab);
                            merge(eab, sp.resume);
                            out.insert(sp);
                          }
                    }
  }

  void read_while(int q, int s, std::set<Span>& out) {
    bool synthetic = a_.synthetic_whiles.count(s) > 0;
    for (int t : match_text(s, "while"))
      for (int t2 : ws(t))
        for (int g : follow(t2, '('))
          for (auto& [cond0, s1] : expr(g, 0))
            for (int c : ws(s1))
              for (int p : follow(c, ')'))
                for (int p2 : ws(p))
                  for (int bodyq : follow(p2, '{'))
                    for (auto& [bend, bab] : block(bodyq))
                      for (const Span& sp : term_variants_block(bab)) {
                        Expr cond = synthetic ? abs_bool(bool_both()) : Expr(cond0);
                        emit(q, EdgeLabel::guard(Expr(cond), true), bodyq);
                        emit(q, EdgeLabel::guard(Expr(cond), false), bab);
                        merge(bend, q);
                        merge(bab, sp.resume);
                        out.insert(sp);
                      }
  }
};

struct StateUnion {
  std::vector<int> parent;
  explicit StateUnion(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
};

// Numeral language of a literal leaf, when it has one.
std::optional<Dfa> leaf_language(const Expr& e) {
  if (e.kind == ExprKind::IntLit && e.int_val >= 0)
    return from_literal(std::to_string(e.int_val));
  if (e.kind == ExprKind::BulkNum) return *e.lang;
  if (e.kind == ExprKind::StrLit) return from_literal(e.text);
  if (e.kind == ExprKind::BulkStr) return *e.lang;
  return std::nullopt;
}

bool numeric_leaf(const Expr& e) {
  return e.kind == ExprKind::IntLit || e.kind == ExprKind::BulkNum;
}

bool string_leaf(const Expr& e) {
  return e.kind == ExprKind::StrLit || e.kind == ExprKind::BulkStr;
}

// Two expressions equal up to corresponding literal-or-bulk leaves fold into
// one with the leaf languages joined; used to reabsorb the duplicate reads
// that cycle reduction leaves behind. Requires at least one bulk leaf
// somewhere, so unrelated parallel edges stay apart.
std::optional<Expr> fold_modulo_leaves(const Expr& a, const Expr& b, bool& saw_bulk) {
  if ((numeric_leaf(a) && numeric_leaf(b)) || (string_leaf(a) && string_leaf(b))) {
    if (expr_equal(a, b)) return Expr(a);
    bool either_bulk = a.kind == ExprKind::BulkNum || b.kind == ExprKind::BulkNum ||
                       a.kind == ExprKind::BulkStr || b.kind == ExprKind::BulkStr;
    if (!either_bulk) return std::nullopt;
    auto la = leaf_language(a);
    auto lb = leaf_language(b);
    if (!la || !lb) return std::nullopt;
    saw_bulk = true;
    Dfa joined = minimize(lang_union(*la, *lb));
    return numeric_leaf(a) ? bulk_num(joined) : bulk_str(joined);
  }
  if (a.kind != b.kind || a.text != b.text || a.kids.size() != b.kids.size())
    return expr_equal(a, b) ? std::optional<Expr>(Expr(a)) : std::nullopt;
  if (a.kind == ExprKind::AbsNum || a.kind == ExprKind::AbsBool ||
      a.kind == ExprKind::AbsStr || a.kind == ExprKind::BoolLit)
    return expr_equal(a, b) ? std::optional<Expr>(Expr(a)) : std::nullopt;
  Expr out = a;
  for (size_t i = 0; i < a.kids.size(); ++i) {
    auto k = fold_modulo_leaves(a.kids[i], b.kids[i], saw_bulk);
    if (!k) return std::nullopt;
    out.kids[i] = std::move(*k);
  }
  return out;
}

std::optional<EdgeLabel> fold_labels(const EdgeLabel& a, const EdgeLabel& b) {
  if (a.kind != b.kind || a.var != b.var || a.positive != b.positive)
    return std::nullopt;
  bool saw_bulk = false;
  auto e = fold_modulo_leaves(a.expr, b.expr, saw_bulk);
  if (!e || !saw_bulk) return std::nullopt;
  EdgeLabel out = a;
  out.expr = std::move(*e);
  return out;
}

}  // namespace

ReadPieces reduce_stmts(const ExtendedDfa& a, int q) {
  StmtReader reader(a);
  for (const auto& sp : reader.stmt_spans(q)) reader.note_top_level(sp);
  return reader.pieces;
}

SynthesizedCfg synthesize_cfg(const Dfa& a) {
  ExtendedDfa ext = reduce_cycles(a);
  StmtReader reader(ext);

  std::set<int> visited;
  std::vector<int> work{ext.initial};
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    if (!visited.insert(q).second) continue;
    for (const auto& sp : reader.stmt_spans(q)) {
      reader.note_top_level(sp);
      if (sp.how == StmtReader::How::Terminated || sp.how == StmtReader::How::BareBlock)
        work.push_back(sp.resume);
    }
  }

  const ReadPieces& pieces = reader.pieces;

  StateUnion dsu(ext.num_states());
  for (auto [x, y] : pieces.merges) dsu.unite(x, y);

  // Collapse to representative states, folding parallel reads that differ
  // only in pumped literal leaves.
  std::map<std::pair<int, int>, std::vector<EdgeLabel>> grouped;
  for (const auto& e : pieces.edges)
    grouped[{dsu.find(e.from), dsu.find(e.to)}].push_back(e.label);
  for (auto& [key, labels] : grouped) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < labels.size() && !changed; ++i)
        for (size_t j = i + 1; j < labels.size() && !changed; ++j) {
          if (auto folded = fold_labels(labels[i], labels[j])) {
            labels[i] = std::move(*folded);
            labels.erase(labels.begin() + static_cast<long>(j));
            changed = true;
          }
        }
    }
    std::set<std::string> seen;
    std::vector<EdgeLabel> unique;
    for (auto& l : labels)
      if (seen.insert(edge_label_name(l)).second) unique.push_back(std::move(l));
    labels = std::move(unique);
  }

  SynthesizedCfg out;
  out.origin = minimize(a);

  Cfg& g = out.graph;
  g.entry = synthesized_label(dsu.find(ext.initial));
  g.nodes.insert(g.entry);
  for (auto& [key, labels] : grouped) {
    g.nodes.insert(synthesized_label(key.first));
    g.nodes.insert(synthesized_label(key.second));
    for (auto& l : labels)
      g.edges.push_back({synthesized_label(key.first), std::move(l),
                         synthesized_label(key.second)});
  }
  for (int e : pieces.ends) {
    int rep = dsu.find(e);
    g.exits.insert(synthesized_label(rep));
    g.nodes.insert(synthesized_label(rep));
  }

  // A reachable bulk transition no read ever consumed hides words the graph
  // does not cover.
  std::set<int> reach;
  std::vector<int> bfs{ext.initial};
  while (!bfs.empty()) {
    int s = bfs.back();
    bfs.pop_back();
    if (!reach.insert(s).second) continue;
    for (auto [c, t] : ext.chars[s]) bfs.push_back(t);
    for (const auto& [lang, t] : ext.bulks[s]) bfs.push_back(t);
  }
  for (int s : reach) {
    for (size_t i = 0; i < ext.bulks[s].size(); ++i)
      if (!reader.consumed_bulks.count({s, static_cast<int>(i)})) out.opaque_bulk = true;
  }

  if (g.exits.empty()) {
    if (out.opaque_bulk)
      throw UnreducibleCycles("pumped content unreadable as code blocks every path");
    throw NoExecutablePath("the automaton spells no complete program");
  }
  return out;
}

}  // namespace impan
