#include "impan/abstraction.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "impan/dfa.hpp"
#include "impan/render.hpp"

namespace impan {

namespace {

// ---- structural identity keys, for dedup and deterministic ordering ----

std::string expr_key(const Expr& e) {
  std::string k = std::to_string(static_cast<int>(e.kind));
  switch (e.kind) {
    case ExprKind::IntLit: k += "#" + std::to_string(e.int_val); break;
    case ExprKind::BoolLit: k += e.bool_val ? "#t" : "#f"; break;
    case ExprKind::StrLit:
    case ExprKind::Var: k += "#" + e.text; break;
    case ExprKind::AbsNum: k += "#" + sign_name(e.sign); break;
    case ExprKind::AbsBool: k += "#" + bool_set_name(e.bools); break;
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
    case ExprKind::BulkNum: k += "#" + canonical_key(*e.lang); break;
    default: break;
  }
  for (auto& kid : e.kids) k += "(" + expr_key(kid) + ")";
  return k;
}

std::string label_key(const EdgeLabel& l) {
  switch (l.kind) {
    case EdgeKind::Assign: return "a:" + l.var + ":" + expr_key(l.expr);
    case EdgeKind::Guard: return std::string(l.positive ? "g+:" : "g-:") + expr_key(l.expr);
    case EdgeKind::Eval: return "e:" + expr_key(l.expr);
  }
  return "";
}

// ---- numeral word languages per sign ----

const Dfa& digit_words() {
  static const Dfa d = digits_nonempty();
  return d;
}

const Dfa& zero_words() {
  static const Dfa d = zeros_nonempty();
  return d;
}

const Dfa& positive_words() {
  static const Dfa d = difference(digits_nonempty(), zeros_nonempty());
  return d;
}

// Canonical spellings of the positive integers.
const Dfa& canonical_positive_words() {
  static const Dfa d = concat(one_of("123456789"), chars_star("0123456789"));
  return d;
}

// Digit words whose value has sign s. Bulk numeral languages hold unsigned
// words only, so the negative slice is empty.
Dfa sign_words(Sign s) {
  switch (s) {
    case Sign::Zero: return zero_words();
    case Sign::Pos: return positive_words();
    case Sign::Top: return digit_words();
    default: return empty_language();
  }
}

std::optional<long long> numeral_value(const std::string& w) {
  if (w.empty()) return std::nullopt;
  for (char c : w)
    if (c < '0' || c > '9') return std::nullopt;
  return std::stoll(w);
}

// ---- leaf sorts ----

enum class Leaf { Int, Bool, Str, Var, None };

Leaf leaf_sort(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::AbsNum:
    case ExprKind::BulkNum: return Leaf::Int;
    case ExprKind::BoolLit:
    case ExprKind::AbsBool: return Leaf::Bool;
    case ExprKind::StrLit:
    case ExprKind::AbsStr:
    case ExprKind::BulkStr: return Leaf::Str;
    case ExprKind::Var: return Leaf::Var;
    default: return Leaf::None;
  }
}

int leaf_rank(ExprKind k) {
  switch (k) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit: return 0;
    case ExprKind::AbsNum:
    case ExprKind::AbsBool:
    case ExprKind::AbsStr: return 1;
    default: return 2;  // BulkNum, BulkStr
  }
}

// ---- meets on leaf meanings; nullopt means the intersection is empty ----

std::optional<Expr> int_leaf_meet(const Expr& a, const Expr& b) {
  const Expr& lo = leaf_rank(a.kind) <= leaf_rank(b.kind) ? a : b;
  const Expr& hi = &lo == &a ? b : a;
  if (lo.kind == ExprKind::IntLit) {
    bool in = false;
    switch (hi.kind) {
      case ExprKind::IntLit: in = lo.int_val == hi.int_val; break;
      case ExprKind::AbsNum: in = sign_leq(sign_of(lo.int_val), hi.sign); break;
      default: in = accepts(*hi.lang, std::to_string(lo.int_val)); break;
    }
    if (!in) return std::nullopt;
    return lo;
  }
  if (lo.kind == ExprKind::AbsNum) {
    if (hi.kind == ExprKind::AbsNum) {
      Sign m = sign_meet(lo.sign, hi.sign);
      if (m == Sign::Bot) return std::nullopt;
      return abs_num(m);
    }
    Dfa cut = intersect(*hi.lang, sign_words(lo.sign));
    if (is_empty(cut)) return std::nullopt;
    return bulk_num(cut);
  }
  Dfa cut = intersect(*lo.lang, *hi.lang);
  if (is_empty(cut)) return std::nullopt;
  return bulk_num(cut);
}

std::optional<Expr> bool_leaf_meet(const Expr& a, const Expr& b) {
  const Expr& lo = leaf_rank(a.kind) <= leaf_rank(b.kind) ? a : b;
  const Expr& hi = &lo == &a ? b : a;
  if (lo.kind == ExprKind::BoolLit) {
    bool in = hi.kind == ExprKind::BoolLit ? lo.bool_val == hi.bool_val
                                           : (lo.bool_val ? hi.bools.can_true : hi.bools.can_false);
    if (!in) return std::nullopt;
    return lo;
  }
  BoolSet m = bool_meet(lo.bools, hi.bools);
  if (!m.can_true && !m.can_false) return std::nullopt;
  return abs_bool(m);
}

std::optional<Expr> str_leaf_meet(const Expr& a, const Expr& b) {
  const Expr& lo = leaf_rank(a.kind) <= leaf_rank(b.kind) ? a : b;
  const Expr& hi = &lo == &a ? b : a;
  if (lo.kind == ExprKind::StrLit) {
    bool in = hi.kind == ExprKind::StrLit ? lo.text == hi.text : accepts(*hi.lang, lo.text);
    if (!in) return std::nullopt;
    return lo;
  }
  Dfa cut = intersect(*lo.lang, *hi.lang);
  if (is_empty(cut)) return std::nullopt;
  bool both_bulk = lo.kind == ExprKind::BulkStr && hi.kind == ExprKind::BulkStr;
  return both_bulk ? bulk_str(cut) : abs_str(cut);
}

std::optional<Expr> expr_meet(const Expr& a, const Expr& b) {
  Leaf la = leaf_sort(a), lb = leaf_sort(b);
  if (la == Leaf::None && lb == Leaf::None) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return std::nullopt;
    Expr out = a;
    for (size_t i = 0; i < a.kids.size(); ++i) {
      auto m = expr_meet(a.kids[i], b.kids[i]);
      if (!m) return std::nullopt;
      out.kids[i] = std::move(*m);
    }
    return out;
  }
  if (la != lb) return std::nullopt;
  switch (la) {
    case Leaf::Int: return int_leaf_meet(a, b);
    case Leaf::Bool: return bool_leaf_meet(a, b);
    case Leaf::Str: return str_leaf_meet(a, b);
    case Leaf::Var:
      if (a.text == b.text) return a;
      return std::nullopt;
    default: return std::nullopt;
  }
}

// ---- coverage on leaf meanings: does a's set contain b's? ----

bool int_leaf_covers(const Expr& a, const Expr& b) {
  switch (a.kind) {
    case ExprKind::IntLit:
      switch (b.kind) {
        case ExprKind::IntLit: return a.int_val == b.int_val;
        case ExprKind::AbsNum: return b.sign == Sign::Zero && a.int_val == 0;
        default: return includes(from_literal(std::to_string(a.int_val)), *b.lang);
      }
    case ExprKind::AbsNum:
      switch (b.kind) {
        case ExprKind::IntLit: return sign_leq(sign_of(b.int_val), a.sign);
        case ExprKind::AbsNum: return sign_leq(b.sign, a.sign);
        default: return is_empty(difference(*b.lang, sign_words(a.sign)));
      }
    default:
      switch (b.kind) {
        case ExprKind::IntLit: return accepts(*a.lang, std::to_string(b.int_val));
        case ExprKind::AbsNum:
          // Only the canonical spellings of the sign's values can be asked
          // for; negatives have no spelling in a digit language.
          if (b.sign == Sign::Zero) return accepts(*a.lang, "0");
          if (b.sign == Sign::Pos) return includes(*a.lang, canonical_positive_words());
          return false;
        default: return includes(*a.lang, *b.lang);
      }
  }
}

bool bool_leaf_covers(const Expr& a, const Expr& b) {
  BoolSet sa = a.kind == ExprKind::BoolLit ? bool_only(a.bool_val) : a.bools;
  BoolSet sb = b.kind == ExprKind::BoolLit ? bool_only(b.bool_val) : b.bools;
  return bool_leq(sb, sa);
}

bool str_leaf_covers(const Expr& a, const Expr& b) {
  if (a.kind == ExprKind::StrLit) {
    if (b.kind == ExprKind::StrLit) return a.text == b.text;
    return includes(from_literal(a.text), *b.lang);
  }
  if (b.kind == ExprKind::StrLit) return accepts(*a.lang, b.text);
  return includes(*a.lang, *b.lang);
}

bool expr_covers(const Expr& a, const Expr& b) {
  Leaf la = leaf_sort(a), lb = leaf_sort(b);
  if (la == Leaf::None && lb == Leaf::None) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
      if (!expr_covers(a.kids[i], b.kids[i])) return false;
    return true;
  }
  if (la != lb) return false;
  switch (la) {
    case Leaf::Int: return int_leaf_covers(a, b);
    case Leaf::Bool: return bool_leaf_covers(a, b);
    case Leaf::Str: return str_leaf_covers(a, b);
    case Leaf::Var: return a.text == b.text;
    default: return false;
  }
}

bool label_heads_match(const EdgeLabel& a, const EdgeLabel& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == EdgeKind::Assign && a.var != b.var) return false;
  if (a.kind == EdgeKind::Guard && a.positive != b.positive) return false;
  return true;
}

EdgeLabel rewrap(const EdgeLabel& proto, Expr e) {
  switch (proto.kind) {
    case EdgeKind::Assign: return EdgeLabel::assign(proto.var, std::move(e));
    case EdgeKind::Guard: return EdgeLabel::guard(std::move(e), proto.positive);
    default: return EdgeLabel::eval(std::move(e));
  }
}

void expr_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) out.insert(e.text);
  for (auto& k : e.kids) expr_vars(k, out);
}

// ---- per-leaf abstraction classes ----

std::vector<Expr> expr_classes(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: return {abs_num(sign_of(e.int_val))};
    case ExprKind::BoolLit: return {abs_bool(bool_only(e.bool_val))};
    case ExprKind::StrLit: return {abs_str(from_literal(e.text))};
    case ExprKind::Var:
    case ExprKind::AbsNum:
    case ExprKind::AbsBool:
    case ExprKind::AbsStr: return {e};
    case ExprKind::BulkStr: return {abs_str(*e.lang)};
    case ExprKind::BulkNum: {
      // Non-numeral words denote no label, so only the value signs that are
      // actually inhabited contribute a class.
      std::vector<Expr> out;
      if (!is_empty(intersect(*e.lang, positive_words()))) out.push_back(abs_num(Sign::Pos));
      if (!is_empty(intersect(*e.lang, zero_words()))) out.push_back(abs_num(Sign::Zero));
      return out;
    }
    default: {
      std::vector<std::vector<Expr>> kid_classes;
      kid_classes.reserve(e.kids.size());
      for (auto& k : e.kids) kid_classes.push_back(expr_classes(k));
      std::vector<Expr> out;
      Expr cur = e;
      std::function<void(size_t)> walk = [&](size_t i) {
        if (i == kid_classes.size()) {
          out.push_back(cur);
          return;
        }
        for (auto& c : kid_classes[i]) {
          cur.kids[i] = c;
          walk(i + 1);
        }
      };
      walk(0);
      return out;
    }
  }
}

std::vector<EdgeLabel> dedup_labels(std::vector<EdgeLabel> ls) {
  std::vector<EdgeLabel> out;
  std::set<std::string> seen;
  for (auto& l : ls)
    if (seen.insert(label_key(l)).second) out.push_back(std::move(l));
  return out;
}

struct Dsu {
  std::vector<size_t> parent;

  explicit Dsu(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = i;
  }

  size_t find(size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

std::vector<EdgeLabel> collect_universe(const Cfg& g) {
  std::vector<EdgeLabel> u;
  std::set<std::string> seen;
  for (auto& e : g.edges)
    if (seen.insert(label_key(e.label)).second) u.push_back(e.label);
  return u;
}

}  // namespace

bool label_equal(const AbstractLabel& a, const AbstractLabel& b) { return edge_label_eq(a, b); }

std::optional<AbstractLabel> label_meet(const AbstractLabel& a, const AbstractLabel& b) {
  if (!label_heads_match(a, b)) return std::nullopt;
  auto m = expr_meet(a.expr, b.expr);
  if (!m) return std::nullopt;
  return rewrap(a, std::move(*m));
}

bool labels_intersect(const AbstractLabel& a, const AbstractLabel& b) {
  return label_meet(a, b).has_value();
}

bool label_covers(const AbstractLabel& a, const AbstractLabel& b) {
  return label_heads_match(a, b) && expr_covers(a.expr, b.expr);
}

Expr rho_hat(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: return abs_num(sign_of(e.int_val));
    case ExprKind::BoolLit: return abs_bool(bool_only(e.bool_val));
    case ExprKind::StrLit: return abs_str(from_literal(e.text));
    case ExprKind::Var:
    case ExprKind::AbsNum:
    case ExprKind::AbsBool:
    case ExprKind::AbsStr: return e;
    case ExprKind::BulkStr: return abs_str(*e.lang);
    case ExprKind::BulkNum: return abs_num(numeral_language_sign(*e.lang));
    default: {
      Expr out = e;
      for (auto& k : out.kids) k = rho_hat(k);
      return out;
    }
  }
}

AbstractLabel upsilon(const EdgeLabel& l) { return rewrap(l, rho_hat(l.expr)); }

std::vector<AbstractLabel> upsilon_image(const EdgeLabel& l) {
  std::vector<AbstractLabel> out;
  for (auto& e : expr_classes(l.expr)) out.push_back(rewrap(l, e));
  return dedup_labels(std::move(out));
}

bool shapes_cover_label(const std::vector<AbstractLabel>& shapes, const EdgeLabel& l) {
  for (auto& cls : upsilon_image(l)) {
    bool hit = false;
    for (auto& s : shapes)
      if (label_covers(s, cls)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

std::string block_name(const LabelBlock& b) {
  const auto& ls = b.shapes.empty() ? b.pieces : b.shapes;
  if (ls.empty()) return "{}";
  if (ls.size() == 1) return edge_label_name(ls[0]);
  std::string out = "{";
  for (size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ", ";
    out += edge_label_name(ls[i]);
  }
  return out + "}";
}

std::optional<std::size_t> block_of(const LabelPartition& p, const EdgeLabel& l) {
  for (size_t i = 0; i < p.blocks.size(); ++i)
    for (auto& piece : p.blocks[i].pieces)
      if (label_covers(piece, l)) return i;
  return std::nullopt;
}

LabelPartition eta_from_cfg(const SynthesizedCfg& p) {
  LabelPartition out;
  out.universe = collect_universe(p.graph);
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < out.universe.size(); ++i) idx[label_key(out.universe[i])] = i;

  std::map<std::pair<int, int>, std::set<size_t>> per_pair;
  for (auto& e : p.graph.edges) per_pair[{e.from, e.to}].insert(idx[label_key(e.label)]);
  std::set<std::set<size_t>> cand_set;
  for (auto& [_, s] : per_pair) cand_set.insert(s);
  std::vector<std::set<size_t>> cands(cand_set.begin(), cand_set.end());

  for (size_t i = 0; i < cands.size(); ++i) {
    bool clean = true;
    for (size_t j = 0; clean && j < cands.size(); ++j) {
      if (i == j) continue;
      for (size_t a : cands[i]) {
        for (size_t b : cands[j])
          if (labels_intersect(out.universe[a], out.universe[b])) {
            clean = false;
            break;
          }
        if (!clean) break;
      }
    }
    if (!clean) continue;
    LabelBlock blk;
    for (size_t a : cands[i]) blk.pieces.push_back(out.universe[a]);
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

LabelPartition restrict_upsilon(const SynthesizedCfg& p) {
  LabelPartition out;
  out.universe = collect_universe(p.graph);

  std::vector<AbstractLabel> shapes;
  std::map<std::string, size_t> shape_idx;
  std::vector<std::vector<size_t>> images(out.universe.size());
  for (size_t u = 0; u < out.universe.size(); ++u) {
    for (auto& cls : upsilon_image(out.universe[u])) {
      auto k = label_key(cls);
      auto it = shape_idx.find(k);
      if (it == shape_idx.end()) {
        it = shape_idx.emplace(k, shapes.size()).first;
        shapes.push_back(cls);
      }
      images[u].push_back(it->second);
    }
  }

  // A block per class, merged while classes overlap or a label straddles
  // several of them, so every label lands in exactly one block.
  Dsu dsu(shapes.size());
  for (size_t i = 0; i < shapes.size(); ++i)
    for (size_t j = i + 1; j < shapes.size(); ++j)
      if (labels_intersect(shapes[i], shapes[j])) dsu.unite(i, j);
  for (auto& img : images)
    for (size_t k = 1; k < img.size(); ++k) dsu.unite(img[0], img[k]);

  std::map<size_t, size_t> root_block;
  for (size_t i = 0; i < shapes.size(); ++i) {
    size_t r = dsu.find(i);
    auto it = root_block.find(r);
    if (it == root_block.end()) {
      it = root_block.emplace(r, out.blocks.size()).first;
      out.blocks.emplace_back();
    }
    out.blocks[it->second].shapes.push_back(shapes[i]);
  }
  for (size_t u = 0; u < out.universe.size(); ++u) {
    if (images[u].empty()) continue;
    out.blocks[root_block[dsu.find(images[u][0])]].pieces.push_back(out.universe[u]);
  }
  return out;
}

LabelPartition compose_complete(const LabelPartition& eta, const SynthesizedCfg& p) {
  LabelPartition out;
  out.universe = eta.universe.empty() ? collect_universe(p.graph) : eta.universe;

  size_t n = eta.blocks.size();
  std::vector<std::vector<AbstractLabel>> images(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<AbstractLabel> img = eta.blocks[i].shapes;
    for (auto& piece : eta.blocks[i].pieces)
      for (auto& cls : upsilon_image(piece)) img.push_back(cls);
    images[i] = dedup_labels(std::move(img));
  }

  Dsu dsu(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      bool hit = false;
      for (auto& a : images[i]) {
        for (auto& b : images[j])
          if (labels_intersect(a, b)) {
            hit = true;
            break;
          }
        if (hit) break;
      }
      if (hit) dsu.unite(i, j);
    }

  std::map<size_t, size_t> root_block;
  for (size_t i = 0; i < n; ++i) {
    size_t r = dsu.find(i);
    auto it = root_block.find(r);
    if (it == root_block.end()) {
      it = root_block.emplace(r, out.blocks.size()).first;
      out.blocks.emplace_back();
    }
    auto& blk = out.blocks[it->second];
    for (auto& piece : eta.blocks[i].pieces) blk.pieces.push_back(piece);
    for (auto& cls : images[i]) blk.shapes.push_back(cls);
  }
  for (auto& blk : out.blocks) {
    blk.pieces = dedup_labels(std::move(blk.pieces));
    blk.shapes = dedup_labels(std::move(blk.shapes));
  }
  return out;
}

LabelPartition identity_partition(const SynthesizedCfg& p) {
  LabelPartition out;
  out.universe = collect_universe(p.graph);
  for (auto& u : out.universe) {
    LabelBlock blk;
    blk.pieces.push_back(u);
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

namespace {

// ---- the grid check ----

constexpr long long kEffectFuel = 2000000;
constexpr size_t kFamilyCap = 600;
constexpr size_t kMemoryCap = 48;
constexpr long long kMagnitudeCap = 200;
constexpr int kWordCap = 12;
constexpr size_t kViolationCap = 200;

int numeral_digits(const Bounds& b) {
  long long m = std::max(std::llabs(b.int_lo), std::llabs(b.int_hi));
  return static_cast<int>(std::to_string(m).size()) + 1;
}

// All concrete expressions the leaves can draw, within bounds. nullopt when
// the family outgrows the cap.
std::optional<std::vector<Expr>> expr_family(const Expr& e, const Bounds& b) {
  std::vector<Expr> out;
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::Var: return std::vector<Expr>{e};
    case ExprKind::AbsNum:
      for (long long v = b.int_lo; v <= b.int_hi; ++v)
        if (sign_leq(sign_of(v), e.sign)) out.push_back(int_lit(v));
      return out;
    case ExprKind::AbsBool:
      if (e.bools.can_true) out.push_back(bool_lit(true));
      if (e.bools.can_false) out.push_back(bool_lit(false));
      return out;
    case ExprKind::AbsStr:
    case ExprKind::BulkStr:
      for (auto& w : enumerate(*e.lang, b.str_len)) out.push_back(str_lit(w));
      return out;
    case ExprKind::BulkNum: {
      std::set<long long> vals;
      for (auto& w : enumerate(*e.lang, numeral_digits(b)))
        if (auto v = numeral_value(w))
          if (*v >= b.int_lo && *v <= b.int_hi) vals.insert(*v);
      for (long long v : vals) out.push_back(int_lit(v));
      return out;
    }
    default: {
      std::vector<std::vector<Expr>> kid_fams;
      size_t total = 1;
      for (auto& k : e.kids) {
        auto f = expr_family(k, b);
        if (!f) return std::nullopt;
        total *= std::max<size_t>(f->size(), 1);
        if (total > kFamilyCap) return std::nullopt;
        kid_fams.push_back(std::move(*f));
      }
      Expr cur = e;
      std::function<bool(size_t)> walk = [&](size_t i) {
        if (i == kid_fams.size()) {
          out.push_back(cur);
          return out.size() <= kFamilyCap;
        }
        for (auto& c : kid_fams[i]) {
          cur.kids[i] = c;
          if (!walk(i + 1)) return false;
        }
        return true;
      };
      if (!walk(0)) return std::nullopt;
      return out;
    }
  }
}

std::optional<std::vector<EdgeLabel>> label_family(const EdgeLabel& l, const Bounds& b) {
  auto fam = expr_family(l.expr, b);
  if (!fam || fam->size() > kFamilyCap) return std::nullopt;
  std::vector<EdgeLabel> out;
  out.reserve(fam->size());
  for (auto& e : *fam) out.push_back(rewrap(l, std::move(e)));
  return out;
}

// One label's effect at the environment level. Both comparison sides funnel
// through this and get cartesianized once at the end, so neither side gains
// or loses correlation precision over the other. nullopt when the oracle
// runs out of fuel; the caller records a skip, never a verdict.
std::optional<MemorySet> label_envs(const EdgeLabel& l, const MemorySet& envs, const Bounds& b,
                                    long long& fuel) {
  try {
    switch (l.kind) {
      case EdgeKind::Assign: return assign_envs(l.var, l.expr, envs, b, fuel);
      case EdgeKind::Guard: return filter_envs(l.expr, l.positive, envs, b, fuel);
      case EdgeKind::Eval: return eval_envs(l.expr, envs, b, fuel);
    }
  } catch (const FuelExhausted&) {
    return std::nullopt;
  }
  return std::nullopt;
}

struct BlockBounds {
  Bounds wb;
  bool undecided = false;
};

// Bounds wide enough to separate every literal the block mentions: one past
// the largest literal magnitude, and strings long enough for the shortest
// word of every language.
BlockBounds bounds_for(const std::vector<const EdgeLabel*>& labels, const Bounds& grid) {
  BlockBounds bb{grid, false};
  long long mag = std::max(std::llabs(grid.int_lo), std::llabs(grid.int_hi));
  int slen = grid.str_len;
  std::function<void(const Expr&)> scan = [&](const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
        mag = std::max(mag, std::llabs(e.int_val) + 1);
        break;
      case ExprKind::StrLit:
        slen = std::max(slen, static_cast<int>(e.text.size()));
        break;
      case ExprKind::BulkNum: {
        auto ws = enumerate(digit_value_language(*e.lang), 4);
        if (ws.empty()) {
          bb.undecided = true;
        } else {
          auto v = numeral_value(ws.front());
          mag = std::max(mag, (v ? *v : kMagnitudeCap) + 1);
        }
        break;
      }
      case ExprKind::AbsStr:
      case ExprKind::BulkStr: {
        auto ws = enumerate(*e.lang, kWordCap);
        if (ws.empty())
          bb.undecided = true;
        else
          slen = std::max(slen, static_cast<int>(ws.front().size()));
        break;
      }
      default: break;
    }
    for (auto& k : e.kids) scan(k);
  };
  for (auto* l : labels) scan(l->expr);
  if (mag > kMagnitudeCap || slen > kWordCap) bb.undecided = true;
  bb.wb.int_lo = -mag;
  bb.wb.int_hi = mag;
  bb.wb.str_len = slen;
  return bb;
}

std::vector<Value> var_candidates(const std::vector<const EdgeLabel*>& labels, const Bounds& wb) {
  std::vector<Value> cands = {Value::of_sign(Sign::Pos), Value::of_sign(Sign::Neg),
                              Value::of_sign(Sign::Zero), Value::of_sign(Sign::Top),
                              Value::of_bools(bool_both()), Value::of_bools(bool_only(true))};
  std::vector<Dfa> samples;
  std::set<std::string> seen;
  std::function<void(const Expr&)> scan = [&](const Expr& e) {
    if (samples.size() < 2) {
      if (e.kind == ExprKind::StrLit && seen.insert("l" + e.text).second)
        samples.push_back(from_literal(e.text));
      if ((e.kind == ExprKind::AbsStr || e.kind == ExprKind::BulkStr) &&
          seen.insert(canonical_key(*e.lang)).second)
        samples.push_back(*e.lang);
    }
    for (auto& k : e.kids) scan(k);
  };
  for (auto* l : labels) scan(l->expr);
  while (samples.size() < 2 && wb.str_alphabet.size() >= samples.size() + 1)
    samples.push_back(from_literal(std::string(1, wb.str_alphabet[samples.size()])));
  for (auto& s : samples) cands.push_back(Value::of_lang(s));
  if (samples.size() == 2) cands.push_back(Value::of_lang(lang_union(samples[0], samples[1])));
  return cands;
}

std::string memory_name(const std::vector<std::string>& vars, const std::vector<Value>& vals) {
  if (vars.empty()) return "{}";
  std::string out = "{";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ", ";
    out += vars[i] + " ↦ " + value_name(vals[i]);
  }
  return out + "}";
}

}  // namespace

CompletenessReport check_completeness(const LabelPartition& eta, const Bounds& grid) {
  CompletenessReport rep;
  for (auto& blk : eta.blocks) {
    rep.blocks_checked++;
    const auto& basis = blk.shapes.empty() ? blk.pieces : blk.shapes;
    if (basis.empty()) continue;

    std::vector<const EdgeLabel*> mentioned;
    for (auto& l : blk.pieces) mentioned.push_back(&l);
    for (auto& l : blk.shapes) mentioned.push_back(&l);
    BlockBounds bb = bounds_for(mentioned, grid);
    if (bb.undecided) {
      rep.pairs_skipped++;
      continue;
    }
    const Bounds& wb = bb.wb;

    std::vector<EdgeLabel> family;
    bool capped = false;
    for (auto& e : basis) {
      auto lf = label_family(e, wb);
      if (!lf || family.size() + lf->size() > kFamilyCap) {
        capped = true;
        break;
      }
      for (auto& l : *lf) family.push_back(std::move(l));
    }
    if (capped) {
      rep.pairs_skipped++;
      continue;
    }
    family = dedup_labels(std::move(family));

    std::vector<AbstractLabel> classes = blk.shapes;
    if (classes.empty()) {
      for (auto& piece : blk.pieces)
        for (auto& cls : upsilon_image(piece)) classes.push_back(cls);
      classes = dedup_labels(std::move(classes));
    }

    std::set<std::string> var_set;
    for (auto* l : mentioned) {
      if (l->kind == EdgeKind::Assign) var_set.insert(l->var);
      expr_vars(l->expr, var_set);
    }
    std::vector<std::string> vars(var_set.begin(), var_set.end());
    std::vector<Value> cands = var_candidates(mentioned, wb);

    size_t total = 1;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (total > 4 * kMemoryCap * cands.size()) break;
      total *= cands.size();
    }
    size_t stride = (total + kMemoryCap - 1) / kMemoryCap;
    if (stride == 0) stride = 1;

    for (size_t t = 0; t < total; t += stride) {
      std::vector<Value> picked(vars.size());
      size_t rest = t;
      for (size_t i = 0; i < vars.size(); ++i) {
        picked[i] = cands[rest % cands.size()];
        rest /= cands.size();
      }
      CollectingMemory m;
      for (size_t i = 0; i < vars.size(); ++i) m.set(vars[i], gamma_bounded(picked[i], wb));
      if (m.is_bot()) continue;

      long long fuel = kEffectFuel;
      bool skipped = false;
      MemorySet start, lhs_envs, rhs_envs;
      try {
        start = expand_memory(m, fuel);
      } catch (const FuelExhausted&) {
        skipped = true;
      }
      for (auto& f : family) {
        if (skipped) break;
        auto outs = label_envs(f, start, wb, fuel);
        if (!outs) {
          skipped = true;
          break;
        }
        lhs_envs.insert(outs->begin(), outs->end());
      }
      for (auto& c : classes) {
        if (skipped) break;
        auto outs = label_envs(c, start, wb, fuel);
        if (!outs) {
          skipped = true;
          break;
        }
        rhs_envs.insert(outs->begin(), outs->end());
      }
      if (skipped) {
        rep.pairs_skipped++;
        continue;
      }
      rep.pairs_checked++;
      CollectingMemory lhs = to_cartesian(lhs_envs);
      CollectingMemory rhs = to_cartesian(rhs_envs);
      if (!coll_eq(lhs, rhs) && rep.violations.size() < kViolationCap)
        rep.violations.push_back({block_name(blk), memory_name(vars, picked), coll_name(lhs),
                                  coll_name(rhs)});
    }
  }
  return rep;
}

std::string completeness_report_json(const CompletenessReport& r) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto& v : r.violations) {
    nlohmann::ordered_json o;
    o["label"] = v.label;
    o["memory"] = v.memory;
    o["concrete-result"] = v.concrete_result;
    o["abstract-result"] = v.abstract_result;
    arr.push_back(std::move(o));
  }
  return arr.dump();
}

AbstractCfg abstract_cfg(const SynthesizedCfg& p, const LabelPartition& eta_up) {
  AbstractCfg out;
  out.entry = p.graph.entry;
  out.exits = p.graph.exits;
  out.nodes = p.graph.nodes;
  std::set<std::string> seen;
  for (auto& e : p.graph.edges) {
    auto bi = block_of(eta_up, e.label);
    std::string key = std::to_string(e.from) + "|" + std::to_string(e.to) + "|" +
                      (bi ? "b" + std::to_string(*bi) : "t" + label_key(e.label));
    if (!seen.insert(key).second) continue;
    AbstractEdge ae;
    ae.from = e.from;
    ae.to = e.to;
    ae.block = bi;
    if (bi) {
      auto& blk = eta_up.blocks[*bi];
      ae.labels = blk.shapes.empty() ? blk.pieces : blk.shapes;
    } else {
      ae.labels = {e.label};
    }
    out.edges.push_back(std::move(ae));
  }
  return out;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string abstract_cfg_to_dot(const AbstractCfg& g) {
  std::string out = "digraph acfg {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int n : g.nodes) {
    out += "  n" + std::to_string(n) + " [label=\"" + std::to_string(n) + "\"";
    if (g.exits.count(n)) out += ", shape=doublecircle";
    out += "];\n";
  }
  out += "  start [shape=point];\n  start -> n" + std::to_string(g.entry) + ";\n";
  for (auto& e : g.edges) {
    std::string name;
    for (size_t i = 0; i < e.labels.size(); ++i) {
      if (i) name += " ∨ ";
      name += edge_label_name(e.labels[i]);
    }
    if (!e.block) name += " [top]";
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" +
           dot_escape(name) + "\"];\n";
  }
  return out + "}\n";
}

}  // namespace impan
