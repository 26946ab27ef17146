#include "impan/cfg.hpp"

#include <numeric>
#include <utility>

#include "impan/render.hpp"

namespace impan {

EdgeLabel EdgeLabel::assign(std::string target, Expr rhs) {
  return {EdgeKind::Assign, std::move(target), std::move(rhs), true};
}

EdgeLabel EdgeLabel::guard(Expr cond, bool positive) {
  return {EdgeKind::Guard, "", std::move(cond), positive};
}

EdgeLabel EdgeLabel::eval(Expr arg) {
  return {EdgeKind::Eval, "", std::move(arg), true};
}

bool edge_label_eq(const EdgeLabel& a, const EdgeLabel& b) {
  return a.kind == b.kind && a.var == b.var && a.positive == b.positive &&
         expr_equal(a.expr, b.expr);
}

std::string edge_label_name(const EdgeLabel& l) {
  switch (l.kind) {
    case EdgeKind::Assign:
      return l.var + ":=" + render_expr(l.expr);
    case EdgeKind::Guard:
      return l.positive ? render_expr(l.expr) : "¬(" + render_expr(l.expr) + ")";
    case EdgeKind::Eval:
      return "eval(" + render_expr(l.expr) + ")";
  }
  return "";
}

namespace {

// Union-find keyed by program point; the representative is the smallest
// member, so surviving nodes keep the lowest original label.
struct Merger {
  std::vector<int> parent;

  explicit Merger(int n) : parent(n + 1) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

void collapse(const Stmt& s, Merger& m) {
  switch (s.kind) {
    case StmtKind::Skip:
      m.unite(s.pre, s.post);
      break;
    case StmtKind::Seq:
      collapse(s.kids[0], m);
      collapse(s.kids[1], m);
      break;
    case StmtKind::If:
      m.unite(s.kids[0].post, s.post);
      m.unite(s.kids[1].post, s.post);
      collapse(s.kids[0], m);
      collapse(s.kids[1], m);
      break;
    case StmtKind::While:
      m.unite(s.kids[0].post, s.pre);
      collapse(s.kids[0], m);
      break;
    default:
      break;
  }
}

void emit(const Stmt& s, Merger& m, std::vector<CfgEdge>& out) {
  switch (s.kind) {
    case StmtKind::Skip:
      break;
    case StmtKind::Assign:
      out.push_back({m.find(s.pre), EdgeLabel::assign(s.var, s.exprs[0]), m.find(s.post)});
      break;
    case StmtKind::Eval:
      out.push_back({m.find(s.pre), EdgeLabel::eval(s.exprs[0]), m.find(s.post)});
      break;
    case StmtKind::Seq:
      emit(s.kids[0], m, out);
      emit(s.kids[1], m, out);
      break;
    case StmtKind::If:
      out.push_back({m.find(s.pre), EdgeLabel::guard(s.exprs[0], true), m.find(s.kids[0].pre)});
      out.push_back({m.find(s.pre), EdgeLabel::guard(s.exprs[0], false), m.find(s.kids[1].pre)});
      emit(s.kids[0], m, out);
      emit(s.kids[1], m, out);
      break;
    case StmtKind::While:
      out.push_back({m.find(s.pre), EdgeLabel::guard(s.exprs[0], true), m.find(s.kids[0].pre)});
      out.push_back({m.find(s.pre), EdgeLabel::guard(s.exprs[0], false), m.find(s.post)});
      emit(s.kids[0], m, out);
      break;
  }
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

Cfg build_cfg(const LabeledProgram& p) {
  Merger m(p.num_labels);
  collapse(p.root, m);
  Cfg g;
  emit(p.root, m, g.edges);
  for (int l = 1; l <= p.num_labels; ++l) g.nodes.insert(m.find(l));
  g.entry = m.find(p.entry);
  g.exits = {m.find(p.exit)};
  return g;
}

std::string cfg_to_dot(const Cfg& g) {
  std::string out = "digraph cfg {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int n : g.nodes) {
    out += "  n" + std::to_string(n) + " [label=\"" + std::to_string(n) + "\"";
    if (g.exits.count(n)) out += ", shape=doublecircle";
    out += "];\n";
  }
  out += "  start [shape=point];\n  start -> n" + std::to_string(g.entry) + ";\n";
  for (auto& e : g.edges)
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" +
           dot_escape(edge_label_name(e.label)) + "\"];\n";
  return out + "}\n";
}

}  // namespace impan
