#pragma once

#include <set>
#include <string>
#include <vector>

#include "impan/ast.hpp"

namespace impan {

// Edge alphabet: assignments, polarized guards, eval. There is no skip
// label; skip collapses its endpoints when the graph is built.
enum class EdgeKind { Assign, Guard, Eval };

struct EdgeLabel {
  EdgeKind kind = EdgeKind::Guard;
  std::string var;      // Assign target
  Expr expr;            // rhs, condition, or eval argument
  bool positive = true; // Guard polarity

  static EdgeLabel assign(std::string target, Expr rhs);
  static EdgeLabel guard(Expr cond, bool positive);
  static EdgeLabel eval(Expr arg);
};

bool edge_label_eq(const EdgeLabel& a, const EdgeLabel& b);
// "x:=e", "b", "¬(b)", "eval(s)".
std::string edge_label_name(const EdgeLabel& l);

struct CfgEdge {
  int from = 0;
  EdgeLabel label;
  int to = 0;
};

struct Cfg {
  int entry = 0;
  std::set<int> exits;
  std::set<int> nodes;
  std::vector<CfgEdge> edges;
};

// Program points collapsed by skip, branch joins, and loop back-flow share
// one node, represented by the smallest label in the class.
Cfg build_cfg(const LabeledProgram& p);

std::string cfg_to_dot(const Cfg& g);

}  // namespace impan
