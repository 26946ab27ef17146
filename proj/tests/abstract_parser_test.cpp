#include "impan/abstract_parser.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "impan/cfg.hpp"
#include "impan/dfa.hpp"
#include "impan/parser.hpp"
#include "impan/render.hpp"
#include "test_util.hpp"

using namespace impan;

namespace {

Dfa lit(const std::string& s) { return from_literal(s); }

std::multiset<std::string> edge_names(const Cfg& g) {
  std::multiset<std::string> out;
  for (auto& e : g.edges) out.insert(edge_label_name(e.label));
  return out;
}

// Follow a literal text through the character transitions.
std::set<int> walk(const ExtendedDfa& a, int from, const std::string& text) {
  std::set<int> frontier{from};
  for (char c : text) {
    std::set<int> next;
    for (int s : frontier)
      for (auto [d, t] : a.chars[s])
        if (d == c) next.insert(t);
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

const CfgEdge* find_edge(const Cfg& g, const std::string& name) {
  for (auto& e : g.edges)
    if (edge_label_name(e.label) == name) return &e;
  return nullptr;
}

int count_edges(const Cfg& g, const std::string& name) {
  int n = 0;
  for (auto& e : g.edges)
    if (edge_label_name(e.label) == name) ++n;
  return n;
}

}  // namespace

TEST_SUITE("abstract_parser") {

TEST_CASE("acyclic automata pass through cycle reduction unchanged") {
  Dfa a = minimize(lit("x:=1;"));
  ExtendedDfa ext = reduce_cycles(a);
  CHECK(ext.num_states() == a.num_states());
  CHECK(ext.synthetic_whiles.empty());
  int char_edges = 0, bulk_edges = 0;
  for (int s = 0; s < ext.num_states(); ++s) {
    char_edges += static_cast<int>(ext.chars[s].size());
    bulk_edges += static_cast<int>(ext.bulks[s].size());
  }
  int original = 0;
  for (int s = 0; s < a.num_states(); ++s)
    original += static_cast<int>(a.trans[s].size());
  CHECK(char_edges == original);
  CHECK(bulk_edges == 0);
}

TEST_CASE("single assignment synthesizes one edge") {
  SynthesizedCfg syn = synthesize_cfg(lit("x:=1;"));
  REQUIRE(syn.graph.edges.size() == 1);
  CHECK(edge_label_name(syn.graph.edges[0].label) == "x:=1");
  CHECK(syn.graph.nodes.size() == 2);
  CHECK(syn.graph.exits.size() == 1);
  CHECK(syn.graph.edges[0].from == syn.graph.entry);
  CHECK(syn.graph.exits.count(syn.graph.edges[0].to) == 1);
  for (int n : syn.graph.nodes) CHECK(n < 0);
  CHECK_FALSE(syn.opaque_bulk);
}

TEST_CASE("alternative words become parallel edges") {
  SUBCASE("different variables") {
    SynthesizedCfg syn = synthesize_cfg(lang_union(lit("x:=5;"), lit("y:=7;")));
    CHECK(edge_names(syn.graph) == std::multiset<std::string>{"x:=5", "y:=7"});
    CHECK(syn.graph.nodes.size() == 2);
    REQUIRE(syn.graph.edges.size() == 2);
    CHECK(syn.graph.edges[0].from == syn.graph.entry);
    CHECK(syn.graph.edges[0].to == syn.graph.edges[1].to);
  }
  SUBCASE("plain literals are not folded together") {
    SynthesizedCfg syn = synthesize_cfg(lang_union(lit("x:=5;"), lit("x:=7;")));
    CHECK(edge_names(syn.graph) == std::multiset<std::string>{"x:=5", "x:=7"});
  }
}

TEST_CASE("digit pump folds into one bulk assignment") {
  Dfa five_plus = concat(lit("5"), star(lit("5")));
  Dfa a = concat(lit("x:=5"), concat(star(lit("5")), lit(";")));

  ExtendedDfa ext = reduce_cycles(a);
  bool saw_pump = false;
  for (int s = 0; s < ext.num_states(); ++s)
    for (auto& [lang, t] : ext.bulks[s])
      if (equivalent(lang, star(lit("5")))) saw_pump = true;
  CHECK(saw_pump);

  SynthesizedCfg syn = synthesize_cfg(a);
  REQUIRE(syn.graph.edges.size() == 1);
  const EdgeLabel& l = syn.graph.edges[0].label;
  CHECK(l.kind == EdgeKind::Assign);
  CHECK(l.var == "x");
  REQUIRE(l.expr.kind == ExprKind::BulkNum);
  CHECK(equivalent(*l.expr.lang, five_plus));
  CHECK(syn.graph.nodes.size() == 2);
  CHECK(syn.graph.exits.size() == 1);
  CHECK_FALSE(syn.opaque_bulk);
}

TEST_CASE("pumped branch collapses to the branch diamond") {
  Dfa a = concat(lit("if(x<5){x:=5"),
                 concat(star(lit("5")), lit("}else{x:=1};")));
  SynthesizedCfg syn = synthesize_cfg(a);
  const Cfg& g = syn.graph;

  REQUIRE(g.edges.size() == 4);
  CHECK(g.nodes.size() == 4);
  REQUIRE(g.exits.size() == 1);
  int exit = *g.exits.begin();

  const CfgEdge* pos = find_edge(g, "x<5");
  const CfgEdge* neg = find_edge(g, "¬(x<5)");
  const CfgEdge* one = find_edge(g, "x:=1");
  REQUIRE(pos);
  REQUIRE(neg);
  REQUIRE(one);
  CHECK(pos->from == g.entry);
  CHECK(neg->from == g.entry);
  CHECK(pos->to != neg->to);
  CHECK(one->from == neg->to);
  CHECK(one->to == exit);

  const CfgEdge* pumped = nullptr;
  for (auto& e : g.edges)
    if (e.label.kind == EdgeKind::Assign && e.label.expr.kind == ExprKind::BulkNum)
      pumped = &e;
  REQUIRE(pumped);
  CHECK(pumped->label.var == "x");
  CHECK(pumped->from == pos->to);
  CHECK(pumped->to == exit);
  CHECK(equivalent(*pumped->label.expr.lang, concat(lit("5"), star(lit("5")))));
  CHECK_FALSE(syn.opaque_bulk);
}

TEST_CASE("statement cycle becomes a literal loop spelling") {
  Dfa a = star(lit("x:=1;"));
  ExtendedDfa ext = reduce_cycles(a);
  REQUIRE(ext.synthetic_whiles.size() == 1);
  CHECK(ext.synthetic_whiles.count(ext.initial) == 1);
  std::set<int> reached = walk(ext, ext.initial, "while(true){x:=1;}");
  REQUIRE_FALSE(reached.empty());
  bool accepts = false;
  for (int s : reached) accepts = accepts || ext.accepting[s];
  CHECK(accepts);

  SynthesizedCfg syn = synthesize_cfg(a);
  const Cfg& g = syn.graph;
  // Loop head at the entry: unknown guard both ways, body assignment flowing
  // back, and one more read of the ring for a final partial turn.
  const CfgEdge* pos = find_edge(g, "{false,true}");
  const CfgEdge* neg = find_edge(g, "¬({false,true})");
  REQUIRE(pos);
  REQUIRE(neg);
  CHECK(pos->from == g.entry);
  CHECK(neg->from == g.entry);
  CHECK(pos->label.expr.kind == ExprKind::AbsBool);
  CHECK(count_edges(g, "x:=1") == 2);
  bool back_edge = false;
  for (auto& e : g.edges)
    if (edge_label_name(e.label) == "x:=1" && e.to == g.entry) back_edge = true;
  CHECK(back_edge);
  CHECK_FALSE(g.exits.empty());
}

TEST_CASE("cycle entered mid-statement anchors the loop at a boundary") {
  // Words x:=0; (x:=x+1;)^n  -- the ring is entered at the separator, so
  // only a rotated reading of its word parses.
  Dfa a = concat(lit("x:=0"), concat(star(lit(";x:=x+1")), lit(";")));
  ExtendedDfa ext = reduce_cycles(a);
  CHECK(ext.synthetic_whiles.size() == 1);

  SynthesizedCfg syn = synthesize_cfg(a);
  const Cfg& g = syn.graph;
  const CfgEdge* init = find_edge(g, "x:=0");
  REQUIRE(init);
  CHECK(init->from == g.entry);
  int head = init->to;
  const CfgEdge* pos = find_edge(g, "{false,true}");
  const CfgEdge* neg = find_edge(g, "¬({false,true})");
  REQUIRE(pos);
  REQUIRE(neg);
  CHECK(pos->from == head);
  CHECK(neg->from == head);
  CHECK(count_edges(g, "x:=x+1") == 2);
  bool back_edge = false;
  for (auto& e : g.edges)
    if (edge_label_name(e.label) == "x:=x+1" && e.to == head) back_edge = true;
  CHECK(back_edge);
  CHECK_FALSE(g.exits.empty());
  CHECK_FALSE(syn.opaque_bulk);
}

TEST_CASE("written-out constant loop keeps its literal guard") {
  SynthesizedCfg syn = synthesize_cfg(lit("while(true){skip};"));
  const Cfg& g = syn.graph;
  REQUIRE(g.edges.size() == 2);
  const CfgEdge* pos = find_edge(g, "true");
  const CfgEdge* neg = find_edge(g, "¬(true)");
  REQUIRE(pos);
  REQUIRE(neg);
  CHECK(pos->label.expr.kind == ExprKind::BoolLit);
  // skip body collapses onto the head.
  CHECK(pos->from == g.entry);
  CHECK(pos->to == g.entry);
  CHECK(g.exits.count(neg->to) == 1);
  CHECK(g.nodes.size() == 2);
}

TEST_CASE("reading one state yields only its first statements") {
  ExtendedDfa ext = reduce_cycles(lit("x:=1;y:=2;"));
  ReadPieces pieces = reduce_stmts(ext, ext.initial);
  REQUIRE(pieces.edges.size() == 1);
  CHECK(edge_label_name(pieces.edges[0].label) == "x:=1");
  CHECK(pieces.continuations.size() == 1);
  CHECK(pieces.ends.empty());
  CHECK_FALSE(pieces.merges.empty());
}

TEST_CASE("several cycle entries are rejected") {
  Dfa a;
  a.trans = {{{'a', 1}, {'b', 2}}, {{'c', 2}}, {{'d', 1}, {'e', 3}}, {}};
  a.accepting = {false, false, false, true};
  CHECK_THROWS_AS(reduce_cycles(a), UnreducibleCycles);
}

TEST_CASE("branching cycle interiors are rejected") {
  Dfa a;
  a.trans = {{{'x', 1}}, {{'a', 2}, {'b', 2}}, {{'c', 1}, {'e', 3}}, {}};
  a.accepting = {false, false, false, true};
  CHECK_THROWS_AS(reduce_cycles(a), UnreducibleCycles);
}

TEST_CASE("pumped junk that never reads as code degrades explicitly") {
  SUBCASE("junk alone blocks every path") {
    CHECK_THROWS_AS(synthesize_cfg(star(lit("ab"))), UnreducibleCycles);
  }
  SUBCASE("junk beside a real program raises the bulk flag") {
    SynthesizedCfg syn = synthesize_cfg(lang_union(lit("x:=1;"), star(lit("ab"))));
    REQUIRE(syn.graph.edges.size() == 1);
    CHECK(edge_label_name(syn.graph.edges[0].label) == "x:=1");
    CHECK(syn.opaque_bulk);
  }
}

TEST_CASE("automata spelling no program at all are rejected") {
  CHECK_THROWS_AS(synthesize_cfg(lit("hello")), NoExecutablePath);
  CHECK_THROWS_AS(synthesize_cfg(empty_language()), NoExecutablePath);
}

TEST_CASE("rendered programs synthesize the directly built graph") {
  for (unsigned seed = 1; seed <= 40; ++seed) {
    test::ProgramGen gen(seed);
    Stmt prog = gen.program(2);
    std::string text = render(prog);
    CAPTURE(seed);
    CAPTURE(text);
    LabeledProgram lp = parse_program(text);
    Cfg direct = build_cfg(lp);
    SynthesizedCfg syn = synthesize_cfg(lit(text));
    CHECK(edge_names(syn.graph) == edge_names(direct));
    CHECK(syn.graph.nodes.size() == direct.nodes.size());
    CHECK(syn.graph.exits.size() == direct.exits.size());
    CHECK_FALSE(syn.opaque_bulk);
  }
}

TEST_CASE("unions of programs keep every statement") {
  for (unsigned seed = 100; seed < 120; ++seed) {
    test::ProgramGen g1(seed), g2(seed + 1000);
    std::string t1 = render(g1.program(1));
    std::string t2 = render(g2.program(1));
    CAPTURE(t1);
    CAPTURE(t2);
    std::set<std::string> expected;
    for (auto& e : build_cfg(parse_program(t1)).edges)
      expected.insert(edge_label_name(e.label));
    for (auto& e : build_cfg(parse_program(t2)).edges)
      expected.insert(edge_label_name(e.label));
    SynthesizedCfg syn = synthesize_cfg(lang_union(lit(t1), lit(t2)));
    std::set<std::string> got;
    for (auto& e : syn.graph.edges) got.insert(edge_label_name(e.label));
    CHECK(got == expected);
    CHECK_FALSE(syn.graph.exits.empty());
    CHECK_FALSE(syn.opaque_bulk);
  }
}

TEST_CASE("dot output names pumped transitions") {
  ExtendedDfa ext = reduce_cycles(concat(lit("x:=5"), concat(star(lit("5")), lit(";"))));
  std::string dot = extended_dfa_to_dot(ext);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
}

}  // TEST_SUITE
