#include "impan/analyzer.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "impan/collecting.hpp"
#include "impan/expr_eval.hpp"
#include "impan/regex.hpp"
#include "impan/render.hpp"

#include "json.hpp"

namespace impan {

namespace {

constexpr long long kOracleFuel = 300000;
constexpr int kGridMemoryCap = 36;

// Where an eval site reports its pipeline: absent pointers drop the output
// (the public single-effect entry points do not collect).
struct EvalSink {
  std::vector<std::pair<int, std::string>>* diags = nullptr;
  std::vector<EvalArtifact>* artifacts = nullptr;
  int site = 0;

  void say(const std::string& msg) const {
    if (diags) diags->push_back({site, msg});
  }
  void keep(EvalArtifact a) const {
    if (artifacts) artifacts->push_back(std::move(a));
  }
};

AbstractMemory eval_transfer_impl(const Expr& s, const AbstractMemory& m, const EvalBudget& budget,
                                  const AnalyzerOptions& opts, const EvalSink& sink);

// Sound pattern refinement of m under "cond evaluates to want". Never
// refines more than the condition forces; unknown shapes leave m alone.
AbstractMemory refine_guard(const Expr& cond, bool want, const AbstractMemory& m) {
  switch (cond.kind) {
    case ExprKind::Var: {
      AbstractMemory out = m;
      out.set(cond.text, value_meet(m.get(cond.text), Value::of_bools(bool_only(want))));
      return out;
    }
    case ExprKind::Not:
      return refine_guard(cond.kids[0], !want, m);
    case ExprKind::And: {
      if (want) return refine_guard(cond.kids[1], true, refine_guard(cond.kids[0], true, m));
      // false when either side can be: the refinements' join
      return mem_join(refine_guard(cond.kids[0], false, m),
                      refine_guard(cond.kids[1], false, m));
    }
    case ExprKind::CmpEq: {
      if (!want) return m;
      AbstractMemory out = m;
      Value l = eval_poly_expr(cond.kids[0], m);
      Value r = eval_poly_expr(cond.kids[1], m);
      if (cond.kids[0].kind == ExprKind::Var)
        out.set(cond.kids[0].text, value_meet(m.get(cond.kids[0].text), r));
      if (cond.kids[1].kind == ExprKind::Var)
        out.set(cond.kids[1].text, value_meet(m.get(cond.kids[1].text), l));
      return out;
    }
    case ExprKind::CmpLt:
    case ExprKind::CmpGt: {
      // Normalize to lo < hi. Signs justify refinement family-wise: any
      // member of the other side's value forces the bound.
      const Expr& lo = cond.kind == ExprKind::CmpLt ? cond.kids[0] : cond.kids[1];
      const Expr& hi = cond.kind == ExprKind::CmpLt ? cond.kids[1] : cond.kids[0];
      AbstractMemory out = m;
      Sign slo = int_slice(eval_poly_expr(lo, m));
      Sign shi = int_slice(eval_poly_expr(hi, m));
      auto pin = [&](const Expr& side, Sign to) {
        if (side.kind == ExprKind::Var)
          out.set(side.text, value_meet(out.get(side.text), Value::of_sign(to)));
      };
      if (want) {
        if (shi == Sign::Neg || shi == Sign::Zero) pin(lo, Sign::Neg);
        if (slo == Sign::Pos || slo == Sign::Zero) pin(hi, Sign::Pos);
      } else {
        if (shi == Sign::Pos) pin(lo, Sign::Pos);
        if (slo == Sign::Neg) pin(hi, Sign::Neg);
      }
      return out;
    }
    default:
      return m;
  }
}

AbstractMemory label_effect(const EdgeLabel& l, const AbstractMemory& m, const EvalBudget& budget,
                            const AnalyzerOptions& opts, const EvalSink& sink) {
  if (m.is_bot()) return m;
  switch (l.kind) {
    case EdgeKind::Assign: {
      Value v = eval_poly_expr(l.expr, m);
      if (opts.debug_break_sign_add && l.expr.kind == ExprKind::Add &&
          int_slice(eval_poly_expr(l.expr.kids[0], m)) == Sign::Pos &&
          int_slice(eval_poly_expr(l.expr.kids[1], m)) == Sign::Pos)
        v = Value::of_sign(Sign::Zero);
      AbstractMemory out = m;
      out.set(l.var, v);
      return out;
    }
    case EdgeKind::Guard: {
      BoolSet bs = bool_slice(eval_poly_expr(l.expr, m));
      if (!(l.positive ? bs.can_true : bs.can_false)) return AbstractMemory::bot();
      return refine_guard(l.expr, l.positive, m);
    }
    case EdgeKind::Eval:
      return eval_transfer_impl(l.expr, m, budget, opts, sink);
  }
  return m;
}

AbstractMemory labels_effect(const std::vector<EdgeLabel>& ls, const AbstractMemory& m,
                             const EvalBudget& budget, const AnalyzerOptions& opts,
                             const EvalSink& sink) {
  AbstractMemory out = AbstractMemory::bot();
  for (auto& l : ls) out = mem_join(out, label_effect(l, m, budget, opts, sink));
  return out;
}

std::string language_sample(const Dfa& d, int max_len) {
  auto words = enumerate(d, std::min(max_len, 12));
  std::string out;
  for (size_t i = 0; i < words.size() && i < 3; ++i) {
    if (i) out += ", ";
    out += "\"" + words[i] + "\"";
  }
  if (out.empty()) return "no word of display length";
  return out;
}

struct FlowEdge {
  int from = 0;
  int to = 0;
  std::vector<EdgeLabel> labels;
};

AnalysisResult run_fixpoint(int entry, const std::set<int>& nodes, std::vector<FlowEdge> edges,
                            const AbstractMemory& m0, const EvalBudget& budget,
                            const AnalyzerOptions& opts) {
  std::map<int, std::vector<size_t>> out_edges;
  for (size_t i = 0; i < edges.size(); ++i) out_edges[edges[i].from].push_back(i);

  // reverse post-order from the entry
  std::map<int, int> rpo;
  {
    std::vector<int> post;
    std::set<int> seen{entry};
    std::vector<std::pair<int, size_t>> stack{{entry, 0}};
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      auto& outs = out_edges[u];
      if (next < outs.size()) {
        int v = edges[outs[next++]].to;
        if (seen.insert(v).second) stack.push_back({v, 0});
      } else {
        post.push_back(u);
        stack.pop_back();
      }
    }
    std::reverse(post.begin(), post.end());
    for (size_t i = 0; i < post.size(); ++i) rpo[post[i]] = static_cast<int>(i);
  }
  std::set<int> loop_heads;
  for (auto& e : edges)
    if (rpo.count(e.from) && rpo.count(e.to) && rpo[e.from] >= rpo[e.to]) loop_heads.insert(e.to);

  std::map<int, AbstractMemory> state;
  for (int n : nodes) state[n] = AbstractMemory::bot();
  state[entry] = m0;

  std::map<size_t, std::vector<std::pair<int, std::string>>> edge_diags;
  std::map<size_t, std::vector<EvalArtifact>> edge_artifacts;
  std::map<size_t, std::pair<std::string, AbstractMemory>> eval_cache;

  std::map<int, int> growths;
  std::set<std::pair<int, int>> wl{{rpo.count(entry) ? rpo[entry] : 0, entry}};
  while (!wl.empty()) {
    int u = wl.begin()->second;
    wl.erase(wl.begin());
    for (size_t ei : out_edges[u]) {
      const FlowEdge& fe = edges[ei];
      AbstractMemory eff;
      bool has_eval = std::any_of(fe.labels.begin(), fe.labels.end(),
                                  [](const EdgeLabel& l) { return l.kind == EdgeKind::Eval; });
      if (has_eval) {
        std::string key = mem_name(state[u]);
        auto hit = eval_cache.find(ei);
        if (hit != eval_cache.end() && hit->second.first == key) {
          eff = hit->second.second;
        } else {
          edge_diags[ei].clear();
          edge_artifacts[ei].clear();
          EvalSink sink{&edge_diags[ei], &edge_artifacts[ei], u};
          eff = labels_effect(fe.labels, state[u], budget, opts, sink);
          eval_cache[ei] = {key, eff};
        }
      } else {
        eff = labels_effect(fe.labels, state[u], budget, opts, {});
      }
      if (eff.is_bot()) continue;
      AbstractMemory joined = mem_join(state[fe.to], eff);
      if (mem_leq(joined, state[fe.to])) continue;
      if (loop_heads.count(fe.to) && growths[fe.to] >= opts.widen_delay)
        joined = mem_widen(state[fe.to], joined, opts.widening_k);
      if (mem_eq(joined, state[fe.to])) continue;
      state[fe.to] = joined;
      ++growths[fe.to];
      wl.insert({rpo.count(fe.to) ? rpo[fe.to] : static_cast<int>(rpo.size()), fe.to});
    }
  }

  AnalysisResult r;
  r.per_node = std::move(state);
  for (auto& [ei, ds] : edge_diags)
    for (auto& d : ds) r.diagnostics.push_back(d);
  for (auto& [ei, as] : edge_artifacts)
    for (auto& a : as) r.eval_artifacts.push_back(a);
  return r;
}

AbstractMemory eval_transfer_impl(const Expr& s, const AbstractMemory& m, const EvalBudget& budget,
                                  const AnalyzerOptions& opts, const EvalSink& sink) {
  if (m.is_bot()) return m;
  Value v = eval_poly_expr(s, m);
  if (v.is_top()) {
    sink.say("eval: argument is unconstrained, any code could run; memory degrades to top");
    return AbstractMemory::top();
  }
  auto lang = str_slice(v);
  if (!lang || is_empty(*lang)) {
    sink.say("eval: argument has no string values; no execution continues");
    return AbstractMemory::bot();
  }
  EvalArtifact art;
  art.node = sink.site;
  art.automaton = *lang;
  if (budget.max_depth <= 0) {
    sink.say("eval: reflection depth exhausted; memory degrades to top");
    sink.keep(std::move(art));
    return AbstractMemory::top();
  }
  SynthesizedCfg syn;
  try {
    syn = synthesize_cfg(*lang);
  } catch (const UnreducibleCycles&) {
    sink.say("eval: string automaton cycles do not reduce to statement loops; "
             "memory degrades to top");
    sink.keep(std::move(art));
    return AbstractMemory::top();
  } catch (const NoExecutablePath&) {
    sink.say("eval: no word of the argument language (" + language_sample(*lang, budget.max_string_len) +
             ", ...) is an executable program; no execution continues");
    sink.keep(std::move(art));
    return AbstractMemory::bot();
  }
  art.synthesized = syn;
  if (syn.opaque_bulk) {
    sink.say("eval: parts of the argument language were not readable as code; "
             "memory degrades to top");
    sink.keep(std::move(art));
    return AbstractMemory::top();
  }
  LabelPartition forced = compose_complete(eta_from_cfg(syn), syn);
  art.partition = forced;
  AbstractCfg acfg = abstract_cfg(syn, forced);
  art.abstracted = acfg;
  sink.keep(std::move(art));

  AnalysisResult sub =
      analyze(acfg, m, EvalBudget{budget.max_depth - 1, budget.max_string_len}, opts);
  for (auto& d : sub.diagnostics) sink.say(d.second);
  for (auto& a : sub.eval_artifacts) {
    a.depth += 1;
    sink.keep(std::move(a));
  }
  return result_at(sub, acfg.exits);
}

}  // namespace

AbstractMemory edge_effect_abstract(const EdgeLabel& l, const AbstractMemory& m,
                                    const EvalBudget& budget, const AnalyzerOptions& opts) {
  return label_effect(l, m, budget, opts, {});
}

AbstractMemory edge_effect_abstract(const std::vector<EdgeLabel>& ls, const AbstractMemory& m,
                                    const EvalBudget& budget, const AnalyzerOptions& opts) {
  return labels_effect(ls, m, budget, opts, {});
}

AbstractMemory eval_transfer(const Expr& s, const AbstractMemory& m, const EvalBudget& budget,
                             const AnalyzerOptions& opts) {
  return eval_transfer_impl(s, m, budget, opts, {});
}

AnalysisResult analyze(const Cfg& g, const AbstractMemory& m0, const EvalBudget& budget,
                       const AnalyzerOptions& opts) {
  std::vector<FlowEdge> edges;
  edges.reserve(g.edges.size());
  for (auto& e : g.edges) edges.push_back({e.from, e.to, {e.label}});
  return run_fixpoint(g.entry, g.nodes, std::move(edges), m0, budget, opts);
}

AnalysisResult analyze(const AbstractCfg& g, const AbstractMemory& m0, const EvalBudget& budget,
                       const AnalyzerOptions& opts) {
  std::vector<FlowEdge> edges;
  edges.reserve(g.edges.size());
  for (auto& e : g.edges) edges.push_back({e.from, e.to, e.labels});
  return run_fixpoint(g.entry, g.nodes, std::move(edges), m0, budget, opts);
}

AbstractMemory result_at(const AnalysisResult& r, const std::set<int>& nodes) {
  AbstractMemory out = AbstractMemory::bot();
  for (int n : nodes) {
    auto it = r.per_node.find(n);
    if (it != r.per_node.end()) out = mem_join(out, it->second);
  }
  return out;
}

SoundnessReport soundness_check(const LabeledProgram& p, const Bounds& grid,
                                const EvalBudget& budget, const AnalyzerOptions& opts) {
  Cfg g = build_cfg(p);

  std::vector<std::string> vars;
  std::vector<std::vector<Concrete>> choices;
  for (auto& [name, sort] : p.var_sorts) {
    vars.push_back(name);
    std::vector<Concrete> vals;
    switch (sort) {
      case VarSort::Int:
        for (long long n = grid.int_lo; n <= grid.int_hi; ++n) vals.push_back(conc_int(n));
        break;
      case VarSort::Bool:
        vals.push_back(conc_bool(false));
        vals.push_back(conc_bool(true));
        break;
      case VarSort::Str:
        for (auto& w : enumerate(chars_star(grid.str_alphabet), grid.str_len))
          vals.push_back(conc_str(w));
        break;
    }
    choices.push_back(std::move(vals));
  }
  long long total = 1;
  for (auto& c : choices) total *= static_cast<long long>(c.size());
  long long stride = std::max<long long>(1, total / kGridMemoryCap);

  SoundnessReport rep;
  for (long long idx = 0; idx < total; idx += stride) {
    ConcreteMemory env;
    CollectingMemory cm;
    AbstractMemory m0;
    long long rest = idx;
    for (size_t i = 0; i < vars.size(); ++i) {
      const Concrete& c = choices[i][static_cast<size_t>(rest % choices[i].size())];
      rest /= static_cast<long long>(choices[i].size());
      env[vars[i]] = c;
      cm.set(vars[i], {c});
      m0.set(vars[i], alpha({c}));
    }
    CollectingMemory out;
    try {
      out = collecting_run(p.root, cm, grid, kOracleFuel);
    } catch (const FuelExhausted&) {
      ++rep.memories_skipped;
      continue;
    }
    AbstractMemory conc = AbstractMemory::bot();
    if (!out.is_bot()) {
      conc = AbstractMemory::top();
      for (auto& [name, set] : out.vars) conc.set(name, alpha(set));
    }
    AbstractMemory ab = result_at(analyze(g, m0, budget, opts), g.exits);
    ++rep.memories_checked;
    if (!mem_leq(conc, ab)) {
      std::string where = "{";
      for (auto& [name, c] : env) {
        if (where.size() > 1) where += ", ";
        where += name + " ↦ " + concrete_name(c);
      }
      rep.violations.push_back({where + "}", mem_name(conc), mem_name(ab)});
    }
  }
  return rep;
}

std::string analysis_json(const AnalysisResult& r) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::object();
  for (auto& [n, m] : r.per_node) {
    nlohmann::ordered_json vars = nlohmann::ordered_json::object();
    if (m.is_bot()) {
      nodes[std::to_string(n)] = "unreachable";
      continue;
    }
    for (auto& [name, v] : m.vars) vars[name] = value_name(v);
    nodes[std::to_string(n)] = vars;
  }
  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (auto& [n, msg] : r.diagnostics) {
    nlohmann::ordered_json d;
    d["node"] = n;
    d["message"] = msg;
    diags.push_back(d);
  }
  nlohmann::ordered_json arts = nlohmann::ordered_json::array();
  for (auto& a : r.eval_artifacts) {
    nlohmann::ordered_json o;
    o["node"] = a.node;
    o["depth"] = a.depth;
    o["automaton"] = dfa_to_regex(a.automaton);
    if (a.synthesized) o["synthesized-nodes"] = a.synthesized->graph.nodes.size();
    if (a.partition) o["blocks"] = a.partition->blocks.size();
    if (a.abstracted) o["abstract-edges"] = a.abstracted->edges.size();
    arts.push_back(o);
  }
  nlohmann::ordered_json j;
  j["nodes"] = nodes;
  j["diagnostics"] = diags;
  j["eval-artifacts"] = arts;
  return j.dump(2);
}

}  // namespace impan
