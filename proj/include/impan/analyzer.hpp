#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "impan/abstract_parser.hpp"
#include "impan/abstraction.hpp"
#include "impan/cfg.hpp"
#include "impan/memory.hpp"

namespace impan {

// Reflection bounds. max_depth counts nested eval analyses still allowed;
// at 0 an eval degrades to top. max_string_len caps how much of a string
// language diagnostics spell out.
struct EvalBudget {
  int max_depth = 3;
  int max_string_len = 64;
};

struct AnalyzerOptions {
  // Plain joins at a loop head before widening kicks in.
  int widen_delay = 2;
  // Language widening parameter, forwarded to the automaton widening.
  int widening_k = 2;
  // Deliberately wrong transfer (positive plus positive yields zero) so the
  // soundness harness can prove it catches a broken analysis.
  bool debug_break_sign_add = false;
};

// One eval site's pipeline stages, as far as it got: the argument language,
// the graph read from it, the forced-complete label partition, and the
// folded graph the recursive analysis ran on. depth 0 is a site in the
// analyzed program, depth n+1 a site inside a depth-n synthesized graph.
struct EvalArtifact {
  int node = 0;
  int depth = 0;
  Dfa automaton;
  std::optional<SynthesizedCfg> synthesized;
  std::optional<LabelPartition> partition;
  std::optional<AbstractCfg> abstracted;
};

struct AnalysisResult {
  // Post-fixpoint: re-applying any edge effect stays inside these.
  std::map<int, AbstractMemory> per_node;
  std::vector<std::pair<int, std::string>> diagnostics;
  std::vector<EvalArtifact> eval_artifacts;
};

// One edge's abstract transfer. Assignments update the binding; a guard is
// bottom when the condition cannot go the edge's way, the memory refined by
// simple variable/comparison patterns when it can; an eval runs the full
// reflection pipeline (degraded outcomes surface as memories, top for
// unanalyzable code, bottom for unexecutable code). '+' is evaluated
// polymorphically, covering both the integer and the string readings that
// sort inference can give the spelling.
AbstractMemory edge_effect_abstract(const EdgeLabel& l, const AbstractMemory& m,
                                    const EvalBudget& budget, const AnalyzerOptions& opts = {});
// Additive lift: the join of the members' effects, each computed in one
// pass over its abstract leaves.
AbstractMemory edge_effect_abstract(const std::vector<EdgeLabel>& ls, const AbstractMemory& m,
                                    const EvalBudget& budget, const AnalyzerOptions& opts = {});

// The eval pipeline alone: string value of s, synthesized graph, partition
// forced complete, folded graph, recursive analysis at depth - 1, join of
// its exit memories.
AbstractMemory eval_transfer(const Expr& s, const AbstractMemory& m, const EvalBudget& budget,
                             const AnalyzerOptions& opts = {});

// Worklist fixpoint from the entry in reverse post-order. Loop heads join
// for widen_delay rounds, then widen. Unreachable nodes stay bottom.
AnalysisResult analyze(const Cfg& g, const AbstractMemory& m0, const EvalBudget& budget = {},
                       const AnalyzerOptions& opts = {});
AnalysisResult analyze(const AbstractCfg& g, const AbstractMemory& m0,
                       const EvalBudget& budget = {}, const AnalyzerOptions& opts = {});

// Join of the recorded memories at a node set (a graph's exits, usually).
AbstractMemory result_at(const AnalysisResult& r, const std::set<int>& nodes);

struct SoundnessViolation {
  std::string memory;
  std::string concrete_result;
  std::string abstract_result;
};

struct SoundnessReport {
  std::vector<SoundnessViolation> violations;
  int memories_checked = 0;
  int memories_skipped = 0;
};

// Executable soundness contract: for grid-sampled concrete memories m, the
// abstraction of the collecting run from {m} is below the analysis exit
// memory started from alpha(m). Runs the oracle cannot finish are skipped,
// never judged.
SoundnessReport soundness_check(const LabeledProgram& p, const Bounds& grid,
                                const EvalBudget& budget = {}, const AnalyzerOptions& opts = {});

// Per-node variable renderings, diagnostics, and eval artifact summaries.
std::string analysis_json(const AnalysisResult& r);

}  // namespace impan
