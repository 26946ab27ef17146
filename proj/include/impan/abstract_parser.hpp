#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "impan/cfg.hpp"
#include "impan/dfa.hpp"

namespace impan {

// A strongly connected component of the automaton that cannot be collapsed
// into a single pumping transition: several entries, several exits, or an
// interior that is not one simple loop.
struct UnreducibleCycles : std::runtime_error {
  explicit UnreducibleCycles(const std::string& msg) : std::runtime_error(msg) {}
};

// The automaton has no path that reads a complete program: nothing it
// accepts can execute.
struct NoExecutablePath : std::runtime_error {
  explicit NoExecutablePath(const std::string& msg) : std::runtime_error(msg) {}
};

// Acyclic automaton over characters plus bulk transitions. A bulk transition
// consumes any word of its language in one step; cycle reduction introduces
// them to stand for pumped repetition. Character transitions may be
// nondeterministic: grafted spellings can share a first character with
// original edges. States listed in synthetic_whiles begin a while-spelling
// that replaces a cycle; a while statement parsed there loops a pumped
// repetition, so its guard is an unknown boolean rather than the literal
// true that the spelling contains.
struct ExtendedDfa {
  int initial = 0;
  std::vector<bool> accepting;
  std::vector<std::vector<std::pair<char, int>>> chars;
  std::vector<std::vector<std::pair<Dfa, int>>> bulks;
  std::set<int> synthetic_whiles;

  int num_states() const { return static_cast<int>(chars.size()); }
  int add_state(bool acc);
};

// Collapses every cycle of a minimized automaton. A single-entry simple
// cycle whose spelled word (under some rotation) reads as a complete
// statement list becomes an explicit while-spelling; any other reducible
// cycle becomes a bulk transition pumping the cycle's word. Throws
// UnreducibleCycles for components with several entries or exits, or whose
// interior is not one simple loop.
ExtendedDfa reduce_cycles(const Dfa& a);

std::string extended_dfa_to_dot(const ExtendedDfa& a);

// Statement-level facts read from one automaton state. Edges connect
// automaton states with assignment, guard, and eval labels; bulk transitions
// consumed inside a numeral or string literal surface as bulk leaves in the
// label's expression. merges lists state pairs that denote the same program
// point (reads with no semantic content: skip, separators, block closers,
// branch joins). ends are accepting states where a complete program may
// stop; continuations are the states where a following statement can start.
struct ReadPieces {
  std::vector<CfgEdge> edges;
  std::vector<std::pair<int, int>> merges;
  std::set<int> ends;
  std::set<int> continuations;
};

ReadPieces reduce_stmts(const ExtendedDfa& a, int q);

struct SynthesizedCfg {
  Cfg graph;
  Dfa origin;
  // Some reachable bulk transition was never consumed by a successful read:
  // the graph may be missing paths for the words pumped through it, so a
  // sound client must not trust it.
  bool opaque_bulk = false;
};

// Program point naming for synthesized graphs: distinct from the positive
// labels carried by host programs.
inline int synthesized_label(int state) { return -(state + 1); }

// Reduces cycles, reads statements outward from the initial state, and
// assembles the control flow graph of the code the automaton spells.
// Parallel assignment edges that differ only in a literal or bulk numeral
// (or string) are folded into one bulk edge over the joined language.
// Throws NoExecutablePath when no complete program is readable.
SynthesizedCfg synthesize_cfg(const Dfa& a);

}  // namespace impan
