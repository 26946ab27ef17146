#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "impan/abstract_parser.hpp"
#include "impan/cfg.hpp"
#include "impan/collecting.hpp"
#include "impan/value.hpp"

namespace impan {

// A label with abstract leaves doubles as a description of a label set: the
// meaning of x:=Z+ is every assignment x:=n with n positive. Plain labels
// denote singletons, bulk leaves denote one label per word.
using AbstractLabel = EdgeLabel;

bool label_equal(const AbstractLabel& a, const AbstractLabel& b);

// Set operations on label meanings. All three are exact: label sets are
// syntactic, so products decompose leafwise.
bool labels_intersect(const AbstractLabel& a, const AbstractLabel& b);
bool label_covers(const AbstractLabel& a, const AbstractLabel& b);
std::optional<AbstractLabel> label_meet(const AbstractLabel& a, const AbstractLabel& b);

// Leafwise best abstraction: literals move to their value-domain
// abstractions, variables and operators stay put. Bulk numeral leaves whose
// words span several signs round up to the sign join.
Expr rho_hat(const Expr& e);

// Best abstract label for a single edge label.
AbstractLabel upsilon(const EdgeLabel& l);

// Image of the label under the closure induced by upsilon, as a finite union
// of abstraction classes. Exact where upsilon alone rounds up: a mixed-sign
// bulk numeral leaf splits per sign instead of joining.
std::vector<AbstractLabel> upsilon_image(const EdgeLabel& l);

// Does the union of the shapes' meanings contain every label described by l?
bool shapes_cover_label(const std::vector<AbstractLabel>& shapes, const EdgeLabel& l);

struct LabelBlock {
  std::vector<EdgeLabel> pieces;      // universe slices the block is made of
  std::vector<AbstractLabel> shapes;  // closure classes; empty until composed
};

// Blocks have pairwise disjoint meanings; universe labels outside every
// block are mapped to top by the induced operator.
struct LabelPartition {
  std::vector<EdgeLabel> universe;
  std::vector<LabelBlock> blocks;
};

std::string block_name(const LabelBlock& b);
std::optional<std::size_t> block_of(const LabelPartition& p, const EdgeLabel& l);

// Partition induced by a graph: one candidate block per node pair, holding
// the labels between the pair; candidates that overlap another candidate are
// dropped entirely.
LabelPartition eta_from_cfg(const SynthesizedCfg& p);

// Partition induced by upsilon on the labels of p: one block per closure
// class, classes merged while a universe label straddles them or their
// meanings overlap.
LabelPartition restrict_upsilon(const SynthesizedCfg& p);

// Forces the lifting equation to hold: blocks of eta are merged until every
// closure class lands inside a single block; shapes record the classes, and
// the induced operator sends each block to the union of its shapes.
LabelPartition compose_complete(const LabelPartition& eta, const SynthesizedCfg& p);

// One block per universe label. The finest partition; its induced operator
// changes nothing.
LabelPartition identity_partition(const SynthesizedCfg& p);

struct CompletenessViolation {
  std::string label;  // block rendering
  std::string memory;
  std::string concrete_result;
  std::string abstract_result;
};

struct CompletenessReport {
  std::vector<CompletenessViolation> violations;
  int blocks_checked = 0;
  int pairs_checked = 0;  // (block, start memory) comparisons that ran
  int pairs_skipped = 0;  // expansion too large or oracle fuel ran out
};

// Desk check of the lifting equation on a finite grid: for every block and
// sampled start memory, the pointwise union of the member labels' effects
// must equal the union of their abstraction classes' effects. Both sides run
// over cartesian collecting states with the same bounds, widened enough to
// separate every literal mentioned by the block.
CompletenessReport check_completeness(const LabelPartition& eta, const Bounds& grid);

// Violations as a JSON array of {label, memory, concrete-result,
// abstract-result} objects.
std::string completeness_report_json(const CompletenessReport& r);

struct AbstractEdge {
  int from = 0;
  int to = 0;
  std::optional<std::size_t> block;   // none: label outside every block, acts as top
  std::vector<AbstractLabel> labels;  // shapes when composed, else the pieces hit
};

// Same nodes as the source graph; edges renamed to their blocks. Parallel
// edges landing in one block collapse.
struct AbstractCfg {
  int entry = 0;
  std::set<int> exits;
  std::set<int> nodes;
  std::vector<AbstractEdge> edges;
};

AbstractCfg abstract_cfg(const SynthesizedCfg& p, const LabelPartition& eta_up);
std::string abstract_cfg_to_dot(const AbstractCfg& g);

}  // namespace impan
