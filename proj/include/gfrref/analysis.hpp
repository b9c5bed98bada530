#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfrref/scheduler.hpp"

namespace gfrref {

/// Cost accounting for the block elimination's task DAG.
///
/// All costs are returned in QUARTER units: 4 × the (α·β·γ)-style model value,
/// so that the 1.25 and 2.25 factors appearing in the closed forms stay exact
/// integers. Divide by kCostQuarter to get model units.
inline constexpr std::int64_t kCostQuarter = 4;

enum class CostMode {
  worst_case,        // ClearDown α³, UpdateRow(Trafo) 1.25α³, ClearUp α³
  well_conditioned,  // ClearDown α³ iff i==j else 0, UpdateRow α³, ClearUp 0
  exact,             // per-task expressions in the found ranks r, r'
  measured,          // durations taken from a run trace
};
const char* cost_mode_name(CostMode m);

struct CostModel {
  CostMode mode = CostMode::worst_case;
  std::int64_t alpha = 1;  // block dimension, ≥ 1
};

/// Cost of one task in quarter units. r is the pivot count accumulated before
/// the task, r_prime the newly found pivot count (exact mode only; ignored by
/// the closed-form modes except well_conditioned's i==j test).
/// Throws std::invalid_argument if r + r_prime > alpha.
std::int64_t task_cost(const CostModel& model, TaskKind kind, std::int64_t r,
                       std::int64_t r_prime, std::int64_t i, std::int64_t j);

/// A weighted DAG for critical-path evaluation.
struct CostGraph {
  std::vector<std::int64_t> node_cost;            // quarter units
  std::vector<std::vector<std::int32_t>> succ;    // adjacency, edges forward

  std::int32_t add_node(std::int64_t cost);
  void add_edge(std::int32_t from, std::int32_t to);
  std::size_t size() const { return node_cost.size(); }
};

/// The Step-1 model graph for an a×b grid: layers indexed by i+j, every
/// layer-L node preceding every layer-(L+1) node, and ClearDown(i,j) preceding
/// the layer's own UpdateRow/UpdateRowTrafo nodes. The transform side is
/// included in worst_case and excluded in well_conditioned (whose headline
/// statement concerns the data side only). Closed-form modes only.
CostGraph step1_graph(const CostModel& model, std::int64_t a, std::int64_t b);

/// The Step-3 model graph: R-side ClearUp chains with their true cross-round
/// version dependencies, plus one independent transform chain of a ClearUps
/// per multiplier block (each of the b·a blocks is touched a times, with no
/// cross-round edges). Closed-form modes only.
CostGraph step3_graph(const CostModel& model, std::int64_t a, std::int64_t b);

/// Step 1 followed by Step 3 behind a barrier.
CostGraph full_graph(const CostModel& model, std::int64_t a, std::int64_t b);

/// Maximum total node cost over all paths (quarter units).
/// Throws std::invalid_argument on a cycle.
std::int64_t critical_path(const CostGraph& g);

/// Exact reduced ratio of two cost totals.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);  // normalizes; throws on d == 0
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
  double value() const { return double(num) / double(den); }
  std::string to_string() const;
};

/// total_cost / critical_path as an exact ratio. Throws on zero path.
Rational avg_concurrency(std::int64_t total_cost, std::int64_t critical_path);

/// Longest cost-weighted path through an executed plan, with each node costed
/// by its traced duration (ns). Requires the report to carry a trace for
/// every node. This is the `measured` mode entry point.
std::int64_t measured_critical_path(const TaskGraph& graph,
                                    const RunReport& report);

/// Plain-text report: header plus one table row
/// (a, b, alpha, mode, total_cost, critical_path, avg_concurrency), followed
/// by step-1/step-3 breakdown lines. total_cost is the sequential baseline
/// a·b·min(a,b)·α³ (= (aα)³ when square).
std::string analysis_report(std::int64_t a, std::int64_t b, std::int64_t alpha,
                            CostMode mode);

}  // namespace gfrref
