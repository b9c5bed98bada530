#include "gfrref/analysis.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gfrref {

const char* cost_mode_name(CostMode m) {
  switch (m) {
    case CostMode::worst_case: return "worst_case";
    case CostMode::well_conditioned: return "well_conditioned";
    case CostMode::exact: return "exact";
    case CostMode::measured: return "measured";
  }
  return "?";
}

std::int64_t task_cost(const CostModel& model, TaskKind kind, std::int64_t r,
                       std::int64_t r_prime, std::int64_t i, std::int64_t j) {
  const std::int64_t alpha = model.alpha;
  if (alpha < 1) throw std::invalid_argument("task_cost: alpha must be >= 1");
  if (r < 0 || r_prime < 0 || r + r_prime > alpha)
    throw std::invalid_argument("task_cost: ranks must satisfy r + r' <= alpha");
  const std::int64_t a3 = alpha * alpha * alpha;
  switch (kind) {
    case TaskKind::Extend:
    case TaskKind::RowLengthen:
    case TaskKind::PreClearUp:
    case TaskKind::Copy:
      return 0;
    default:
      break;
  }
  switch (model.mode) {
    case CostMode::worst_case:
      switch (kind) {
        case TaskKind::ClearDown: return 4 * a3;
        case TaskKind::UpdateRow:
        case TaskKind::UpdateRowTrafo: return 5 * a3;  // 1.25 α³
        case TaskKind::ClearUp: return 4 * a3;
        default: return 0;
      }
    case CostMode::well_conditioned:
      switch (kind) {
        case TaskKind::ClearDown: return i == j ? 4 * a3 : 0;
        case TaskKind::UpdateRow:
        case TaskKind::UpdateRowTrafo: return 4 * a3;
        case TaskKind::ClearUp: return 0;
        default: return 0;
      }
    case CostMode::exact:
      switch (kind) {
        case TaskKind::ClearDown:
          if (i == 0) return 4 * a3;
          return 4 * (alpha * r * (alpha - r) +
                      alpha * (alpha - r) * r_prime +
                      r * r_prime * (alpha - r - r_prime));
        case TaskKind::UpdateRow:
        case TaskKind::UpdateRowTrafo:
          return 4 * (alpha * alpha * (r + r_prime) + alpha * r * r_prime);
        case TaskKind::ClearUp: return 4 * a3;
        default: return 0;
      }
    case CostMode::measured:
      throw std::invalid_argument(
          "task_cost: measured costs come from a run trace");
  }
  return 0;
}

std::int32_t CostGraph::add_node(std::int64_t cost) {
  node_cost.push_back(cost);
  succ.emplace_back();
  return std::int32_t(node_cost.size() - 1);
}

void CostGraph::add_edge(std::int32_t from, std::int32_t to) {
  if (from < 0 || to < 0 || std::size_t(from) >= size() ||
      std::size_t(to) >= size())
    throw std::invalid_argument("add_edge: node id out of range");
  succ[std::size_t(from)].push_back(to);
}

namespace {

void check_model_graph_args(const CostModel& model, std::int64_t a,
                            std::int64_t b) {
  if (a < 1 || b < 1)
    throw std::invalid_argument("model graph: a and b must be >= 1");
  if (model.alpha < 1)
    throw std::invalid_argument("model graph: alpha must be >= 1");
  if (model.mode != CostMode::worst_case &&
      model.mode != CostMode::well_conditioned)
    throw std::invalid_argument(
        "model graph: requires worst_case or well_conditioned mode");
}

std::int64_t node_cost_of(const CostModel& model, TaskKind kind, std::int64_t i,
                          std::int64_t j) {
  return task_cost(model, kind, 0, 0, i, j);
}

}  // namespace

CostGraph step1_graph(const CostModel& model, std::int64_t a, std::int64_t b) {
  check_model_graph_args(model, a, b);
  const bool with_trafo = model.mode == CostMode::worst_case;
  CostGraph g;
  const std::int64_t layers = a + b - 1;
  const std::size_t n_layers = static_cast<std::size_t>(layers);
  std::vector<std::vector<std::int32_t>> layer_nodes(n_layers);
  for (std::int64_t i = 0; i < a; ++i) {
    for (std::int64_t j = 0; j < b; ++j) {
      const std::size_t layer = std::size_t(i + j);
      const std::int32_t cd =
          g.add_node(node_cost_of(model, TaskKind::ClearDown, i, j));
      layer_nodes[layer].push_back(cd);
      for (std::int64_t k = j + 1; k < b; ++k) {
        const std::int32_t ur =
            g.add_node(node_cost_of(model, TaskKind::UpdateRow, i, j));
        g.add_edge(cd, ur);
        layer_nodes[layer].push_back(ur);
      }
      if (with_trafo) {
        for (std::int64_t h = 0; h <= i; ++h) {
          const std::int32_t tr =
              g.add_node(node_cost_of(model, TaskKind::UpdateRowTrafo, i, j));
          g.add_edge(cd, tr);
          layer_nodes[layer].push_back(tr);
        }
      }
    }
  }
  // Zero-cost junction between consecutive layers realizes the full bipartite
  // layer barrier with a linear number of edges.
  for (std::int64_t l = 0; l + 1 < layers; ++l) {
    const std::int32_t junction = g.add_node(0);
    for (std::int32_t n : layer_nodes[std::size_t(l)]) g.add_edge(n, junction);
    for (std::int32_t n : layer_nodes[std::size_t(l + 1)])
      g.add_edge(junction, n);
  }
  return g;
}

CostGraph step3_graph(const CostModel& model, std::int64_t a, std::int64_t b) {
  check_model_graph_args(model, a, b);
  CostGraph g;
  const std::int64_t cu = node_cost_of(model, TaskKind::ClearUp, 0, 0);

  // Data side: every remnant block R_{j,l} is a version chain; the update at
  // round k also hangs off the source block's final version.
  std::map<std::pair<std::int64_t, std::int64_t>, std::int32_t> last;
  for (std::int64_t k = 0; k < b; ++k) last[{k, k}] = g.add_node(0);  // Copy
  for (std::int64_t k = b - 1; k >= 1; --k) {
    for (std::int64_t j = 0; j < k; ++j) {
      const std::int32_t pcu = g.add_node(0);
      last[{j, k}] = pcu;
      for (std::int64_t l = k; l < b; ++l) {
        const std::int32_t node = g.add_node(cu);
        g.add_edge(last[{j, l}], node);
        g.add_edge(last[{k, l}], node);
        g.add_edge(pcu, node);
        last[{j, l}] = node;
      }
    }
  }

  // Transform side: each of the b·a multiplier blocks is touched a times,
  // independently of the rounds.
  for (std::int64_t j = 0; j < b; ++j) {
    for (std::int64_t h = 0; h < a; ++h) {
      std::int32_t prev = -1;
      for (std::int64_t step = 0; step < a; ++step) {
        const std::int32_t node = g.add_node(cu);
        if (prev >= 0) g.add_edge(prev, node);
        prev = node;
      }
    }
  }
  return g;
}

CostGraph full_graph(const CostModel& model, std::int64_t a, std::int64_t b) {
  CostGraph g = step1_graph(model, a, b);
  const std::size_t step1_size = g.size();
  const CostGraph s3 = step3_graph(model, a, b);
  const std::int32_t barrier = g.add_node(0);
  for (std::size_t n = 0; n < step1_size; ++n)
    g.add_edge(std::int32_t(n), barrier);
  const std::int32_t base = std::int32_t(g.size());
  for (std::size_t n = 0; n < s3.size(); ++n) {
    g.add_node(s3.node_cost[n]);
    g.add_edge(barrier, base + std::int32_t(n));
  }
  for (std::size_t n = 0; n < s3.size(); ++n)
    for (std::int32_t to : s3.succ[n])
      g.add_edge(base + std::int32_t(n), base + to);
  return g;
}

std::int64_t critical_path(const CostGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::int32_t> indeg(n, 0);
  for (const auto& edges : g.succ)
    for (std::int32_t to : edges) indeg[std::size_t(to)] += 1;
  std::vector<std::int32_t> order;
  order.reserve(n);
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) order.push_back(std::int32_t(v));
  std::vector<std::int64_t> dist(n, 0);
  std::int64_t best = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const std::int32_t v = order[head];
    const std::int64_t dv = dist[std::size_t(v)] + g.node_cost[std::size_t(v)];
    best = std::max(best, dv);
    for (std::int32_t to : g.succ[std::size_t(v)]) {
      dist[std::size_t(to)] = std::max(dist[std::size_t(to)], dv);
      if (--indeg[std::size_t(to)] == 0) order.push_back(to);
    }
  }
  if (order.size() != n)
    throw std::invalid_argument("critical_path: graph has a cycle");
  return best;
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational avg_concurrency(std::int64_t total_cost, std::int64_t cp) {
  if (cp <= 0) throw std::invalid_argument("avg_concurrency: zero critical path");
  return Rational(total_cost, cp);
}

std::int64_t measured_critical_path(const TaskGraph& graph,
                                    const RunReport& report) {
  const std::size_t n = graph.node_count();
  std::vector<std::int64_t> duration(n, -1);
  for (const TraceRecord& r : report.trace)
    if (r.node >= 0 && std::size_t(r.node) < n)
      duration[std::size_t(r.node)] = r.end_ns - r.start_ns;
  for (std::size_t v = 0; v < n; ++v)
    if (duration[v] < 0)
      throw std::invalid_argument(
          "measured_critical_path: trace does not cover every task");

  // Longest duration-weighted path over the producer edges. Node ids are in
  // insertion order, which plan construction makes topological.
  std::vector<std::int64_t> dist(n, 0);
  std::int64_t best = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const TaskNode& nd = graph.node(std::int32_t(v));
    std::int64_t start = 0;
    for (std::uint8_t k = 0; k < nd.n_in; ++k) {
      const std::int32_t producer = graph.slot(nd.in[k]).producer;
      if (producer >= 0) {
        if (std::size_t(producer) >= v)
          throw std::invalid_argument(
              "measured_critical_path: plan is not in topological order");
        start = std::max(start, dist[std::size_t(producer)]);
      }
    }
    dist[v] = start + duration[v];
    best = std::max(best, dist[v]);
  }
  return best;
}

namespace {

std::string quarters_to_string(std::int64_t q) {
  const std::int64_t whole = q / kCostQuarter;
  const std::int64_t rem = q % kCostQuarter;
  switch (rem) {
    case 0: return std::to_string(whole);
    case 1: return std::to_string(whole) + ".25";
    case 2: return std::to_string(whole) + ".5";
    default: return std::to_string(whole) + ".75";
  }
}

}  // namespace

std::string analysis_report(std::int64_t a, std::int64_t b, std::int64_t alpha,
                            CostMode mode) {
  const CostModel model{mode, alpha};
  const __int128 a3 = __int128(alpha) * alpha * alpha;
  const __int128 total128 =
      __int128(4) * a * b * std::min(a, b) * a3;
  if (total128 > __int128(INT64_MAX / 4))
    throw std::invalid_argument("analysis_report: cost overflow");
  const std::int64_t total_q = std::int64_t(total128);

  const std::int64_t cp1 = critical_path(step1_graph(model, a, b));
  const std::int64_t cp3 = critical_path(step3_graph(model, a, b));
  const std::int64_t cpf = critical_path(full_graph(model, a, b));
  const Rational conc = avg_concurrency(total_q, cpf);

  std::string out;
  out += "a b alpha mode total_cost critical_path avg_concurrency\n";
  out += std::to_string(a) + " " + std::to_string(b) + " " +
         std::to_string(alpha) + " " + cost_mode_name(mode) + " " +
         quarters_to_string(total_q) + " " + quarters_to_string(cpf) + " " +
         conc.to_string() + " (~" + std::to_string(conc.value()) + ")\n";
  out += "step1 critical path: " + quarters_to_string(cp1) + "\n";
  out += "step3 critical path: " + quarters_to_string(cp3) + "\n";
  return out;
}

}  // namespace gfrref
