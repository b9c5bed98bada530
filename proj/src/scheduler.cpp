#include "gfrref/scheduler.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

#include "gfrref/tasks.hpp"

namespace gfrref {

std::size_t package_byte_size(const PackageValue& v) {
  return std::visit([](const auto& p) { return p.byte_size(); }, v);
}

const char* pkg_kind_name(PkgKind k) {
  switch (k) {
    case PkgKind::A: return "A";
    case PkgKind::B: return "B";
    case PkgKind::C: return "C";
    case PkgKind::D: return "D";
    case PkgKind::E: return "E";
    case PkgKind::K: return "K";
    case PkgKind::M: return "M";
    case PkgKind::R: return "R";
    case PkgKind::X: return "X";
  }
  return "?";
}

const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::ClearDown: return "ClearDown";
    case TaskKind::UpdateRow: return "UpdateRow";
    case TaskKind::UpdateRowTrafo: return "UpdateRowTrafo";
    case TaskKind::Extend: return "Extend";
    case TaskKind::RowLengthen: return "RowLengthen";
    case TaskKind::PreClearUp: return "PreClearUp";
    case TaskKind::ClearUp: return "ClearUp";
    case TaskKind::Copy: return "Copy";
  }
  return "?";
}

std::string SlotKey::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%u,%u,%u)v%u", pkg_kind_name(kind),
                unsigned(c0), unsigned(c1), unsigned(c2), unsigned(version));
  return buf;
}

std::int32_t TaskGraph::require_slot(const SlotKey& key) {
  if (key.c0 >= (1u << 14) || key.c1 >= (1u << 14) || key.c2 >= (1u << 14) ||
      key.version >= (1u << 14))
    throw std::invalid_argument("slot key coordinate out of range");
  if (!slots_.empty() && key_index_.empty())
    throw std::logic_error("require_slot called after the key index was dropped");
  const auto [it, inserted] =
      key_index_.try_emplace(key.packed(), std::int32_t(slots_.size()));
  if (inserted) {
    slots_.emplace_back();
    slots_.back().key = key;
  }
  return it->second;
}

std::int32_t TaskGraph::add_input(const SlotKey& key, PackageValue value) {
  const std::int32_t id = require_slot(key);
  PackageSlot& s = slots_[id];
  if (s.payload || s.producer != -1)
    throw std::invalid_argument("add_input: slot " + key.to_string() +
                                " already has a value or producer");
  s.payload = std::make_shared<const PackageValue>(std::move(value));
  return id;
}

std::int32_t TaskGraph::find_slot(const SlotKey& key) const {
  const auto it = key_index_.find(key.packed());
  return it == key_index_.end() ? -1 : it->second;
}

std::int32_t TaskGraph::plan_add(const TaskNode& node) {
  if (node.n_in > 4 || node.n_out > 2 || node.n_out == 0)
    throw std::invalid_argument("plan_add: arity out of range");
  const auto check = [&](std::int32_t slot_id) {
    if (slot_id < 0 || std::size_t(slot_id) >= slots_.size())
      throw std::invalid_argument("plan_add: slot id out of range");
  };
  for (std::uint8_t k = 0; k < node.n_in; ++k) check(node.in[k]);
  for (std::uint8_t k = 0; k < node.n_out; ++k) {
    check(node.out[k]);
    PackageSlot& s = slots_[node.out[k]];
    if (s.producer != -1 || s.payload)
      throw std::invalid_argument("plan_add: slot " + s.key.to_string() +
                                  " already has a producer or value");
  }
  const std::int32_t id = std::int32_t(nodes_.size());
  nodes_.push_back(node);
  for (std::uint8_t k = 0; k < node.n_out; ++k)
    slots_[node.out[k]].producer = id;
  for (std::uint8_t k = 0; k < node.n_in; ++k)
    slots_[node.in[k]].consumer_count += 1;
  return id;
}

void TaskGraph::retain(std::int32_t slot_id) { slots_[slot_id].retained = true; }

const PackageValue* TaskGraph::payload(std::int32_t slot_id) const {
  if (slot_id < 0 || std::size_t(slot_id) >= slots_.size()) return nullptr;
  return slots_[slot_id].payload.get();
}

void TaskGraph::drop_key_index_if_large(std::size_t keep_below) {
  if (key_index_.size() < keep_below) return;
  key_index_.clear();
  key_index_.rehash(0);
}

const FieldSpec& TaskGraph::field() const {
  if (!field_) throw std::logic_error("task graph has no field set");
  return *field_;
}

namespace {

// Typed access to a slot payload, with task-context errors.
const Matrix& in_mat(const TaskGraph& g, std::int32_t id) {
  const Matrix* m = std::get_if<Matrix>(g.slot(id).payload.get());
  if (!m) throw std::invalid_argument("input " + g.slot(id).key.to_string() +
                                      " is not a plain matrix");
  return *m;
}

template <class T>
const T& in_pkg(const TaskGraph& g, std::int32_t id) {
  const T* p = std::get_if<T>(g.slot(id).payload.get());
  if (!p) throw std::invalid_argument("input " + g.slot(id).key.to_string() +
                                      " has the wrong package type");
  return *p;
}

struct ExecResult {
  PackageValue out[2];
  int n_out = 0;
  std::int32_t detail = -1;
};

ExecResult execute_node(const TaskGraph& g, const TaskNode& nd) {
  ExecResult res;
  const FieldSpec& f = g.field();
  switch (nd.kind) {
    case TaskKind::ClearDown: {
      const Matrix& c = in_mat(g, nd.in[0]);
      static const PkgD kEmptyD;
      const bool first = nd.n_in < 2;
      const PkgD& d = first ? kEmptyD : in_pkg<PkgD>(g, nd.in[1]);
      auto [dp, ap] = clear_down(f, c, d, first ? 0 : 1, g.ech_threshold);
      res.detail = std::int32_t(ap.rho_prime.size());
      res.out[0] = std::move(dp);
      res.out[1] = std::move(ap);
      res.n_out = 2;
      break;
    }
    case TaskKind::UpdateRow: {
      const PkgA& a = in_pkg<PkgA>(g, nd.in[0]);
      const Matrix& c = in_mat(g, nd.in[1]);
      std::optional<Matrix> b;
      if (nd.n_in > 2) b = in_mat(g, nd.in[2]);
      auto [cp, bp] = update_row(f, a, c, b, b ? 1 : 0);
      res.out[0] = std::move(cp);
      res.out[1] = std::move(bp);
      res.n_out = 2;
      break;
    }
    case TaskKind::UpdateRowTrafo: {
      if (nd.c0 < 0 || nd.c1 < 0 || nd.c2 < 0)
        throw std::invalid_argument("row-transform task needs (i, j, h)");
      const std::size_t i = std::size_t(nd.c0), j = std::size_t(nd.c1),
                        h = std::size_t(nd.c2);
      const PkgA& a = in_pkg<PkgA>(g, nd.in[0]);
      const PkgE& e = in_pkg<PkgE>(g, nd.in[1]);
      int idx = 2;
      std::optional<Matrix> k, m;
      if (j > 0) k = in_mat(g, nd.in[idx++]);
      if (h < i) m = in_mat(g, nd.in[idx++]);
      if (idx != nd.n_in)
        throw std::invalid_argument("row-transform task arity mismatch");
      auto [kp, mp] = update_row_trafo(f, a, k, m, e, i, h, j);
      res.out[0] = std::move(kp);
      res.out[1] = std::move(mp);
      res.n_out = 2;
      break;
    }
    case TaskKind::Extend: {
      const PkgA& a = in_pkg<PkgA>(g, nd.in[0]);
      std::optional<PkgE> e;
      if (nd.n_in > 1) e = in_pkg<PkgE>(g, nd.in[1]);
      res.out[0] = extend(a, e, e ? 1 : 0);
      res.n_out = 1;
      break;
    }
    case TaskKind::RowLengthen: {
      res.out[0] = row_lengthen(in_mat(g, nd.in[0]),
                                in_pkg<PkgE>(g, nd.in[1]),
                                in_pkg<PkgE>(g, nd.in[2]));
      res.n_out = 1;
      break;
    }
    case TaskKind::PreClearUp: {
      auto [x, r] = pre_clear_up(in_mat(g, nd.in[0]),
                                 in_pkg<PkgD>(g, nd.in[1]));
      res.out[0] = std::move(x);
      res.out[1] = std::move(r);
      res.n_out = 2;
      break;
    }
    case TaskKind::ClearUp: {
      res.out[0] = clear_up(f, in_mat(g, nd.in[0]), in_mat(g, nd.in[1]),
                            in_mat(g, nd.in[2]));
      res.n_out = 1;
      break;
    }
    case TaskKind::Copy: {
      res.out[0] = copy_d(in_pkg<PkgD>(g, nd.in[0]));
      res.n_out = 1;
      break;
    }
  }
  if (res.n_out != nd.n_out)
    throw std::invalid_argument("task output arity mismatch");
  return res;
}

std::string task_context(const TaskNode& nd) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s(%d,%d,%d)", task_kind_name(nd.kind),
                int(nd.c0), int(nd.c1), int(nd.c2));
  return buf;
}

}  // namespace

RunReport run(TaskGraph& graph, const RunOptions& options) {
  const std::size_t n_nodes = graph.nodes_.size();
  const std::size_t n_slots = graph.slots_.size();
  const int n_workers = options.workers < 1 ? 1 : options.workers;

  RunReport report;
  report.workers = n_workers;

  // Static plan checks and consumer lists (CSR layout over input occurrences).
  std::vector<std::int32_t> cons_start(n_slots + 1, 0);
  for (const TaskNode& nd : graph.nodes_)
    for (std::uint8_t k = 0; k < nd.n_in; ++k) cons_start[nd.in[k] + 1] += 1;
  for (std::size_t s = 0; s < n_slots; ++s) cons_start[s + 1] += cons_start[s];
  std::vector<std::int32_t> cons_node(cons_start[n_slots]);
  {
    std::vector<std::int32_t> fill(cons_start.begin(), cons_start.end() - 1);
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const TaskNode& nd = graph.nodes_[n];
      for (std::uint8_t k = 0; k < nd.n_in; ++k)
        cons_node[fill[nd.in[k]]++] = std::int32_t(n);
    }
  }

  std::int64_t live = 0;
  for (std::size_t s = 0; s < n_slots; ++s) {
    PackageSlot& slot = graph.slots_[s];
    if (!slot.payload && slot.producer == -1)
      throw std::runtime_error("slot " + slot.key.to_string() +
                               " is never produced");
    slot.consumers_remaining.store(slot.consumer_count,
                                   std::memory_order_relaxed);
    if (slot.payload) live += std::int64_t(package_byte_size(*slot.payload));
  }
  report.initial_live_bytes = live;
  std::int64_t peak = live;

  std::vector<std::int32_t> pending(n_nodes, 0);
  using Entry = std::pair<std::int32_t, std::int32_t>;  // (priority, node id)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> ready;
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const TaskNode& nd = graph.nodes_[n];
    std::int32_t waits = 0;
    for (std::uint8_t k = 0; k < nd.n_in; ++k)
      if (!graph.slots_[nd.in[k]].payload) waits += 1;
    pending[n] = waits;
    if (waits == 0) ready.emplace(nd.priority, std::int32_t(n));
  }

  std::mutex mtx;
  std::condition_variable cv;
  std::size_t done = 0;
  int running = 0;
  bool stop = false;
  std::string error;
  const auto t0 = std::chrono::steady_clock::now();
  const auto now_ns = [&t0] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  auto worker_body = [&](int worker_id) {
    std::unique_lock<std::mutex> lk(mtx);
    for (;;) {
      cv.wait(lk, [&] {
        return stop || done == n_nodes || !ready.empty() ||
               (running == 0 && ready.empty());
      });
      if (stop || done == n_nodes) return;
      if (ready.empty()) {
        if (running == 0 && done < n_nodes) {
          stop = true;
          if (error.empty()) error = "cycle detected in task plan";
          cv.notify_all();
        }
        if (stop) return;
        continue;
      }
      const std::int32_t node_id = ready.top().second;
      ready.pop();
      running += 1;
      lk.unlock();

      const TaskNode& nd = graph.nodes_[node_id];
      const std::int64_t start_ns = now_ns();
      ExecResult res;
      std::string fail;
      try {
        res = execute_node(graph, nd);
      } catch (const std::exception& e) {
        fail = task_context(nd) + ": " + e.what();
      }
      const std::int64_t end_ns = now_ns();

      std::int64_t out_bytes = 0;
      if (fail.empty()) {
        for (int k = 0; k < res.n_out; ++k) {
          PackageSlot& s = graph.slots_[nd.out[k]];
          out_bytes += std::int64_t(package_byte_size(res.out[k]));
          s.payload =
              std::make_shared<const PackageValue>(std::move(res.out[k]));
        }
      }

      lk.lock();
      if (!fail.empty()) {
        stop = true;
        if (error.empty()) error = std::move(fail);
        running -= 1;
        cv.notify_all();
        return;
      }
      live += out_bytes;
      for (std::uint8_t k = 0; k < nd.n_out; ++k) {
        const std::int32_t sid = nd.out[k];
        for (std::int32_t c = cons_start[sid]; c < cons_start[sid + 1]; ++c) {
          if (--pending[cons_node[c]] == 0)
            ready.emplace(graph.nodes_[cons_node[c]].priority, cons_node[c]);
        }
      }
      for (std::uint8_t k = 0; k < nd.n_in; ++k) {
        PackageSlot& s = graph.slots_[nd.in[k]];
        const std::int32_t left =
            s.consumers_remaining.fetch_sub(1, std::memory_order_relaxed) - 1;
        if (left == 0 && !s.retained && !options.retain_all && s.payload) {
          live -= std::int64_t(package_byte_size(*s.payload));
          s.payload.reset();
        }
      }
      if (live > peak) peak = live;
      if (options.collect_trace) {
        report.trace.push_back(TraceRecord{nd.kind, nd.c0, nd.c1, nd.c2,
                                           worker_id, start_ns, end_ns, live,
                                           node_id, res.detail});
      }
      done += 1;
      running -= 1;
      cv.notify_all();
    }
  };

  if (n_nodes > 0) {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker_body, w);
    for (std::thread& t : pool) t.join();
  }

  if (!error.empty()) throw std::runtime_error(error);
  report.peak_live_bytes = peak;
  report.wall_ns = now_ns();
  return report;
}

void write_trace_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  out << "task_kind,i,j,k,worker,start_ns,end_ns,live_bytes\n";
  for (const TraceRecord& r : report.trace) {
    out << task_kind_name(r.kind) << ',' << r.c0 << ',' << r.c1 << ','
        << r.c2 << ',' << r.worker << ',' << r.start_ns << ',' << r.end_ns
        << ',' << r.live_bytes << '\n';
  }
  if (!out) throw std::runtime_error("failed writing trace file: " + path);
}

}  // namespace gfrref
