#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gfrref/packages.hpp"

namespace gfrref {

/// A data package value. PkgB/C/K/M/R/X are bare matrices; their identity
/// lives in the slot key.
using PackageValue = std::variant<Matrix, PkgA, PkgD, PkgE>;

std::size_t package_byte_size(const PackageValue& v);

enum class PkgKind : std::uint8_t { A, B, C, D, E, K, M, R, X };
const char* pkg_kind_name(PkgKind k);

/// Identity of a package slot: kind, up to three block coordinates, and a
/// version counter (the update round that produced it). Unused coordinates
/// are 0.
struct SlotKey {
  PkgKind kind;
  std::uint16_t c0 = 0, c1 = 0, c2 = 0;
  std::uint16_t version = 0;

  std::uint64_t packed() const {
    return (std::uint64_t(std::uint8_t(kind)) << 56) |
           (std::uint64_t(c0) << 42) | (std::uint64_t(c1) << 28) |
           (std::uint64_t(c2) << 14) | std::uint64_t(version);
  }
  bool operator==(const SlotKey& o) const { return packed() == o.packed(); }
  std::string to_string() const;
};

/// A single-writer, multi-reader package slot.
struct PackageSlot {
  SlotKey key;
  std::int32_t producer = -1;  // node id, -1 for born-ready input slots
  std::shared_ptr<const PackageValue> payload;  // set once, then immutable
  // Remaining consumers before the payload may be released; set at run start.
  std::atomic<std::int32_t> consumers_remaining{0};
  std::int32_t consumer_count = 0;  // static consumer occurrences
  bool retained = false;            // keep payload after the run

  PackageSlot() = default;
  PackageSlot(PackageSlot&& o) noexcept
      : key(o.key),
        producer(o.producer),
        payload(std::move(o.payload)),
        consumers_remaining(o.consumers_remaining.load()),
        consumer_count(o.consumer_count),
        retained(o.retained) {}
};

enum class TaskKind : std::uint8_t {
  ClearDown,
  UpdateRow,
  UpdateRowTrafo,
  Extend,
  RowLengthen,
  PreClearUp,
  ClearUp,
  Copy,
};
const char* task_kind_name(TaskKind k);

/// One task instance. Inputs/outputs are slot ids; arity is bounded by the
/// widest task (UpdateRowTrafo: 4 in, 2 out), so storage is inline.
struct TaskNode {
  TaskKind kind;
  std::int32_t c0 = -1, c1 = -1, c2 = -1;  // trace coordinates i, j, k
  std::int32_t priority = 0;               // lower runs first among runnable
  std::int32_t in[4] = {-1, -1, -1, -1};
  std::int32_t out[2] = {-1, -1};
  std::uint8_t n_in = 0, n_out = 0;
};

struct TraceRecord {
  TaskKind kind;
  std::int32_t c0, c1, c2;
  std::int32_t worker;
  std::int64_t start_ns, end_ns;
  std::int64_t live_bytes;   // live package bytes right after this task
  std::int32_t node = -1;    // node id (not emitted to CSV)
  std::int32_t detail = -1;  // ClearDown: newly found pivot count r'
};

struct RunOptions {
  int workers = 1;
  bool collect_trace = false;
  bool retain_all = false;  // keep every payload (inspection/testing)
};

struct RunReport {
  std::vector<TraceRecord> trace;       // completion order (if collected)
  std::int64_t peak_live_bytes = 0;     // max over the run, inputs included
  std::int64_t initial_live_bytes = 0;  // born-ready inputs
  std::int64_t wall_ns = 0;
  int workers = 1;
};

/// A task plan over package slots. Build with require_slot/add_input/plan_add,
/// then execute with run(). Not thread-safe during construction.
class TaskGraph {
 public:
  /// Get or create the slot with this key; returns its id.
  std::int32_t require_slot(const SlotKey& key);

  /// Create (or fill) a born-ready input slot holding `value`.
  std::int32_t add_input(const SlotKey& key, PackageValue value);

  /// Slot id for a key, or -1 if absent (or if the lookup index was dropped;
  /// see drop_key_index_if_large). Intended for assembly and tests.
  std::int32_t find_slot(const SlotKey& key) const;

  /// Register a task. Throws std::invalid_argument if an output slot already
  /// has a producer (single-writer rule) or arity limits are exceeded.
  std::int32_t plan_add(const TaskNode& node);

  /// Keep this slot's payload alive after the run.
  void retain(std::int32_t slot_id);

  const PackageValue* payload(std::int32_t slot_id) const;
  const PackageSlot& slot(std::int32_t slot_id) const { return slots_[slot_id]; }
  const TaskNode& node(std::int32_t node_id) const { return nodes_[node_id]; }
  std::size_t slot_count() const { return slots_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  /// Free the key→id map when the graph is large; slot ids stay valid,
  /// find_slot starts returning -1. Called by large plan builders.
  void drop_key_index_if_large(std::size_t keep_below = (1u << 20));

  const FieldSpec& field() const;
  void set_field(const FieldSpec& f) { field_ = f; }
  std::size_t ech_threshold = 256;

 private:
  friend RunReport run(TaskGraph&, const RunOptions&);
  std::vector<PackageSlot> slots_;
  std::vector<TaskNode> nodes_;
  std::unordered_map<std::uint64_t, std::int32_t> key_index_;
  std::optional<FieldSpec> field_;
};

/// Execute every node with a fixed pool of `workers` threads. Among runnable
/// nodes, lower (priority, insertion id) runs first. Package values are
/// reference-count released as their last consumer finishes. Results are
/// independent of the worker count.
///
/// Throws std::runtime_error naming the task coordinates if a task throws,
/// and std::runtime_error("cycle...") if the plan deadlocks on a cycle.
RunReport run(TaskGraph& graph, const RunOptions& options);

/// Write `task_kind,i,j,k,worker,start_ns,end_ns,live_bytes` CSV.
void write_trace_csv(const RunReport& report, const std::string& path);

}  // namespace gfrref
