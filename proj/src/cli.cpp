#include "gfrref/cli.hpp"

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <utility>

#include "gfrref/analysis.hpp"
#include "gfrref/chief.hpp"
#include "gfrref/generate.hpp"
#include "gfrref/io.hpp"

namespace gfrref {

namespace {

FieldSpec field_from_config(const RunConfig& config) {
  if (config.field_k == 1) {
    if (!config.modulus.empty())
      throw ParseError("prime fields take no modulus");
    return FieldSpec(config.field_p);
  }
  return FieldSpec(config.field_p, config.field_k, config.modulus);
}

int bad(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kExitBadInput;
}

/// Returns false (after printing) if the run-shape options are unusable.
bool check_run_options(const RunConfig& config) {
  if (config.block < 1) {
    bad("--block must be at least 1");
    return false;
  }
  if (config.ech_threshold < 1) {
    bad("--ech-threshold must be at least 1");
    return false;
  }
  if (config.threads.empty()) {
    bad("--threads needs at least one value");
    return false;
  }
  for (int t : config.threads)
    if (t < 1) {
      bad("--threads values must be at least 1");
      return false;
    }
  return true;
}

EchelonizeOptions options_from_config(const RunConfig& config, int threads) {
  EchelonizeOptions o;
  o.block = config.block;
  o.threads = threads;
  o.with_transform = config.with_transform;
  o.ech_threshold = config.ech_threshold;
  o.remainder_first = config.remainder_first;
  o.collect_trace = !config.trace_path.empty();
  return o;
}

}  // namespace

int cmd_ech(const RunConfig& config) {
  if (config.in_path.empty()) return bad("ech requires --in");
  if (!config.with_transform && !config.out_t_path.empty())
    return bad("--out-t conflicts with --no-transform");
  if (!check_run_options(config)) return kExitBadInput;

  GfMat in{FieldSpec(2), Matrix()};
  try {
    in = read_gfmat_file(config.in_path);
  } catch (const std::exception& e) {
    return bad(e.what());
  }

  EchelonOutput out{in.field};
  RunReport report;
  try {
    out = echelonize(in.matrix, in.field,
                     options_from_config(config, config.threads.front()),
                     &report);
  } catch (const std::exception& e) {
    std::cerr << "task failure: " << e.what() << "\n";
    return kExitTaskFailure;
  }

  try {
    if (!config.out_r_path.empty())
      write_gfmat_file(config.out_r_path, out.field, out.assembled_R());
    if (!config.out_selects_path.empty())
      write_selects_file(config.out_selects_path, out);
    if (!config.out_t_path.empty()) write_transform_file(config.out_t_path, out);
    if (!config.trace_path.empty()) write_trace_csv(report, config.trace_path);
  } catch (const std::exception& e) {
    return bad(e.what());
  }

  std::cout << "rank " << out.rank << "\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& config) {
  if (config.in_path.empty() || config.out_r_path.empty() ||
      config.out_selects_path.empty())
    return bad("verify requires --in, --out-r and --out-selects");

  GfMat in{FieldSpec(2), Matrix()};
  try {
    in = read_gfmat_file(config.in_path);
  } catch (const std::exception& e) {
    return bad(e.what());
  }
  EchelonOutput out{in.field};
  try {
    out = read_outputs(config.out_r_path, config.out_selects_path,
                       config.out_t_path, in.field);
  } catch (const std::exception& e) {
    return bad(e.what());
  }

  std::string diag;
  bool ok = false;
  try {
    ok = verify(in.matrix, out, &diag);
  } catch (const std::exception& e) {
    std::cerr << "task failure: " << e.what() << "\n";
    return kExitTaskFailure;
  }
  if (!ok) {
    std::cout << "verification failed: " << diag << "\n";
    return kExitVerifyFailed;
  }
  std::cout << "verification passed (rank " << out.rank << ")\n";
  return kExitOk;
}

int cmd_rank(const RunConfig& config) {
  if (config.in_path.empty()) return bad("rank requires --in");
  if (!check_run_options(config)) return kExitBadInput;

  GfMat in{FieldSpec(2), Matrix()};
  try {
    in = read_gfmat_file(config.in_path);
  } catch (const std::exception& e) {
    return bad(e.what());
  }
  try {
    EchelonizeOptions o = options_from_config(config, config.threads.front());
    o.with_transform = false;
    const EchelonOutput out = echelonize(in.matrix, in.field, o);
    std::cout << "rank " << out.rank << "\n";
  } catch (const std::exception& e) {
    std::cerr << "task failure: " << e.what() << "\n";
    return kExitTaskFailure;
  }
  return kExitOk;
}

int cmd_bench(const RunConfig& config) {
  if (!check_run_options(config)) return kExitBadInput;
  FieldSpec field(2);
  try {
    field = field_from_config(config);
  } catch (const std::exception& e) {
    return bad(e.what());
  }

  const std::size_t n = config.size;
  std::cout << "bench: " << n << "x" << n << " over " << field.name()
            << ", block " << config.block << ", seed " << config.seed
            << (config.with_transform ? ", with transform" : ", no transform")
            << "\n";
  const Matrix m = random_matrix(field, n, n, config.seed);

  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %14s %8s %18s", "threads", "wall_ms",
                "speedup", "peak_live_bytes");
  std::string table = std::string(buf) + "\n";
  std::int64_t base_ns = 0;
  bool first = true;
  for (int t : config.threads) {
    EchelonizeOptions o = options_from_config(config, t);
    o.collect_trace = false;
    RunReport report;
    EchelonOutput out{field};
    try {
      out = echelonize(m, field, o, &report);
    } catch (const std::exception& e) {
      std::cerr << "task failure: " << e.what() << "\n";
      return kExitTaskFailure;
    }
    if (first) {
      std::cout << "rank " << out.rank << "\n";
      base_ns = report.wall_ns;
      first = false;
    }
    const double ms = double(report.wall_ns) / 1e6;
    const double speedup = report.wall_ns > 0
                               ? double(base_ns) / double(report.wall_ns)
                               : 1.0;
    std::snprintf(buf, sizeof buf, "%-8d %14.3f %8.2f %18lld", t, ms, speedup,
                  static_cast<long long>(report.peak_live_bytes));
    table += std::string(buf) + "\n";
  }
  std::cout << table;
  return kExitOk;
}

int cmd_analyze(const RunConfig& config) {
  CostMode mode;
  if (config.mode == "worst_case") {
    mode = CostMode::worst_case;
  } else if (config.mode == "well_conditioned") {
    mode = CostMode::well_conditioned;
  } else {
    return bad("analyze supports --mode worst_case or well_conditioned, got '" +
               config.mode + "'");
  }
  const std::int64_t a = config.a;
  const std::int64_t b = config.b < 0 ? a : config.b;
  if (a < 1 || b < 1) return bad("--a and --b must be at least 1");
  if (config.alpha < 1) return bad("--alpha must be at least 1");
  try {
    std::cout << analysis_report(a, b, config.alpha, mode);
  } catch (const std::exception& e) {
    return bad(e.what());
  }
  return kExitOk;
}

}  // namespace gfrref
