#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gfrref {

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitBadInput = 2;  // parse/config failure
inline constexpr int kExitTaskFailure = 3;

struct RunConfig {
  std::string command;  // ech | verify | rank | bench | analyze

  std::string in_path;
  std::string out_r_path;
  std::string out_t_path;
  std::string out_selects_path;
  std::string trace_path;

  std::size_t block = 256;
  std::vector<int> threads = {1};  // bench may list several
  bool with_transform = true;
  std::size_t ech_threshold = 256;
  bool remainder_first = false;

  std::uint64_t seed = 1;
  std::size_t size = 0;
  std::uint32_t field_p = 2;
  std::uint32_t field_k = 1;
  std::vector<std::uint32_t> modulus;  // empty = default

  std::int64_t a = 1, b = -1;  // analyze; b < 0 means b = a
  std::int64_t alpha = 1;
  // Default favors the data-side headline model, under which a 1×1 grid
  // trivially reports concurrency 1.
  std::string mode = "well_conditioned";
};

/// Each command prints to stdout/stderr and returns an exit code.
int cmd_ech(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_rank(const RunConfig& config);
int cmd_bench(const RunConfig& config);
int cmd_analyze(const RunConfig& config);

}  // namespace gfrref
