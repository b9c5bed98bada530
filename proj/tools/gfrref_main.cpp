#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gfrref/cli.hpp"
#include "gfrref/io.hpp"

namespace {

/// "1" or "1,4,8" -> {1, 4, 8}. Throws gfrref::ParseError on garbage.
std::vector<int> parse_threads_arg(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = comma == std::string::npos
                                ? text.substr(pos)
                                : text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw gfrref::ParseError("invalid --threads value: '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Dense negative reduced row echelon form over GF(p^k): blocked "
      "parallel elimination with rank, remnant, transformation and select "
      "sets, plus verification, benchmarking and critical-path analysis."};
  app.require_subcommand(1);

  gfrref::RunConfig cfg;
  std::string field_arg = "2";
  std::string modulus_arg;
  std::string threads_arg = "1";

  const auto add_field = [&](CLI::App* cmd) {
    cmd->add_option("--field", field_arg, "Field order as p or p^k");
    cmd->add_option("--modulus", modulus_arg,
                    "Modulus coefficients c0,...,ck (default: first monic "
                    "irreducible)");
  };
  const auto add_run_shape = [&](CLI::App* cmd) {
    cmd->add_option("--block", cfg.block, "Block side length");
    cmd->add_option("--threads", threads_arg,
                    "Worker count (bench accepts a comma list)");
    cmd->add_flag_callback(
        "--no-transform", [&] { cfg.with_transform = false; },
        "Skip the transformation matrix");
    cmd->add_option("--trace", cfg.trace_path, "Write a task trace CSV here");
    cmd->add_option("--ech-threshold", cfg.ech_threshold,
                    "Direct elimination below this size");
    cmd->add_flag("--remainder-first", cfg.remainder_first,
                  "Put the remainder part first in the partition");
  };

  CLI::App* ech = app.add_subcommand(
      "ech", "Echelonize a matrix file and write rank/remnant/selects");
  ech->add_option("--in", cfg.in_path, "Input matrix file")->required();
  ech->add_option("--out-r", cfg.out_r_path, "Write the remnant matrix here");
  ech->add_option("--out-t", cfg.out_t_path,
                  "Write the transformation blocks here");
  ech->add_option("--out-selects", cfg.out_selects_path,
                  "Write the row/column select sets here");
  add_run_shape(ech);

  CLI::App* verify = app.add_subcommand(
      "verify", "Check previously written outputs against an input matrix");
  verify->add_option("--in", cfg.in_path, "Input matrix file")->required();
  verify->add_option("--out-r", cfg.out_r_path, "Remnant file")->required();
  verify->add_option("--out-selects", cfg.out_selects_path, "Selects file")
      ->required();
  verify->add_option("--out-t", cfg.out_t_path, "Transformation file");

  CLI::App* rank =
      app.add_subcommand("rank", "Print the rank of a matrix file");
  rank->add_option("--in", cfg.in_path, "Input matrix file")->required();
  add_run_shape(rank);

  CLI::App* bench = app.add_subcommand(
      "bench", "Echelonize a seeded random matrix for each thread count");
  bench->add_option("--size", cfg.size, "Matrix side length");
  bench->add_option("--seed", cfg.seed, "PRNG seed");
  add_field(bench);
  add_run_shape(bench);

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Print model cost, critical path and concurrency");
  analyze->add_option("--a", cfg.a, "Block rows");
  analyze->add_option("--b", cfg.b, "Block columns (default: same as --a)");
  analyze->add_option("--alpha", cfg.alpha, "Block side length");
  analyze->add_option("--mode", cfg.mode,
                      "worst_case or well_conditioned (default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gfrref::kExitBadInput;
  }

  try {
    cfg.threads = parse_threads_arg(threads_arg);
    gfrref::parse_field_arg(field_arg, cfg.field_p, cfg.field_k);
    if (!modulus_arg.empty()) cfg.modulus = gfrref::parse_modulus_arg(modulus_arg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gfrref::kExitBadInput;
  }

  try {
    if (app.got_subcommand(ech)) return gfrref::cmd_ech(cfg);
    if (app.got_subcommand(verify)) return gfrref::cmd_verify(cfg);
    if (app.got_subcommand(rank)) return gfrref::cmd_rank(cfg);
    if (app.got_subcommand(bench)) return gfrref::cmd_bench(cfg);
    if (app.got_subcommand(analyze)) return gfrref::cmd_analyze(cfg);
  } catch (const std::exception& e) {
    std::cerr << "task failure: " << e.what() << "\n";
    return gfrref::kExitTaskFailure;
  }
  std::cerr << "error: no command\n";
  return gfrref::kExitBadInput;
}
