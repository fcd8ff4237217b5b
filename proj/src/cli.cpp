#include "shiftqp/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "shiftqp/bench.hpp"
#include "shiftqp/diff.hpp"
#include "shiftqp/generators.hpp"
#include "shiftqp/io.hpp"
#include "shiftqp/model.hpp"
#include "shiftqp/solver.hpp"

namespace shiftqp {

namespace {

struct CommonOptions {
  SolverParams params;
  std::string kkt{"condensed"};
  std::string ncp{"min"};
  std::uint64_t seed{0};
  std::string out;
};

void add_solver_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--eps-abs", opts.params.eps_abs, "absolute stopping tolerance");
  cmd->add_option("--eps-rel", opts.params.eps_rel, "relative stopping tolerance");
  cmd->add_option("--max-iters", opts.params.max_iters, "iteration cap");
  cmd->add_option("--time-limit", opts.params.time_limit_seconds,
                  "wall-clock limit in seconds, 0 disables");
  cmd->add_option("--kkt", opts.kkt, "linear system form")
      ->check(CLI::IsMember({"condensed", "full"}));
  cmd->add_option("--ncp", opts.ncp, "complementarity residual")
      ->check(CLI::IsMember({"min", "fb"}));
  cmd->add_option("--verbose", opts.params.verbose, "0 silent, 1 summary, 2 per-iteration")
      ->check(CLI::Range(0, 2));
}

void add_seed_flag(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--seed", opts.seed, "random seed");
}

void add_out_flag(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--out", opts.out, "write CSV here instead of stdout");
}

SolverParams finalize(const CommonOptions& opts) {
  SolverParams params = opts.params;
  params.kkt = opts.kkt == "full" ? KktMode::Full : KktMode::Condensed;
  params.ncp = opts.ncp == "fb" ? NcpKind::FischerBurmeister : NcpKind::SmoothedMin;
  return params;
}

/// Whitespace-separated numbers with # comments: x, then s, then y, then z.
Iterate load_warm_start(const std::string& path, const QpModel& qp) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open warm-start file: " + path);

  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double value = 0.0;
    while (fields >> value) values.push_back(value);
    if (!fields.eof()) throw ParseError(line_no, "not a number in warm-start file");
  }

  const auto expected =
      static_cast<std::size_t>(qp.n) + qp.p + qp.m + qp.p;
  if (values.size() != expected) {
    throw ParseError(line_no, "warm start needs " + std::to_string(expected) +
                                  " values (x, s, y, z), got " +
                                  std::to_string(values.size()));
  }
  Iterate it;
  const auto take = [&values](std::size_t offset, int count) {
    Vec v(count);
    for (int i = 0; i < count; ++i) v[i] = values[offset + static_cast<std::size_t>(i)];
    return v;
  };
  std::size_t offset = 0;
  it.x = take(offset, qp.n);
  offset += static_cast<std::size_t>(qp.n);
  it.s = take(offset, qp.p);
  offset += static_cast<std::size_t>(qp.p);
  it.y = take(offset, qp.m);
  offset += static_cast<std::size_t>(qp.m);
  it.z = take(offset, qp.p);
  if (!it.x.allFinite() || !it.s.allFinite() || !it.y.allFinite() || !it.z.allFinite()) {
    throw NonFiniteEntry("warm-start file has a non-finite value");
  }
  return it;
}

int status_exit_code(SolveStatus status) {
  return status == SolveStatus::Solved ? 0 : 1;
}

int cmd_solve(const CommonOptions& opts, const std::string& path,
              const std::string& warm_path) {
  const QpModel qp = load_qp(path);
  std::optional<Iterate> warm;
  if (!warm_path.empty()) warm = load_warm_start(warm_path, qp);

  const SolveReport rep = solve(qp, finalize(opts), warm);
  std::printf("status %s\n", to_string(rep.status));
  std::printf("iters %d\n", rep.iters);
  std::printf("objective %.12g\n", objective(qp, rep.solution.x));
  std::printf("r_d %.6e\nr_e %.6e\nr_i %.6e\nr_n %.6e\n", rep.r_d, rep.r_e, rep.r_i,
              rep.r_n);
  std::printf("seconds %.6f\n", rep.wall_seconds);
  return status_exit_code(rep.status);
}

void emit_bench_csv(const CommonOptions& opts, const std::vector<BenchRecord>& records) {
  if (opts.out.empty()) {
    write_bench_csv(std::cout, records);
  } else {
    write_bench_csv(opts.out, records);
  }
}

int cmd_bench_degenerate(const CommonOptions& opts) {
  const std::vector<BenchRecord> records = run_degenerate_bench(finalize(opts));
  emit_bench_csv(opts, records);
  for (const auto& rec : records) {
    if (rec.status != SolveStatus::Solved) {
      std::fprintf(stderr, "%s did not solve: %s\n", rec.problem.c_str(),
                   to_string(rec.status));
      return 1;
    }
  }
  return 0;
}

int cmd_bench_warmstart(const CommonOptions& opts, int count, int n, int m, int p,
                        const std::vector<double>& deltas) {
  const std::vector<WcrRecord> records =
      run_warmstart_study(count, n, m, p, deltas, opts.seed, finalize(opts));
  if (opts.out.empty()) {
    write_wcr_csv(std::cout, records);
  } else {
    write_wcr_csv(opts.out, records);
  }
  std::FILE* summary = opts.out.empty() ? stderr : stdout;
  for (const double delta : deltas) {
    std::fprintf(summary, "delta %g: mean WCR %.4f, median WCR %.4f\n", delta,
                 mean_wcr(records, delta), median_wcr(records, delta));
  }
  return 0;
}

int cmd_bench_random(const CommonOptions& opts, int count, int n, int m, int p) {
  emit_bench_csv(opts, run_random_bench(count, n, m, p, opts.seed, finalize(opts)));
  return 0;
}

int cmd_profile(const CommonOptions& opts, const std::string& records_path,
                const std::string& metric, std::vector<double> taus) {
  const std::vector<BenchRecord> records = read_bench_csv(records_path);
  const ProfileMetric chosen =
      metric == "time" ? ProfileMetric::Seconds : ProfileMetric::Iterations;
  const std::vector<ProfilePoint> points =
      compute_profile(records, chosen, std::move(taus));
  if (opts.out.empty()) {
    write_profile_csv(std::cout, points);
  } else {
    write_profile_csv(opts.out, points);
  }
  return 0;
}

int cmd_gradcheck(const CommonOptions& opts, int count, int n, int m, int p) {
  constexpr double kTol = 1e-5;
  int failures = 0;
  int excluded = 0;
  for (int i = 0; i < count; ++i) {
    const QpModel qp = random_qp(n, m, p, opts.seed + static_cast<std::uint64_t>(i));
    try {
      const FdCheckReport report = finite_diff_check(qp, LossSpec{Vec::Zero(qp.n)});
      if (report.weakly_active) {
        ++excluded;
        std::printf("instance %d: excluded, weak activity margin %.3e\n", i,
                    report.strict_complementarity_margin);
        continue;
      }
      const bool ok = report.max_rel_error <= kTol;
      std::printf("instance %d: max rel error %.3e%s%s\n", i, report.max_rel_error,
                  report.worst_entry.empty() ? "" : " at ",
                  report.worst_entry.c_str());
      if (!ok) ++failures;
    } catch (const SolveFailedDuringCheck& err) {
      std::printf("instance %d: solve failed during check (%s)\n", i, err.what());
      ++failures;
    }
  }
  std::printf("gradcheck: %d checked, %d excluded, %d failed\n", count - excluded,
              excluded, failures);
  return failures == 0 ? 0 : 1;
}

/// Given file lines are `row col digit`, 1-based, with # comments.
std::vector<SudokuGiven> load_givens(const std::string& path, int n_block) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open givens file: " + path);
  const int side = n_block * n_block;

  std::vector<SudokuGiven> givens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int row = 0;
    int col = 0;
    int digit = 0;
    if (!(fields >> row)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(line_no, "expected `row col digit`");
    }
    if (!(fields >> col >> digit)) throw ParseError(line_no, "expected `row col digit`");
    std::string rest;
    if (fields >> rest) throw ParseError(line_no, "trailing content after digit");
    if (row < 1 || row > side || col < 1 || col > side) {
      throw ParseError(line_no, "row/col outside 1.." + std::to_string(side));
    }
    givens.push_back({row - 1, col - 1, digit});
  }
  return givens;
}

int cmd_sudoku(const CommonOptions& opts, int n_block, const std::string& givens_path) {
  std::vector<SudokuGiven> givens;
  if (!givens_path.empty()) givens = load_givens(givens_path, n_block);

  const SudokuSolveResult result = solve_sudoku_grid(n_block, givens, finalize(opts));
  const int side = n_block * n_block;
  if (result.grid.empty()) {
    std::fprintf(stderr, "relaxation did not solve\n");
    return 1;
  }
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      std::printf("%s%d", j == 0 ? "" : " ", result.grid[static_cast<std::size_t>(i) * side + j]);
    }
    std::printf("\n");
  }
  std::printf("%s\n", result.valid && result.honors_givens ? "VALID" : "INVALID");
  return result.valid && result.honors_givens ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"all-shifted non-interior-point QP solver"};
  app.require_subcommand(1);

  int exit_code = 0;

  auto solve_opts = std::make_shared<CommonOptions>();
  auto solve_path = std::make_shared<std::string>();
  auto warm_path = std::make_shared<std::string>();
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one ODQP file");
  solve_cmd->add_option("path", *solve_path, "problem file")->required();
  solve_cmd->add_option("--warm", *warm_path,
                        "warm-start file: x, s, y, z entries in order");
  add_solver_flags(solve_cmd, *solve_opts);
  solve_cmd->callback([&exit_code, solve_opts, solve_path, warm_path] {
    exit_code = cmd_solve(*solve_opts, *solve_path, *warm_path);
  });

  auto degen_opts = std::make_shared<CommonOptions>();
  CLI::App* degen_cmd =
      app.add_subcommand("bench-degenerate", "run the three-problem degenerate suite");
  add_solver_flags(degen_cmd, *degen_opts);
  add_out_flag(degen_cmd, *degen_opts);
  degen_cmd->callback(
      [&exit_code, degen_opts] { exit_code = cmd_bench_degenerate(*degen_opts); });

  auto warm_opts = std::make_shared<CommonOptions>();
  auto warm_count = std::make_shared<int>(50);
  auto warm_n = std::make_shared<int>(40);
  auto warm_m = std::make_shared<int>(20);
  auto warm_p = std::make_shared<int>(20);
  auto warm_deltas = std::make_shared<std::vector<double>>(
      std::vector<double>{0.001, 0.01, 0.1});
  CLI::App* warm_cmd =
      app.add_subcommand("bench-warmstart", "warm-to-cold ratio study, 10 replicates");
  warm_cmd->add_option("--count", *warm_count, "number of base problems");
  warm_cmd->add_option("--n", *warm_n, "variables per base problem");
  warm_cmd->add_option("--m", *warm_m, "equality rows");
  warm_cmd->add_option("--p", *warm_p, "inequality rows");
  warm_cmd->add_option("--deltas", *warm_deltas, "perturbation magnitudes")
      ->delimiter(',');
  add_solver_flags(warm_cmd, *warm_opts);
  add_seed_flag(warm_cmd, *warm_opts);
  add_out_flag(warm_cmd, *warm_opts);
  warm_cmd->callback([&exit_code, warm_opts, warm_count, warm_n, warm_m, warm_p,
                      warm_deltas] {
    exit_code = cmd_bench_warmstart(*warm_opts, *warm_count, *warm_n, *warm_m, *warm_p,
                                    *warm_deltas);
  });

  auto rand_opts = std::make_shared<CommonOptions>();
  auto rand_count = std::make_shared<int>(50);
  auto rand_n = std::make_shared<int>(20);
  auto rand_m = std::make_shared<int>(5);
  auto rand_p = std::make_shared<int>(10);
  CLI::App* rand_cmd = app.add_subcommand(
      "bench-random", "random instances under all four solver configurations");
  rand_cmd->add_option("--count", *rand_count, "number of problems");
  rand_cmd->add_option("--n", *rand_n, "variables");
  rand_cmd->add_option("--m", *rand_m, "equality rows");
  rand_cmd->add_option("--p", *rand_p, "inequality rows");
  add_solver_flags(rand_cmd, *rand_opts);
  add_seed_flag(rand_cmd, *rand_opts);
  add_out_flag(rand_cmd, *rand_opts);
  rand_cmd->callback([&exit_code, rand_opts, rand_count, rand_n, rand_m, rand_p] {
    exit_code = cmd_bench_random(*rand_opts, *rand_count, *rand_n, *rand_m, *rand_p);
  });

  auto prof_opts = std::make_shared<CommonOptions>();
  auto prof_path = std::make_shared<std::string>();
  auto prof_metric = std::make_shared<std::string>("iters");
  auto prof_taus = std::make_shared<std::vector<double>>();
  CLI::App* prof_cmd =
      app.add_subcommand("profile", "performance profile from a benchmark CSV");
  prof_cmd->add_option("records", *prof_path, "benchmark CSV")->required();
  prof_cmd->add_option("--metric", *prof_metric, "ranking metric")
      ->check(CLI::IsMember({"iters", "time"}));
  prof_cmd->add_option("--tau", *prof_taus, "evaluation grid, default observed ratios")
      ->delimiter(',');
  add_out_flag(prof_cmd, *prof_opts);
  prof_cmd->callback([&exit_code, prof_opts, prof_path, prof_metric, prof_taus] {
    exit_code = cmd_profile(*prof_opts, *prof_path, *prof_metric, *prof_taus);
  });

  auto grad_opts = std::make_shared<CommonOptions>();
  auto grad_count = std::make_shared<int>(20);
  auto grad_n = std::make_shared<int>(4);
  auto grad_m = std::make_shared<int>(1);
  auto grad_p = std::make_shared<int>(3);
  CLI::App* grad_cmd = app.add_subcommand(
      "gradcheck", "compare hypergradients against central finite differences");
  grad_cmd->add_option("--count", *grad_count, "number of random instances");
  grad_cmd->add_option("--n", *grad_n, "variables");
  grad_cmd->add_option("--m", *grad_m, "equality rows");
  grad_cmd->add_option("--p", *grad_p, "inequality rows");
  add_seed_flag(grad_cmd, *grad_opts);
  grad_cmd->callback([&exit_code, grad_opts, grad_count, grad_n, grad_m, grad_p] {
    exit_code = cmd_gradcheck(*grad_opts, *grad_count, *grad_n, *grad_m, *grad_p);
  });

  auto sudoku_opts = std::make_shared<CommonOptions>();
  auto sudoku_block = std::make_shared<int>(2);
  auto sudoku_givens = std::make_shared<std::string>();
  CLI::App* sudoku_cmd =
      app.add_subcommand("sudoku", "solve the continuous Sudoku relaxation");
  sudoku_cmd->add_option("--n-block", *sudoku_block, "block size")
      ->check(CLI::IsMember({2, 3}));
  sudoku_cmd->add_option("--givens", *sudoku_givens,
                         "file of `row col digit` lines, 1-based");
  add_solver_flags(sudoku_cmd, *sudoku_opts);
  sudoku_cmd->callback([&exit_code, sudoku_opts, sudoku_block, sudoku_givens] {
    exit_code = cmd_sudoku(*sudoku_opts, *sudoku_block, *sudoku_givens);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  } catch (const Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return exit_code;
}

}  // namespace shiftqp
