#ifndef SHIFTQP_BENCH_HPP
#define SHIFTQP_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "shiftqp/generators.hpp"
#include "shiftqp/model.hpp"
#include "shiftqp/solver.hpp"

namespace shiftqp {

/// A benchmark CSV does not satisfy the profile preconditions.
struct MalformedRecords : Error {
  using Error::Error;
};

/// One solver run on one problem. For runs that did not reach Solved the
/// metric fields carry the configured upper bounds so profiles rank them last.
struct BenchRecord {
  std::string problem;
  std::string config;
  SolveStatus status{SolveStatus::MaxIters};
  int iters{0};
  double seconds{0.0};
  double r_d{0.0};
  double r_e{0.0};
  double r_i{0.0};
  double r_n{0.0};
};

/// Warm-to-cold iteration ratio for one perturbed replicate.
struct WcrRecord {
  std::string problem;
  double delta{0.0};
  int replicate{0};  ///< 1-based, 10 replicates per (problem, delta)
  int n_cold{0};
  int n_warm{0};
  double wcr{0.0};
};

/// One point of a performance profile: fraction of problems a configuration
/// solved within factor tau of the per-problem best.
struct ProfilePoint {
  std::string config;
  double tau{1.0};
  double fraction{0.0};
};

enum class ProfileMetric { Iterations, Seconds };

/// Canonical configuration id, e.g. "condensed-min".
std::string config_name(KktMode mode, NcpKind kind);

SolveStatus parse_status(const std::string& name);

/// Runs the three-problem degenerate suite under one configuration.
std::vector<BenchRecord> run_degenerate_bench(const SolverParams& params);

/// Solves `count` random instances under all four (kkt, ncp) configurations.
std::vector<BenchRecord> run_random_bench(int count, int n, int m, int p,
                                          std::uint64_t seed, const SolverParams& base);

/// Cold-solves `count` random bases, then warm-starts 10 perturbed replicates
/// per delta from each base solution. Identical parameters for both runs.
std::vector<WcrRecord> run_warmstart_study(int count, int n, int m, int p,
                                           const std::vector<double>& deltas,
                                           std::uint64_t seed,
                                           const SolverParams& params);

double mean_wcr(const std::vector<WcrRecord>& records, double delta);
double median_wcr(const std::vector<WcrRecord>& records, double delta);

/// Performance profile over the records. Every configuration must cover every
/// problem exactly once and at least two configurations must be present.
/// An empty tau grid means the sorted set of observed ratios.
std::vector<ProfilePoint> compute_profile(const std::vector<BenchRecord>& records,
                                          ProfileMetric metric,
                                          std::vector<double> taus = {});

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_bench_csv(const std::string& path, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_csv(std::istream& in);
std::vector<BenchRecord> read_bench_csv(const std::string& path);
void write_wcr_csv(std::ostream& out, const std::vector<WcrRecord>& records);
void write_wcr_csv(const std::string& path, const std::vector<WcrRecord>& records);
void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points);
void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& points);

/// Result of the relaxation-plus-pinning Sudoku decode.
struct SudokuSolveResult {
  std::vector<int> grid;
  Vec relaxation;  ///< primal solution of the last QP solved
  bool valid{false};
  bool honors_givens{false};
  int solves{0};
};

/// Decodes a grid from the continuous relaxation. Givens are pinned as
/// equality rows; when the per-cell argmax of a solve is not a valid grid,
/// the most confident unpinned cell is pinned to its argmax digit and the
/// model re-solved, backtracking over digit choices on dead ends.
SudokuSolveResult solve_sudoku_grid(int n_block, const std::vector<SudokuGiven>& givens,
                                    const SolverParams& params);

}  // namespace shiftqp

#endif
