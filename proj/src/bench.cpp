#include "shiftqp/bench.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace shiftqp {

namespace {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_csv_double(const std::string& field, int line_no) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(field, &pos);
    if (pos == field.size()) return value;
  } catch (const std::exception&) {
  }
  throw MalformedRecords("line " + std::to_string(line_no) + ": not a number: " + field);
}

int parse_csv_int(const std::string& field, int line_no) {
  try {
    std::size_t pos = 0;
    const int value = std::stoi(field, &pos);
    if (pos == field.size()) return value;
  } catch (const std::exception&) {
  }
  throw MalformedRecords("line " + std::to_string(line_no) + ": not an integer: " + field);
}

BenchRecord make_record(std::string problem, std::string config, const SolveReport& rep,
                        const SolverParams& params) {
  BenchRecord rec;
  rec.problem = std::move(problem);
  rec.config = std::move(config);
  rec.status = rep.status;
  rec.iters = rep.iters;
  rec.seconds = rep.wall_seconds;
  rec.r_d = rep.r_d;
  rec.r_e = rep.r_e;
  rec.r_i = rep.r_i;
  rec.r_n = rep.r_n;
  if (rep.status != SolveStatus::Solved) {
    rec.iters = params.max_iters;
    if (params.time_limit_seconds > 0.0) {
      rec.seconds = std::max(rec.seconds, params.time_limit_seconds);
    }
  }
  return rec;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t h = seed ^ (a << 40) ^ (b << 20) ^ c;
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

std::string indexed_name(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%03d", prefix, index);
  return buf;
}

}  // namespace

std::string config_name(KktMode mode, NcpKind kind) {
  std::string name = mode == KktMode::Condensed ? "condensed" : "full";
  name += kind == NcpKind::SmoothedMin ? "-min" : "-fb";
  return name;
}

SolveStatus parse_status(const std::string& name) {
  for (const SolveStatus status :
       {SolveStatus::Solved, SolveStatus::MaxIters, SolveStatus::TimeLimit,
        SolveStatus::PrimalInfeasible, SolveStatus::DualInfeasible}) {
    if (name == to_string(status)) return status;
  }
  throw MalformedRecords("unknown status: " + name);
}

std::vector<BenchRecord> run_degenerate_bench(const SolverParams& params) {
  std::vector<BenchRecord> records;
  const std::vector<QpModel> suite = degenerate_suite();
  const std::string config = config_name(params.kkt, params.ncp);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const SolveReport rep = solve(suite[i], params);
    records.push_back(make_record("degenerate-" + std::to_string(i + 1), config, rep,
                                  params));
  }
  return records;
}

std::vector<BenchRecord> run_random_bench(int count, int n, int m, int p,
                                          std::uint64_t seed, const SolverParams& base) {
  static constexpr std::array<std::pair<KktMode, NcpKind>, 4> kConfigs = {{
      {KktMode::Condensed, NcpKind::SmoothedMin},
      {KktMode::Condensed, NcpKind::FischerBurmeister},
      {KktMode::Full, NcpKind::SmoothedMin},
      {KktMode::Full, NcpKind::FischerBurmeister},
  }};
  std::vector<BenchRecord> records;
  records.reserve(static_cast<std::size_t>(count) * kConfigs.size());
  for (int i = 0; i < count; ++i) {
    const QpModel qp = random_qp(n, m, p, seed + static_cast<std::uint64_t>(i));
    for (const auto& [mode, kind] : kConfigs) {
      SolverParams params = base;
      params.kkt = mode;
      params.ncp = kind;
      const SolveReport rep = solve(qp, params);
      records.push_back(
          make_record(indexed_name("random", i), config_name(mode, kind), rep, params));
    }
  }
  return records;
}

std::vector<WcrRecord> run_warmstart_study(int count, int n, int m, int p,
                                           const std::vector<double>& deltas,
                                           std::uint64_t seed,
                                           const SolverParams& params) {
  std::vector<WcrRecord> records;
  records.reserve(static_cast<std::size_t>(count) * deltas.size() * 10);
  for (int i = 0; i < count; ++i) {
    const QpModel base = random_qp(n, m, p, seed + static_cast<std::uint64_t>(i));
    const SolveReport cold = solve(base, params);
    const std::string problem = indexed_name("base", i);
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      for (int replicate = 1; replicate <= 10; ++replicate) {
        PerturbSpec spec;
        spec.delta = deltas[di];
        spec.seed = mix_seed(seed, static_cast<std::uint64_t>(i), di,
                             static_cast<std::uint64_t>(replicate));
        const QpModel shifted = perturb(base, spec);
        const SolveReport warm = solve(shifted, params, cold.solution);
        WcrRecord rec;
        rec.problem = problem;
        rec.delta = deltas[di];
        rec.replicate = replicate;
        rec.n_cold = cold.iters;
        rec.n_warm = warm.iters;
        rec.wcr = static_cast<double>(warm.iters) / static_cast<double>(cold.iters);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

namespace {

std::vector<double> wcr_values_at(const std::vector<WcrRecord>& records, double delta) {
  std::vector<double> values;
  for (const auto& rec : records) {
    if (rec.delta == delta) values.push_back(rec.wcr);
  }
  if (values.empty()) {
    throw MalformedRecords("no warm-start records at delta " + format_double(delta));
  }
  return values;
}

}  // namespace

double mean_wcr(const std::vector<WcrRecord>& records, double delta) {
  const std::vector<double> values = wcr_values_at(records, delta);
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double median_wcr(const std::vector<WcrRecord>& records, double delta) {
  std::vector<double> values = wcr_values_at(records, delta);
  std::sort(values.begin(), values.end());
  const std::size_t half = values.size() / 2;
  if (values.size() % 2 == 1) return values[half];
  return 0.5 * (values[half - 1] + values[half]);
}

std::vector<ProfilePoint> compute_profile(const std::vector<BenchRecord>& records,
                                          ProfileMetric metric, std::vector<double> taus) {
  if (records.empty()) throw MalformedRecords("no records");

  std::map<std::string, std::map<std::string, double>> by_problem;
  std::set<std::string> configs;
  for (const auto& rec : records) {
    double value;
    if (metric == ProfileMetric::Iterations) {
      if (rec.iters <= 0) throw MalformedRecords("nonpositive iteration count");
      value = static_cast<double>(rec.iters);
    } else {
      value = std::max(rec.seconds, 1e-9);
    }
    if (!by_problem[rec.problem].emplace(rec.config, value).second) {
      throw MalformedRecords("duplicate record for (" + rec.problem + ", " + rec.config +
                             ")");
    }
    configs.insert(rec.config);
  }
  if (configs.size() < 2) {
    throw MalformedRecords("performance profile needs at least two configurations");
  }
  for (const auto& [problem, row] : by_problem) {
    if (row.size() != configs.size()) {
      throw MalformedRecords("configuration missing for problem " + problem);
    }
  }

  std::map<std::string, std::vector<double>> ratios;
  for (const auto& [problem, row] : by_problem) {
    double best = row.begin()->second;
    for (const auto& [config, value] : row) best = std::min(best, value);
    for (const auto& [config, value] : row) ratios[config].push_back(value / best);
  }

  if (taus.empty()) {
    for (const auto& [config, values] : ratios) {
      taus.insert(taus.end(), values.begin(), values.end());
    }
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  const double problem_count = static_cast<double>(by_problem.size());
  std::vector<ProfilePoint> points;
  points.reserve(ratios.size() * taus.size());
  for (const auto& [config, values] : ratios) {
    for (const double tau : taus) {
      const auto within = std::count_if(values.begin(), values.end(),
                                        [tau](double r) { return r <= tau; });
      points.push_back({config, tau, static_cast<double>(within) / problem_count});
    }
  }
  return points;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "problem,config,status,iters,seconds,r_d,r_e,r_i,r_n\n";
  for (const auto& rec : records) {
    out << rec.problem << ',' << rec.config << ',' << to_string(rec.status) << ','
        << rec.iters << ',' << format_double(rec.seconds) << ',' << format_double(rec.r_d)
        << ',' << format_double(rec.r_e) << ',' << format_double(rec.r_i) << ','
        << format_double(rec.r_n) << '\n';
  }
  if (!out) throw IoError("failed to write benchmark records");
}

void write_bench_csv(const std::string& path, const std::vector<BenchRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_bench_csv(out, records);
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedRecords("empty benchmark file");
  if (line == "problem,config,status,iters,seconds,r_d,r_e,r_i,r_n\r") line.pop_back();
  if (line != "problem,config,status,iters,seconds,r_d,r_e,r_i,r_n") {
    throw MalformedRecords("unexpected header: " + line);
  }
  std::vector<BenchRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 9) {
      throw MalformedRecords("line " + std::to_string(line_no) + ": expected 9 fields");
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw MalformedRecords("line " + std::to_string(line_no) + ": empty id field");
    }
    BenchRecord rec;
    rec.problem = fields[0];
    rec.config = fields[1];
    rec.status = parse_status(fields[2]);
    rec.iters = parse_csv_int(fields[3], line_no);
    rec.seconds = parse_csv_double(fields[4], line_no);
    rec.r_d = parse_csv_double(fields[5], line_no);
    rec.r_e = parse_csv_double(fields[6], line_no);
    rec.r_i = parse_csv_double(fields[7], line_no);
    rec.r_n = parse_csv_double(fields[8], line_no);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<BenchRecord> read_bench_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return read_bench_csv(in);
}

void write_wcr_csv(std::ostream& out, const std::vector<WcrRecord>& records) {
  out << "problem,delta,replicate,n_cold,n_warm,wcr\n";
  for (const auto& rec : records) {
    out << rec.problem << ',' << format_double(rec.delta) << ',' << rec.replicate << ','
        << rec.n_cold << ',' << rec.n_warm << ',' << format_double(rec.wcr) << '\n';
  }
  if (!out) throw IoError("failed to write warm-start records");
}

void write_wcr_csv(const std::string& path, const std::vector<WcrRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_wcr_csv(out, records);
}

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points) {
  out << "config,tau,fraction\n";
  for (const auto& point : points) {
    out << point.config << ',' << format_double(point.tau) << ','
        << format_double(point.fraction) << '\n';
  }
  if (!out) throw IoError("failed to write profile points");
}

void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_profile_csv(out, points);
}

namespace {

QpModel pinned_sudoku(int n_block, const std::vector<SudokuGiven>& givens,
                      const std::vector<SudokuGiven>& pins) {
  QpModel qp = sudoku_qp(n_block, givens);
  if (pins.empty()) return qp;
  const int N = n_block * n_block;
  const int extra = static_cast<int>(pins.size());
  Mat A(qp.m + extra, qp.n);
  A.topRows(qp.m) = qp.A;
  A.bottomRows(extra).setZero();
  Vec b(qp.m + extra);
  b.head(qp.m) = qp.b;
  for (int t = 0; t < extra; ++t) {
    const auto& pin = pins[static_cast<std::size_t>(t)];
    A(qp.m + t, (pin.row * N + pin.col) * N + (pin.digit - 1)) = 1.0;
    b[qp.m + t] = 1.0;
  }
  return make_qp(std::move(qp.Q), std::move(qp.c), std::move(A), std::move(b),
                 std::move(qp.G), std::move(qp.h));
}

class SudokuSearch {
 public:
  SudokuSearch(int n_block, const std::vector<SudokuGiven>& givens,
               const SolverParams& params)
      : n_block_(n_block), side_(n_block * n_block), givens_(givens), params_(params) {}

  bool run(std::vector<SudokuGiven>& pins, SudokuSolveResult& out, bool root) {
    if (solves_ >= kSolveCap) return false;
    const QpModel qp = pinned_sudoku(n_block_, givens_, pins);
    ++solves_;
    const SolveReport rep = solve(qp, params_);
    if (rep.status != SolveStatus::Solved) return false;

    const std::vector<int> grid = sudoku_round(n_block_, rep.solution.x);
    if (root) {
      out.grid = grid;
      out.relaxation = rep.solution.x;
    }
    if (sudoku_grid_valid(n_block_, grid)) {
      out.grid = grid;
      out.relaxation = rep.solution.x;
      out.valid = true;
      return true;
    }

    std::vector<bool> pinned(static_cast<std::size_t>(side_) * side_, false);
    for (const auto& pin : pins) {
      pinned[static_cast<std::size_t>(pin.row) * side_ + pin.col] = true;
    }
    int best_cell = -1;
    double best_mass = -1.0;
    for (int cell = 0; cell < side_ * side_; ++cell) {
      if (pinned[static_cast<std::size_t>(cell)]) continue;
      const double mass = rep.solution.x.segment(cell * side_, side_).maxCoeff();
      if (mass > best_mass) {
        best_mass = mass;
        best_cell = cell;
      }
    }
    if (best_cell < 0) return false;

    std::vector<int> digits(static_cast<std::size_t>(side_));
    std::iota(digits.begin(), digits.end(), 1);
    const auto mass_of = [&](int digit) {
      return rep.solution.x[best_cell * side_ + digit - 1];
    };
    std::stable_sort(digits.begin(), digits.end(),
                     [&](int a, int b) { return mass_of(a) > mass_of(b); });

    for (const int digit : digits) {
      pins.push_back({best_cell / side_, best_cell % side_, digit});
      if (run(pins, out, false)) return true;
      pins.pop_back();
    }
    return false;
  }

  int solves() const { return solves_; }

 private:
  static constexpr int kSolveCap = 500;
  int n_block_;
  int side_;
  const std::vector<SudokuGiven>& givens_;
  const SolverParams& params_;
  int solves_{0};
};

}  // namespace

SudokuSolveResult solve_sudoku_grid(int n_block, const std::vector<SudokuGiven>& givens,
                                    const SolverParams& params) {
  SudokuSolveResult result;
  SudokuSearch search(n_block, givens, params);
  std::vector<SudokuGiven> pins = givens;
  search.run(pins, result, true);
  result.solves = search.solves();

  const int side = n_block * n_block;
  result.honors_givens = !result.grid.empty();
  for (const auto& g : givens) {
    if (result.grid.empty() ||
        result.grid[static_cast<std::size_t>(g.row) * side + g.col] != g.digit) {
      result.honors_givens = false;
    }
  }
  return result;
}

}  // namespace shiftqp
