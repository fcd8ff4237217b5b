#include "shiftqp/generators.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "shiftqp/rng.hpp"

namespace shiftqp {

QpModel random_qp(int n, int m, int p, std::uint64_t seed) {
  if (n < 1 || m < 0 || p < 0 || m > n) {
    throw InvalidDimensions("random_qp requires n >= 1, 0 <= m <= n, p >= 0");
  }
  Rng rng(seed);

  Mat L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L(i, j) = rng.normal();
  Mat Q = L * L.transpose();
  Q.diagonal().array() += 1e-3;

  Vec c(n);
  for (int i = 0; i < n; ++i) c(i) = rng.normal();

  Mat A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();

  Mat G(p, n);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.normal();

  Vec x0(n);
  for (int i = 0; i < n; ++i) x0(i) = rng.normal();

  Vec b = A * x0;
  Vec h = G * x0;
  for (int i = 0; i < p; ++i) h(i) += 0.1 + rng.uniform01();

  return make_qp(std::move(Q), std::move(c), std::move(A), std::move(b), std::move(G),
                 std::move(h));
}

namespace {

double perturb_entry(double v, double delta, double density, Rng& rng) {
  const double eta = rng.uniform_pm1();
  const double zeta = rng.uniform01();
  return zeta < density ? v + delta * eta * v : v;
}

// Upper triangle perturbed, then mirrored; preserves symmetry and zeros.
void perturb_symmetric(Mat& M, double delta, double cap, double count_cap, Rng& rng) {
  const auto n = M.rows();
  const double dim = static_cast<double>(n * (n + 1) / 2);
  const double density = std::min(cap, count_cap / std::max(1.0, dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      M(i, j) = perturb_entry(M(i, j), delta, density, rng);
      M(j, i) = M(i, j);
    }
  }
}

void perturb_dense(Mat& M, double delta, double cap, double count_cap, Rng& rng) {
  const double dim = static_cast<double>(M.size());
  const double density = std::min(cap, count_cap / std::max(1.0, dim));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      M(i, j) = perturb_entry(M(i, j), delta, density, rng);
}

void perturb_vec(Vec& v, double delta, double cap, double count_cap, Rng& rng) {
  const double dim = static_cast<double>(v.size());
  const double density = std::min(cap, count_cap / std::max(1.0, dim));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = perturb_entry(v(i), delta, density, rng);
}

}  // namespace

QpModel perturb(const QpModel& model, const PerturbSpec& spec) {
  validate(model);
  if (spec.delta < 0.0) throw Error("perturbation level must be nonnegative");
  if (!(spec.mask_density_cap > 0.0 && spec.mask_density_cap <= 1.0) ||
      !(spec.mask_count_cap > 0.0)) {
    throw Error("mask caps must lie in (0, 1] and (0, inf)");
  }
  QpModel out = model;
  if (spec.delta == 0.0) return out;

  Rng rng(spec.seed);
  perturb_symmetric(out.Q, spec.delta, spec.mask_density_cap, spec.mask_count_cap, rng);
  perturb_vec(out.c, spec.delta, spec.mask_density_cap, spec.mask_count_cap, rng);
  perturb_dense(out.A, spec.delta, spec.mask_density_cap, spec.mask_count_cap, rng);
  perturb_vec(out.b, spec.delta, spec.mask_density_cap, spec.mask_count_cap, rng);
  perturb_dense(out.G, spec.delta, spec.mask_density_cap, spec.mask_count_cap, rng);
  perturb_vec(out.h, spec.delta, spec.mask_density_cap, spec.mask_count_cap, rng);
  validate(out);
  return out;
}

std::vector<QpModel> degenerate_suite() {
  std::vector<QpModel> suite;

  {
    // min 1/2(x1^2 + x2^2) s.t. x1 >= 1 and the redundant copy x1 >= 0.
    Mat Q = Mat::Identity(2, 2);
    Vec c = Vec::Zero(2);
    Mat G(2, 2);
    G << -1, 0, -1, 0;
    Vec h(2);
    h << -1, 0;
    suite.push_back(make_qp(std::move(Q), std::move(c), Mat(0, 2), Vec(0), std::move(G),
                            std::move(h)));
  }

  {
    // Near-singular cost; the x1 = 0 equality and the x1 >= 0 inequality
    // are linearly dependent wherever both are active.
    Mat Q(2, 2);
    Q << 1e-10, 1e-12, 1e-12, 1e-6;
    Vec c(2);
    c << 1e-4, -1;
    Mat A(1, 2);
    A << 1, 0;
    Vec b(1);
    b << 0;
    Mat G(2, 2);
    G << -1, 0, 0, -1;
    Vec h = Vec::Zero(2);
    suite.push_back(make_qp(std::move(Q), std::move(c), std::move(A), std::move(b),
                            std::move(G), std::move(h)));
  }

  {
    // Flat direction x2 plus an all-zero inequality row: multiple optima
    // and an active constraint with zero gradient.
    Mat Q(2, 2);
    Q << 1, 0, 0, 0;
    Vec c(2);
    c << 1, 0;
    Mat G(5, 2);
    G << 0, 0, -1, 0, 1, 0, 0, -1, 0, 1;
    Vec h(5);
    h << 0, 0, 3, 0, 3;
    suite.push_back(make_qp(std::move(Q), std::move(c), Mat(0, 2), Vec(0), std::move(G),
                            std::move(h)));
  }

  return suite;
}

namespace {

int sudoku_index(int N, int i, int j, int k) { return (i * N + j) * N + k; }

}  // namespace

QpModel sudoku_qp(int n_block, const std::vector<SudokuGiven>& givens) {
  if (n_block != 2 && n_block != 3) {
    throw InvalidDimensions("n_block must be 2 or 3");
  }
  const int N = n_block * n_block;
  const int dim = N * N * N;

  std::set<std::pair<int, int>> seen;
  for (const auto& g : givens) {
    if (g.row < 0 || g.row >= N || g.col < 0 || g.col >= N || g.digit < 1 || g.digit > N) {
      throw InconsistentGivens("given outside the grid or digit range");
    }
    if (!seen.insert({g.row, g.col}).second) {
      throw InconsistentGivens("two givens address the same cell");
    }
  }
  for (size_t a = 0; a < givens.size(); ++a) {
    for (size_t b2 = a + 1; b2 < givens.size(); ++b2) {
      const auto& u = givens[a];
      const auto& v = givens[b2];
      if (u.digit != v.digit) continue;
      const bool same_row = u.row == v.row;
      const bool same_col = u.col == v.col;
      const bool same_block = (u.row / n_block == v.row / n_block) &&
                              (u.col / n_block == v.col / n_block);
      if (same_row || same_col || same_block) {
        throw InconsistentGivens("two givens repeat a digit in one unit");
      }
    }
  }

  Mat Q = 0.1 * Mat::Identity(dim, dim);
  Vec c = Vec::Zero(dim);
  for (const auto& g : givens) c(sudoku_index(N, g.row, g.col, g.digit - 1)) = -1.0;

  // Row, column, and block exactly-once sums per digit. The three families
  // overlap, so A is rank deficient by construction.
  const int m = 3 * N * N;
  Mat A = Mat::Zero(m, dim);
  int row = 0;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k, ++row)
      for (int j = 0; j < N; ++j) A(row, sudoku_index(N, i, j, k)) = 1.0;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k, ++row)
      for (int i = 0; i < N; ++i) A(row, sudoku_index(N, i, j, k)) = 1.0;
  for (int bi = 0; bi < n_block; ++bi)
    for (int bj = 0; bj < n_block; ++bj)
      for (int k = 0; k < N; ++k, ++row)
        for (int di = 0; di < n_block; ++di)
          for (int dj = 0; dj < n_block; ++dj)
            A(row, sudoku_index(N, bi * n_block + di, bj * n_block + dj, k)) = 1.0;
  Vec b = Vec::Ones(m);

  // Box 0 <= x <= 1: lower-bound rows then upper-bound rows.
  Mat G(2 * dim, dim);
  G.topRows(dim) = -Mat::Identity(dim, dim);
  G.bottomRows(dim) = Mat::Identity(dim, dim);
  Vec h(2 * dim);
  h.head(dim).setZero();
  h.tail(dim).setOnes();

  return make_qp(std::move(Q), std::move(c), std::move(A), std::move(b), std::move(G),
                 std::move(h));
}

std::vector<int> sudoku_round(int n_block, const Vec& x) {
  const int N = n_block * n_block;
  if (x.size() != static_cast<Eigen::Index>(N) * N * N) {
    throw DimensionMismatch("x length must be N^3");
  }
  std::vector<int> grid(static_cast<size_t>(N) * N, 0);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      int best = 0;
      for (int k = 1; k < N; ++k) {
        if (x(sudoku_index(N, i, j, k)) > x(sudoku_index(N, i, j, best))) best = k;
      }
      grid[static_cast<size_t>(i) * N + j] = best + 1;
    }
  }
  return grid;
}

bool sudoku_grid_valid(int n_block, const std::vector<int>& grid) {
  const int N = n_block * n_block;
  if (grid.size() != static_cast<size_t>(N) * N) return false;
  for (int v : grid)
    if (v < 1 || v > N) return false;

  const auto unit_ok = [&](auto cell_of) {
    std::vector<bool> used(static_cast<size_t>(N) + 1, false);
    for (int t = 0; t < N; ++t) {
      const int v = grid[cell_of(t)];
      if (used[static_cast<size_t>(v)]) return false;
      used[static_cast<size_t>(v)] = true;
    }
    return true;
  };

  for (int i = 0; i < N; ++i) {
    if (!unit_ok([&](int t) { return static_cast<size_t>(i) * N + t; })) return false;
  }
  for (int j = 0; j < N; ++j) {
    if (!unit_ok([&](int t) { return static_cast<size_t>(t) * N + j; })) return false;
  }
  for (int bi = 0; bi < n_block; ++bi) {
    for (int bj = 0; bj < n_block; ++bj) {
      if (!unit_ok([&](int t) {
            const int di = t / n_block;
            const int dj = t % n_block;
            return static_cast<size_t>(bi * n_block + di) * N + (bj * n_block + dj);
          })) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace shiftqp
