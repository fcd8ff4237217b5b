#ifndef SHIFTQP_GENERATORS_HPP
#define SHIFTQP_GENERATORS_HPP

#include <cstdint>
#include <vector>

#include "shiftqp/model.hpp"

namespace shiftqp {

/// Multiplicative data-perturbation protocol for warm-start studies:
/// x̃ = x + δ(mask ∘ η ∘ x) with η ~ Uniform[-1, 1] per entry and a
/// Bernoulli mask of density min(mask_density_cap, mask_count_cap/dim).
struct PerturbSpec {
  double delta{0.0};
  std::uint64_t seed{0};
  double mask_density_cap{0.1};
  double mask_count_cap{20.0};
};

/// Strictly convex, strictly feasible random instance: Q = LLᵀ + 1e-3·I,
/// b = A·x₀ and h = G·x₀ + |u| with u ≠ 0, so x₀ is strictly feasible.
/// Deterministic per seed.
QpModel random_qp(int n, int m, int p, std::uint64_t seed);

/// Applies PerturbSpec to every data block. Q is perturbed on the upper
/// triangle and mirrored; zero entries stay zero, so sparsity patterns and
/// symmetry survive. delta = 0 returns the input unchanged.
QpModel perturb(const QpModel& model, const PerturbSpec& spec);

/// Three hand-built ill-posed instances: (1) a redundant inequality copy,
/// (2) equality/inequality rows that are linearly dependent at the active
/// point with a near-singular cost, (3) a zero-row inequality plus a flat
/// cost direction giving a non-unique primal solution.
std::vector<QpModel> degenerate_suite();

/// One fixed cell of a Sudoku instance, 0-based row/col, digit in [1, N].
struct SudokuGiven {
  int row{0};
  int col{0};
  int digit{0};
};

/// Continuous Sudoku relaxation over indicator variables x ∈ [0,1]^{N³}
/// with N = n_block²: cost ½·0.1·‖x‖² − Σ_givens x, equality rows for the
/// row/column/block exactly-once sums, and box bounds as inequality rows.
/// The equality system is rank deficient and intentionally kept so.
QpModel sudoku_qp(int n_block, const std::vector<SudokuGiven>& givens);

/// Digit grid helpers shared by the CLI and tests. Grids are row-major
/// N×N digit vectors with entries in [1, N].
std::vector<int> sudoku_round(int n_block, const Vec& x);
bool sudoku_grid_valid(int n_block, const std::vector<int>& grid);

}  // namespace shiftqp

#endif
