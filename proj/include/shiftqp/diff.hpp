#ifndef SHIFTQP_DIFF_HPP
#define SHIFTQP_DIFF_HPP

#include <string>

#include "shiftqp/iterate.hpp"
#include "shiftqp/model.hpp"
#include "shiftqp/ncp.hpp"

namespace shiftqp {

/// Transposed KKT solve missed its residual contract even after the diagonal shift.
struct SingularAfterRegularization : Error {
  using Error::Error;
};

/// A forward solve inside the finite-difference loop did not reach Solved.
struct SolveFailedDuringCheck : Error {
  using Error::Error;
};

/// Gradient of a scalar loss with respect to each solution block.
struct AdjointSeed {
  Vec dl_dx;
  Vec dl_dy;
  Vec dl_dz;
  Vec dl_ds;
};

/// Solution of the transposed KKT system, one block per residual row.
struct Adjoint {
  Vec lam_d;
  Vec lam_e;
  Vec lam_i;
  Vec lam_g;
};

/// Loss gradients with respect to every problem datum.
struct QpGradients {
  Mat dQ;  ///< symmetric, pair convention: d/dQ(j,k) of the symmetric pair is dQ(j,k) + dQ(k,j)
  Vec dc;
  Mat dA;
  Vec db;
  Mat dG;
  Vec dh;
};

/// Tracking loss 0.5 * ||x - x_target||^2 evaluated at the primal solution.
struct LossSpec {
  Vec x_target;
};

struct FdCheckOptions {
  double fd_step{1e-6};
  double solve_eps{1e-12};
  double weak_activity_tol{1e-6};
};

struct FdCheckReport {
  /// min_j max(s_j, z_j) fell below weak_activity_tol; comparisons skipped.
  bool weakly_active{false};
  /// min over inequality rows of max(s_j, z_j); +inf when p = 0.
  double strict_complementarity_margin{0.0};
  double max_rel_error{0.0};
  std::string worst_entry;
  QpGradients analytic;
  QpGradients numeric;
};

/// Solves [dr/dU]^T lambda = -seed at the solution, using the final penalty state.
Adjoint solve_adjoint(const QpModel& qp, const Iterate& solution, const PenaltyState& pen,
                      NcpKind kind, const AdjointSeed& seed,
                      double regularization_shift = 1e-11);

/// Contracts the adjoint against the parameter Jacobian of the residual.
QpGradients hypergradient(const QpModel& qp, const Iterate& solution, const Adjoint& lam);

/// Solves the model, forms hypergradients of the tracking loss, and compares every
/// entry against central finite differences with re-solves at tight tolerance.
FdCheckReport finite_diff_check(const QpModel& qp, const LossSpec& loss,
                                const FdCheckOptions& opts = {});

}  // namespace shiftqp

#endif
