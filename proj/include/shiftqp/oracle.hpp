#ifndef SHIFTQP_ORACLE_HPP
#define SHIFTQP_ORACLE_HPP

#include <optional>
#include <vector>

#include "shiftqp/model.hpp"

namespace shiftqp {

enum class OracleStatus {
  Optimal,
  Infeasible,
  Unbounded,
};

struct OracleSolution {
  Vec x;
  Vec y;
  Vec z;  ///< z ≥ 0, zero off the active set
  double objective{0.0};
  std::vector<int> active_set;
  bool unique_primal{true};
};

struct OracleResult {
  OracleStatus status{OracleStatus::Optimal};
  std::optional<OracleSolution> solution;
  Vec ray;  ///< unbounded descent direction when status is Unbounded
};

/// Ground-truth reference solver by exhaustive active-set enumeration.
///
/// Every subset W of inequality rows yields an equality-constrained KKT
/// subsystem solved by minimum-norm least squares; consistent subsystems
/// whose solutions are primal feasible with nonnegative active multipliers
/// are global optima by convexity. The best candidate is returned, with
/// ties resolved toward the lexicographically smallest W. With no
/// candidate, a feasibility phase distinguishes Infeasible from Unbounded
/// (the latter certified by an explicit recession ray).
///
/// Budget: p ≤ 20 and n ≤ 50, else BudgetExceeded.
OracleResult enumerate_solve(const QpModel& qp);

}  // namespace shiftqp

#endif
