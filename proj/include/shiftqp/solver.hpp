#ifndef SHIFTQP_SOLVER_HPP
#define SHIFTQP_SOLVER_HPP

#include <optional>
#include <vector>

#include "shiftqp/iterate.hpp"
#include "shiftqp/kkt.hpp"
#include "shiftqp/model.hpp"
#include "shiftqp/ncp.hpp"

namespace shiftqp {

struct NonFiniteMerit : Error {
  using Error::Error;
};

enum class SolveStatus {
  Solved,
  MaxIters,
  TimeLimit,
  PrimalInfeasible,
  DualInfeasible,
};

const char* to_string(SolveStatus status);

/// All tunables. Defaults are the double-precision working set; see
/// single_precision_params() for the reduced-precision preset.
struct SolverParams {
  // Neighborhood acceptance: after-norm <= theta * before-norm + beta * mu.
  double beta{0.85};
  double theta{0.95};

  // Centering parameter bounds and smoothing floor.
  double sigma_min{0.1};
  double sigma_max{0.9};
  double mu_min{1e-16};

  // Interpolation-parameter schedule.
  double theta_min{0.1};   ///< hard-threshold floor; below it θ snaps to 0
  double theta_lo{0.3};    ///< θ_l, sufficient-improvement factor
  double theta_up{0.85};   ///< θ_u, degradation factor
  double theta_dec{0.4};   ///< θ⁻, decrease rate
  double theta_inc{0.3};   ///< θ⁺, increase rate

  // Proximal penalties.
  double rho_init{1e-9};
  double rho_min{1e-9};
  double delta{5.0};  ///< regularization boost / relaxation factor

  // Line search.
  double eta{1e-2};
  double gamma{1.0};  ///< non-monotone scale on the reference merit
  double ls_backtrack_factor{0.5};
  double alpha_min{1e-10};

  // Centering extras.
  double delta_mu_plus{0.5};  ///< extra μ decrease on strong progress
  double sigma_init{0.5};
  double theta_init{0.0};

  // Termination.
  double eps_abs{1e-8};
  double eps_rel{1e-8};
  double eps_prim_inf{1e-10};
  double eps_dual_inf{1e-10};
  int max_iters{200};
  double time_limit_seconds{0.0};  ///< 0 disables the limit

  // Method selection.
  NcpKind ncp{NcpKind::SmoothedMin};
  KktMode kkt{KktMode::Condensed};
  int verbose{0};  ///< 0 silent, 1 summary, 2 per-iteration rows
};

/// Double-precision defaults with ρ and μ_min scaled up by 1e4, the
/// documented adjustment for running in reduced precision.
SolverParams single_precision_params();

struct TraceRow {
  int iter{0};
  double alpha{0.0};
  double mu{0.0};
  double sigma{0.0};
  double merit{0.0};
  double r_d{0.0};
  double r_e{0.0};
  double r_i{0.0};
  double r_n{0.0};
  bool line_search_stalled{false};
  int boosts{0};
};

struct SolveReport {
  SolveStatus status{SolveStatus::MaxIters};
  Iterate solution;
  int iters{0};
  double r_d{0.0};  ///< final outer residual ∞-norms
  double r_e{0.0};
  double r_i{0.0};
  double r_n{0.0};
  std::vector<TraceRow> trace;
  PenaltyState final_penalty;  ///< state at exit; the adjoint solve reuses it
  Estimates final_estimates;
  double wall_seconds{0.0};
  bool factorization_failed{false};
  bool aborted_nonfinite{false};
};

/// Perturbed residual of the proximally shifted system at (it, est, pen).
Residual perturbed_residual(const QpModel& qp, const Iterate& it, const Estimates& est,
                            const PenaltyState& pen, NcpKind kind);

/// Unshifted optimality residuals (r_d, r_e, r_i, min(s, z)).
OuterResiduals outer_residuals(const QpModel& qp, const Iterate& it);

/// M = ½‖r̃‖₂².
double merit(const Residual& res);

struct LineSearchResult {
  double alpha{1.0};
  double merit_new{0.0};
  bool stalled{false};
};

/// Backtracking from α = 1 under M(U+αΔU) ≤ γM + αη·D with the exact
/// Newton directional derivative D = −2M. Exhausting α_min returns α_min
/// with the stalled flag set.
LineSearchResult line_search(const QpModel& qp, const Iterate& it, const Estimates& est,
                             const PenaltyState& pen, NcpKind kind, const Direction& dir,
                             const SolverParams& params);

/// Smoothing/centering update, gated by the neighborhood test. `after` and
/// `before` are perturbed-residual ∞-norms of the accepted and previous
/// iterate. No-op when p = 0.
PenaltyState update_centering(const PenaltyState& pen, double after, double before,
                              const Vec& s, const Vec& z, const SolverParams& params);

/// Per-group unshifted residual ∞-norms driving the estimate schedule.
struct ResidualNorms {
  double d{0.0};
  double e{0.0};
  double i{0.0};
  double g{0.0};  ///< ‖φ(s, z; μ)‖∞, no proximal shift
};

struct EstimateUpdate {
  PenaltyState pen;
  Estimates est;
};

/// Interpolation-parameter and proximal-penalty schedule, followed by the
/// estimate interpolation x_E = x⁺ + θ_d(x − x⁺) etc. with the updated θ.
EstimateUpdate update_estimates(const PenaltyState& pen, const Iterate& it_new,
                                const Iterate& it_old, const ResidualNorms& now,
                                const ResidualNorms& before, const SolverParams& params);

/// after ≤ θ·before + β·μ.
bool neighborhood_ok(double after, double before, double mu, const SolverParams& params);

/// Absolute-plus-relative termination test on the unshifted residuals. mu
/// and kind enter only through the complementarity scale ‖φ(s,z;μ)‖∞.
bool stopping_ok(const QpModel& qp, const Iterate& it, double mu, NcpKind kind,
                 const SolverParams& params);

/// Farkas-type certificate tests on a Newton direction.
std::optional<SolveStatus> detect_infeasibility(const QpModel& qp, const Direction& dir,
                                                const SolverParams& params);

/// Cold-start point: x = 0, y = 0, z = 1, s = max(h, 1).
Iterate cold_start(const QpModel& qp);

/// One full solve. Warm starts set both the iterate and the proximal
/// estimates to the supplied point.
SolveReport solve(const QpModel& qp, const SolverParams& params,
                  const std::optional<Iterate>& warm = std::nullopt);

/// Owns the KKT workspace across iterations; one solve at a time.
class Solver {
 public:
  explicit Solver(QpModel qp);

  const QpModel& model() const { return qp_; }

  SolveReport solve(const SolverParams& params,
                    const std::optional<Iterate>& warm = std::nullopt);

 private:
  QpModel qp_;
  KktWorkspace ws_;
};

}  // namespace shiftqp

#endif
