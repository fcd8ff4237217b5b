#include <doctest.h>

#include <cmath>

#include "shiftqp/generators.hpp"
#include "shiftqp/oracle.hpp"
#include "shiftqp/solver.hpp"

using namespace shiftqp;

namespace {

Estimates estimates_at(const Iterate& it) { return Estimates{it.x, it.y, it.z, it.s}; }

Estimates zero_estimates(const QpModel& qp) {
  return Estimates{Vec::Zero(qp.n), Vec::Zero(qp.m), Vec::Zero(qp.p), Vec::Zero(qp.p)};
}

PenaltyState zero_pen() { return PenaltyState{}; }

QpModel one_var_qp(double q, double c_val) {
  Mat Q(1, 1);
  Q << q;
  Vec c(1);
  c << c_val;
  return make_qp(Q, c);
}

QpModel primal_infeasible_qp() {
  Mat G(2, 1);
  G << -1, 1;
  Vec h(2);
  h << -1, 0;  // x >= 1 and x <= 0
  return make_qp(Mat::Identity(1, 1), Vec::Zero(1), Mat(0, 1), Vec(0), G, h);
}

QpModel dual_infeasible_qp() {
  Mat G(1, 1);
  G << -1;  // x >= 0, minimize -x with no curvature
  Vec h = Vec::Zero(1);
  Vec c(1);
  c << -1;
  return make_qp(Mat::Zero(1, 1), c, Mat(0, 1), Vec(0), G, h);
}

}  // namespace

TEST_CASE("perturbed residual vanishes on the all-zero configuration") {
  const QpModel qp = make_qp(Mat::Zero(2, 2), Vec::Zero(2));
  Iterate it{Vec::Zero(2), Vec(0), Vec(0), Vec(0)};
  const Residual res = perturbed_residual(qp, it, zero_estimates(qp), zero_pen(),
                                          NcpKind::SmoothedMin);
  CHECK(res.inf_norm() == 0.0);
}

TEST_CASE("proximal terms vanish when the iterate sits on its anchors") {
  const QpModel qp = random_qp(4, 2, 3, 61);
  Iterate it = cold_start(qp);
  it.x = Vec::Constant(4, 0.3);
  PenaltyState with_rho;
  with_rho.mu = 0.01;
  with_rho.rho_d = with_rho.rho_e = with_rho.rho_i = with_rho.rho_n = 0.5;
  PenaltyState no_rho;
  no_rho.mu = 0.01;
  const Residual shifted =
      perturbed_residual(qp, it, estimates_at(it), with_rho, NcpKind::SmoothedMin);
  const Residual plain =
      perturbed_residual(qp, it, estimates_at(it), no_rho, NcpKind::SmoothedMin);
  CHECK(inf_norm(shifted.d - plain.d) == 0.0);
  CHECK(inf_norm(shifted.e - plain.e) == 0.0);
  CHECK(inf_norm(shifted.i - plain.i) == 0.0);
  CHECK(inf_norm(shifted.g - plain.g) == 0.0);
}

TEST_CASE("dual residual of a one-variable model is the plain gradient") {
  const QpModel qp = one_var_qp(1.0, -1.0);
  Iterate it{Vec::Zero(1), Vec(0), Vec(0), Vec(0)};
  const Residual res =
      perturbed_residual(qp, it, zero_estimates(qp), zero_pen(), NcpKind::SmoothedMin);
  CHECK(res.d(0) == -1.0);
  CHECK(res.e.size() == 0);
}

TEST_CASE("outer residuals are tiny at a certified optimum") {
  const QpModel qp = degenerate_suite()[0];
  const OracleResult oracle = enumerate_solve(qp);
  REQUIRE(oracle.status == OracleStatus::Optimal);
  Iterate it;
  it.x = oracle.solution->x;
  it.y = oracle.solution->y;
  it.z = oracle.solution->z;
  it.s = qp.h - qp.G * it.x;
  const OuterResiduals outer = outer_residuals(qp, it);
  CHECK(inf_norm(outer.d) <= 1e-9);
  CHECK(inf_norm(outer.i) <= 1e-9);
  CHECK(inf_norm(outer.n) <= 1e-9);
  CHECK(outer.e.size() == 0);
}

TEST_CASE("complementarity residual is the componentwise min") {
  QpModel qp = random_qp(2, 0, 2, 62);
  Iterate it;
  it.x = Vec::Zero(2);
  it.y = Vec(0);
  it.s = Vec(2);
  it.s << 1, 2;
  it.z = Vec(2);
  it.z << 3, 0.5;
  const OuterResiduals outer = outer_residuals(qp, it);
  CHECK(outer.n(0) == 1.0);
  CHECK(outer.n(1) == 0.5);
}

TEST_CASE("unconstrained outer residuals have empty constraint rows") {
  const QpModel qp = one_var_qp(2.0, 1.0);
  Iterate it{Vec::Zero(1), Vec(0), Vec(0), Vec(0)};
  const OuterResiduals outer = outer_residuals(qp, it);
  CHECK(outer.e.size() == 0);
  CHECK(outer.i.size() == 0);
  CHECK(outer.n.size() == 0);
  CHECK(outer.d(0) == 1.0);
}

TEST_CASE("merit is half the squared norm and scales quadratically") {
  Residual res;
  res.d = Vec(2);
  res.d << 3, 4;
  res.e = Vec(0);
  res.i = Vec(0);
  res.g = Vec(0);
  CHECK(merit(res) == 12.5);
  res.d *= 2.0;
  CHECK(merit(res) == 50.0);
  Residual zero;
  zero.d = Vec::Zero(3);
  zero.e = Vec(0);
  zero.i = Vec(0);
  zero.g = Vec(0);
  CHECK(merit(zero) == 0.0);
}

TEST_CASE("full step is taken when the residual is linear in the iterate") {
  const QpModel qp = random_qp(4, 2, 0, 63);
  Iterate it{Vec::Constant(4, 0.8), Vec(0), Vec::Constant(2, -0.1), Vec(0)};
  PenaltyState pen;
  pen.mu = 1e-16;
  pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = 1e-4;
  const Estimates est = zero_estimates(qp);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
  const Direction dir = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
  SolverParams params;
  const LineSearchResult ls = line_search(qp, it, est, pen, NcpKind::SmoothedMin, dir, params);
  CHECK(ls.alpha == 1.0);
  CHECK_FALSE(ls.stalled);
  CHECK(ls.merit_new <= 1e-18 * std::max(1.0, merit(res)));
}

TEST_CASE("zero direction at a zero-merit point is accepted without stalling") {
  const QpModel qp = one_var_qp(1.0, 1.0);
  Iterate it{Vec::Constant(1, -1.0), Vec(0), Vec(0), Vec(0)};  // exact minimizer
  PenaltyState pen;
  pen.rho_d = 1e-9;
  Direction dir{Vec::Zero(1), Vec(0), Vec(0), Vec(0)};
  SolverParams params;
  const LineSearchResult ls =
      line_search(qp, it, estimates_at(it), pen, NcpKind::SmoothedMin, dir, params);
  CHECK(ls.alpha == 1.0);
  CHECK_FALSE(ls.stalled);
  CHECK(ls.merit_new == 0.0);
}

TEST_CASE("backtracking halves the step until the decrease condition holds") {
  const QpModel qp = one_var_qp(1.0, 0.0);
  Iterate it{Vec::Constant(1, 3.0), Vec(0), Vec(0), Vec(0)};
  // twice the Newton step: alpha = 1 lands at the mirror point with equal
  // merit, alpha = 0.5 lands exactly on the minimizer
  Direction dir{Vec::Constant(1, -6.0), Vec(0), Vec(0), Vec(0)};
  SolverParams params;
  const LineSearchResult ls =
      line_search(qp, it, zero_estimates(qp), zero_pen(), NcpKind::SmoothedMin, dir, params);
  CHECK(ls.alpha == 0.5);
  CHECK_FALSE(ls.stalled);
  CHECK(ls.merit_new <= 1e-20);
}

TEST_CASE("an ascent direction exhausts the step sizes and reports a stall") {
  const QpModel qp = one_var_qp(1.0, 0.0);
  Iterate it{Vec::Constant(1, 1.0), Vec(0), Vec(0), Vec(0)};
  Direction dir{Vec::Constant(1, 1.0), Vec(0), Vec(0), Vec(0)};
  SolverParams params;
  const LineSearchResult ls =
      line_search(qp, it, zero_estimates(qp), zero_pen(), NcpKind::SmoothedMin, dir, params);
  CHECK(ls.stalled);
  CHECK(ls.alpha == params.alpha_min);
  CHECK(std::isfinite(ls.merit_new));
}

TEST_CASE("a direction that overflows the merit raises NonFiniteMerit") {
  const QpModel qp = one_var_qp(1.0, 0.0);
  Iterate it{Vec::Constant(1, 1.0), Vec(0), Vec(0), Vec(0)};
  Direction dir{Vec::Constant(1, 1e300), Vec(0), Vec(0), Vec(0)};
  SolverParams params;
  CHECK_THROWS_AS(line_search(qp, it, zero_estimates(qp), zero_pen(),
                              NcpKind::SmoothedMin, dir, params),
                  NonFiniteMerit);
}

TEST_CASE("centering predictor averages the squared complementarity min") {
  Vec s(2), z(2);
  s << 1, 2;
  z << 3, 0.5;
  SolverParams params;
  PenaltyState pen;
  pen.mu = 10.0;
  pen.sigma = 0.5;

  SUBCASE("strong progress halves the scaled predictor and relaxes sigma") {
    const PenaltyState out = update_centering(pen, 0.1, 1.0, s, z, params);
    // predictor 0.625, scaled by sigma, then by the extra-decrease factor
    CHECK(out.mu == doctest::Approx(0.15625).epsilon(1e-14));
    CHECK(out.sigma == doctest::Approx(0.3).epsilon(1e-14));
  }

  SUBCASE("weak progress keeps the scaled predictor and grows sigma") {
    const PenaltyState out = update_centering(pen, 1.0, 1.0, s, z, params);
    CHECK(out.mu == doctest::Approx(0.3125).epsilon(1e-14));
    CHECK(out.sigma == doctest::Approx(0.65).epsilon(1e-14));
  }

  SUBCASE("mu never rises above its previous value") {
    pen.mu = 0.01;
    const PenaltyState out = update_centering(pen, 1.0, 1.0, s, z, params);
    CHECK(out.mu == doctest::Approx(0.01).epsilon(1e-14));
  }

  SUBCASE("mu respects its floor") {
    pen.mu = params.mu_min;
    Vec tiny_s = Vec::Constant(2, 1e-12), tiny_z = Vec::Constant(2, 1e-12);
    const PenaltyState out = update_centering(pen, 1.0, 1.0, tiny_s, tiny_z, params);
    CHECK(out.mu == params.mu_min);
  }
}

TEST_CASE("centering is a no-op without inequality rows") {
  SolverParams params;
  PenaltyState pen;
  pen.mu = 0.125;
  pen.sigma = 0.5;
  const PenaltyState out = update_centering(pen, 0.0, 1.0, Vec(0), Vec(0), params);
  CHECK(out.mu == pen.mu);
  CHECK(out.sigma == pen.sigma);
}

TEST_CASE("sigma stays inside its configured band") {
  SolverParams params;
  Vec s = Vec::Ones(1), z = Vec::Ones(1);
  PenaltyState pen;
  pen.mu = 1.0;
  pen.sigma = params.sigma_min;
  // repeated strong progress cannot push sigma below sigma_min
  PenaltyState out = update_centering(pen, 0.0, 1.0, s, z, params);
  CHECK(out.sigma == params.sigma_min);
  // repeated weak progress cannot push sigma above sigma_max
  out.sigma = params.sigma_max;
  out = update_centering(out, 1.0, 1.0, s, z, params);
  CHECK(out.sigma == params.sigma_max);
}

TEST_CASE("interpolation parameters decay on improvement and rise on degradation") {
  SolverParams params;
  Iterate it_new{Vec::Zero(1), Vec(0), Vec(0), Vec(0)};
  Iterate it_old{Vec::Ones(1), Vec(0), Vec(0), Vec(0)};

  SUBCASE("full interpolation decays multiplicatively") {
    PenaltyState pen;
    pen.theta_d = 1.0;
    pen.rho_d = 1e-4;
    const ResidualNorms now{0.2, 0, 0, 0};
    const ResidualNorms before{1.0, 0, 0, 0};
    const EstimateUpdate out = update_estimates(pen, it_new, it_old, now, before, params);
    CHECK(out.pen.theta_d == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(out.pen.rho_d == doctest::Approx(2e-5).epsilon(1e-14));
  }

  SUBCASE("decay below the floor snaps to zero") {
    PenaltyState pen;
    pen.theta_d = 0.15;
    pen.rho_d = 1e-9;
    const ResidualNorms now{0.2, 0, 0, 0};
    const ResidualNorms before{1.0, 0, 0, 0};
    const EstimateUpdate out = update_estimates(pen, it_new, it_old, now, before, params);
    CHECK(out.pen.theta_d == 0.0);
    CHECK(out.pen.rho_d == params.rho_min);  // already at the floor
  }

  SUBCASE("degradation pushes theta toward one and keeps rho") {
    PenaltyState pen;
    pen.theta_d = 0.5;
    pen.rho_d = 1e-6;
    const ResidualNorms now{1.0, 0, 0, 0};
    const ResidualNorms before{1.0, 0, 0, 0};
    const EstimateUpdate out = update_estimates(pen, it_new, it_old, now, before, params);
    CHECK(out.pen.theta_d == doctest::Approx(0.65).epsilon(1e-14));
    CHECK(out.pen.rho_d == 1e-6);
  }

  SUBCASE("the middle band leaves the schedule untouched") {
    PenaltyState pen;
    pen.theta_d = 0.5;
    pen.rho_d = 1e-6;
    const ResidualNorms now{0.5, 0, 0, 0};
    const ResidualNorms before{1.0, 0, 0, 0};
    const EstimateUpdate out = update_estimates(pen, it_new, it_old, now, before, params);
    CHECK(out.pen.theta_d == 0.5);
    CHECK(out.pen.rho_d == 1e-6);
  }
}

TEST_CASE("estimates interpolate with the updated parameters") {
  SolverParams params;
  Iterate it_new;
  it_new.x = Vec::Zero(1);
  it_new.y = Vec(0);
  it_new.z = Vec::Constant(2, 2.0);
  it_new.s = Vec::Constant(2, 3.0);
  Iterate it_old;
  it_old.x = Vec::Ones(1);
  it_old.y = Vec(0);
  it_old.z = Vec::Constant(2, 4.0);
  it_old.s = Vec::Constant(2, 7.0);

  PenaltyState pen;
  pen.theta_d = 1.0;
  pen.theta_i = 0.0;
  pen.rho_d = pen.rho_i = 1e-6;
  // improvement on the dual group: theta_d becomes 0.6 before interpolating
  const ResidualNorms now{0.2, 0, 0.5, 0};
  const ResidualNorms before{1.0, 0, 1.0, 0};
  const EstimateUpdate out = update_estimates(pen, it_new, it_old, now, before, params);
  CHECK(out.est.x_E(0) == doctest::Approx(0.6).epsilon(1e-14));
  // theta_i = 0 pins the inequality anchors to the new iterate exactly
  CHECK(inf_norm(out.est.z_E - it_new.z) == 0.0);
  CHECK(inf_norm(out.est.s_E - it_new.s) == 0.0);
}

TEST_CASE("complementarity group only relaxes its penalty") {
  SolverParams params;
  Iterate it{Vec::Zero(1), Vec::Ones(2), Vec(0), Vec::Ones(2)};
  PenaltyState pen;
  pen.rho_n = 1e-4;
  const ResidualNorms now{0, 0, 0, 0.1};
  const ResidualNorms before{0, 0, 0, 1.0};
  const EstimateUpdate out = update_estimates(pen, it, it, now, before, params);
  CHECK(out.pen.rho_n == doctest::Approx(2e-5).epsilon(1e-14));
  const EstimateUpdate flat =
      update_estimates(pen, it, it, ResidualNorms{0, 0, 0, 1.0}, before, params);
  CHECK(flat.pen.rho_n == 1e-4);
}

TEST_CASE("neighborhood test blends the previous norm with the smoothing level") {
  SolverParams params;
  CHECK(neighborhood_ok(0.0, 5.0, 0.0, params));
  CHECK_FALSE(neighborhood_ok(0.96, 1.0, 0.0, params));
  CHECK(neighborhood_ok(1.0, 1.0, 0.1, params));
}

TEST_CASE("stopping accepts the certified optimum of the hard degenerate instance") {
  const QpModel qp = degenerate_suite()[1];
  const OracleResult oracle = enumerate_solve(qp);
  REQUIRE(oracle.status == OracleStatus::Optimal);
  Iterate it;
  it.x = oracle.solution->x;
  it.y = oracle.solution->y;
  it.z = oracle.solution->z;
  it.s = qp.h - qp.G * it.x;
  SolverParams params;
  params.eps_abs = params.eps_rel = 1e-6;
  CHECK(stopping_ok(qp, it, 1e-16, NcpKind::SmoothedMin, params));
}

TEST_CASE("an exact unconstrained stationary point passes at zero tolerance") {
  Mat Q = Mat::Identity(2, 2);
  Vec c(2);
  c << 1, 1;
  const QpModel qp = make_qp(Q, c);
  Iterate it{Vec::Constant(2, -1.0), Vec(0), Vec(0), Vec(0)};
  SolverParams params;
  params.eps_abs = params.eps_rel = 0.0;
  CHECK(stopping_ok(qp, it, 0.0, NcpKind::SmoothedMin, params));
}

TEST_CASE("a visible dual residual fails a tight absolute test") {
  const QpModel qp = one_var_qp(1.0, 0.0);
  Iterate it{Vec::Constant(1, 1e-3), Vec(0), Vec(0), Vec(0)};
  SolverParams params;
  params.eps_abs = 1e-6;
  params.eps_rel = 0.0;
  CHECK_FALSE(stopping_ok(qp, it, 0.0, NcpKind::SmoothedMin, params));
}

TEST_CASE("a Farkas certificate in the multipliers flags primal infeasibility") {
  const QpModel qp = primal_infeasible_qp();
  Direction dir;
  dir.dx = Vec::Zero(1);
  dir.dy = Vec(0);
  dir.dz = Vec::Ones(2);
  dir.ds = Vec::Zero(2);
  SolverParams params;
  const auto status = detect_infeasibility(qp, dir, params);
  REQUIRE(status.has_value());
  CHECK(*status == SolveStatus::PrimalInfeasible);
}

TEST_CASE("an unbounded descent direction flags dual infeasibility") {
  const QpModel qp = dual_infeasible_qp();
  Direction dir;
  dir.dx = Vec::Ones(1);
  dir.dy = Vec(0);
  dir.dz = Vec::Zero(1);
  dir.ds = Vec::Ones(1);
  SolverParams params;
  const auto status = detect_infeasibility(qp, dir, params);
  REQUIRE(status.has_value());
  CHECK(*status == SolveStatus::DualInfeasible);
}

TEST_CASE("a zero direction certifies nothing") {
  const QpModel qp = primal_infeasible_qp();
  Direction dir{Vec::Zero(1), Vec(0), Vec::Zero(2), Vec::Zero(2)};
  SolverParams params;
  CHECK_FALSE(detect_infeasibility(qp, dir, params).has_value());
}

TEST_CASE("cold start clamps the slack at one") {
  Mat G(2, 1);
  G << 1, 1;
  Vec h(2);
  h << -2, 3;
  const QpModel qp = make_qp(Mat::Identity(1, 1), Vec::Zero(1), Mat(0, 1), Vec(0), G, h);
  const Iterate it = cold_start(qp);
  CHECK(inf_norm(it.x) == 0.0);
  CHECK(it.s(0) == 1.0);
  CHECK(it.s(1) == 3.0);
  CHECK(it.z(0) == 1.0);
  CHECK(it.z(1) == 1.0);
}

TEST_CASE("redundant-row instance solves to its corner") {
  const QpModel qp = degenerate_suite()[0];
  SolverParams params;
  const SolveReport rep = solve(qp, params);
  REQUIRE(rep.status == SolveStatus::Solved);
  Vec want(2);
  want << 1, 0;
  CHECK(inf_norm(rep.solution.x - want) <= 1e-6);
}

TEST_CASE("near-singular instance reaches the distant optimum") {
  const QpModel qp = degenerate_suite()[1];
  SolverParams params;
  params.eps_abs = params.eps_rel = 1e-6;
  const SolveReport rep = solve(qp, params);
  REQUIRE(rep.status == SolveStatus::Solved);
  CHECK(rep.iters <= 30);
  CHECK(std::abs(rep.solution.x(0)) <= 1e-5);
  CHECK(std::abs(rep.solution.x(1) - 1e6) <= 100.0);
  CHECK(objective(qp, rep.solution.x) == doctest::Approx(-5e5).epsilon(1e-5));
}

TEST_CASE("unconstrained model solves in a single step") {
  Mat Q = Mat::Identity(2, 2);
  Vec c(2);
  c << 1, 1;
  const QpModel qp = make_qp(Q, c);
  SolverParams params;
  const SolveReport rep = solve(qp, params);
  REQUIRE(rep.status == SolveStatus::Solved);
  CHECK(rep.iters <= 2);
  // the proximal shift biases the stationary point by at most rho_d
  CHECK(inf_norm(rep.solution.x - Vec::Constant(2, -1.0)) <= 1e-8);
}

TEST_CASE("one Newton step closes a linear perturbed system") {
  SUBCASE("full path at the default penalty floor") {
    const QpModel qp = random_qp(5, 2, 0, 501);
    Iterate it{Vec::Constant(5, 0.7), Vec(0), Vec::Constant(2, -0.3), Vec(0)};
    PenaltyState pen;
    pen.mu = 1e-16;
    pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = 1e-9;
    const Estimates est = zero_estimates(qp);
    const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
    const Direction dir = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
    Iterate next{it.x + dir.dx, it.s, it.y + dir.dy, it.z};
    const Residual after = perturbed_residual(qp, next, est, pen, NcpKind::SmoothedMin);
    CHECK(after.inf_norm() <= 1e-10 * std::max(1.0, res.inf_norm()));
  }

  SUBCASE("condensed path at a moderate penalty") {
    const QpModel qp = random_qp(5, 2, 0, 502);
    Iterate it{Vec::Constant(5, 0.7), Vec(0), Vec::Constant(2, -0.3), Vec(0)};
    PenaltyState pen;
    pen.mu = 1e-16;
    pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = 1e-4;
    const Estimates est = zero_estimates(qp);
    const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
    KktWorkspace ws;
    assemble_condensed(qp, it, pen, NcpKind::SmoothedMin, res, ws);
    factorize_with_fallback(ws, 5.0);
    const Direction dir = solve_direction(ws, res.d, ws.rp);
    Iterate next{it.x + dir.dx, it.s, it.y + dir.dy, it.z};
    const Residual after = perturbed_residual(qp, next, est, pen, NcpKind::SmoothedMin);
    CHECK(after.inf_norm() <= 1e-10 * std::max(1.0, res.inf_norm()));
  }
}

TEST_CASE("warm starting at the solution terminates immediately") {
  const QpModel qp = random_qp(6, 2, 4, 91);
  SolverParams params;
  const SolveReport cold = solve(qp, params);
  REQUIRE(cold.status == SolveStatus::Solved);
  const SolveReport warm = solve(qp, params, cold.solution);
  REQUIRE(warm.status == SolveStatus::Solved);
  CHECK(warm.iters <= 2);
}

TEST_CASE("warm starts dominate cold starts on inequality-constrained instances") {
  SolverParams params;
  for (int i = 0; i < 10; ++i) {
    const QpModel qp = random_qp(3 + i % 5, i % 3, 1 + i % 5, 3100 + i);
    const SolveReport cold = solve(qp, params);
    REQUIRE(cold.status == SolveStatus::Solved);
    const SolveReport warm = solve(qp, params, cold.solution);
    REQUIRE(warm.status == SolveStatus::Solved);
    CHECK(warm.iters < cold.iters);
  }
}

TEST_CASE("infeasible and unbounded fixtures are certified quickly") {
  SolverParams params;
  const SolveReport prim = solve(primal_infeasible_qp(), params);
  CHECK(prim.status == SolveStatus::PrimalInfeasible);
  CHECK(prim.iters <= 50);
  const SolveReport dual = solve(dual_infeasible_qp(), params);
  CHECK(dual.status == SolveStatus::DualInfeasible);
  CHECK(dual.iters <= 50);
}

TEST_CASE("the trace records one row per iteration with sane fields") {
  const QpModel qp = degenerate_suite()[0];
  SolverParams params;
  const SolveReport rep = solve(qp, params);
  REQUIRE(rep.status == SolveStatus::Solved);
  REQUIRE(rep.trace.size() == static_cast<std::size_t>(rep.iters));
  double mu_prev = std::numeric_limits<double>::infinity();
  for (const TraceRow& row : rep.trace) {
    CHECK(row.alpha > 0.0);
    CHECK(row.alpha <= 1.0);
    CHECK(row.mu >= params.mu_min);
    CHECK(row.mu <= mu_prev);
    mu_prev = row.mu;
    CHECK(row.sigma >= params.sigma_min);
    CHECK(row.sigma <= params.sigma_max);
    CHECK(std::isfinite(row.merit));
  }
}

TEST_CASE("schedule invariants hold at exit across a random sweep") {
  SolverParams params;
  for (int i = 0; i < 15; ++i) {
    const QpModel qp = random_qp(2 + i % 6, i % 3, i % 5, 3200 + i);
    const SolveReport rep = solve(qp, params);
    REQUIRE(rep.status == SolveStatus::Solved);
    const PenaltyState& pen = rep.final_penalty;
    CHECK(pen.rho_d >= params.rho_min);
    CHECK(pen.rho_e >= params.rho_min);
    CHECK(pen.rho_i >= params.rho_min);
    CHECK(pen.rho_n >= params.rho_min);
    for (const double theta : {pen.theta_d, pen.theta_e, pen.theta_i}) {
      const bool snapped = theta == 0.0;
      const bool banded = theta >= params.theta_min && theta <= 1.0;
      CHECK((snapped || banded));
    }
    if (qp.p > 0) {
      CHECK(pen.mu >= params.mu_min);
      CHECK(pen.sigma >= params.sigma_min);
      CHECK(pen.sigma <= params.sigma_max);
    }
    // a Solved verdict must be reproducible from the solution alone
    CHECK(stopping_ok(qp, rep.solution, pen.mu, params.ncp, params));
  }
}

TEST_CASE("solved reports satisfy the termination test under both kkt paths") {
  for (const KktMode mode : {KktMode::Condensed, KktMode::Full}) {
    for (const NcpKind kind : {NcpKind::SmoothedMin, NcpKind::FischerBurmeister}) {
      SolverParams params;
      params.kkt = mode;
      params.ncp = kind;
      const QpModel qp = random_qp(5, 1, 3, 97);
      const SolveReport rep = solve(qp, params);
      REQUIRE(rep.status == SolveStatus::Solved);
      CHECK(stopping_ok(qp, rep.solution, rep.final_penalty.mu, kind, params));
    }
  }
}

TEST_CASE("iteration and time budgets map to their statuses") {
  const QpModel qp = degenerate_suite()[1];
  SolverParams params;
  params.max_iters = 1;
  const SolveReport capped = solve(qp, params);
  CHECK(capped.status == SolveStatus::MaxIters);
  CHECK(capped.iters == 1);

  SolverParams timed;
  timed.time_limit_seconds = 1e-12;
  const SolveReport expired = solve(qp, timed);
  CHECK(expired.status == SolveStatus::TimeLimit);
  CHECK(expired.iters >= 1);
}

TEST_CASE("an overflowing merit aborts the solve with a flag") {
  const QpModel qp = one_var_qp(1.0, 1e308);
  SolverParams params;
  const SolveReport rep = solve(qp, params);
  CHECK(rep.aborted_nonfinite);
  CHECK(rep.status == SolveStatus::MaxIters);
}

TEST_CASE("parameter and warm-start validation") {
  const QpModel qp = one_var_qp(1.0, 0.0);
  SolverParams bad;
  bad.rho_min = 0.0;
  CHECK_THROWS_AS(solve(qp, bad), Error);
  SolverParams bad_mu;
  bad_mu.mu_min = 0.0;
  CHECK_THROWS_AS(solve(qp, bad_mu), Error);
  SolverParams params;
  Iterate wrong{Vec::Zero(2), Vec(0), Vec(0), Vec(0)};
  CHECK_THROWS_AS(solve(qp, params, wrong), DimensionMismatch);
}

TEST_CASE("single precision preset scales the floors") {
  const SolverParams dp;
  const SolverParams sp = single_precision_params();
  CHECK(sp.rho_init == doctest::Approx(dp.rho_init * 1e4));
  CHECK(sp.rho_min == doctest::Approx(dp.rho_min * 1e4));
  CHECK(sp.mu_min == doctest::Approx(dp.mu_min * 1e4));
  CHECK(sp.eps_abs == dp.eps_abs);
  CHECK(sp.max_iters == dp.max_iters);
}

TEST_CASE("the Solver class reproduces the free-function solve") {
  const QpModel qp = random_qp(5, 2, 3, 130);
  SolverParams params;
  const SolveReport a = solve(qp, params);
  Solver solver(qp);
  const SolveReport b = solver.solve(params);
  CHECK(solver.model().n == 5);
  CHECK(a.status == b.status);
  CHECK(a.iters == b.iters);
  CHECK(inf_norm(a.solution.x - b.solution.x) == 0.0);
  // the workspace is reusable across solves
  const SolveReport c = solver.solve(params);
  CHECK(c.iters == b.iters);
}

TEST_CASE("solves agree with the oracle across a mixed sweep") {
  SolverParams params;
  for (int i = 0; i < 25; ++i) {
    const QpModel qp = random_qp(2 + i % 7, i % 3, i % 6, 1000 + i);
    const SolveReport rep = solve(qp, params);
    REQUIRE(rep.status == SolveStatus::Solved);
    const OracleResult oracle = enumerate_solve(qp);
    REQUIRE(oracle.status == OracleStatus::Optimal);
    const double obj_gap =
        std::abs(objective(qp, rep.solution.x) - oracle.solution->objective);
    CHECK(obj_gap <= 1e-6 * std::max(1.0, std::abs(oracle.solution->objective)));
    if (oracle.solution->unique_primal) {
      CHECK(inf_norm(rep.solution.x - oracle.solution->x) <= 1e-4);
    }
  }
}
