#include <doctest.h>

#include <cmath>

#include "shiftqp/generators.hpp"
#include "shiftqp/kkt.hpp"
#include "shiftqp/solver.hpp"

using namespace shiftqp;

namespace {

PenaltyState moderate_pen(double mu) {
  PenaltyState pen;
  pen.mu = mu;
  pen.sigma = 0.5;
  pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = 1e-4;
  return pen;
}

Estimates anchors_at_origin(const QpModel& qp) {
  return Estimates{Vec::Zero(qp.n), Vec::Zero(qp.m), Vec::Zero(qp.p), Vec::Zero(qp.p)};
}

Direction condensed_direction(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                              NcpKind kind, const Residual& res) {
  KktWorkspace ws;
  assemble_condensed(qp, it, pen, kind, res, ws);
  factorize_with_fallback(ws, 5.0);
  return solve_direction(ws, res.d, ws.rp);
}

double direction_gap(const Direction& a, const Direction& b) {
  double gap = inf_norm(a.dx - b.dx);
  if (a.dy.size() > 0) gap = std::max(gap, inf_norm(a.dy - b.dy));
  if (a.dz.size() > 0) gap = std::max(gap, inf_norm(a.dz - b.dz));
  if (a.ds.size() > 0) gap = std::max(gap, inf_norm(a.ds - b.ds));
  return gap;
}

double direction_scale(const Direction& d) {
  double scale = 1.0;
  scale = std::max(scale, inf_norm(d.dx));
  if (d.dy.size() > 0) scale = std::max(scale, inf_norm(d.dy));
  if (d.dz.size() > 0) scale = std::max(scale, inf_norm(d.dz));
  if (d.ds.size() > 0) scale = std::max(scale, inf_norm(d.ds));
  return scale;
}

}  // namespace

TEST_CASE("condensed and full paths agree on random instances") {
  for (int i = 0; i < 10; ++i) {
    const QpModel qp = random_qp(5, 2, 3, 400 + i);
    const Iterate it = cold_start(qp);
    const Estimates est = anchors_at_origin(qp);
    for (const double mu : {0.1, 1e-6}) {
      const PenaltyState pen = moderate_pen(mu);
      const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
      const Direction full = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
      const Direction cond = condensed_direction(qp, it, pen, NcpKind::SmoothedMin, res);
      CHECK(direction_gap(cond, full) <= 1e-8 * direction_scale(full));
    }
  }
}

TEST_CASE("both paths satisfy the uncondensed equations after substitution") {
  for (int i = 0; i < 10; ++i) {
    const QpModel qp = random_qp(5, 2, 3, 480 + i);
    const Iterate it = cold_start(qp);
    const Estimates est = anchors_at_origin(qp);
    const PenaltyState pen = moderate_pen(1e-6);
    const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
    const double scale = std::max(1.0, res.inf_norm());
    const Direction full = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
    CHECK(substitution_residual(qp, it, pen, NcpKind::SmoothedMin, res, full) <=
          1e-8 * scale);
    const Direction cond = condensed_direction(qp, it, pen, NcpKind::SmoothedMin, res);
    CHECK(substitution_residual(qp, it, pen, NcpKind::SmoothedMin, res, cond) <=
          1e-8 * scale);
  }
}

TEST_CASE("agreement holds for the Fischer-Burmeister variant too") {
  const QpModel qp = random_qp(4, 1, 3, 555);
  const Iterate it = cold_start(qp);
  const Estimates est = anchors_at_origin(qp);
  const PenaltyState pen = moderate_pen(0.01);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::FischerBurmeister);
  const Direction full = solve_full_kkt(qp, it, pen, NcpKind::FischerBurmeister, res);
  const Direction cond =
      condensed_direction(qp, it, pen, NcpKind::FischerBurmeister, res);
  CHECK(direction_gap(cond, full) <= 1e-8 * direction_scale(full));
  CHECK(substitution_residual(qp, it, pen, NcpKind::FischerBurmeister, res, full) <=
        1e-8 * std::max(1.0, res.inf_norm()));
}

TEST_CASE("substitution residual detects a corrupted direction") {
  const QpModel qp = random_qp(5, 2, 3, 490);
  const Iterate it = cold_start(qp);
  const Estimates est = anchors_at_origin(qp);
  const PenaltyState pen = moderate_pen(0.1);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
  Direction dir = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
  dir.dx(0) += 1.0;
  CHECK(substitution_residual(qp, it, pen, NcpKind::SmoothedMin, res, dir) > 1e-4);
}

TEST_CASE("with no constraints the full system reduces to the condensed one") {
  const QpModel qp = random_qp(6, 0, 0, 321);
  Iterate it;
  it.x = Vec::Constant(6, 0.5);
  it.s = Vec(0);
  it.y = Vec(0);
  it.z = Vec(0);
  const Estimates est = anchors_at_origin(qp);
  const PenaltyState pen = moderate_pen(1e-3);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
  const Direction full = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
  const Direction cond = condensed_direction(qp, it, pen, NcpKind::SmoothedMin, res);
  CHECK(inf_norm(full.dx - cond.dx) <= 1e-10 * std::max(1.0, inf_norm(full.dx)));
  CHECK(full.dy.size() == 0);
  CHECK(full.ds.size() == 0);
}

TEST_CASE("condensed workspace blocks carry their defining identities") {
  const QpModel qp = random_qp(4, 1, 2, 77);
  const Iterate it = cold_start(qp);
  const Estimates est = anchors_at_origin(qp);
  const PenaltyState pen = moderate_pen(0.05);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
  KktWorkspace ws;
  assemble_condensed(qp, it, pen, NcpKind::SmoothedMin, res, ws);

  CHECK((ws.Qtilde - (qp.Q + pen.rho_d * Mat::Identity(4, 4))).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((ws.J.topRows(1) - qp.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ws.J.bottomRows(2) - qp.G).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ws.H - ws.H.transpose()).cwiseAbs().maxCoeff() == 0.0);  // exact symmetry

  const NcpEval eval = phi(NcpKind::SmoothedMin, it.s, it.z, pen.mu);
  const Vec ds = eval.d_s.array() + pen.rho_n;
  const Vec dz = eval.d_z.array() + pen.rho_n;
  CHECK(inf_norm(ws.P - (dz.array() / ds.array()).matrix()) <= 1e-15);
  CHECK(inf_norm(ws.q - (res.g.array() / ds.array()).matrix()) <= 1e-15);
  // D = blkdiag(rho_e, P + rho_i) inverted elementwise
  CHECK(ws.Dinv(0) == doctest::Approx(1.0 / pen.rho_e).epsilon(1e-14));
  CHECK(ws.Dinv(1) == doctest::Approx(1.0 / (ws.P(0) + pen.rho_i)).epsilon(1e-14));

  factorize_with_fallback(ws, 5.0);
  const Direction dir = solve_direction(ws, res.d, ws.rp);
  // back-substitution identity for the slack block
  const Vec want_ds = -(ws.P.asDiagonal() * dir.dz + ws.q);
  CHECK(inf_norm(dir.ds - want_ds) <= 1e-14 * std::max(1.0, inf_norm(want_ds)));
}

TEST_CASE("factorization boosts an indefinite diagonal transiently") {
  Mat Q = -1e-6 * Mat::Identity(2, 2);
  const QpModel qp = make_qp(Q, Vec::Zero(2));
  Iterate it{Vec::Zero(2), Vec(0), Vec(0), Vec(0)};
  PenaltyState pen;
  pen.mu = 0.0;
  pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = 1e-9;
  const Estimates est = anchors_at_origin(qp);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
  KktWorkspace ws;
  assemble_condensed(qp, it, pen, NcpKind::SmoothedMin, res, ws);
  factorize_with_fallback(ws, 5.0);
  CHECK(ws.boost_count >= 1);
  CHECK(ws.boost_count <= 10);
  CHECK(ws.rho_d_used > pen.rho_d);
  CHECK(ws.chol.info() == Eigen::Success);
}

TEST_CASE("factorization gives up after exhausting its boosts") {
  Mat Q = -Mat::Identity(2, 2);
  const QpModel qp = make_qp(Q, Vec::Zero(2));
  Iterate it{Vec::Zero(2), Vec(0), Vec(0), Vec(0)};
  PenaltyState pen;
  pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = 1e-9;
  const Estimates est = anchors_at_origin(qp);
  const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
  KktWorkspace ws;
  assemble_condensed(qp, it, pen, NcpKind::SmoothedMin, res, ws);
  CHECK_THROWS_AS(factorize_with_fallback(ws, 5.0), FactorizationFailed);
}

TEST_CASE("near-solution iterates keep both paths in agreement") {
  for (int i = 0; i < 5; ++i) {
    const QpModel qp = random_qp(5, 2, 3, 700 + i);
    SolverParams params;
    const SolveReport rep = solve(qp, params);
    REQUIRE(rep.status == SolveStatus::Solved);
    const Iterate it = rep.solution;
    const Estimates est = anchors_at_origin(qp);
    const PenaltyState pen = moderate_pen(1e-6);
    const Residual res = perturbed_residual(qp, it, est, pen, NcpKind::SmoothedMin);
    const Direction full = solve_full_kkt(qp, it, pen, NcpKind::SmoothedMin, res);
    const Direction cond = condensed_direction(qp, it, pen, NcpKind::SmoothedMin, res);
    CHECK(direction_gap(cond, full) <= 1e-8 * direction_scale(full));
  }
}
