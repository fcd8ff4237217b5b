#include "shiftqp/diff.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "shiftqp/solver.hpp"

namespace shiftqp {

namespace {

// Jacobian of the perturbed residual, rows (d, e, i, g) by unknowns (x, y, z, s).
Mat residual_jacobian(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                      NcpKind kind) {
  const int n = qp.n;
  const int m = qp.m;
  const int p = qp.p;
  const int total = n + m + 2 * p;

  Mat K = Mat::Zero(total, total);
  K.block(0, 0, n, n) = qp.Q;
  K.block(0, 0, n, n).diagonal().array() += pen.rho_d;
  K.block(0, n, n, m) = qp.A.transpose();
  K.block(0, n + m, n, p) = qp.G.transpose();

  K.block(n, 0, m, n) = qp.A;
  K.block(n, n, m, m).diagonal().setConstant(-pen.rho_e);

  K.block(n + m, 0, p, n) = qp.G;
  K.block(n + m, n + m, p, p).diagonal().setConstant(-pen.rho_i);
  K.block(n + m, n + m + p, p, p).diagonal().setOnes();

  if (p > 0) {
    const NcpEval eval = phi(kind, it.s, it.z, pen.mu);
    K.block(n + m + p, n + m, p, p).diagonal() = (eval.d_z.array() + pen.rho_n).matrix();
    K.block(n + m + p, n + m + p, p, p).diagonal() =
        (eval.d_s.array() + pen.rho_n).matrix();
  }
  return K;
}

}  // namespace

Adjoint solve_adjoint(const QpModel& qp, const Iterate& solution, const PenaltyState& pen,
                      NcpKind kind, const AdjointSeed& seed,
                      double regularization_shift) {
  const int n = qp.n;
  const int m = qp.m;
  const int p = qp.p;
  if (seed.dl_dx.size() != n || seed.dl_dy.size() != m || seed.dl_dz.size() != p ||
      seed.dl_ds.size() != p) {
    throw DimensionMismatch("adjoint seed does not match the model");
  }

  const int total = n + m + 2 * p;
  Vec rhs(total);
  rhs << -seed.dl_dx, -seed.dl_dy, -seed.dl_dz, -seed.dl_ds;
  if (!rhs.allFinite()) throw NonFiniteEntry("adjoint seed has a non-finite entry");

  const Mat Kt = residual_jacobian(qp, solution, pen, kind).transpose();
  const double tol = 1e-8 * inf_norm(rhs);
  const auto within_contract = [&](const Vec& lam) {
    return lam.allFinite() && inf_norm(Kt * lam - rhs) <= tol;
  };

  Vec lam = Eigen::FullPivLU<Mat>(Kt).solve(rhs);
  if (!within_contract(lam)) {
    Mat shifted = Kt;
    shifted.diagonal().array() += regularization_shift;
    lam = Eigen::FullPivLU<Mat>(shifted).solve(rhs);
    if (!within_contract(lam)) {
      throw SingularAfterRegularization(
          "transposed KKT solve misses the residual contract after regularization");
    }
  }

  Adjoint out;
  out.lam_d = lam.segment(0, n);
  out.lam_e = lam.segment(n, m);
  out.lam_i = lam.segment(n + m, p);
  out.lam_g = lam.segment(n + m + p, p);
  return out;
}

QpGradients hypergradient(const QpModel& qp, const Iterate& solution, const Adjoint& lam) {
  QpGradients g;
  g.dc = lam.lam_d;
  g.db = -lam.lam_e;
  g.dh = -lam.lam_i;

  const Mat outer = lam.lam_d * solution.x.transpose();
  g.dQ = 0.5 * (outer + outer.transpose());
  g.dA = solution.y * lam.lam_d.transpose() + lam.lam_e * solution.x.transpose();
  g.dG = solution.z * lam.lam_d.transpose() + lam.lam_i * solution.x.transpose();
  return g;
}

FdCheckReport finite_diff_check(const QpModel& qp, const LossSpec& loss,
                                const FdCheckOptions& opts) {
  if (loss.x_target.size() != qp.n) {
    throw DimensionMismatch("loss target does not match the model");
  }

  SolverParams params;
  params.kkt = KktMode::Full;
  params.eps_abs = params.eps_rel = opts.solve_eps;
  params.max_iters = 400;

  // Weakly active instances usually cannot reach the tight tolerance at
  // all; fall back to the stock tolerance so the activity margin can still
  // be measured and reported instead of erroring out.
  SolveReport base = solve(qp, params);
  const bool tight_solved = base.status == SolveStatus::Solved;
  if (!tight_solved) {
    SolverParams fallback = params;
    const SolverParams stock;
    fallback.eps_abs = stock.eps_abs;
    fallback.eps_rel = stock.eps_rel;
    base = solve(qp, fallback);
    if (base.status != SolveStatus::Solved) {
      throw SolveFailedDuringCheck("base model did not solve at the check tolerance");
    }
  }

  FdCheckReport report;
  report.strict_complementarity_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < qp.p; ++j) {
    report.strict_complementarity_margin =
        std::min(report.strict_complementarity_margin,
                 std::max(base.solution.s[j], base.solution.z[j]));
  }

  report.numeric.dQ = Mat::Zero(qp.n, qp.n);
  report.numeric.dc = Vec::Zero(qp.n);
  report.numeric.dA = Mat::Zero(qp.m, qp.n);
  report.numeric.db = Vec::Zero(qp.m);
  report.numeric.dG = Mat::Zero(qp.p, qp.n);
  report.numeric.dh = Vec::Zero(qp.p);
  report.analytic = report.numeric;

  if (qp.p > 0 && report.strict_complementarity_margin < opts.weak_activity_tol) {
    report.weakly_active = true;
    return report;
  }
  if (!tight_solved) {
    throw SolveFailedDuringCheck("base model did not solve at the check tolerance");
  }

  AdjointSeed seed;
  seed.dl_dx = base.solution.x - loss.x_target;
  seed.dl_dy = Vec::Zero(qp.m);
  seed.dl_dz = Vec::Zero(qp.p);
  seed.dl_ds = Vec::Zero(qp.p);
  const Adjoint lam =
      solve_adjoint(qp, base.solution, base.final_penalty, params.ncp, seed);
  report.analytic = hypergradient(qp, base.solution, lam);

  const auto loss_at = [&](const QpModel& perturbed) {
    const SolveReport rep = solve(perturbed, params, base.solution);
    if (rep.status != SolveStatus::Solved) {
      throw SolveFailedDuringCheck("perturbed model did not solve at the check tolerance");
    }
    return 0.5 * (rep.solution.x - loss.x_target).squaredNorm();
  };
  const double step = opts.fd_step;
  const auto central = [&](const auto& bump) {
    QpModel plus = qp;
    bump(plus, step);
    QpModel minus = qp;
    bump(minus, -step);
    return (loss_at(plus) - loss_at(minus)) / (2.0 * step);
  };
  const auto record = [&report](double analytic, double numeric, std::string name) {
    const double rel = std::abs(analytic - numeric) /
                       std::max({1.0, std::abs(analytic), std::abs(numeric)});
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_entry = std::move(name);
    }
  };

  for (int j = 0; j < qp.n; ++j) {
    for (int k = j; k < qp.n; ++k) {
      const double numeric = central([j, k](QpModel& qm, double d) {
        qm.Q(j, k) += d;
        if (k != j) qm.Q(k, j) += d;
      });
      const std::string name = "Q(" + std::to_string(j) + "," + std::to_string(k) + ")";
      if (k == j) {
        report.numeric.dQ(j, j) = numeric;
        record(report.analytic.dQ(j, j), numeric, name);
      } else {
        report.numeric.dQ(j, k) = report.numeric.dQ(k, j) = 0.5 * numeric;
        record(report.analytic.dQ(j, k) + report.analytic.dQ(k, j), numeric, name);
      }
    }
  }
  for (int j = 0; j < qp.n; ++j) {
    report.numeric.dc[j] = central([j](QpModel& qm, double d) { qm.c[j] += d; });
    record(report.analytic.dc[j], report.numeric.dc[j], "c(" + std::to_string(j) + ")");
  }
  for (int j = 0; j < qp.m; ++j) {
    for (int k = 0; k < qp.n; ++k) {
      report.numeric.dA(j, k) = central([j, k](QpModel& qm, double d) { qm.A(j, k) += d; });
      record(report.analytic.dA(j, k), report.numeric.dA(j, k),
             "A(" + std::to_string(j) + "," + std::to_string(k) + ")");
    }
  }
  for (int j = 0; j < qp.m; ++j) {
    report.numeric.db[j] = central([j](QpModel& qm, double d) { qm.b[j] += d; });
    record(report.analytic.db[j], report.numeric.db[j], "b(" + std::to_string(j) + ")");
  }
  for (int j = 0; j < qp.p; ++j) {
    for (int k = 0; k < qp.n; ++k) {
      report.numeric.dG(j, k) = central([j, k](QpModel& qm, double d) { qm.G(j, k) += d; });
      record(report.analytic.dG(j, k), report.numeric.dG(j, k),
             "G(" + std::to_string(j) + "," + std::to_string(k) + ")");
    }
  }
  for (int j = 0; j < qp.p; ++j) {
    report.numeric.dh[j] = central([j](QpModel& qm, double d) { qm.h[j] += d; });
    record(report.analytic.dh[j], report.numeric.dh[j], "h(" + std::to_string(j) + ")");
  }
  return report;
}

}  // namespace shiftqp
