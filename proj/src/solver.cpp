#include "shiftqp/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace shiftqp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved:
      return "Solved";
    case SolveStatus::MaxIters:
      return "MaxIters";
    case SolveStatus::TimeLimit:
      return "TimeLimit";
    case SolveStatus::PrimalInfeasible:
      return "PrimalInfeasible";
    case SolveStatus::DualInfeasible:
      return "DualInfeasible";
  }
  return "Unknown";
}

SolverParams single_precision_params() {
  SolverParams p;
  p.rho_init *= 1e4;
  p.rho_min *= 1e4;
  p.mu_min *= 1e4;
  return p;
}

Residual perturbed_residual(const QpModel& qp, const Iterate& it, const Estimates& est,
                            const PenaltyState& pen, NcpKind kind) {
  Residual r;
  r.d = qp.Q * it.x + qp.c + qp.A.transpose() * it.y + qp.G.transpose() * it.z +
        pen.rho_d * (it.x - est.x_E);
  r.e = qp.A * it.x - qp.b - pen.rho_e * (it.y - est.y_E);
  r.i = qp.G * it.x + it.s - qp.h - pen.rho_i * (it.z - est.z_E);
  r.g = shifted_residual(kind, it.s, it.z, pen.mu, pen.rho_n, est.s_E, est.z_E);
  return r;
}

OuterResiduals outer_residuals(const QpModel& qp, const Iterate& it) {
  OuterResiduals r;
  r.d = qp.Q * it.x + qp.c + qp.A.transpose() * it.y + qp.G.transpose() * it.z;
  r.e = qp.A * it.x - qp.b;
  r.i = qp.G * it.x + it.s - qp.h;
  r.n = it.s.cwiseMin(it.z);
  return r;
}

double merit(const Residual& res) { return 0.5 * res.squared_norm(); }

namespace {

Iterate advance(const Iterate& it, const Direction& dir, double alpha) {
  return Iterate{it.x + alpha * dir.dx, it.s + alpha * dir.ds, it.y + alpha * dir.dy,
                 it.z + alpha * dir.dz};
}

ResidualNorms group_norms(const QpModel& qp, const Iterate& it, double mu, NcpKind kind) {
  const OuterResiduals outer = outer_residuals(qp, it);
  ResidualNorms n;
  n.d = inf_norm(outer.d);
  n.e = inf_norm(outer.e);
  n.i = inf_norm(outer.i);
  n.g = qp.p > 0 ? inf_norm(phi(kind, it.s, it.z, mu).value) : 0.0;
  return n;
}

}  // namespace

LineSearchResult line_search(const QpModel& qp, const Iterate& it, const Estimates& est,
                             const PenaltyState& pen, NcpKind kind, const Direction& dir,
                             const SolverParams& params) {
  const double merit_ref = merit(perturbed_residual(qp, it, est, pen, kind));
  // Newton direction of the residual: DM(U)ᵀΔU = −‖r̃‖² = −2M exactly.
  const double slope = -2.0 * merit_ref;

  const double kappa = params.ls_backtrack_factor;
  for (double alpha = 1.0; alpha >= params.alpha_min; alpha *= kappa) {
    const double candidate =
        merit(perturbed_residual(qp, advance(it, dir, alpha), est, pen, kind));
    if (!std::isfinite(candidate)) continue;
    if (candidate <= params.gamma * merit_ref + alpha * params.eta * slope) {
      return LineSearchResult{alpha, candidate, false};
    }
  }

  const double fallback =
      merit(perturbed_residual(qp, advance(it, dir, params.alpha_min), est, pen, kind));
  if (!std::isfinite(fallback)) {
    throw NonFiniteMerit("merit non-finite at the minimum step length");
  }
  return LineSearchResult{params.alpha_min, fallback, true};
}

PenaltyState update_centering(const PenaltyState& pen, double after, double before,
                              const Vec& s, const Vec& z, const SolverParams& params) {
  const auto p = s.size();
  if (p == 0) return pen;

  PenaltyState out = pen;
  const double mu_old = pen.mu;
  double mu = s.cwiseMin(z).squaredNorm() / static_cast<double>(p);
  mu = std::max(params.mu_min, out.sigma * mu);
  if (after <= params.theta_up * before) {
    mu *= params.delta_mu_plus;
    out.sigma = std::max(params.sigma_min, out.sigma - params.theta_dec * out.sigma);
  } else {
    out.sigma = std::min(params.sigma_max, out.sigma + params.theta_inc * (1.0 - out.sigma));
  }
  out.mu = std::max(params.mu_min, std::min(mu, mu_old));
  return out;
}

EstimateUpdate update_estimates(const PenaltyState& pen, const Iterate& it_new,
                                const Iterate& it_old, const ResidualNorms& now,
                                const ResidualNorms& before, const SolverParams& params) {
  EstimateUpdate out;
  out.pen = pen;

  const auto schedule = [&params](double& theta, double& rho, double norm_new,
                                  double norm_old) {
    if (norm_new <= params.theta_lo * norm_old) {
      const double decayed = std::max(0.0, theta - params.theta_dec * theta);
      theta = decayed < params.theta_min ? 0.0 : decayed;
      rho = std::max(rho / params.delta, params.rho_min);
    } else if (norm_new >= params.theta_up * norm_old) {
      theta = std::min(1.0, theta + params.theta_inc * (1.0 - theta));
    }
  };
  schedule(out.pen.theta_d, out.pen.rho_d, now.d, before.d);
  schedule(out.pen.theta_e, out.pen.rho_e, now.e, before.e);
  schedule(out.pen.theta_i, out.pen.rho_i, now.i, before.i);
  if (now.g <= params.theta_lo * before.g) {
    out.pen.rho_n = std::max(out.pen.rho_n / params.delta, params.rho_min);
  }

  out.est.x_E = it_new.x + out.pen.theta_d * (it_old.x - it_new.x);
  out.est.y_E = it_new.y + out.pen.theta_e * (it_old.y - it_new.y);
  out.est.z_E = it_new.z + out.pen.theta_i * (it_old.z - it_new.z);
  out.est.s_E = it_new.s + out.pen.theta_i * (it_old.s - it_new.s);
  return out;
}

bool neighborhood_ok(double after, double before, double mu, const SolverParams& params) {
  return after <= params.theta * before + params.beta * mu;
}

bool stopping_ok(const QpModel& qp, const Iterate& it, double mu, NcpKind kind,
                 const SolverParams& params) {
  const double ea = params.eps_abs;
  const double er = params.eps_rel;

  const Vec qx = qp.Q * it.x;
  const Vec aty = qp.A.transpose() * it.y;
  const Vec gtz = qp.G.transpose() * it.z;
  const Vec r_d = qx + qp.c + aty + gtz;
  const double dual_scale =
      std::max({inf_norm(qx), inf_norm(qp.c), inf_norm(aty), inf_norm(gtz)});
  if (inf_norm(r_d) > ea + er * dual_scale) return false;

  if (qp.m > 0) {
    const Vec ax = qp.A * it.x;
    if (inf_norm(ax - qp.b) > ea + er * std::max(inf_norm(ax), inf_norm(qp.b))) return false;
  }

  if (qp.p > 0) {
    const Vec gx = qp.G * it.x;
    const double prim_scale = std::max({inf_norm(gx), inf_norm(it.s), inf_norm(qp.h)});
    if (inf_norm(gx + it.s - qp.h) > ea + er * prim_scale) return false;

    const Vec r_g = phi(kind, it.s, it.z, mu).value;
    const double comp_scale = std::max({inf_norm(it.s), inf_norm(it.z), inf_norm(r_g)});
    if (inf_norm(it.s.cwiseMin(it.z)) > ea + er * comp_scale) return false;
  }
  return true;
}

std::optional<SolveStatus> detect_infeasibility(const QpModel& qp, const Direction& dir,
                                                const SolverParams& params) {
  const double eps_d = params.eps_dual_inf;
  const double eps_p = params.eps_prim_inf;

  const double dx_norm = inf_norm(dir.dx);
  if (dx_norm > 0.0) {
    const bool curvature_flat = inf_norm(qp.Q * dir.dx) <= eps_d * dx_norm;
    const bool descent = qp.c.dot(dir.dx) < -eps_d;
    const bool eq_recession = qp.m == 0 || inf_norm(qp.A * dir.dx) <= eps_d * dx_norm;
    const bool in_recession =
        qp.p == 0 || inf_norm(qp.G * dir.dx + dir.ds) <= eps_d * dx_norm;
    if (curvature_flat && descent && eq_recession && in_recession) {
      return SolveStatus::DualInfeasible;
    }
  }

  const double lam_norm = inf_norm(dir.dy) + inf_norm(dir.dz);
  if (lam_norm > 0.0) {
    const Vec combo = qp.A.transpose() * dir.dy + qp.G.transpose() * dir.dz;
    const bool annihilates = inf_norm(combo) <= eps_p * lam_norm;
    const bool separates = qp.b.dot(dir.dy) + qp.h.dot(dir.dz) < -eps_p;
    const bool sign_ok =
        qp.p == 0 || dir.dz.minCoeff() >= -eps_p * inf_norm(dir.dz);
    if (annihilates && separates && sign_ok) {
      return SolveStatus::PrimalInfeasible;
    }
  }
  return std::nullopt;
}

Iterate cold_start(const QpModel& qp) {
  Iterate it;
  it.x = Vec::Zero(qp.n);
  it.y = Vec::Zero(qp.m);
  it.z = Vec::Ones(qp.p);
  it.s = qp.p > 0 ? qp.h.cwiseMax(1.0).eval() : Vec(0);
  return it;
}

Solver::Solver(QpModel qp) : qp_(std::move(qp)) { validate(qp_); }

SolveReport Solver::solve(const SolverParams& params, const std::optional<Iterate>& warm) {
  if (!(params.rho_min > 0.0) || params.rho_init < params.rho_min) {
    throw Error("penalty floor must satisfy 0 < rho_min <= rho_init");
  }
  if (!(params.mu_min > 0.0)) {
    throw Error("mu_min must be positive");
  }

  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  SolveReport rep;
  Iterate current = warm ? *warm : cold_start(qp_);
  if (current.x.size() != qp_.n || current.s.size() != qp_.p ||
      current.y.size() != qp_.m || current.z.size() != qp_.p) {
    throw DimensionMismatch("warm-start iterate does not match the model");
  }

  Estimates est{current.x, current.y, current.z, current.s};
  PenaltyState pen;
  pen.sigma = params.sigma_init;
  pen.rho_d = pen.rho_e = pen.rho_i = pen.rho_n = params.rho_init;
  pen.theta_d = pen.theta_e = pen.theta_i = params.theta_init;
  pen.mu = params.mu_min;
  if (qp_.p > 0) {
    pen.mu = std::max(params.mu_min,
                      current.s.cwiseMin(current.z).squaredNorm() / qp_.p);
  }

  int executed = 0;
  try {
    for (int iter = 0; iter < params.max_iters; ++iter) {
      executed = iter + 1;
      const Residual res = perturbed_residual(qp_, current, est, pen, params.ncp);
      const double before = res.inf_norm();
      if (!std::isfinite(before)) {
        rep.aborted_nonfinite = true;
        break;
      }

      Direction dir;
      int boosts = 0;
      if (params.kkt == KktMode::Condensed) {
        assemble_condensed(qp_, current, pen, params.ncp, res, ws_);
        factorize_with_fallback(ws_, params.delta);
        boosts = ws_.boost_count;
        dir = solve_direction(ws_, res.d, ws_.rp);
      } else {
        dir = solve_full_kkt(qp_, current, pen, params.ncp, res);
      }
      if (!dir.dx.allFinite() || !dir.ds.allFinite() || !dir.dy.allFinite() ||
          !dir.dz.allFinite()) {
        rep.aborted_nonfinite = true;
        break;
      }

      if (const auto certified = detect_infeasibility(qp_, dir, params)) {
        rep.status = *certified;
        break;
      }

      const LineSearchResult ls = line_search(qp_, current, est, pen, params.ncp, dir,
                                              params);
      const Iterate next = advance(current, dir, ls.alpha);
      const double after =
          perturbed_residual(qp_, next, est, pen, params.ncp).inf_norm();

      if (neighborhood_ok(after, before, pen.mu, params)) {
        const ResidualNorms norms_old = group_norms(qp_, current, pen.mu, params.ncp);
        const ResidualNorms norms_new = group_norms(qp_, next, pen.mu, params.ncp);
        pen = update_centering(pen, after, before, next.s, next.z, params);
        EstimateUpdate upd = update_estimates(pen, next, current, norms_new, norms_old,
                                              params);
        pen = upd.pen;
        est = std::move(upd.est);
      }
      current = next;

      const OuterResiduals outer = outer_residuals(qp_, current);
      TraceRow row;
      row.iter = iter;
      row.alpha = ls.alpha;
      row.mu = pen.mu;
      row.sigma = pen.sigma;
      row.merit = ls.merit_new;
      row.r_d = inf_norm(outer.d);
      row.r_e = inf_norm(outer.e);
      row.r_i = inf_norm(outer.i);
      row.r_n = inf_norm(outer.n);
      row.line_search_stalled = ls.stalled;
      row.boosts = boosts;
      rep.trace.push_back(row);
      if (params.verbose >= 2) {
        std::printf("iter %3d  alpha %.2e  mu %.2e  sigma %.2f  merit %.3e  "
                    "rd %.2e  re %.2e  ri %.2e  rn %.2e%s\n",
                    row.iter, row.alpha, row.mu, row.sigma, row.merit, row.r_d, row.r_e,
                    row.r_i, row.r_n, row.line_search_stalled ? "  [stalled]" : "");
      }

      if (stopping_ok(qp_, current, pen.mu, params.ncp, params)) {
        rep.status = SolveStatus::Solved;
        break;
      }
      if (params.time_limit_seconds > 0.0 && elapsed() > params.time_limit_seconds) {
        rep.status = SolveStatus::TimeLimit;
        break;
      }
    }
  } catch (const FactorizationFailed&) {
    rep.factorization_failed = true;
    rep.status = SolveStatus::MaxIters;
  } catch (const NonFiniteMerit&) {
    rep.aborted_nonfinite = true;
    rep.status = SolveStatus::MaxIters;
  }

  rep.solution = std::move(current);
  rep.iters = executed;
  const OuterResiduals outer = outer_residuals(qp_, rep.solution);
  rep.r_d = inf_norm(outer.d);
  rep.r_e = inf_norm(outer.e);
  rep.r_i = inf_norm(outer.i);
  rep.r_n = inf_norm(outer.n);
  rep.final_penalty = pen;
  rep.final_estimates = std::move(est);
  rep.wall_seconds = elapsed();

  if (params.verbose >= 1) {
    std::printf("status %s  iters %d  rd %.3e  re %.3e  ri %.3e  rn %.3e  (%.3f ms)\n",
                to_string(rep.status), rep.iters, rep.r_d, rep.r_e, rep.r_i, rep.r_n,
                rep.wall_seconds * 1e3);
  }
  return rep;
}

SolveReport solve(const QpModel& qp, const SolverParams& params,
                  const std::optional<Iterate>& warm) {
  Solver solver(qp);
  return solver.solve(params, warm);
}

}  // namespace shiftqp
