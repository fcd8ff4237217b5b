#include "shiftqp/kkt.hpp"

#include <cmath>

namespace shiftqp {

void assemble_condensed(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                        NcpKind kind, const Residual& res, KktWorkspace& ws) {
  const int n = qp.n;
  const int m = qp.m;
  const int p = qp.p;

  ws.Qtilde = qp.Q;
  ws.Qtilde.diagonal().array() += pen.rho_d;
  ws.rho_d_used = pen.rho_d;
  ws.boost_count = 0;

  ws.J.resize(m + p, n);
  ws.J.topRows(m) = qp.A;
  ws.J.bottomRows(p) = qp.G;

  const NcpEval eval = phi(kind, it.s, it.z, pen.mu);
  const Vec js = eval.d_s.array() + pen.rho_n;
  const Vec jz = eval.d_z.array() + pen.rho_n;
  ws.P = jz.cwiseQuotient(js);
  ws.q = res.g.cwiseQuotient(js);

  ws.Dinv.resize(m + p);
  ws.Dinv.head(m).setConstant(1.0 / pen.rho_e);
  ws.Dinv.tail(p) = (ws.P.array() + pen.rho_i).inverse();

  ws.rp.resize(m + p);
  ws.rp.head(m) = res.e;
  ws.rp.tail(p) = res.i - ws.q;

  ws.H = ws.Qtilde;
  if (m + p > 0) {
    const Mat W = ws.Dinv.cwiseSqrt().asDiagonal() * ws.J;
    ws.H.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose(), 1.0);
    ws.H = Mat(ws.H.selfadjointView<Eigen::Lower>());
  }

  if (!ws.H.allFinite() || !ws.rp.allFinite()) {
    throw NonFiniteEntry("condensed system contains a NaN or Inf entry");
  }
}

void factorize_with_fallback(KktWorkspace& ws, double delta) {
  constexpr int kMaxBoosts = 10;
  for (int attempt = 0;; ++attempt) {
    ws.chol.compute(ws.H);
    if (ws.chol.info() == Eigen::Success) {
      ws.boost_count = attempt;
      return;
    }
    if (attempt == kMaxBoosts) {
      throw FactorizationFailed("condensed Hessian not positive definite after boosts");
    }
    const double boosted = delta * ws.rho_d_used;
    ws.H.diagonal().array() += boosted - ws.rho_d_used;
    ws.rho_d_used = boosted;
  }
}

Direction solve_direction(const KktWorkspace& ws, const Vec& r_d, const Vec& r_p) {
  const auto m = ws.J.rows() - ws.P.size();
  Direction dir;
  dir.dx = -ws.chol.solve(r_d + ws.J.transpose() * ws.Dinv.cwiseProduct(r_p));
  const Vec dlam = ws.Dinv.cwiseProduct(ws.J * dir.dx + r_p);
  dir.dy = dlam.head(m);
  dir.dz = dlam.tail(ws.P.size());
  dir.ds = -(ws.P.cwiseProduct(dir.dz) + ws.q);
  return dir;
}

namespace {

// Unpivoted LDL^T of a symmetric quasi-definite matrix, in place: the
// strict lower triangle of K receives L, the diagonal receives D.
void ldlt_in_place(Mat& K) {
  const auto N = K.rows();
  for (Eigen::Index j = 0; j < N; ++j) {
    double dj = K(j, j);
    for (Eigen::Index k = 0; k < j; ++k) dj -= K(j, k) * K(j, k) * K(k, k);
    if (!(std::abs(dj) > 0.0) || !std::isfinite(dj)) {
      throw FactorizationFailed("zero pivot in quasi-definite LDL^T");
    }
    K(j, j) = dj;
    for (Eigen::Index i = j + 1; i < N; ++i) {
      double v = K(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= K(i, k) * K(j, k) * K(k, k);
      K(i, j) = v / dj;
    }
  }
}

void ldlt_solve_in_place(const Mat& K, Vec& rhs) {
  const auto N = K.rows();
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index k = 0; k < i; ++k) rhs(i) -= K(i, k) * rhs(k);
  }
  for (Eigen::Index i = 0; i < N; ++i) rhs(i) /= K(i, i);
  for (Eigen::Index i = N - 1; i >= 0; --i) {
    for (Eigen::Index k = i + 1; k < N; ++k) rhs(i) -= K(k, i) * rhs(k);
  }
}

}  // namespace

Direction solve_full_kkt(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                         NcpKind kind, const Residual& rhs) {
  const int n = qp.n;
  const int m = qp.m;
  const int p = qp.p;
  const int N = n + p + m + p;

  const NcpEval eval = phi(kind, it.s, it.z, pen.mu);
  const Vec js = eval.d_s.array() + pen.rho_n;
  const Vec jz = eval.d_z.array() + pen.rho_n;

  // Unknown order (x, s, y, z); the complementarity row is scaled by
  // J̃_z⁻¹, making the matrix symmetric with a positive definite leading
  // block and negative definite trailing block.
  Mat K = Mat::Zero(N, N);
  K.topLeftCorner(n, n) = qp.Q;
  K.topLeftCorner(n, n).diagonal().array() += pen.rho_d;
  K.block(n, n, p, p).diagonal() = js.cwiseQuotient(jz);
  K.block(0, n + p, n, m) = qp.A.transpose();
  K.block(n + p, 0, m, n) = qp.A;
  K.block(0, n + p + m, n, p) = qp.G.transpose();
  K.block(n + p + m, 0, p, n) = qp.G;
  K.block(n, n + p + m, p, p).setIdentity();
  K.block(n + p + m, n, p, p).setIdentity();
  K.block(n + p, n + p, m, m).diagonal().setConstant(-pen.rho_e);
  K.block(n + p + m, n + p + m, p, p).diagonal().setConstant(-pen.rho_i);

  Vec v(N);
  v.head(n) = -rhs.d;
  v.segment(n, p) = -rhs.g.cwiseQuotient(jz);
  v.segment(n + p, m) = -rhs.e;
  v.tail(p) = -rhs.i;

  ldlt_in_place(K);
  ldlt_solve_in_place(K, v);

  Direction dir;
  dir.dx = v.head(n);
  dir.ds = v.segment(n, p);
  dir.dy = v.segment(n + p, m);
  dir.dz = v.tail(p);
  if (!dir.dx.allFinite() || !dir.ds.allFinite() || !dir.dy.allFinite() ||
      !dir.dz.allFinite()) {
    throw FactorizationFailed("full KKT solve produced non-finite direction");
  }
  return dir;
}

double substitution_residual(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                             NcpKind kind, const Residual& res, const Direction& dir) {
  const NcpEval eval = phi(kind, it.s, it.z, pen.mu);
  const Vec js = eval.d_s.array() + pen.rho_n;
  const Vec jz = eval.d_z.array() + pen.rho_n;

  const Vec row_d =
      qp.Q * dir.dx + pen.rho_d * dir.dx + qp.A.transpose() * dir.dy +
      qp.G.transpose() * dir.dz + res.d;
  const Vec row_e = qp.A * dir.dx - pen.rho_e * dir.dy + res.e;
  const Vec row_i = qp.G * dir.dx + dir.ds - pen.rho_i * dir.dz + res.i;
  const Vec row_g = jz.cwiseProduct(dir.dz) + js.cwiseProduct(dir.ds) + res.g;

  double defect = 0.0;
  defect = std::max(defect, inf_norm(row_d));
  defect = std::max(defect, inf_norm(row_e));
  defect = std::max(defect, inf_norm(row_i));
  defect = std::max(defect, inf_norm(row_g));
  return defect;
}

}  // namespace shiftqp
