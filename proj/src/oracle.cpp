#include "shiftqp/oracle.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>

#include "shiftqp/iterate.hpp"

namespace shiftqp {

namespace {

constexpr double kSubsystemTol = 1e-8;
constexpr double kFeasTol = 1e-9;
constexpr double kSignTol = 1e-9;
constexpr double kObjTieTol = 1e-9;
constexpr double kDistinctTol = 1e-6;

struct Candidate {
  Vec x;
  Vec y;
  Vec z;
  double objective{0.0};
  std::vector<int> active;
};

// Solves the equality-constrained KKT subsystem for active set W by
// minimum-norm least squares and screens the result against the full
// problem. Any accepted candidate is a global optimum by convexity.
std::optional<Candidate> try_subset(const QpModel& qp, const std::vector<int>& W) {
  const int n = qp.n;
  const int m = qp.m;
  const int w = static_cast<int>(W.size());
  const int rows = m + w;

  Mat C(rows, n);
  Vec d(rows);
  C.topRows(m) = qp.A;
  d.head(m) = qp.b;
  for (int t = 0; t < w; ++t) {
    C.row(m + t) = qp.G.row(W[static_cast<size_t>(t)]);
    d(m + t) = qp.h(W[static_cast<size_t>(t)]);
  }

  Mat K = Mat::Zero(n + rows, n + rows);
  K.topLeftCorner(n, n) = qp.Q;
  K.topRightCorner(n, rows) = C.transpose();
  K.bottomLeftCorner(rows, n) = C;
  Vec rhs(n + rows);
  rhs.head(n) = -qp.c;
  rhs.tail(rows) = d;

  const Vec v = K.completeOrthogonalDecomposition().solve(rhs);
  const double defect = (K * v - rhs).cwiseAbs().maxCoeff();
  if (defect > kSubsystemTol * std::max(1.0, inf_norm(rhs))) return std::nullopt;

  Candidate cand;
  cand.x = v.head(n);
  cand.y = v.segment(n, m);
  cand.z = Vec::Zero(qp.p);
  for (int t = 0; t < w; ++t) {
    const double zi = v(n + m + t);
    if (zi < -kSignTol) return std::nullopt;
    cand.z(W[static_cast<size_t>(t)]) = zi;
  }

  if (m > 0 && (qp.A * cand.x - qp.b).cwiseAbs().maxCoeff() > kFeasTol) return std::nullopt;
  if (qp.p > 0 && (qp.G * cand.x - qp.h).maxCoeff() > kFeasTol) return std::nullopt;

  cand.objective = objective(qp, cand.x);
  cand.active = W;
  return cand;
}

std::vector<int> bits_of(unsigned mask) {
  std::vector<int> W;
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) W.push_back(i);
  }
  return W;
}

// Enumerates all 2^p active sets and keeps every candidate tied with the
// best objective. Returns candidates sorted by active set enumeration
// order; empty when no subset is accepted.
std::vector<Candidate> best_candidates(const QpModel& qp) {
  std::vector<Candidate> near;
  double best = std::numeric_limits<double>::infinity();
  const unsigned subsets = 1u << qp.p;
  for (unsigned mask = 0; mask < subsets; ++mask) {
    auto cand = try_subset(qp, bits_of(mask));
    if (!cand) continue;
    if (cand->objective < best - kObjTieTol) {
      best = cand->objective;
      near.clear();
      near.push_back(std::move(*cand));
    } else if (cand->objective <= best + kObjTieTol) {
      best = std::min(best, cand->objective);
      near.push_back(std::move(*cand));
    }
  }
  std::erase_if(near, [&](const Candidate& c) { return c.objective > best + kObjTieTol; });
  return near;
}

QpModel phase_one(const QpModel& qp) {
  const int n = qp.n;
  const int m = qp.m;
  const int p = qp.p;
  Mat Q = Mat::Zero(n + p, n + p);
  Q.topLeftCorner(n, n) = qp.A.transpose() * qp.A;
  Q.bottomRightCorner(p, p).setIdentity();
  Vec c = Vec::Zero(n + p);
  c.head(n) = -qp.A.transpose() * qp.b;
  Mat G(p, n + p);
  G.leftCols(n) = qp.G;
  G.rightCols(p) = -Mat::Identity(p, p);
  Vec h = qp.h;
  return make_qp(std::move(Q), std::move(c), Mat(0, n + p), Vec(0), std::move(G),
                 std::move(h));
}

}  // namespace

OracleResult enumerate_solve(const QpModel& qp) {
  validate(qp);
  if (qp.p > 20 || qp.n > 50) {
    throw BudgetExceeded("enumeration limited to p <= 20, n <= 50");
  }

  auto near = best_candidates(qp);
  if (!near.empty()) {
    // Lexicographically smallest active set among the tied optima.
    const Candidate* rep = &near.front();
    for (const auto& cand : near) {
      if (std::lexicographical_compare(cand.active.begin(), cand.active.end(),
                                       rep->active.begin(), rep->active.end())) {
        rep = &cand;
      }
    }
    bool unique = true;
    for (const auto& cand : near) {
      if ((cand.x - rep->x).cwiseAbs().maxCoeff() > kDistinctTol) {
        unique = false;
        break;
      }
    }
    OracleResult out;
    out.status = OracleStatus::Optimal;
    out.solution = OracleSolution{rep->x,      rep->y,      rep->z,
                                  rep->objective, rep->active, unique};
    return out;
  }

  // No KKT candidate: decide feasibility by a least-violation problem,
  // always solvable by the same enumeration.
  const auto relaxed = best_candidates(phase_one(qp));
  if (relaxed.empty()) {
    throw Error("oracle internal failure: relaxation yielded no candidate");
  }
  const Vec& xr = relaxed.front().x;
  double violation = 0.0;
  if (qp.m > 0) {
    violation = (qp.A * xr.head(qp.n) - qp.b).cwiseAbs().maxCoeff();
  }
  if (qp.p > 0) {
    violation = std::max(violation, (qp.G * xr.head(qp.n) - qp.h).maxCoeff());
  }
  if (violation > 1e-7) {
    OracleResult out;
    out.status = OracleStatus::Infeasible;
    return out;
  }

  // Feasible with no KKT point: look for a descent ray in the recession
  // cone {d : Qd = 0, Ad = 0, Gd <= 0}.
  Mat stacked(qp.n + qp.m, qp.n);
  stacked.topRows(qp.n) = qp.Q;
  stacked.bottomRows(qp.m) = qp.A;
  const Mat N = Eigen::FullPivLU<Mat>(stacked).kernel();
  if (N.cols() > 0 && N.cwiseAbs().maxCoeff() > 0.0) {
    const int k = static_cast<int>(N.cols());
    Mat Ga = qp.G * N;
    QpModel aux = make_qp(Mat::Identity(k, k), N.transpose() * qp.c, Mat(0, k), Vec(0),
                          std::move(Ga), Vec::Zero(qp.p));
    const auto cone = best_candidates(aux);
    if (!cone.empty() && qp.c.dot(N * cone.front().x) < -1e-10) {
      Vec ray = N * cone.front().x;
      ray /= ray.cwiseAbs().maxCoeff();
      OracleResult out;
      out.status = OracleStatus::Unbounded;
      out.ray = std::move(ray);
      return out;
    }
  }
  throw Error("oracle internal failure: feasible and bounded but no active set accepted");
}

}  // namespace shiftqp
