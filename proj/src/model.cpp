#include "shiftqp/model.hpp"

namespace shiftqp {

namespace {

void check_finite(const Mat& M, const char* name) {
  if (!M.allFinite()) {
    throw NonFiniteEntry(std::string(name) + " contains a NaN or Inf entry");
  }
}

}  // namespace

QpModel make_qp(Mat Q, Vec c, Mat A, Vec b, Mat G, Vec h) {
  QpModel qp;
  qp.n = static_cast<int>(c.size());
  qp.m = static_cast<int>(b.size());
  qp.p = static_cast<int>(h.size());

  if (Q.rows() != qp.n || Q.cols() != qp.n) {
    throw DimensionMismatch("Q must be n-by-n with n = len(c)");
  }
  if (A.rows() != qp.m || (qp.m > 0 && A.cols() != qp.n)) {
    throw DimensionMismatch("A must be m-by-n with m = len(b)");
  }
  if (G.rows() != qp.p || (qp.p > 0 && G.cols() != qp.n)) {
    throw DimensionMismatch("G must be p-by-n with p = len(h)");
  }
  if (qp.m == 0 && A.cols() != 0 && A.cols() != qp.n) {
    throw DimensionMismatch("A must be empty or have n columns");
  }
  if (qp.p == 0 && G.cols() != 0 && G.cols() != qp.n) {
    throw DimensionMismatch("G must be empty or have n columns");
  }

  check_finite(Q, "Q");
  check_finite(c, "c");
  check_finite(A, "A");
  check_finite(b, "b");
  check_finite(G, "G");
  check_finite(h, "h");

  const double scale = Q.size() > 0 ? Q.cwiseAbs().maxCoeff() : 0.0;
  const double asym = Q.size() > 0 ? (Q - Q.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > kSymmetryTol * std::max(1.0, scale)) {
    throw AsymmetricQ("Q deviates from symmetry beyond tolerance");
  }
  Q = ((Q + Q.transpose()) / 2.0).eval();

  // Normalize empty blocks to n columns so downstream products never branch.
  if (qp.m == 0) A.resize(0, qp.n);
  if (qp.p == 0) G.resize(0, qp.n);

  qp.Q = std::move(Q);
  qp.c = std::move(c);
  qp.A = std::move(A);
  qp.b = std::move(b);
  qp.G = std::move(G);
  qp.h = std::move(h);
  return qp;
}

QpModel make_qp(Mat Q, Vec c) {
  const int n = static_cast<int>(c.size());
  return make_qp(std::move(Q), std::move(c), Mat(0, n), Vec(0), Mat(0, n), Vec(0));
}

void validate(const QpModel& qp) {
  if (qp.n < 0 || qp.m < 0 || qp.p < 0) {
    throw DimensionMismatch("dimensions must be nonnegative");
  }
  if (qp.Q.rows() != qp.n || qp.Q.cols() != qp.n) {
    throw DimensionMismatch("Q must be n-by-n");
  }
  if (qp.c.size() != qp.n) {
    throw DimensionMismatch("c must have length n");
  }
  if (qp.A.rows() != qp.m || qp.A.cols() != qp.n) {
    throw DimensionMismatch("A must be m-by-n");
  }
  if (qp.b.size() != qp.m) {
    throw DimensionMismatch("b must have length m");
  }
  if (qp.G.rows() != qp.p || qp.G.cols() != qp.n) {
    throw DimensionMismatch("G must be p-by-n");
  }
  if (qp.h.size() != qp.p) {
    throw DimensionMismatch("h must have length p");
  }

  check_finite(qp.Q, "Q");
  check_finite(qp.c, "c");
  check_finite(qp.A, "A");
  check_finite(qp.b, "b");
  check_finite(qp.G, "G");
  check_finite(qp.h, "h");

  const double scale = qp.Q.size() > 0 ? qp.Q.cwiseAbs().maxCoeff() : 0.0;
  const double asym =
      qp.Q.size() > 0 ? (qp.Q - qp.Q.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > kSymmetryTol * std::max(1.0, scale)) {
    throw AsymmetricQ("Q deviates from symmetry beyond tolerance");
  }
}

double objective(const QpModel& qp, const Vec& x) {
  if (x.size() != qp.n) {
    throw DimensionMismatch("x must have length n");
  }
  return 0.5 * x.dot(qp.Q * x) + qp.c.dot(x);
}

}  // namespace shiftqp
