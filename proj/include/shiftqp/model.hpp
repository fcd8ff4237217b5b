#ifndef SHIFTQP_MODEL_HPP
#define SHIFTQP_MODEL_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace shiftqp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NonFiniteEntry : Error {
  using Error::Error;
};
struct AsymmetricQ : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct ParseError : Error {
  int line;
  ParseError(int line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};
struct InconsistentGivens : Error {
  using Error::Error;
};
struct InvalidDimensions : Error {
  using Error::Error;
};
struct FactorizationFailed : Error {
  using Error::Error;
};
struct BudgetExceeded : Error {
  using Error::Error;
};
struct NegativeMu : Error {
  using Error::Error;
};

/**
 * Convex quadratic program
 *
 *   min_x  1/2 x'Qx + c'x   s.t.  Ax = b,  Gx <= h
 *
 * with Q symmetric positive semidefinite, m equality rows and p inequality
 * rows. m and p may be zero. All inequalities use the Gx <= h convention;
 * generators convert >= and box constraints into this form.
 */
struct QpModel {
  int n{0};
  int m{0};
  int p{0};
  Mat Q;
  Vec c;
  Mat A;
  Vec b;
  Mat G;
  Vec h;
};

/// Relative tolerance for Q-symmetry checks.
inline constexpr double kSymmetryTol = 1e-12;

/// Builds a model, validating shapes and symmetrizing Q (throws AsymmetricQ
/// when the asymmetry exceeds kSymmetryTol relative to max|Q|).
QpModel make_qp(Mat Q, Vec c, Mat A, Vec b, Mat G, Vec h);

/// Unconstrained convenience overload.
QpModel make_qp(Mat Q, Vec c);

/// Checks all QpModel invariants; throws on the first violated one.
void validate(const QpModel& qp);

double objective(const QpModel& qp, const Vec& x);

}  // namespace shiftqp

#endif
