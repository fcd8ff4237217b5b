#include "shiftqp/ncp.hpp"

#include <cmath>

namespace shiftqp {

namespace {

constexpr double kDenomFloor = 1e-16;

void check_mu(double mu) {
  if (mu < 0.0 || !std::isfinite(mu)) {
    throw NegativeMu("mu must be finite and nonnegative");
  }
}

}  // namespace

NcpEval phi(NcpKind kind, const Vec& s, const Vec& z, double mu) {
  check_mu(mu);
  if (s.size() != z.size()) {
    throw DimensionMismatch("s and z must have equal length");
  }
  const auto p = s.size();
  NcpEval out;
  out.value.resize(p);
  out.d_s.resize(p);
  out.d_z.resize(p);

  for (Eigen::Index j = 0; j < p; ++j) {
    double root = 0.0;
    double num_s = 0.0;
    double num_z = 0.0;
    if (kind == NcpKind::SmoothedMin) {
      const double d = s(j) - z(j);
      root = std::sqrt(d * d + 4.0 * mu);
      num_s = d;
      num_z = -d;
    } else {
      root = std::sqrt(s(j) * s(j) + z(j) * z(j) + 2.0 * mu);
      num_s = s(j);
      num_z = z(j);
    }
    out.value(j) = s(j) + z(j) - root;
    const double denom = std::max(root, kDenomFloor);
    out.d_s(j) = 1.0 - num_s / denom;
    out.d_z(j) = 1.0 - num_z / denom;
  }
  return out;
}

Vec xi_closed_form(const Vec& s, const Vec& w, double mu) {
  check_mu(mu);
  if (s.size() != w.size()) {
    throw DimensionMismatch("s and w must have equal length");
  }
  Vec xi(s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double d = s(j) - w(j);
    const double root = std::sqrt(d * d + 4.0 * mu);
    if (d >= 0.0) {
      xi(j) = (d + root) / 2.0;
    } else {
      // Rationalized form avoids cancellation; d + root == 0 only when
      // mu == 0, where the nonnegative root is exactly 0.
      const double denom = root - d;
      xi(j) = denom > 0.0 ? 2.0 * mu / denom : 0.0;
    }
  }
  return xi;
}

Vec shifted_residual(NcpKind kind, const Vec& s, const Vec& z, double mu, double rho_n,
                     const Vec& s_E, const Vec& z_E) {
  if (s_E.size() != s.size() || z_E.size() != z.size()) {
    throw DimensionMismatch("estimate vectors must match s and z");
  }
  return phi(kind, s, z, mu).value + rho_n * (s - s_E) + rho_n * (z - z_E);
}

}  // namespace shiftqp
