#ifndef SHIFTQP_NCP_HPP
#define SHIFTQP_NCP_HPP

#include "shiftqp/model.hpp"

namespace shiftqp {

/// Complementarity smoothing family. SmoothedMin is the default; the
/// Fischer-Burmeister variant agrees with it on the centrality set s∘z = μ1
/// and is kept selectable for cross-checks.
enum class NcpKind {
  SmoothedMin,
  FischerBurmeister,
};

/// Componentwise evaluation of the smoothed complementarity map together
/// with its diagonal Jacobian blocks.
struct NcpEval {
  Vec value;  ///< φ(s, z; μ)
  Vec d_s;    ///< ∂φ/∂s diagonal, in [0, 2]
  Vec d_z;    ///< ∂φ/∂z diagonal, in [0, 2]
};

/// Evaluates the smoothed complementarity function and its derivatives.
///
/// SmoothedMin:       φ = s + z − sqrt((s−z)² + 4μ)
/// FischerBurmeister: φ = s + z − sqrt(s² + z² + 2μ)
///
/// The zero set of either map is {s ≥ 0, z ≥ 0, s∘z = μ1}. At the square
/// root's singular point the derivative denominator is clamped at 1e-16,
/// giving d_s = d_z = 1 there.
NcpEval phi(NcpKind kind, const Vec& s, const Vec& z, double mu);

/// Positive root of ξ² − (s−w)ξ − μ = 0, evaluated in a cancellation-free
/// form. Output is nonnegative, and strictly positive when μ > 0.
Vec xi_closed_form(const Vec& s, const Vec& w, double mu);

/// φ(s, z; μ) + ρ_n(s − s_E) + ρ_n(z − z_E), the proximally shifted
/// complementarity residual row.
Vec shifted_residual(NcpKind kind, const Vec& s, const Vec& z, double mu, double rho_n,
                     const Vec& s_E, const Vec& z_E);

}  // namespace shiftqp

#endif
