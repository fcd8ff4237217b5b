#ifndef SHIFTQP_ITERATE_HPP
#define SHIFTQP_ITERATE_HPP

#include "shiftqp/model.hpp"

namespace shiftqp {

/// Primal-dual point. s and z carry no sign restriction: the method is
/// non-interior and may cross zero freely.
struct Iterate {
  Vec x;  ///< primal, length n
  Vec s;  ///< slack, length p
  Vec y;  ///< equality multipliers, length m
  Vec z;  ///< inequality multipliers, length p
};

/// Proximal anchor points for the perturbed residual.
struct Estimates {
  Vec x_E;
  Vec y_E;
  Vec z_E;
  Vec s_E;
};

/// Smoothing, centering, and proximal penalty state carried across
/// iterations.
struct PenaltyState {
  double mu{0.0};
  double sigma{0.0};
  double rho_d{0.0};
  double rho_e{0.0};
  double rho_i{0.0};
  double rho_n{0.0};
  double theta_d{0.0};
  double theta_e{0.0};
  double theta_i{0.0};
};

/// Perturbed residual blocks: dual, equality, inequality, complementarity.
struct Residual {
  Vec d;
  Vec e;
  Vec i;
  Vec g;

  double inf_norm() const {
    double v = 0.0;
    if (d.size() > 0) v = std::max(v, d.cwiseAbs().maxCoeff());
    if (e.size() > 0) v = std::max(v, e.cwiseAbs().maxCoeff());
    if (i.size() > 0) v = std::max(v, i.cwiseAbs().maxCoeff());
    if (g.size() > 0) v = std::max(v, g.cwiseAbs().maxCoeff());
    return v;
  }

  double squared_norm() const {
    return d.squaredNorm() + e.squaredNorm() + i.squaredNorm() + g.squaredNorm();
  }
};

/// Unshifted optimality residuals; n is the componentwise min(s, z)
/// complementarity measure.
struct OuterResiduals {
  Vec d;
  Vec e;
  Vec i;
  Vec n;
};

inline double inf_norm(const Vec& v) {
  return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace shiftqp

#endif
