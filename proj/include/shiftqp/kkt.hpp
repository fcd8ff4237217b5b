#ifndef SHIFTQP_KKT_HPP
#define SHIFTQP_KKT_HPP

#include <Eigen/Cholesky>

#include "shiftqp/iterate.hpp"
#include "shiftqp/model.hpp"
#include "shiftqp/ncp.hpp"

namespace shiftqp {

enum class KktMode {
  Condensed,
  Full,
};

/// Storage for the condensed system. Sized once per model; re-assembled in
/// place every iteration.
struct KktWorkspace {
  Mat Qtilde;            ///< Q + ρ_d·I
  Mat J;                 ///< stacked [A; G], (m+p)×n
  Vec Dinv;              ///< inverse diagonal of D = blkdiag(ρ_e·I, P̃)
  Vec P;                 ///< diag of (C_s + ρ_n)⁻¹(C_z + ρ_n)
  Vec q;                 ///< (C_s + ρ_n)⁻¹ r̃_g
  Vec rp;                ///< condensed constraint rhs [r̃_e; r̃_i − q]
  Mat H;                 ///< Q̃ + Jᵀ D⁻¹ J
  Eigen::LLT<Mat> chol;  ///< factorization of H (possibly boosted)
  int boost_count{0};    ///< diagonal boosts spent on the last factorization
  double rho_d_used{0};  ///< ρ_d actually present in the factorized H
};

struct Direction {
  Vec dx;
  Vec dy;
  Vec dz;
  Vec ds;
};

/// Builds every condensed block from the current iterate, penalty state and
/// perturbed residual. H is assembled via a symmetric rank update, so it is
/// exactly symmetric.
void assemble_condensed(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                        NcpKind kind, const Residual& res, KktWorkspace& ws);

/// Cholesky of H with a transient regularization fallback: on failure the
/// diagonal shift is multiplied by `delta` and the attempt repeated, up to
/// 10 boosts. The outer ρ_d schedule is not touched. Throws
/// FactorizationFailed when the boosted attempts are exhausted.
void factorize_with_fallback(KktWorkspace& ws, double delta);

/// Back-substitution through the condensed blocks:
///   Δx = −H⁻¹(r_d + JᵀD⁻¹r_p), Δλ = D⁻¹(JΔx + r_p), Δs = −(P∘Δz + q).
Direction solve_direction(const KktWorkspace& ws, const Vec& r_d, const Vec& r_p);

/// Solves the uncondensed (n+m+2p) saddle system directly. The system is
/// symmetrized by scaling the complementarity row with J̃_z⁻¹ and ordering
/// unknowns (x, s, y, z), which yields a quasi-definite matrix; an
/// unpivoted LDLᵀ then exists and is computed in place.
Direction solve_full_kkt(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                         NcpKind kind, const Residual& rhs);

/// ∞-norm of the defect when `dir` is substituted into the uncondensed
/// system with right-hand side −res. Test and certificate helper.
double substitution_residual(const QpModel& qp, const Iterate& it, const PenaltyState& pen,
                             NcpKind kind, const Residual& res, const Direction& dir);

}  // namespace shiftqp

#endif
