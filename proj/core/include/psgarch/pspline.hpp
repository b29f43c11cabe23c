#pragma once

#include "psgarch/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace psgarch::pspline {

// Relative eigenvalue cutoff of the generalized inverse of TᵀT used by the
// plug-in formula: sqrt of machine epsilon, the usual ginv default.
inline constexpr double kGramPinvTol = 1.4901161193847656e-08;

// Truncated-polynomial spline basis on the equidistant design
// tau_t = (t - 0.5) / n with K interior knots x_i = i / (K + 1).
//
// Besides the n x (p+1+K) design matrix T, the basis caches a thin SVD
// T = U diag(s) Wᵀ. Every solve involving (TᵀT)⁻¹ or (TᵀT + c D)⁻¹ is
// evaluated through this factor, so the Gram matrix is never formed (its
// condition number is the square of that of T). gram_pinv() drops
// eigenvalues below pinv_tol() times the largest one.
class SplineBasis {
 public:
  std::size_t n() const { return n_; }
  int p() const { return p_; }
  int knot_count() const { return k_; }
  std::size_t dim() const { return static_cast<std::size_t>(p_ + 1 + k_); }

  const std::vector<double>& tau() const { return tau_; }
  const std::vector<double>& knots() const { return knots_; }
  const linalg::Matrix& design() const { return design_; }
  // Diagonal of D: p+1 zeros followed by K ones.
  const std::vector<double>& penalty_mask() const { return penalty_mask_; }
  // Generalized inverse of TᵀT.
  const linalg::Matrix& gram_pinv() const { return gram_pinv_; }

  // Factor of T; singular values at or below the cutoff have been zeroed.
  const linalg::Matrix& left_vectors() const { return u_; }
  const std::vector<double>& singular_values() const { return s_; }
  const linalg::Matrix& right_vectors() const { return w_; }
  std::size_t rank() const { return rank_; }
  // Number of directions kept by the generalized inverse of TᵀT.
  std::size_t gram_rank() const { return gram_rank_; }
  double pinv_tol() const { return pinv_tol_; }

 private:
  friend SplineBasis build_basis(std::size_t n, int p, int knot_count, double pinv_tol);
  SplineBasis() = default;

  std::size_t n_ = 0;
  int p_ = 0;
  int k_ = 0;
  std::vector<double> tau_;
  std::vector<double> knots_;
  linalg::Matrix design_;
  std::vector<double> penalty_mask_;
  linalg::Matrix gram_pinv_;
  linalg::Matrix u_;
  std::vector<double> s_;
  linalg::Matrix w_;
  std::size_t rank_ = 0;
  std::size_t gram_rank_ = 0;
  double pinv_tol_ = kGramPinvTol;
};

// Throws InvalidConfiguration unless p >= 1, K >= 1 and n >= 2(p+1+K).
SplineBasis build_basis(std::size_t n, int p, int knot_count, double pinv_tol = kGramPinvTol);

struct SmootherFit {
  double lambda = 0.0;
  std::vector<double> coefficients;
  std::vector<double> fitted;
  std::vector<double> residuals;
  double trace_s = 0.0;   // tr(S_lambda)
  double trace_s2 = 0.0;  // tr(S_lambda^2)
};

// Ridge fit (TᵀT + lambda^{2p} D)⁺ Tᵀ y. lambda >= 0, y finite.
SmootherFit fit(const SplineBasis& basis, std::span<const double> y, double lambda);

// (1/n) ||S_lambda m - m||^2.
double bias_component(const SplineBasis& basis, std::span<const double> m, double lambda);

// 2 pi c_f tr(S_lambda^2) / n.
double variance_component(const SplineBasis& basis, double lambda, double c_f);

// Dense n x n smoother matrix. Only meant for diagnostics on small n.
linalg::Matrix smoother_matrix(const SplineBasis& basis, double lambda);

struct LambdaATerms {
  double trace_pd = 0.0;      // tr[(TᵀT)⁻¹ D]
  double trace_pd_sq = 0.0;   // tr{[(TᵀT)⁻¹ D]^2}
  double curvature = 0.0;     // ||T (TᵀT)⁻¹ D (TᵀT)⁻¹ Tᵀ m||
};

struct LambdaAOptions {
  // Use ||.||^2 instead of the unsquared norm in the denominator.
  bool squared_norm_denominator = false;
};

LambdaATerms lambda_a_terms(const SplineBasis& basis, std::span<const double> m_hat);

// Plug-in approximation of the MASE-optimal penalty:
//   ( 2 pi c_f tr[PD] / (||T P D P Tᵀ m|| + 2 pi c_f tr[(PD)^2]) )^{1/(2p)}
// with P = (TᵀT)⁺. Throws DegenerateInput on a zero denominator.
double lambda_a(const SplineBasis& basis, std::span<const double> m_hat, double c_f,
                const LambdaAOptions& options = {});

// Large-knot indicator K (lambda^{2p} pi^{2q})^{1/(2q)} n^{-1/(2q)}, q = p + 1.
// Values above one place (K, lambda) in the large-number-of-knots regime.
double kqa(int knot_count, double lambda, int p, std::size_t n);

}  // namespace psgarch::pspline
