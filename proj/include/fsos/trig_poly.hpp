#pragma once

#include <span>
#include <vector>

#include "fsos/multi_index.hpp"
#include "fsos/random.hpp"
#include "fsos/weights.hpp"

namespace fsos {

/// Real 1-periodic function on [0,1]^d given by finitely many Fourier
/// coefficients, f(x) = sum_k c_k exp(+2 pi i k.x), with c_{-k} = conj(c_k).
class TrigPoly {
 public:
  explicit TrigPoly(int dim);

  /// Full table (both halves). Throws MalformedInput on broken symmetry.
  static TrigPoly from_table(int dim, CoeffTable table, double drop_tol = 0.0);
  /// Half-space entries plus k = 0; the mirror half is filled in.
  static TrigPoly from_half(int dim, const CoeffTable& half, double drop_tol = 0.0);
  static TrigPoly constant(int dim, double value);

  int dim() const { return dim_; }
  const CoeffTable& coeffs() const { return coeffs_; }
  Complex coeff(const MultiIndex& k) const;
  /// Largest |k| with a nonzero coefficient (0 for constants and zero).
  int bandwidth() const;
  bool is_zero() const;

  double eval(std::span<const double> x) const;

  TrigPoly scaled(double factor) const;
  TrigPoly plus_constant(double value) const;

 private:
  int dim_;
  CoeffTable coeffs_;
};

TrigPoly product(const TrigPoly& p, const TrigPoly& q);

/// sum_k |c_k|; bounds sup|f| from above.
double f_norm(const TrigPoly& p);

/// sqrt(C_S^2 * sum_k |c_k|^2 / S_k) with C_S^2 = sum_k S_k.
double s_norm(const TrigPoly& p, const WeightSeq& weights);

/// S-norm of sum_i beta_i h(. - x_i) computed through the periodized kernel
/// H(y) = sum_k |h_k|^2 / S_k exp(2 pi i k.y).
double s_norm_mixture(std::span<const double> betas, std::span<const std::vector<double>> centers,
                      const CoeffTable& h_hat, const WeightSeq& weights);

/// max_j max_{1<=q<=order} sum_k |2 pi k_j|^q |c_k|: an upper bound on the
/// C^order seminorm used in certificates.
double cn_norm_bound(const TrigPoly& p, int order);

/// Values on the regular grid {i/N}^d (row-major, last axis fastest), by
/// direct separable summation.
std::vector<double> grid_values_direct(const TrigPoly& p, int points_per_axis);

/// Random test objective: coefficients ~ N(0, 1/(1+|k|)^2) (+ i N(...)) on
/// |k| <= bandwidth, made Hermitian, then divided by the realized range on
/// a grid of points_per_axis^d points.
TrigPoly random_objective(int dim, int bandwidth, int points_per_axis, Rng& rng);

/// Default grid resolution for random_objective.
int default_objective_grid(int dim);

}  // namespace fsos
