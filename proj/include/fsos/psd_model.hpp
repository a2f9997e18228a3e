#pragma once

#include <memory>
#include <span>

#include "fsos/features.hpp"

namespace fsos {

/// Nonnegative function g(x) = phi(x)^* A phi(x) with A Hermitian PSD, held
/// either densely or as a factor U with A = U U^*.
class PsdModel {
 public:
  /// Validates Hermitian symmetry (1e-12 relative) and min eigenvalue
  /// >= -1e-10 ||A||_F; throws MalformedInput otherwise.
  static PsdModel dense(std::shared_ptr<const FeatureMap> map, Matrix a);
  static PsdModel factored(std::shared_ptr<const FeatureMap> map, Matrix u);
  static PsdModel zero(std::shared_ptr<const FeatureMap> map);

  const FeatureMap& map() const { return *map_; }
  const std::shared_ptr<const FeatureMap>& map_ptr() const { return map_; }

  bool is_factored() const { return factored_; }
  /// A for dense models, U for factored ones.
  const Matrix& stored() const { return stored_; }
  Matrix matrix() const;
  double frob_norm() const;
  double min_eigenvalue() const;

  /// trace(A M^(k)).
  Complex coeff(const MultiIndex& k) const;
  Complex coeff_with(const Matrix& moment) const;
  double eval(std::span<const double> x) const;

 private:
  PsdModel(std::shared_ptr<const FeatureMap> map, Matrix stored, bool factored);

  std::shared_ptr<const FeatureMap> map_;
  Matrix stored_;
  bool factored_;
};

/// Sets eigenvalues in [-rel_tol ||A||_F, 0) to zero and rebuilds A.
Matrix clamp_small_negative(const Matrix& a, double rel_tol = 1e-12);

/// Smallest eigenvalue of the Hermitian part of a.
double min_hermitian_eigenvalue(const Matrix& a);

inline Complex model_coeff(const PsdModel& model, const MultiIndex& k) { return model.coeff(k); }
inline double model_eval(const PsdModel& model, std::span<const double> x) { return model.eval(x); }

}  // namespace fsos
