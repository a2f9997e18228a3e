#include "fsos/psd_model.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

#include "fsos/error.hpp"

namespace fsos {

PsdModel::PsdModel(std::shared_ptr<const FeatureMap> map, Matrix stored, bool factored)
    : map_(std::move(map)), stored_(std::move(stored)), factored_(factored) {
  if (!map_) throw PreconditionError("PSD model needs a feature map");
  if (stored_.rows() != map_->size())
    throw MalformedInput("model matrix has " + std::to_string(stored_.rows()) + " rows, feature map has " +
                         std::to_string(map_->size()) + " features");
  if (!stored_.allFinite()) throw MalformedInput("model matrix has non-finite entries");
}

PsdModel PsdModel::dense(std::shared_ptr<const FeatureMap> map, Matrix a) {
  if (a.rows() != a.cols()) throw MalformedInput("model matrix must be square");
  const double norm = a.norm();
  const double asym = (a - a.adjoint()).norm();
  if (asym > 1e-12 * std::max(norm, 1e-300) && asym > 0.0) {
    std::ostringstream os;
    os << "model matrix is not Hermitian: ||A - A^*||_F = " << asym << ", ||A||_F = " << norm;
    throw MalformedInput(os.str());
  }
  Matrix h = 0.5 * (a + a.adjoint());
  if (h.rows() > 0 && norm > 0.0) {
    const double lmin = min_hermitian_eigenvalue(h);
    if (lmin < -1e-10 * norm) {
      std::ostringstream os;
      os << "model matrix is not PSD: min eigenvalue " << lmin << ", ||A||_F = " << norm;
      throw MalformedInput(os.str());
    }
  }
  return PsdModel(std::move(map), std::move(h), false);
}

PsdModel PsdModel::factored(std::shared_ptr<const FeatureMap> map, Matrix u) {
  return PsdModel(std::move(map), std::move(u), true);
}

PsdModel PsdModel::zero(std::shared_ptr<const FeatureMap> map) {
  const int n = map->size();
  return PsdModel(std::move(map), Matrix::Zero(n, n), false);
}

Matrix PsdModel::matrix() const { return factored_ ? Matrix(stored_ * stored_.adjoint()) : stored_; }

double PsdModel::frob_norm() const {
  // ||U U^*||_F = ||U^* U||_F
  if (factored_) return (stored_.adjoint() * stored_).norm();
  return stored_.norm();
}

double PsdModel::min_eigenvalue() const { return min_hermitian_eigenvalue(matrix()); }

Complex PsdModel::coeff_with(const Matrix& m) const {
  if (factored_) return (stored_.adjoint() * (m * stored_)).trace();
  // trace(A M) = sum_ij A_ij M_ji
  return stored_.cwiseProduct(m.transpose()).sum();
}

Complex PsdModel::coeff(const MultiIndex& k) const { return coeff_with(*map_->moment(k)); }

double PsdModel::eval(std::span<const double> x) const {
  const Vector phi = map_->features(x);
  if (factored_) return (stored_.adjoint() * phi).squaredNorm();
  return (phi.adjoint() * stored_ * phi)(0, 0).real();
}

Matrix clamp_small_negative(const Matrix& a, double rel_tol) {
  const Matrix h = 0.5 * (a + a.adjoint());
  if (h.rows() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed while clamping model matrix");
  Eigen::VectorXd lam = es.eigenvalues();
  const double tol = rel_tol * h.norm();
  bool changed = false;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < 0.0 && lam[i] >= -tol) {
      lam[i] = 0.0;
      changed = true;
    }
  }
  if (!changed) return h;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

double min_hermitian_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace fsos
