#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsos/multi_index.hpp"

namespace fsos {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Feature map phi : [0,1]^d -> C^n together with the Fourier moments
/// M^(k) = (phi phi^*)^_k of its outer product.
///
/// Moment matrices are memoized up to a fixed number of entries; lookups are
/// safe from several threads.
class FeatureMap {
 public:
  FeatureMap(const FeatureMap&) = delete;
  FeatureMap& operator=(const FeatureMap&) = delete;
  virtual ~FeatureMap() = default;

  virtual std::string type() const = 0;
  virtual int dim() const = 0;
  virtual int size() const = 0;

  virtual Vector features(std::span<const double> x) const = 0;

  /// M^(k), uncached.
  virtual Matrix compute_moment(const MultiIndex& k) const = 0;
  /// M^(k) through the memo cache.
  std::shared_ptr<const Matrix> moment(const MultiIndex& k) const;

  /// Exact ||M^(k)||_F.
  virtual double moment_frob(const MultiIndex& k) const;
  virtual std::vector<double> moment_frobs(std::span<const MultiIndex> ks) const;

  /// Certified upper bound on sum over Z^d of ||M^(k)||_F.
  virtual double total_sum() const = 0;
  /// Certified upper bound on sum over |k| > radius of ||M^(k)||_F.
  virtual double tail_sum(int radius) const = 0;

  /// Radius beyond which every M^(k) vanishes, if any.
  virtual std::optional<int> support_radius() const { return std::nullopt; }

  void set_cache_capacity(std::size_t matrices);
  std::size_t cache_capacity() const;
  std::size_t cache_size() const;

 protected:
  FeatureMap() = default;

 private:
  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<MultiIndex, std::shared_ptr<const Matrix>, MultiIndexHash> cache_;
  std::size_t cache_capacity_ = 0;
};

/// phi_t(x)_k = exp(-2 pi i k.x) for |k| <= t.
class BandLimitedMap final : public FeatureMap {
 public:
  BandLimitedMap(int dim, int bandwidth);

  std::string type() const override { return "bandlimited"; }
  int dim() const override { return dim_; }
  int size() const override { return static_cast<int>(index_.size()); }
  int bandwidth() const { return bandwidth_; }
  const std::vector<MultiIndex>& indices() const { return index_; }
  std::optional<int> position(const MultiIndex& k) const;

  Vector features(std::span<const double> x) const override;
  Matrix compute_moment(const MultiIndex& k) const override;
  double moment_frob(const MultiIndex& k) const override;
  double total_sum() const override;
  double tail_sum(int radius) const override;
  std::optional<int> support_radius() const override { return 2 * bandwidth_; }

 private:
  int dim_;
  int bandwidth_;
  std::vector<MultiIndex> index_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> position_;
};

/// Product map phi(x)_j = prod_a p_rho(x_a - node_j[a]) built from the
/// Poisson-type kernel p_rho(u) = sum_m rho^|m| exp(2 pi i m u)
/// = (1 - rho^2) / (1 + rho^2 - 2 rho cos 2 pi u).
class KernelMap final : public FeatureMap {
 public:
  /// nodes: n points of [0,1)^d.
  KernelMap(int dim, double rho, std::vector<std::vector<double>> nodes, std::uint64_t seed = 0);
  /// n nodes drawn uniformly from [0,1)^d with make_rng(seed).
  static std::shared_ptr<KernelMap> sample(int dim, int n, double rho, std::uint64_t seed);

  std::string type() const override { return "kernel"; }
  int dim() const override { return dim_; }
  int size() const override { return static_cast<int>(nodes_.size()); }
  double rho() const { return rho_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::vector<double>>& nodes() const { return nodes_; }

  /// Constants of the geometric moment bound ||M^(k)||_F <= zeta * rho_tilde^|k|,
  /// zeta = (n (1 + rho^2) / (1 - rho^2))^d, rho_tilde = rho exp((1 - rho^2) / (1 + rho^2)).
  double zeta() const;
  double rho_tilde() const;
  /// Per-frequency bound n prod_a rho^|k_a| (|k_a| + (1 + rho^2) / (1 - rho^2)),
  /// never larger than zeta * rho_tilde^|k|.
  double moment_bound(const MultiIndex& k) const;
  /// Sum of moment_bound over the shell |k| = r.
  double shell_bound(int r) const;

  /// Radius up to which total_sum() sums ||M^(k)||_F exactly.
  int exact_radius() const { return exact_radius_; }
  void set_exact_radius(int radius);

  /// One-dimensional factor h(k, x_i[axis], x_j[axis]) for all i, j.
  Matrix axis_moment(int axis, int k) const;

  Vector features(std::span<const double> x) const override;
  Matrix compute_moment(const MultiIndex& k) const override;
  std::vector<double> moment_frobs(std::span<const MultiIndex> ks) const override;
  double total_sum() const override;
  double tail_sum(int radius) const override;

  static double kernel(double rho, double u);

 private:
  struct AxisTables {
    Eigen::MatrixXcd d1;     // 1 / (1 - rho^2 exp(2 pi i u_ij))
    Eigen::MatrixXd sin_pu;  // sin(pi u'_ij), u' = u - round(u)
    Eigen::MatrixXd wrapped;  // u'_ij
    Eigen::MatrixXi shift;   // round(u_ij)
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> tie;
  };

  int dim_;
  double rho_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> nodes_;
  std::vector<AxisTables> axes_;
  int exact_radius_;
  mutable std::once_flag total_once_;
  mutable double total_ = 0.0;
  // shell_bound(r) for r <= shells_.size() - 1 and a certified bound on the
  // sum of all later shells.
  mutable std::once_flag shells_once_;
  mutable std::vector<double> shells_;
  mutable double shells_remainder_ = 0.0;
  void build_shells() const;
  double far_shell(int r) const;
  double far_ratio(int r) const;
};

/// Certified bound on sum_{|k| > radius} zeta * rho_tilde^|k| by shell counting.
/// Kept as the coarse reference for KernelMap::tail_sum.
double geometric_shell_tail(int dim, double zeta, double rho_tilde, int radius);

// Named operations on feature maps.
inline std::shared_ptr<const Matrix> m_matrix(const FeatureMap& map, const MultiIndex& k) { return map.moment(k); }
inline double m_frob(const FeatureMap& map, const MultiIndex& k) { return map.moment_frob(k); }
inline double m_total_sum(const FeatureMap& map) { return map.total_sum(); }
inline double m_tail_sum(const FeatureMap& map, int radius) { return map.tail_sum(radius); }

}  // namespace fsos
