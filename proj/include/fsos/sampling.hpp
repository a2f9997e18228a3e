#pragma once

#include <unordered_map>
#include <vector>

#include "fsos/features.hpp"
#include "fsos/random.hpp"
#include "fsos/trig_poly.hpp"

namespace fsos {

/// mu_k = (1 + sum_j (2 pi |k_j|)^(d+1))^(-1)
double mu_weight(const MultiIndex& k);

/// Certified upper bound on sum_{|k| > radius} mu_k.
double mu_tail_bound(int dim, int radius);

/// Sampling law over the frequency ball |k| <= K_supp with weights
/// w_k = ||M^(k)||_F + mu_k.
class PiDistribution {
 public:
  int dim() const { return dim_; }
  int support_radius() const { return support_radius_; }
  const std::vector<MultiIndex>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Z = sum of weights over the support; also the Lipschitz constant G of
  /// every loss term L_k / pi_k.
  double normalizer() const { return normalizer_; }
  /// Bound on the mu mass outside the support.
  double mu_tail() const { return mu_tail_; }
  /// Bound on sum_{|k| > K_supp} ||M^(k)||_F (zero for band-limited maps).
  double moment_tail() const { return moment_tail_; }

  double pmf(const MultiIndex& k) const;
  bool contains(const MultiIndex& k) const { return position_.contains(k); }
  MultiIndex sample(Rng& rng) const;
  std::size_t sample_position(Rng& rng) const;

 private:
  friend PiDistribution build_pi(const FeatureMap&, const TrigPoly&, int, double);

  int dim_ = 0;
  int support_radius_ = 0;
  std::vector<MultiIndex> support_;
  std::vector<double> weights_;
  std::vector<double> cdf_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> position_;
  double normalizer_ = 0.0;
  double mu_tail_ = 0.0;
  double moment_tail_ = 0.0;
};

/// Smallest radius covering f and the feature map: max(bandwidth(f), 2t) for
/// band-limited maps; for other maps also the smallest K whose moment tail is
/// at most tail_target (1e-9 * total_sum when tail_target <= 0).
int default_support_radius(const FeatureMap& map, const TrigPoly& f, double tail_target = 0.0);

/// Throws PreconditionError if the radius misses part of f's spectrum, a
/// nonzero band-limited moment, or (other maps) leaves a moment tail above
/// tail_target. support_radius < 0 selects default_support_radius.
PiDistribution build_pi(const FeatureMap& map, const TrigPoly& f, int support_radius = -1, double tail_target = 0.0);

}  // namespace fsos
