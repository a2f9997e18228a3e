#include "fsos/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsos/error.hpp"

namespace fsos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double resolve_target(const FeatureMap& map, double tail_target) {
  return tail_target > 0.0 ? tail_target : 1e-9 * map.total_sum();
}

}  // namespace

double mu_weight(const MultiIndex& k) {
  const int d = k.dim();
  double s = 1.0;
  for (int j = 0; j < d; ++j) s += std::pow(kTwoPi * std::abs(k[j]), d + 1);
  return 1.0 / s;
}

double mu_tail_bound(int dim, int radius) {
  // On the shell |k| = r the power-mean inequality gives
  // sum_j |k_j|^(d+1) >= r^(d+1) / d^d, and #shell(r) <= 3^d r^(d-1), so the
  // summand beyond R is at most C / r^2 and the remainder at most C / R.
  const double d = dim;
  const double dd = std::pow(d, d);
  const double c2pi = std::pow(kTwoPi, d + 1);
  const int start = std::max(radius + 1, 1);
  const int stop = start + 200000;
  double sum = 0.0;
  for (int r = start; r < stop; ++r) {
    const double mu_max = 1.0 / (1.0 + c2pi * std::pow(static_cast<double>(r), d + 1) / dd);
    sum += static_cast<double>(shell_count(dim, r)) * mu_max;
  }
  const double c = std::pow(3.0, d) * dd / c2pi;
  return sum + c / (stop - 1);
}

double PiDistribution::pmf(const MultiIndex& k) const {
  auto it = position_.find(k);
  return it == position_.end() ? 0.0 : weights_[it->second] / normalizer_;
}

std::size_t PiDistribution::sample_position(Rng& rng) const {
  const double u = uniform01(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

MultiIndex PiDistribution::sample(Rng& rng) const { return support_[sample_position(rng)]; }

int default_support_radius(const FeatureMap& map, const TrigPoly& f, double tail_target) {
  int radius = f.bandwidth();
  if (auto r = map.support_radius()) return std::max(radius, *r);
  const double target = resolve_target(map, tail_target);
  if (map.tail_sum(radius) <= target) return radius;
  int lo = radius, hi = std::max(radius, 1) * 2;
  while (map.tail_sum(hi) > target) {
    lo = hi;
    hi *= 2;
    if (hi > (1 << 24)) throw NumericalError("moment tail does not reach the target");
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (map.tail_sum(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

PiDistribution build_pi(const FeatureMap& map, const TrigPoly& f, int support_radius, double tail_target) {
  if (f.dim() != map.dim()) throw PreconditionError("objective and feature map dimensions differ");
  if (support_radius < 0) support_radius = default_support_radius(map, f, tail_target);
  if (support_radius < f.bandwidth())
    throw PreconditionError("support radius " + std::to_string(support_radius) +
                            " does not cover the objective bandwidth " + std::to_string(f.bandwidth()));
  double moment_tail = 0.0;
  if (auto r = map.support_radius()) {
    if (support_radius < *r)
      throw PreconditionError("support radius " + std::to_string(support_radius) +
                              " misses nonzero moment matrices up to |k| = " + std::to_string(*r));
  } else {
    const double target = resolve_target(map, tail_target);
    moment_tail = map.tail_sum(support_radius);
    if (moment_tail > target)
      throw PreconditionError("moment tail beyond radius " + std::to_string(support_radius) + " is " +
                              std::to_string(moment_tail) + " > target " + std::to_string(target));
  }

  PiDistribution pi;
  pi.dim_ = map.dim();
  pi.support_radius_ = support_radius;
  pi.support_ = ball(map.dim(), support_radius);
  pi.weights_ = map.moment_frobs(pi.support_);
  for (std::size_t i = 0; i < pi.support_.size(); ++i) {
    pi.weights_[i] += mu_weight(pi.support_[i]);
    pi.position_.emplace(pi.support_[i], i);
  }
  double z = 0.0;
  pi.cdf_.resize(pi.weights_.size());
  for (std::size_t i = 0; i < pi.weights_.size(); ++i) {
    z += pi.weights_[i];
    pi.cdf_[i] = z;
  }
  for (auto& c : pi.cdf_) c /= z;
  pi.cdf_.back() = 1.0;
  pi.normalizer_ = z;
  pi.mu_tail_ = mu_tail_bound(map.dim(), support_radius);
  pi.moment_tail_ = moment_tail;

  for (const auto& [k, c] : f.coeffs())
    if (c != Complex(0.0) && !(pi.pmf(k) > 0.0))
      throw PreconditionError("sampling law misses objective frequency " + k.to_string());
  return pi;
}

}  // namespace fsos
