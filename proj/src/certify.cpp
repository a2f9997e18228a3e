#include "fsos/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsos/error.hpp"
#include "fsos/optimizer.hpp"
#include "fsos/parallel.hpp"

namespace fsos {

int default_det_radius(const TrigPoly& f, const FeatureMap& map) { return default_support_radius(map, f); }

LowerDet lower_det(const TrigPoly& f, const PsdModel& model, int radius, int threads) {
  const FeatureMap& map = model.map();
  if (f.dim() != map.dim()) throw PreconditionError("objective and feature map dimensions differ");
  if (radius < 0) radius = default_det_radius(f, map);

  LowerDet out;
  out.radius = radius;
  const Matrix a = model.matrix();
  out.a_norm = a.norm();

  std::vector<MultiIndex> half;
  for (const auto& k : ball(f.dim(), radius))
    if (k.in_positive_half()) half.push_back(k);

  // r_{-k} = conj(r_k) for Hermitian A, so each pair contributes 2 |r_k|.
  std::vector<double> mags(half.size());
  parallel_for(half.size(), threads, [&](std::size_t i) {
    const Matrix m = map.compute_moment(half[i]);
    mags[i] = std::abs(f.coeff(half[i]) - pairing(a, m));
  });

  const MultiIndex zero = MultiIndex::zero(f.dim());
  double value = (f.coeff(zero) - pairing(a, map.compute_moment(zero))).real();
  for (double v : mags) value -= 2.0 * v;

  for (const auto& [k, c] : f.coeffs())
    if (k.degree() > radius) out.f_tail += std::abs(c);
  out.moment_tail = map.tail_sum(radius);
  out.err = out.f_tail + out.a_norm * out.moment_tail;
  out.value = value - out.err;
  return out;
}

double hoeffding_error(double f_bound, double a_norm, double g_bound, long samples, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("delta must be in (0, 1]");
  if (samples < 1) throw PreconditionError("sample count must be >= 1");
  return (f_bound + a_norm) * g_bound * std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(samples));
}

LowerProb lower_prob(const TrigPoly& f, const PsdModel& model, const PiDistribution& pi, long samples, double delta,
                     Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must be in (0, 1)");
  if (samples < 1) throw PreconditionError("sample count must be >= 1");
  const FeatureMap& map = model.map();
  if (pi.dim() != map.dim() || f.dim() != map.dim()) throw PreconditionError("dimension mismatch");
  for (const auto& [k, c] : f.coeffs())
    if (c != Complex(0.0) && k.degree() <= pi.support_radius() && !pi.contains(k))
      throw PreconditionError("sampling law misses objective frequency " + k.to_string());

  const Matrix a = model.matrix();
  const double z = pi.normalizer();
  double sum = 0.0;
  for (long i = 0; i < samples; ++i) {
    const std::size_t pos = pi.sample_position(rng);
    const MultiIndex& k = pi.support()[pos];
    const double p = pi.weights()[pos] / z;
    const Complex r = f.coeff(k) - pairing(a, *map.moment(k));
    sum += (k.is_zero() ? r.real() : -std::abs(r)) / p;
  }

  LowerProb out;
  out.samples = samples;
  out.delta = delta;
  out.mean = sum / static_cast<double>(samples);

  // |L_k| <= Z (|f_k| / mu_k + ||A||_F) since pi_k >= mu_k / Z and pi_k >= ||M^(k)||_F / Z.
  double ratio = 0.0;
  for (const auto& [k, c] : f.coeffs()) ratio = std::max(ratio, std::abs(c) / mu_weight(k));
  out.f_bound = std::max(std::sqrt(static_cast<double>(f.dim() + 1)) * cn_norm_bound(f, f.dim() + 1), ratio);
  out.g_bound = std::max(z, 1.0 + map.total_sum());
  const double a_norm = a.norm();
  out.err = hoeffding_error(out.f_bound, a_norm, out.g_bound, samples, delta);

  double f_tail = 0.0;
  for (const auto& [k, c] : f.coeffs())
    if (k.degree() > pi.support_radius()) f_tail += std::abs(c);
  out.penalty = a_norm * pi.moment_tail() + f_tail;
  out.value = out.mean - out.err - out.penalty;
  return out;
}

UpperBound upper_bound(const TrigPoly& f, long points, Rng& rng) {
  if (points < 1) throw PreconditionError("upper bound needs at least one point");
  UpperBound out;
  out.points = points;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (long i = 0; i < points; ++i) {
    for (auto& v : x) v = uniform01(rng);
    const double val = f.eval(x);
    if (val < out.value) {
      out.value = val;
      out.x = x;
    }
  }
  return out;
}

UpperBound upper_bound_grid(const TrigPoly& f, int points_per_axis) {
  if (points_per_axis < 1) throw PreconditionError("upper bound needs at least one point per axis");
  const auto values = grid_values_direct(f, points_per_axis);
  const auto it = std::min_element(values.begin(), values.end());
  UpperBound out;
  out.grid = true;
  out.points = static_cast<long>(values.size());
  out.value = *it;
  auto flat = static_cast<std::size_t>(it - values.begin());
  out.x.assign(static_cast<std::size_t>(f.dim()), 0.0);
  for (int a = f.dim() - 1; a >= 0; --a) {
    out.x[static_cast<std::size_t>(a)] = static_cast<double>(flat % points_per_axis) / points_per_axis;
    flat /= points_per_axis;
  }
  return out;
}

Certificate certificate(const TrigPoly& f, const PsdModel& model, const PiDistribution* pi,
                        const CertificateOptions& options) {
  Certificate cert;
  cert.seed = options.seed;
  cert.det = lower_det(f, model, options.det_radius, options.threads);
  cert.a_norm = cert.det.a_norm;
  cert.m_total_sum = model.map().total_sum();
  cert.cn_norm_bound = cn_norm_bound(f, f.dim() + 1);

  if (options.probabilistic) {
    if (pi == nullptr) throw PreconditionError("probabilistic bound requested without a sampling law");
    Rng rng = make_rng(options.seed, 0x70726f62);
    cert.prob = lower_prob(f, model, *pi, options.samples, options.delta, rng);
    cert.eps_tail = pi->mu_tail();
  }

  if (options.upper_grid) {
    cert.upper = upper_bound_grid(f, static_cast<int>(options.upper_points > 0 ? options.upper_points : 256));
  } else if (options.upper_points > 0) {
    Rng rng = make_rng(options.seed, 0x7570706572);
    cert.upper = upper_bound(f, options.upper_points, rng);
  } else if (f.dim() != 2) {
    Rng rng = make_rng(options.seed, 0x7570706572);
    cert.upper = upper_bound(f, 10000, rng);
  } else {
    cert.upper = upper_bound_grid(f, 256);
  }

  double lower = cert.det.value;
  if (options.gap_from_prob) {
    if (!cert.prob) throw PreconditionError("gap against the probabilistic bound requires it to be computed");
    lower = cert.prob->value;
  }
  cert.gap = cert.upper.value - lower;
  return cert;
}

}  // namespace fsos
