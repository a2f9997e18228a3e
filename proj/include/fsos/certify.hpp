#pragma once

#include <optional>
#include <vector>

#include "fsos/psd_model.hpp"
#include "fsos/random.hpp"
#include "fsos/sampling.hpp"
#include "fsos/trig_poly.hpp"

namespace fsos {

struct LowerDet {
  double value = 0.0;       // c_1
  double err = 0.0;         // Err_1 = f_tail + a_norm * moment_tail
  int radius = 0;           // K
  double f_tail = 0.0;      // sum_{|k|>K} |f_k|
  double moment_tail = 0.0; // bound on sum_{|k|>K} ||M^(k)||_F
  double a_norm = 0.0;
};

struct LowerProb {
  double value = 0.0;       // c_{1-delta}
  double err = 0.0;         // Err_{1-delta}
  double mean = 0.0;        // sample mean of L_{k_i}(A)
  double penalty = 0.0;     // deterministic truncation penalty of the sampling law
  long samples = 0;
  double delta = 0.0;
  double f_bound = 0.0;     // F in the Hoeffding range
  double g_bound = 0.0;     // G in the Hoeffding range
};

struct UpperBound {
  std::vector<double> x;
  double value = 0.0;
  long points = 0;
  bool grid = false;
};

/// Truncation radius for lower_det: full support for band-limited maps,
/// otherwise the smallest K >= bandwidth(f) with moment tail <= 1e-9 of the
/// total moment mass.
int default_det_radius(const TrigPoly& f, const FeatureMap& map);

/// Deterministic lower bound on min f; radius < 0 selects default_det_radius.
/// Residuals are computed in parallel and summed in canonical order.
LowerDet lower_det(const TrigPoly& f, const PsdModel& model, int radius = -1, int threads = 1);

/// Half-width of the Hoeffding interval: (F + ||A||) G sqrt(2 log(2/delta) / K).
double hoeffding_error(double f_bound, double a_norm, double g_bound, long samples, double delta);

/// Sampled lower bound, valid with probability >= 1 - delta over the draws.
LowerProb lower_prob(const TrigPoly& f, const PsdModel& model, const PiDistribution& pi, long samples, double delta,
                     Rng& rng);

/// min of f over `points` uniform random points; ties keep the first.
UpperBound upper_bound(const TrigPoly& f, long points, Rng& rng);
/// min of f over the regular grid {i/N}^d.
UpperBound upper_bound_grid(const TrigPoly& f, int points_per_axis);

struct CertificateOptions {
  int det_radius = -1;
  bool probabilistic = false;
  long samples = 1000;
  double delta = 0.05;
  long upper_points = 0;      // 0: a 256^2 grid in d = 2, 10^4 random points otherwise
  bool upper_grid = false;    // force a regular grid of upper_points per axis
  bool gap_from_prob = false; // measure the gap against c_{1-delta}
  std::uint64_t seed = 0;
  int threads = 1;
};

struct Certificate {
  LowerDet det;
  std::optional<LowerProb> prob;
  UpperBound upper;
  double gap = 0.0;
  double a_norm = 0.0;
  double m_total_sum = 0.0;
  double cn_norm_bound = 0.0;
  double eps_tail = 0.0;      // mu mass outside the sampling support
  std::uint64_t seed = 0;
};

/// Runs lower_det, optionally lower_prob (pi required), and the upper bound.
Certificate certificate(const TrigPoly& f, const PsdModel& model, const PiDistribution* pi,
                        const CertificateOptions& options);

}  // namespace fsos
