#pragma once

#include <optional>
#include <vector>

#include "fsos/features.hpp"
#include "fsos/psd_model.hpp"
#include "fsos/random.hpp"
#include "fsos/sampling.hpp"
#include "fsos/trig_poly.hpp"

namespace fsos {

struct SolverConfig {
  double radius = 0.0;              // Frobenius bound R; <= 0 selects default_radius
  long iterations = 1000;           // T
  std::optional<double> step;       // eta; empty selects the automatic rule
  double smoothing = 0.0;           // alpha; <= 0 selects default_smoothing (factored solver)
  int rank = 0;                     // r; 0 selects n
  std::uint64_t seed = 0;
  bool average = true;              // projected solver: return the running average
  double average_from = 0.0;        // projected solver: average A_t for t > average_from * T
  int batch = 1;                    // samples averaged per step; 0: exact expectation (factored solver)
  double momentum = 0.0;            // factored solver: heavy-ball coefficient
  double init_scale = 1e-2;         // factored solver: ||U_0 U_0^*||_F
  bool clip = false;                // factored solver: keep ||U U^*||_F <= R
  double precondition = 0.0;        // factored solver: > 0 scales steps by (M^(0) + eps I)^-1, eps relative to ||M^(0)||_2
  long trace_every = 1;
};

struct TraceRow {
  long iter = 0;
  double objective_estimate = 0.0;
  double grad_norm = 0.0;
};

struct SolveResult {
  PsdModel model;
  std::vector<TraceRow> trace;
  double radius = 0.0;
  double step = 0.0;
  double smoothing = 0.0;
};

/// r_k = f_k - trace(A M^(k)).
struct Residual {
  MultiIndex k;
  Complex value;
};

/// trace(A M) without forming the product.
Complex pairing(const Matrix& a, const Matrix& m);

Residual residual(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const FeatureMap& map);

/// L_k(A): (f_0 - <A,M^(0)>)/pi_0 at k = 0, -|r_k|/pi_k otherwise.
double loss_term(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const PiDistribution& pi,
                 const FeatureMap& map);

/// Supergradient of L_k on Hermitian matrices; zero where r_k = 0.
Matrix ascent_direction(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const PiDistribution& pi,
                        const FeatureMap& map);

struct SmoothedTerm {
  double value = 0.0;
  Matrix gradient;
};

/// -sqrt((alpha pi_k)^2 + |r_k|^2)/pi_k for k != 0 (unchanged at k = 0) and its
/// Hermitian gradient.
SmoothedTerm smoothed_loss(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const PiDistribution& pi,
                           const FeatureMap& map, double alpha);

/// Euclidean projection onto {A PSD, ||A||_F <= R}: clamp the spectrum at
/// zero, then rescale into the ball.
Matrix project(const Matrix& m, double radius);

/// E_pi[L_k(A)] summed exactly over the support of pi.
double expected_objective(const Matrix& a, const TrigPoly& f, const PiDistribution& pi, const FeatureMap& map);

/// 1.1 * (f_0 - min over a grid of f), floored away from zero.
double default_radius(const TrigPoly& f);
double default_smoothing(const TrigPoly& f);
/// Step for the factored solver with exact expectations.
double default_exact_step(double precondition);

/// Projected stochastic gradient ascent on A from A_0 = 0; returns the
/// average of A_{s+1}..A_T with s = floor(average_from * T) (or A_T when
/// averaging is off).
SolveResult sga_solve(const TrigPoly& f, std::shared_ptr<const FeatureMap> map, const PiDistribution& pi,
                      const SolverConfig& config, Rng& rng);

/// Stochastic gradient ascent on U (A = U U^*) for the smoothed objective;
/// returns the last iterate. With batch = 0 every step uses the exact
/// expectation over the support of pi, evaluated by grid quadrature.
SolveResult bm_solve(const TrigPoly& f, std::shared_ptr<const FeatureMap> map, const PiDistribution& pi,
                     const SolverConfig& config, Rng& rng);

}  // namespace fsos
