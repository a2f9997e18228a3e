#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fsos/features.hpp"
#include "fsos/trig_poly.hpp"

namespace fsos {

/// Regular grid {(i + offset) / N}^d on the torus.
struct GridSpec {
  int dim = 1;
  int points = 64;
  double offset = 0.0;
  std::uint64_t budget = std::uint64_t{1} << 24;

  std::uint64_t total() const;
  /// Throws PreconditionError unless N >= 2 and N^d <= budget.
  void validate() const;
  std::vector<double> point(std::uint64_t flat) const;
};

/// Equal-weight quadrature of (phi phi^*)(x) exp(-2 pi i k.x) over the grid.
/// Exact for band-limited maps when N > 2t + |k|_inf.
Matrix m_matrix_quadrature(const FeatureMap& map, const MultiIndex& k, const GridSpec& grid);

struct FftCoefficients {
  CoeffTable table;
  /// Set when the input may not be resolved by the grid.
  bool aliased = false;
};

/// Fourier coefficients of grid samples of `fn` by FFT, for |k_a| < N/2 on
/// every axis; entries with modulus <= drop_tol are omitted. With a known
/// bandwidth the aliasing flag is set iff bandwidth >= N/2; otherwise it is
/// set when the outer half of the spectrum carries more than 1e-8 of the
/// largest coefficient.
FftCoefficients fft_coeffs(const std::function<double(std::span<const double>)>& fn, const GridSpec& grid,
                           int bandwidth = -1, double drop_tol = 1e-14);

/// Values of p on the grid (row-major, last axis fastest) by inverse FFT.
std::vector<double> grid_values_fft(const TrigPoly& p, const GridSpec& grid);

struct GridMin {
  std::vector<double> x;
  double value = 0.0;
  /// min f lies in [value - slack, value].
  double slack = 0.0;
};

/// Dense-grid minimum; slack = cn_norm_bound(p, 1) * d / N.
GridMin grid_min(const TrigPoly& p, const GridSpec& grid);

}  // namespace fsos
