#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fsos/features.hpp"
#include "fsos/random.hpp"
#include "fsos/trig_poly.hpp"

namespace fsos::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 1 + cos 2 pi x.
inline TrigPoly one_plus_cos() { return TrigPoly::from_half(1, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, 0.5}}); }

// (1 + cos 2 pi x)^2 = 1.5 + 2 cos 2 pi x + 0.5 cos 4 pi x.
inline TrigPoly one_plus_cos_squared() {
  return TrigPoly::from_half(1, {{MultiIndex{0}, 1.5}, {MultiIndex{1}, 1.0}, {MultiIndex{2}, 0.25}});
}

// sum_k c_k exp(2 pi i k.x) evaluated term by term with std::polar.
inline Complex brute_eval(const TrigPoly& p, const std::vector<double>& x) {
  Complex s = 0.0;
  for (const auto& [k, c] : p.coeffs()) {
    double phase = 0.0;
    for (int a = 0; a < p.dim(); ++a) phase += k[a] * x[static_cast<std::size_t>(a)];
    s += c * std::polar(1.0, kTwoPi * phase);
  }
  return s;
}

// Grid minimum by brute evaluation on {i/N}^d for d <= 2.
inline double brute_grid_min(const TrigPoly& p, int n) {
  double best = INFINITY;
  if (p.dim() == 1) {
    for (int i = 0; i < n; ++i) best = std::min(best, brute_eval(p, {double(i) / n}).real());
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) best = std::min(best, brute_eval(p, {double(i) / n, double(j) / n}).real());
  }
  return best;
}

inline std::vector<double> random_point(int dim, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (auto& v : x) v = uniform01(rng);
  return x;
}

inline Matrix random_complex(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(int n, Rng& rng) {
  Matrix m = random_complex(n, n, rng);
  return (m + m.adjoint()) / 2.0;
}

// U U^* scaled to the given Frobenius norm.
inline Matrix random_psd(int n, int rank, double frob, Rng& rng) {
  const Matrix u = random_complex(n, rank, rng);
  Matrix a = u * u.adjoint();
  a = (a + a.adjoint()) / 2.0;
  return a * (frob / a.norm());
}

// Random trig poly with Hermitian symmetry and coefficients of modulus <= scale.
inline TrigPoly random_trig_poly(int dim, int bandwidth, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CoeffTable half;
  for (const auto& k : ball(dim, bandwidth)) {
    if (k.is_zero())
      half[k] = u(rng);
    else if (k.in_positive_half())
      half[k] = Complex(u(rng), u(rng));
  }
  return TrigPoly::from_half(dim, half);
}

}  // namespace fsos::testing
