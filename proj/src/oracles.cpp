#include "fsos/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "fsos/error.hpp"

namespace fsos {

namespace {

using detail::FftBuffer;

void transform(FftBuffer& buf, int dim, int points, int sign) {
  detail::FftPlan plan(buf, dim, points, sign);
  plan.execute();
}

double phase_of(const MultiIndex& k, double shift) {
  double s = 0.0;
  for (int a = 0; a < k.dim(); ++a) s += k[a];
  return 2.0 * std::numbers::pi * s * shift;
}

}  // namespace

std::uint64_t GridSpec::total() const {
  std::uint64_t t = 1;
  for (int a = 0; a < dim; ++a) {
    t *= static_cast<std::uint64_t>(std::max(points, 0));
    if (t > budget) return budget + 1;
  }
  return t;
}

void GridSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw PreconditionError("grid dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (points < 2) throw PreconditionError("grid needs at least 2 points per axis");
  if (total() > budget)
    throw PreconditionError("grid of " + std::to_string(points) + "^" + std::to_string(dim) +
                            " points exceeds the budget of " + std::to_string(budget));
}

std::vector<double> GridSpec::point(std::uint64_t flat) const {
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (int a = dim - 1; a >= 0; --a) {
    x[static_cast<std::size_t>(a)] = (static_cast<double>(flat % static_cast<std::uint64_t>(points)) + offset) / points;
    flat /= static_cast<std::uint64_t>(points);
  }
  return x;
}

Matrix m_matrix_quadrature(const FeatureMap& map, const MultiIndex& k, const GridSpec& grid) {
  if (grid.dim != map.dim() || k.dim() != map.dim()) throw PreconditionError("grid, frequency and map dimensions differ");
  grid.validate();
  const int n = map.size();
  Matrix acc = Matrix::Zero(n, n);
  const std::uint64_t total = grid.total();
  for (std::uint64_t j = 0; j < total; ++j) {
    const auto x = grid.point(j);
    double s = 0.0;
    for (int a = 0; a < k.dim(); ++a) s += k[a] * x[static_cast<std::size_t>(a)];
    s -= std::round(s);
    const Vector phi = map.features(x);
    acc.noalias() += std::polar(1.0, -2.0 * std::numbers::pi * s) * (phi * phi.adjoint());
  }
  return acc / static_cast<double>(total);
}

FftCoefficients fft_coeffs(const std::function<double(std::span<const double>)>& fn, const GridSpec& grid,
                           int bandwidth, double drop_tol) {
  grid.validate();
  const int dim = grid.dim;
  const int n = grid.points;
  const auto total = static_cast<std::size_t>(grid.total());
  FftBuffer buf(total);
  for (std::size_t j = 0; j < total; ++j) buf.set(j, fn(grid.point(j)));
  transform(buf, dim, n, FFTW_FORWARD);

  FftCoefficients out;
  double largest = 0.0, outer = 0.0;
  std::vector<int> m(static_cast<std::size_t>(dim));
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rest = j;
    bool nyquist = false;
    MultiIndex k(dim);
    for (int a = dim - 1; a >= 0; --a) {
      const int ma = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      if (2 * ma == n) nyquist = true;
      k[a] = 2 * ma < n ? ma : ma - n;
    }
    const Complex c = buf.at(j) / static_cast<double>(total) * std::polar(1.0, -phase_of(k, grid.offset / n));
    const double mag = std::abs(c);
    largest = std::max(largest, mag);
    bool in_outer = nyquist;
    for (int a = 0; a < dim; ++a) in_outer = in_outer || 4 * std::abs(k[a]) >= n;
    if (in_outer) outer = std::max(outer, mag);
    if (nyquist || mag <= drop_tol) continue;
    out.table.emplace(k, c);
  }
  out.aliased = bandwidth >= 0 ? 2 * bandwidth >= n : outer > 1e-8 * largest;
  return out;
}

std::vector<double> grid_values_fft(const TrigPoly& p, const GridSpec& grid) {
  if (grid.dim != p.dim()) throw PreconditionError("grid and objective dimensions differ");
  grid.validate();
  const int n = grid.points;
  const auto total = static_cast<std::size_t>(grid.total());
  FftBuffer buf(total);
  for (const auto& [k, c] : p.coeffs()) {
    std::size_t flat = 0;
    for (int a = 0; a < p.dim(); ++a) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(((k[a] % n) + n) % n);
    buf.add(flat, c * std::polar(1.0, phase_of(k, grid.offset / n)));
  }
  transform(buf, p.dim(), n, FFTW_BACKWARD);
  std::vector<double> values(total);
  for (std::size_t j = 0; j < total; ++j) values[j] = buf.at(j).real();
  return values;
}

GridMin grid_min(const TrigPoly& p, const GridSpec& grid) {
  const auto values = grid_values_fft(p, grid);
  const auto it = std::min_element(values.begin(), values.end());
  GridMin out;
  out.value = *it;
  out.x = grid.point(static_cast<std::uint64_t>(it - values.begin()));
  out.slack = cn_norm_bound(p, 1) * p.dim() / grid.points;
  return out;
}

}  // namespace fsos
