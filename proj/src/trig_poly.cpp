#include "fsos/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsos/error.hpp"

namespace fsos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double table_l1(const CoeffTable& t) {
  double s = 0.0;
  for (const auto& [k, c] : t) s += std::abs(c);
  return s;
}

// Phase exp(2 pi i t) with t reduced mod 1 first.
Complex unit_phase(double t) { return std::polar(1.0, kTwoPi * (t - std::floor(t))); }

CoeffTable symmetrize(int dim, const CoeffTable& table, double drop_tol, bool validate) {
  const double tol = 1e-12 * std::max(1.0, table_l1(table));
  CoeffTable out;
  for (const auto& [k, c] : table) {
    if (k.dim() != dim) throw MalformedInput("coefficient index " + k.to_string() + " has wrong dimension");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw MalformedInput("non-finite coefficient at " + k.to_string());
    if (k.is_zero()) {
      if (validate && std::abs(c.imag()) > tol)
        throw MalformedInput("constant coefficient must be real, imaginary part " + std::to_string(c.imag()));
      if (std::abs(c.real()) >= drop_tol) out[k] = Complex(c.real(), 0.0);
      continue;
    }
    if (!k.in_positive_half()) continue;
    const auto mirror_it = table.find(-k);
    const Complex mirror = mirror_it == table.end() ? Complex(0.0) : mirror_it->second;
    if (validate && std::abs(mirror - std::conj(c)) > tol)
      throw MalformedInput("Hermitian symmetry broken at " + k.to_string());
    const Complex v = 0.5 * (c + std::conj(mirror));
    if (std::abs(v) >= drop_tol && (v != Complex(0.0) || drop_tol == 0.0)) {
      out[k] = v;
      out[-k] = std::conj(v);
    }
  }
  // Entries only present on the negative side.
  for (const auto& [k, c] : table) {
    if (k.is_zero() || k.in_positive_half() || table.contains(-k)) continue;
    if (validate && std::abs(c) > tol) throw MalformedInput("Hermitian symmetry broken at " + k.to_string());
  }
  return out;
}

}  // namespace

TrigPoly::TrigPoly(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("trigonometric polynomial dimension out of range");
}

TrigPoly TrigPoly::from_table(int dim, CoeffTable table, double drop_tol) {
  TrigPoly p(dim);
  p.coeffs_ = symmetrize(dim, table, drop_tol, true);
  return p;
}

TrigPoly TrigPoly::from_half(int dim, const CoeffTable& half, double drop_tol) {
  CoeffTable full;
  for (const auto& [k, c] : half) {
    if (k.dim() != dim) throw MalformedInput("coefficient index " + k.to_string() + " has wrong dimension");
    if (k.is_zero()) {
      full[k] = c;
    } else if (k.in_positive_half()) {
      full[k] = c;
      full[-k] = std::conj(c);
    } else {
      throw MalformedInput("half-space table contains " + k.to_string() + " outside the canonical half");
    }
  }
  return from_table(dim, std::move(full), drop_tol);
}

TrigPoly TrigPoly::constant(int dim, double value) {
  TrigPoly p(dim);
  p.coeffs_[MultiIndex::zero(dim)] = value;
  return p;
}

Complex TrigPoly::coeff(const MultiIndex& k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Complex(0.0) : it->second;
}

int TrigPoly::bandwidth() const {
  int b = 0;
  for (const auto& [k, c] : coeffs_)
    if (c != Complex(0.0)) b = std::max(b, k.degree());
  return b;
}

bool TrigPoly::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second == Complex(0.0); });
}

double TrigPoly::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("evaluation point has wrong dimension");
  Complex acc(0.0);
  double l1 = 0.0;
  for (const auto& [k, c] : coeffs_) {
    double t = 0.0;
    for (int j = 0; j < dim_; ++j) t += k[j] * x[static_cast<std::size_t>(j)];
    acc += c * unit_phase(t);
    l1 += std::abs(c);
  }
  if (std::abs(acc.imag()) > 1e-10 * std::max(l1, 1e-300) && l1 > 0.0)
    throw MalformedInput("evaluation has imaginary residual " + std::to_string(acc.imag()));
  return acc.real();
}

TrigPoly TrigPoly::scaled(double factor) const {
  TrigPoly p(dim_);
  for (const auto& [k, c] : coeffs_) p.coeffs_[k] = c * factor;
  return p;
}

TrigPoly TrigPoly::plus_constant(double value) const {
  TrigPoly p(*this);
  p.coeffs_[MultiIndex::zero(dim_)] += value;
  return p;
}

TrigPoly product(const TrigPoly& p, const TrigPoly& q) {
  if (p.dim() != q.dim()) throw DomainError("product of polynomials with different dimensions");
  CoeffTable out;
  for (const auto& [j, a] : p.coeffs())
    for (const auto& [l, b] : q.coeffs()) out[j + l] += a * b;
  TrigPoly r(p.dim());
  r = TrigPoly::from_table(p.dim(), symmetrize(p.dim(), out, 0.0, false));
  return r;
}

double f_norm(const TrigPoly& p) { return table_l1(p.coeffs()); }

double s_norm(const TrigPoly& p, const WeightSeq& weights) {
  if (weights.dim() != p.dim()) throw DomainError("weight sequence dimension mismatch");
  double sum = 0.0;
  for (const auto& [k, c] : p.coeffs()) {
    const double a = std::norm(c);
    if (a == 0.0) continue;
    const double s = weights(k);
    if (!(s > 0.0)) throw DomainError("weight vanishes at supported coefficient " + k.to_string());
    sum += a / s;
  }
  return std::sqrt(weights.mass() * sum);
}

double s_norm_mixture(std::span<const double> betas, std::span<const std::vector<double>> centers,
                      const CoeffTable& h_hat, const WeightSeq& weights) {
  if (betas.size() != centers.size()) throw DomainError("mixture needs one weight per center");
  const int dim = weights.dim();
  for (const auto& c : centers)
    if (static_cast<int>(c.size()) != dim) throw DomainError("mixture center has wrong dimension");
  // Periodized kernel spectrum |h_k|^2 / S_k.
  std::vector<std::pair<MultiIndex, double>> spectrum;
  for (const auto& [k, h] : h_hat) {
    if (k.dim() != dim) throw DomainError("kernel coefficient has wrong dimension");
    const double a = std::norm(h);
    if (a == 0.0) continue;
    const double s = weights(k);
    if (!(s > 0.0)) throw DomainError("kernel spectrum not summable: weight vanishes at " + k.to_string());
    spectrum.emplace_back(k, a / s);
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      Complex h(0.0);
      for (const auto& [k, w] : spectrum) {
        double t = 0.0;
        for (int a = 0; a < dim; ++a) t += k[a] * (centers[i][a] - centers[j][a]);
        h += w * unit_phase(t);
      }
      quad += betas[i] * betas[j] * h.real();
    }
  }
  return std::sqrt(weights.mass() * std::max(quad, 0.0));
}

double cn_norm_bound(const TrigPoly& p, int order) {
  if (order < 1) throw PreconditionError("derivative order must be >= 1");
  double best = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    for (int q = 1; q <= order; ++q) {
      double s = 0.0;
      for (const auto& [k, c] : p.coeffs()) s += std::pow(std::abs(kTwoPi * k[j]), q) * std::abs(c);
      best = std::max(best, s);
    }
  }
  return best;
}

std::vector<double> grid_values_direct(const TrigPoly& p, int points_per_axis) {
  const int dim = p.dim();
  const int n = points_per_axis;
  if (n < 1) throw DomainError("grid needs at least one point per axis");
  const int band = p.bandwidth();
  // phase[(k + band) * n + i] = exp(2 pi i k i / n)
  std::vector<Complex> phase(static_cast<std::size_t>(2 * band + 1) * static_cast<std::size_t>(n));
  for (int k = -band; k <= band; ++k) {
    for (int i = 0; i < n; ++i) {
      const long long m = ((static_cast<long long>(k) * i) % n + n) % n;
      phase[static_cast<std::size_t>(k + band) * n + i] = std::polar(1.0, kTwoPi * static_cast<double>(m) / n);
    }
  }
  std::vector<std::pair<MultiIndex, Complex>> terms(p.coeffs().begin(), p.coeffs().end());
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(n);
  std::vector<double> out(total);
  std::array<int, kMaxDim> idx{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int j = dim - 1; j >= 0; --j) {
      idx[j] = static_cast<int>(rem % n);
      rem /= n;
    }
    Complex acc(0.0);
    for (const auto& [k, c] : terms) {
      Complex v = c;
      for (int j = 0; j < dim; ++j) v *= phase[static_cast<std::size_t>(k[j] + band) * n + idx[j]];
      acc += v;
    }
    out[flat] = acc.real();
  }
  return out;
}

int default_objective_grid(int dim) { return dim == 1 ? 4096 : (dim == 2 ? 512 : 64); }

TrigPoly random_objective(int dim, int bandwidth, int points_per_axis, Rng& rng) {
  if (bandwidth < 1) throw PreconditionError("random objective bandwidth must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  CoeffTable half;
  for (const auto& k : ball(dim, bandwidth)) {
    const double sigma = 1.0 / (1.0 + k.degree());
    if (k.is_zero()) {
      half[k] = Complex(sigma * normal(rng), 0.0);
    } else if (k.in_positive_half()) {
      const double re = sigma * normal(rng);
      const double im = sigma * normal(rng);
      half[k] = Complex(re, im);
    }
  }
  TrigPoly raw = TrigPoly::from_half(dim, half);
  const auto values = grid_values_direct(raw, points_per_axis);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw NumericalError("random objective has zero range on the grid");
  return raw.scaled(1.0 / range);
}

}  // namespace fsos
