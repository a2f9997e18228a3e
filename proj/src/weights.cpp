#include "fsos/weights.hpp"

#include <cmath>
#include <numbers>

#include "fsos/error.hpp"

namespace fsos {

namespace {

// Radius of the exactly summed ball before the analytic tail takes over.
int exact_radius(int dim) {
  switch (dim) {
    case 1: return 4096;
    case 2: return 128;
    case 3: return 32;
    default: return 16;
  }
}

}  // namespace

WeightSeq::WeightSeq(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("weight sequence dimension out of range");
}

WeightSeq WeightSeq::table(int dim, std::map<MultiIndex, double> entries) {
  WeightSeq out(dim);
  for (const auto& [k, v] : entries) {
    if (k.dim() != dim) throw DomainError("weight table index has wrong dimension");
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("weights must be finite and nonnegative");
  }
  out.table_ = std::move(entries);
  return out;
}

WeightSeq WeightSeq::geometric(int dim, double scale, double lambda) {
  return WeightSeq(dim).with_family(Geometric{scale, lambda});
}

WeightSeq WeightSeq::sobolev(int dim, double scale, double s) {
  return WeightSeq(dim).with_family(Sobolev{scale, s});
}

WeightSeq& WeightSeq::with_family(Family family) {
  if (const auto* g = std::get_if<Geometric>(&family)) {
    if (!(g->lambda > 0.0 && g->lambda < 1.0) || !(g->scale > 0.0))
      throw DomainError("geometric weights need scale > 0 and lambda in (0,1)");
  }
  if (const auto* s = std::get_if<Sobolev>(&family)) {
    if (!(s->s > 0.5 * dim_) || !(s->scale > 0.0))
      throw DomainError("Sobolev weights are summable only for s > d/2");
  }
  family_ = family;
  return *this;
}

double WeightSeq::family_value(const MultiIndex& k) const {
  if (const auto* g = std::get_if<Geometric>(&family_)) return g->scale * std::pow(g->lambda, k.degree());
  if (const auto* s = std::get_if<Sobolev>(&family_)) {
    double q = 1.0;
    for (int j = 0; j < dim_; ++j) {
      const double w = 2.0 * std::numbers::pi * k[j];
      q += w * w;
    }
    return s->scale * std::pow(q, -s->s);
  }
  return 0.0;
}

double WeightSeq::operator()(const MultiIndex& k) const {
  if (auto it = table_.find(k); it != table_.end()) return it->second;
  return family_value(k);
}

double WeightSeq::family_mass() const {
  if (const auto* g = std::get_if<Geometric>(&family_))
    return g->scale * std::pow((1.0 + g->lambda) / (1.0 - g->lambda), dim_);
  if (const auto* s = std::get_if<Sobolev>(&family_)) {
    const int radius = exact_radius(dim_);
    double sum = 0.0;
    for (const auto& k : ball(dim_, radius)) sum += family_value(k);
    // |k| = r > R: sum_j k_j^2 >= r^2/d and #shell <= 3^d r^(d-1).
    const double d = dim_;
    const double tail = std::pow(3.0, d) * std::pow(d / (4.0 * std::numbers::pi * std::numbers::pi), s->s) *
                        std::pow(static_cast<double>(radius), d - 2.0 * s->s) / (2.0 * s->s - d);
    return sum + s->scale * tail;
  }
  return 0.0;
}

double WeightSeq::mass() const {
  double total = family_mass();
  for (const auto& [k, v] : table_) total += v - family_value(k);
  return total;
}

}  // namespace fsos
