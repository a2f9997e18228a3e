#pragma once

#include <optional>
#include <variant>

#include "fsos/multi_index.hpp"

namespace fsos {

/// Nonnegative summable weight sequence S_k over Z^d.
///
/// An explicit table takes precedence; indices outside the table fall back
/// to an optional parametric family (zero when absent). mass() returns a
/// certified upper bound on sum_k S_k, exact when there is no family.
class WeightSeq {
 public:
  struct Geometric {  // scale * lambda^|k|, 0 < lambda < 1
    double scale = 1.0;
    double lambda = 0.5;
  };
  struct Sobolev {  // scale * (1 + sum_j (2 pi k_j)^2)^(-s), s > d/2
    double scale = 1.0;
    double s = 1.0;
  };
  using Family = std::variant<std::monostate, Geometric, Sobolev>;

  explicit WeightSeq(int dim);
  static WeightSeq table(int dim, std::map<MultiIndex, double> entries);
  static WeightSeq geometric(int dim, double scale, double lambda);
  static WeightSeq sobolev(int dim, double scale, double s);

  WeightSeq& with_family(Family family);

  int dim() const { return dim_; }
  double operator()(const MultiIndex& k) const;
  double mass() const;

 private:
  double family_value(const MultiIndex& k) const;
  double family_mass() const;

  int dim_;
  std::map<MultiIndex, double> table_;
  Family family_;
};

}  // namespace fsos
