#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fsos {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 4;

/// Frequency vector k in Z^d.
///
/// Ordered by degree |k| = sum_j |k_j| first, then lexicographically on the
/// entries. All coefficient tables iterate in this order so that reductions
/// are reproducible.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim);
  MultiIndex(std::initializer_list<int> entries);
  explicit MultiIndex(std::span<const int> entries);

  static MultiIndex zero(int dim) { return MultiIndex(dim); }

  int dim() const { return dim_; }
  int operator[](int j) const { return v_[static_cast<std::size_t>(j)]; }
  int& operator[](int j) { return v_[static_cast<std::size_t>(j)]; }

  int degree() const;
  bool is_zero() const;
  // First nonzero entry positive. The zero index is not in the half-space.
  bool in_positive_half() const;

  MultiIndex operator-() const;
  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;

  bool operator==(const MultiIndex& o) const;
  bool operator<(const MultiIndex& o) const;

  std::vector<int> entries() const;
  std::string to_string() const;

 private:
  std::array<int, kMaxDim> v_{};
  int dim_ = 0;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& k) const;
};

/// Sparse coefficient table in canonical order.
using CoeffTable = std::map<MultiIndex, Complex>;

/// Number of k in Z^d with |k| = r.
std::uint64_t shell_count(int dim, int r);

/// All k with |k| <= radius, in canonical order.
std::vector<MultiIndex> ball(int dim, int radius);

/// All k with |k| == r, in canonical order.
std::vector<MultiIndex> shell(int dim, int r);

}  // namespace fsos
