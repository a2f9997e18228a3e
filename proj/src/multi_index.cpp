#include "fsos/multi_index.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "fsos/error.hpp"

namespace fsos {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("multi-index dimension must be in [1, " + std::to_string(kMaxDim) +
                      "], got " + std::to_string(dim));
  }
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void fill_shell(int dim, int pos, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    if (remaining == 0) {
      cur[pos] = 0;
      out.push_back(cur);
    } else {
      cur[pos] = -remaining;
      out.push_back(cur);
      cur[pos] = remaining;
      out.push_back(cur);
    }
    return;
  }
  // Lexicographic order on entries: most negative first.
  for (int v = -remaining; v <= remaining; ++v) {
    cur[pos] = v;
    fill_shell(dim, pos + 1, remaining - std::abs(v), cur, out);
  }
}

}  // namespace

MultiIndex::MultiIndex(int dim) : dim_(dim) { check_dim(dim); }

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::span<const int>(entries.begin(), entries.size())) {}

MultiIndex::MultiIndex(std::span<const int> entries) : dim_(static_cast<int>(entries.size())) {
  check_dim(dim_);
  std::copy(entries.begin(), entries.end(), v_.begin());
}

int MultiIndex::degree() const {
  int s = 0;
  for (int j = 0; j < dim_; ++j) s += std::abs(v_[j]);
  return s;
}

bool MultiIndex::is_zero() const {
  for (int j = 0; j < dim_; ++j)
    if (v_[j] != 0) return false;
  return true;
}

bool MultiIndex::in_positive_half() const {
  for (int j = 0; j < dim_; ++j) {
    if (v_[j] > 0) return true;
    if (v_[j] < 0) return false;
  }
  return false;
}

MultiIndex MultiIndex::operator-() const {
  MultiIndex out(*this);
  for (int j = 0; j < dim_; ++j) out.v_[j] = -v_[j];
  return out;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  if (o.dim_ != dim_) throw DomainError("multi-index dimension mismatch");
  MultiIndex out(*this);
  for (int j = 0; j < dim_; ++j) out.v_[j] += o.v_[j];
  return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const { return *this + (-o); }

bool MultiIndex::operator==(const MultiIndex& o) const {
  if (dim_ != o.dim_) return false;
  for (int j = 0; j < dim_; ++j)
    if (v_[j] != o.v_[j]) return false;
  return true;
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  if (dim_ != o.dim_) return dim_ < o.dim_;
  const int da = degree(), db = o.degree();
  if (da != db) return da < db;
  for (int j = 0; j < dim_; ++j)
    if (v_[j] != o.v_[j]) return v_[j] < o.v_[j];
  return false;
}

std::vector<int> MultiIndex::entries() const { return {v_.begin(), v_.begin() + dim_}; }

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int j = 0; j < dim_; ++j) os << (j ? "," : "") << v_[j];
  os << ')';
  return os.str();
}

std::size_t MultiIndexHash::operator()(const MultiIndex& k) const {
  std::size_t h = static_cast<std::size_t>(k.dim());
  for (int j = 0; j < k.dim(); ++j)
    h = h * 1000003u ^ static_cast<std::size_t>(static_cast<unsigned>(k[j]));
  return h;
}

std::uint64_t shell_count(int dim, int r) {
  check_dim(dim);
  if (r < 0) return 0;
  if (r == 0) return 1;
  std::uint64_t total = 0;
  for (int j = 1; j <= std::min(dim, r); ++j) {
    total += (std::uint64_t{1} << j) * binomial(static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(j)) *
             binomial(static_cast<std::uint64_t>(r - 1), static_cast<std::uint64_t>(j - 1));
  }
  return total;
}

std::vector<MultiIndex> shell(int dim, int r) {
  check_dim(dim);
  std::vector<MultiIndex> out;
  if (r < 0) return out;
  out.reserve(shell_count(dim, r));
  MultiIndex cur(dim);
  fill_shell(dim, 0, r, cur, out);
  return out;
}

std::vector<MultiIndex> ball(int dim, int radius) {
  std::vector<MultiIndex> out;
  for (int r = 0; r <= radius; ++r) {
    auto s = shell(dim, r);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace fsos
