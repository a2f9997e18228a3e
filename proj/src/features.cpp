#include "fsos/features.hpp"

#include <cmath>
#include <numbers>

#include "fsos/error.hpp"
#include "fsos/random.hpp"

namespace fsos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kCacheBytes = std::size_t{256} << 20;

std::size_t byte_capped(std::size_t wanted, int n) {
  const std::size_t per = sizeof(Complex) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  return std::min(wanted, std::max<std::size_t>(1, kCacheBytes / std::max<std::size_t>(per, 1)));
}

}  // namespace

// ---------------------------------------------------------------------------
// FeatureMap

std::shared_ptr<const Matrix> FeatureMap::moment(const MultiIndex& k) const {
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(k); it != cache_.end()) return it->second;
  }
  auto m = std::make_shared<const Matrix>(compute_moment(k));
  std::unique_lock lock(cache_mutex_);
  if (auto it = cache_.find(k); it != cache_.end()) return it->second;
  if (cache_.size() < cache_capacity_) cache_.emplace(k, m);
  return m;
}

double FeatureMap::moment_frob(const MultiIndex& k) const { return compute_moment(k).norm(); }

std::vector<double> FeatureMap::moment_frobs(std::span<const MultiIndex> ks) const {
  std::vector<double> out;
  out.reserve(ks.size());
  for (const auto& k : ks) out.push_back(moment_frob(k));
  return out;
}

void FeatureMap::set_cache_capacity(std::size_t matrices) {
  std::unique_lock lock(cache_mutex_);
  cache_capacity_ = matrices;
  if (cache_.size() > matrices) cache_.clear();
}

std::size_t FeatureMap::cache_capacity() const { return cache_capacity_; }

std::size_t FeatureMap::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

// ---------------------------------------------------------------------------
// BandLimitedMap

BandLimitedMap::BandLimitedMap(int dim, int bandwidth) : dim_(dim), bandwidth_(bandwidth) {
  if (bandwidth < 0) throw DomainError("band-limited map needs t >= 0");
  index_ = ball(dim, bandwidth);
  for (int i = 0; i < static_cast<int>(index_.size()); ++i) position_.emplace(index_[i], i);
  set_cache_capacity(byte_capped(4 * static_cast<std::size_t>(std::pow(4 * bandwidth + 1, dim)), size()));
}

std::optional<int> BandLimitedMap::position(const MultiIndex& k) const {
  auto it = position_.find(k);
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

Vector BandLimitedMap::features(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("feature point has wrong dimension");
  Vector phi(size());
  for (int i = 0; i < size(); ++i) {
    double t = 0.0;
    for (int j = 0; j < dim_; ++j) t += index_[i][j] * x[static_cast<std::size_t>(j)];
    phi[i] = std::polar(1.0, -2.0 * kPi * (t - std::floor(t)));
  }
  return phi;
}

Matrix BandLimitedMap::compute_moment(const MultiIndex& k) const {
  // [M^(k)]_{k1,k2} = 1 iff k2 - k1 = k.
  Matrix m = Matrix::Zero(size(), size());
  if (k.degree() > 2 * bandwidth_) return m;
  for (int a = 0; a < size(); ++a)
    if (auto b = position(index_[a] + k)) m(a, *b) = 1.0;
  return m;
}

double BandLimitedMap::moment_frob(const MultiIndex& k) const {
  if (k.degree() > 2 * bandwidth_) return 0.0;
  int count = 0;
  for (const auto& k1 : index_)
    if (position_.contains(k1 + k)) ++count;
  return std::sqrt(static_cast<double>(count));
}

double BandLimitedMap::total_sum() const { return tail_sum(-1); }

double BandLimitedMap::tail_sum(int radius) const {
  double s = 0.0;
  for (int r = std::max(radius + 1, 0); r <= 2 * bandwidth_; ++r)
    for (const auto& k : shell(dim_, r)) s += moment_frob(k);
  return s;
}

// ---------------------------------------------------------------------------
// KernelMap

double KernelMap::kernel(double rho, double u) {
  return (1.0 - rho * rho) / (1.0 + rho * rho - 2.0 * rho * std::cos(2.0 * kPi * u));
}

KernelMap::KernelMap(int dim, double rho, std::vector<std::vector<double>> nodes, std::uint64_t seed)
    : dim_(dim), rho_(rho), seed_(seed), nodes_(std::move(nodes)) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("kernel map dimension out of range");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("kernel map needs rho in (0,1)");
  if (nodes_.empty()) throw DomainError("kernel map needs at least one node");
  for (auto& x : nodes_) {
    if (static_cast<int>(x.size()) != dim) throw DomainError("kernel node has wrong dimension");
    for (double v : x)
      if (!(v >= 0.0 && v < 1.0)) throw DomainError("kernel nodes must lie in [0,1)^d");
  }
  const int n = size();
  const double rho2 = rho * rho;
  axes_.resize(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    auto& t = axes_[static_cast<std::size_t>(a)];
    t.d1.resize(n, n);
    t.sin_pu.resize(n, n);
    t.wrapped.resize(n, n);
    t.shift.resize(n, n);
    t.tie.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double u = nodes_[i][a] - nodes_[j][a];
        const double m = std::round(u);
        const double w = u - m;
        t.shift(i, j) = static_cast<int>(m);
        t.wrapped(i, j) = w;
        // Exact ties take the closed-form diagonal branch; |u'| < 1e-13 is
        // treated as a tie as well.
        t.tie(i, j) = (nodes_[i][a] == nodes_[j][a]) || std::abs(w) < 1e-13;
        t.sin_pu(i, j) = std::sin(kPi * w);
        t.d1(i, j) = 1.0 / (1.0 - rho2 * std::polar(1.0, 2.0 * kPi * w));
      }
    }
  }
  exact_radius_ = dim == 1 ? 64 : (dim == 2 ? 16 : 6);
  set_cache_capacity(byte_capped(4 * static_cast<std::size_t>(std::pow(2 * exact_radius_ + 1, dim)), n));
}

std::shared_ptr<KernelMap> KernelMap::sample(int dim, int n, double rho, std::uint64_t seed) {
  if (n < 1) throw DomainError("kernel map needs n >= 1");
  Rng rng = make_rng(seed, 0x6b65726e);
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& x : nodes)
    for (auto& v : x) v = uniform01(rng);
  return std::make_shared<KernelMap>(dim, rho, std::move(nodes), seed);
}

void KernelMap::set_exact_radius(int radius) {
  if (radius < 0) throw DomainError("exact radius must be >= 0");
  exact_radius_ = radius;
}

double KernelMap::zeta() const {
  return std::pow(size() * (1.0 + rho_ * rho_) / (1.0 - rho_ * rho_), dim_);
}

double KernelMap::rho_tilde() const {
  return rho_ * std::exp((1.0 - rho_ * rho_) / (1.0 + rho_ * rho_));
}

Matrix KernelMap::axis_moment(int axis, int k) const {
  // For k >= 0 and u = y - z:
  //   h = rho^k [ e^{-2 pi i k z} D(u) + e^{-2 pi i k y} conj(D(u))
  //               + e^{-i pi k (y+z)} sin((k-1) pi u) / sin(pi u) ]
  // with D(u) = 1 / (1 - rho^2 e^{2 pi i u}); the last ratio tends to k-1 as
  // u -> 0. Negative k conjugates.
  const int n = size();
  const int kk = std::abs(k);
  const auto& t = axes_[static_cast<std::size_t>(axis)];
  Eigen::VectorXcd half(n);
  for (int i = 0; i < n; ++i) {
    const double s = kk * nodes_[i][axis] * 0.5;
    half[i] = std::polar(1.0, -2.0 * kPi * (s - std::floor(s)));
  }
  const double scale = std::pow(rho_, kk);
  const double sign_flip = (kk % 2 == 0) ? 1.0 : -1.0;
  Matrix h(n, n);
  for (int j = 0; j < n; ++j) {
    const Complex cj = half[j];
    const Complex cj2 = cj * cj;
    for (int i = 0; i < n; ++i) {
      const Complex ci = half[i];
      const Complex d1 = t.d1(i, j);
      double q;
      if (t.tie(i, j)) {
        q = kk - 1.0;
      } else {
        q = std::sin((kk - 1.0) * kPi * t.wrapped(i, j)) / t.sin_pu(i, j);
      }
      // Shifting u by an integer m multiplies the ratio by (-1)^{k m}.
      if (t.shift(i, j) != 0) q *= sign_flip;
      const Complex v = scale * (cj2 * d1 + ci * ci * std::conj(d1) + ci * cj * q);
      h(i, j) = k < 0 ? std::conj(v) : v;
    }
  }
  return h;
}

Vector KernelMap::features(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("feature point has wrong dimension");
  Vector phi(size());
  for (int j = 0; j < size(); ++j) {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= kernel(rho_, x[static_cast<std::size_t>(a)] - nodes_[j][a]);
    phi[j] = v;
  }
  return phi;
}

Matrix KernelMap::compute_moment(const MultiIndex& k) const {
  if (k.dim() != dim_) throw DomainError("moment index has wrong dimension");
  Matrix m = axis_moment(0, k[0]);
  for (int a = 1; a < dim_; ++a) m.array() *= axis_moment(a, k[a]).array();
  return m;
}

std::vector<double> KernelMap::moment_frobs(std::span<const MultiIndex> ks) const {
  std::vector<double> out(ks.size());
  if (dim_ == 1) {
    for (std::size_t i = 0; i < ks.size(); ++i) out[i] = axis_moment(0, ks[i][0]).norm();
    return out;
  }
  // ||M^(k)||_F^2 = sum_ij prod_a |h_a(k_a)_ij|^2, and |h(-k)| = |h(k)|, so
  // per-axis tables of |h|^2 indexed by |k_a| are shared across the batch.
  int max_k = 0;
  for (const auto& k : ks)
    for (int a = 0; a < dim_; ++a) max_k = std::max(max_k, std::abs(k[a]));
  std::vector<std::vector<Eigen::ArrayXXd>> tables(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a) {
    auto& ta = tables[static_cast<std::size_t>(a)];
    ta.reserve(static_cast<std::size_t>(max_k) + 1);
    for (int m = 0; m <= max_k; ++m) ta.push_back(axis_moment(a, m).array().abs2());
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Eigen::ArrayXXd acc = tables[0][static_cast<std::size_t>(std::abs(ks[i][0]))];
    for (int a = 1; a < dim_; ++a) acc *= tables[static_cast<std::size_t>(a)][static_cast<std::size_t>(std::abs(ks[i][a]))];
    out[i] = std::sqrt(acc.sum());
  }
  return out;
}

double KernelMap::total_sum() const {
  std::call_once(total_once_, [this] {
    const auto ks = ball(dim_, exact_radius_);
    double s = 0.0;
    for (double v : moment_frobs(ks)) s += v;
    total_ = s + tail_sum(exact_radius_);
  });
  return total_;
}

double KernelMap::moment_bound(const MultiIndex& k) const {
  // |[M^(k)]_ij| <= prod_a That(0)_{k_a} and the matrix is n x n.
  const double c = (1.0 + rho_ * rho_) / (1.0 - rho_ * rho_);
  double b = size();
  for (int a = 0; a < dim_; ++a) b *= std::pow(rho_, std::abs(k[a])) * (std::abs(k[a]) + c);
  return b;
}

// AM-GM: prod_a (|k_a| + c) <= (r/d + c)^d on the shell |k| = r.
double KernelMap::far_shell(int r) const {
  const double c = (1.0 + rho_ * rho_) / (1.0 - rho_ * rho_);
  return size() * static_cast<double>(shell_count(dim_, r)) * std::pow(rho_, r) *
         std::pow(static_cast<double>(r) / dim_ + c, dim_);
}

// far_shell(r + 1) / far_shell(r); a product of factors non-increasing in r >= 1.
double KernelMap::far_ratio(int r) const {
  const double c = (1.0 + rho_ * rho_) / (1.0 - rho_ * rho_);
  const double shells = static_cast<double>(shell_count(dim_, r + 1)) / static_cast<double>(shell_count(dim_, r));
  return rho_ * shells * std::pow((r + 1.0 + dim_ * c) / (r + dim_ * c), dim_);
}

double KernelMap::shell_bound(int r) const {
  if (r < 0) return 0.0;
  build_shells();
  if (static_cast<std::size_t>(r) < shells_.size()) return shells_[static_cast<std::size_t>(r)];
  return far_shell(r);
}

void KernelMap::build_shells() const {
  std::call_once(shells_once_, [this] {
    // q_j(r) = sum over k in Z^j with |k| = r of prod (|k_a| + c), by
    // convolving the one-axis sequence a(0) = c, a(m) = 2 (m + c).
    const double c = (1.0 + rho_ * rho_) / (1.0 - rho_ * rho_);
    std::vector<std::vector<double>> q(static_cast<std::size_t>(dim_));
    double sum = 0.0;
    for (int r = 0;; ++r) {
      q[0].push_back(r == 0 ? c : 2.0 * (r + c));
      for (std::size_t j = 1; j < q.size(); ++j) {
        double v = 0.0;
        for (int m = 0; m <= r; ++m) v += q[0][static_cast<std::size_t>(m)] * q[j - 1][static_cast<std::size_t>(r - m)];
        q[j].push_back(v);
      }
      const double term = size() * std::pow(rho_, r) * q.back()[static_cast<std::size_t>(r)];
      shells_.push_back(term);
      sum += term;
      if (r >= 1) {
        const double q = far_ratio(r + 1);
        const double next = far_shell(r + 1);
        if (q < 1.0 && next <= 1e-18 * sum) {
          shells_remainder_ = next / (1.0 - q);
          return;
        }
      }
      if (r > 1000000) throw NumericalError("kernel moment tail did not converge");
    }
  });
}

double KernelMap::tail_sum(int radius) const {
  build_shells();
  const int last = static_cast<int>(shells_.size()) - 1;
  if (radius >= last) {
    const int r = std::max(radius + 1, 1);
    return far_shell(r) / (1.0 - far_ratio(r));
  }
  // Smallest terms first.
  double s = shells_remainder_;
  for (int r = last; r > std::max(radius, -1); --r) s += shells_[static_cast<std::size_t>(r)];
  return s;
}

double geometric_shell_tail(int dim, double zeta, double rho_tilde, int radius) {
  if (!(rho_tilde < 1.0)) throw NumericalError("internal: rho_tilde must be < 1, got " + std::to_string(rho_tilde));
  if (zeta == 0.0) return 0.0;
  const int start = std::max(radius + 1, 0);
  // term(r) = #shell(r) zeta rho_tilde^r. The ratio term(r+1)/term(r) is
  // non-increasing for r >= 1, so once it is below 1 the remainder is
  // bounded by a geometric series.
  auto term = [&](int r) { return static_cast<double>(shell_count(dim, r)) * zeta * std::pow(rho_tilde, r); };
  double sum = 0.0;
  for (int r = start;; ++r) {
    const double cur = term(r);
    sum += cur;
    if (r >= 1) {
      const double ratio = static_cast<double>(shell_count(dim, r + 1)) / static_cast<double>(shell_count(dim, r)) * rho_tilde;
      if (ratio < 1.0 && cur <= 1e-15 * sum) return sum + cur * ratio / (1.0 - ratio);
      if (cur == 0.0) return sum;
    }
    if (r > 100000000) throw NumericalError("geometric shell tail did not converge");
  }
}

}  // namespace fsos
