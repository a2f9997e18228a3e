#include <doctest.h>

#include <cmath>
#include <thread>

#include "fsos/error.hpp"
#include "fsos/features.hpp"
#include "fsos/psd_model.hpp"
#include "helpers.hpp"

using namespace fsos;
using namespace fsos::testing;

namespace {

// Equal-weight quadrature of phi phi^* exp(-2 pi i k.x), written out
// independently of the library oracle.
Matrix quadrature(const FeatureMap& map, const MultiIndex& k, int n) {
  const int d = map.dim();
  Matrix acc = Matrix::Zero(map.size(), map.size());
  const long total = d == 1 ? n : static_cast<long>(n) * n;
  std::vector<double> x(static_cast<std::size_t>(d));
  for (long i = 0; i < total; ++i) {
    x[0] = double(d == 1 ? i : i / n) / n;
    if (d == 2) x[1] = double(i % n) / n;
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += k[a] * x[static_cast<std::size_t>(a)];
    const Vector phi = map.features(x);
    acc += std::polar(1.0, -kTwoPi * phase) * (phi * phi.adjoint());
  }
  return acc / double(total);
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("band-limited moments for t = 1") {
  BandLimitedMap map(1, 1);
  CHECK(map.size() == 3);
  CHECK(max_abs(*map.moment(MultiIndex{0}) - Matrix::Identity(3, 3)) == 0.0);
  const Matrix m1 = *map.moment(MultiIndex{1});
  CHECK(m1.cwiseAbs().sum() == 2.0);
  CHECK(m1.norm() == doctest::Approx(std::sqrt(2.0)));
  // Unit entries sit at (k1, k2) with k2 - k1 = 1.
  const int pm1 = *map.position(MultiIndex{-1});
  const int p0 = *map.position(MultiIndex{0});
  const int p1 = *map.position(MultiIndex{1});
  CHECK(m1(pm1, p0) == Complex(1.0));
  CHECK(m1(p0, p1) == Complex(1.0));
  // ||I_3||_F + 2 ||M^(1)||_F + 2 ||M^(2)||_F.
  CHECK(map.total_sum() == doctest::Approx(std::sqrt(3.0) + 2.0 * std::sqrt(2.0) + 2.0).epsilon(1e-14));
}

TEST_CASE("band-limited Frobenius norms and support") {
  BandLimitedMap t2(1, 2);
  CHECK(t2.moment_frob(MultiIndex{0}) == doctest::Approx(std::sqrt(5.0)));
  for (int k = 5; k < 9; ++k) CHECK(t2.moment_frob(MultiIndex{k}) == 0.0);
  BandLimitedMap t3(1, 3);
  CHECK(t3.tail_sum(6) == 0.0);
  CHECK(t3.tail_sum(5) > 0.0);
  CHECK(t3.support_radius() == 6);
}

TEST_CASE("band-limited moments match quadrature, entries are 0 or 1") {
  for (int d = 1; d <= 2; ++d)
    for (int t = 1; t <= 3; ++t) {
      BandLimitedMap map(d, t);
      const int n = 4 * t + 10;
      for (const auto& k : ball(d, d == 1 ? 8 : 4)) {
        const Matrix m = map.compute_moment(k);
        CHECK(max_abs(m - quadrature(map, k, n)) < 1e-12);
        for (Eigen::Index i = 0; i < m.size(); ++i) CHECK((m(i) == Complex(0.0) || m(i) == Complex(1.0)));
        CHECK(map.moment_frob(k) == doctest::Approx(m.norm()).epsilon(1e-15));
      }
    }
}

TEST_CASE("band-limited total sum is below the counting bound") {
  for (int d = 1; d <= 3; ++d)
    for (int t = 1; t <= 4; ++t) {
      BandLimitedMap map(d, t);
      double exact = 0.0;
      for (const auto& k : ball(d, 2 * t)) exact += map.compute_moment(k).norm();
      CHECK(map.total_sum() == doctest::Approx(exact).epsilon(1e-13));
      CHECK(map.total_sum() <= map.size() * std::pow(8.0 * t, d));
    }
}

TEST_CASE("moments at -k are adjoints") {
  auto kernel = KernelMap::sample(1, 5, 0.5, 3);
  auto kernel2 = KernelMap::sample(2, 4, 0.4, 4);
  BandLimitedMap band(2, 2);
  for (const FeatureMap* map : std::initializer_list<const FeatureMap*>{kernel.get(), kernel2.get(), &band})
    for (const auto& k : ball(map->dim(), map->dim() == 1 ? 10 : 5))
      CHECK(max_abs(map->compute_moment(-k) - map->compute_moment(k).adjoint()) < 1e-12);
}

TEST_CASE("kernel diagonal at k = 0") {
  KernelMap map(1, 0.5, {{0.25}, {0.25}, {0.7}});
  const Matrix m0 = map.compute_moment(MultiIndex{0});
  CHECK(m0(0, 0).real() == doctest::Approx(5.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(m0(0, 0).imag()) < 1e-14);
  // Repeated node: all four entries coincide.
  CHECK(std::abs(m0(0, 1) - m0(0, 0)) < 1e-13);
  // Cross-check against an integral of p_rho(x - x_0)^2.
  double integral = 0.0;
  for (int i = 0; i < 4096; ++i) {
    const double v = KernelMap::kernel(0.5, i / 4096.0 - 0.25);
    integral += v * v / 4096.0;
  }
  CHECK(integral == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("kernel features are the Poisson-type kernel") {
  const double rho = 0.6;
  for (double u : {0.0, 0.1, 0.37, 0.5, 0.9}) {
    double series = 0.0;
    for (int m = -200; m <= 200; ++m) series += std::pow(rho, std::abs(m)) * std::cos(kTwoPi * m * u);
    CHECK(KernelMap::kernel(rho, u) == doctest::Approx(series).epsilon(1e-12));
  }
  KernelMap map(2, rho, {{0.1, 0.2}, {0.5, 0.9}});
  const Vector phi = map.features(std::vector<double>{0.3, 0.4});
  CHECK(phi(1).real() == doctest::Approx(KernelMap::kernel(rho, 0.3 - 0.5) * KernelMap::kernel(rho, 0.4 - 0.9)));
}

TEST_CASE("kernel moments match quadrature in 1D") {
  for (int trial = 0; trial < 12; ++trial) {
    const double rho = std::array{0.3, 0.5, 0.8}[trial % 3];
    const int n = 1 + trial % 5;
    auto map = KernelMap::sample(1, n, rho, 100 + trial);
    for (int k = -6; k <= 6; ++k) {
      const Matrix closed = map->compute_moment(MultiIndex{k});
      CHECK(max_abs(closed - quadrature(*map, MultiIndex{k}, 1024)) < 1e-10);
      CHECK(map->moment_frob(MultiIndex{k}) == doctest::Approx(closed.norm()).epsilon(1e-12));
    }
  }
  KernelMap n3(1, 0.5, {{0.11}, {0.52}, {0.83}});
  CHECK(max_abs(n3.compute_moment(MultiIndex{2}) - quadrature(n3, MultiIndex{2}, 4096)) < 1e-6);
}

TEST_CASE("kernel moments match quadrature in 2D") {
  auto map = KernelMap::sample(2, 3, 0.5, 9);
  for (const auto& k : ball(2, 3)) CHECK(max_abs(map->compute_moment(k) - quadrature(*map, k, 128)) < 1e-10);
}

TEST_CASE("kernel Frobenius norms obey the rho^|k| bound") {
  for (double rho : {0.3, 0.5, 0.8}) {
    auto map = KernelMap::sample(1, 6, rho, 5);
    for (int k = 0; k <= 40; ++k) {
      const double bound = 6 * std::pow(rho, k) * (k + (1 + rho * rho) / (1 - rho * rho));
      CHECK(map->moment_frob(MultiIndex{k}) <= bound * (1 + 1e-12));
      CHECK(map->moment_frob(MultiIndex{k}) <= map->zeta() * std::pow(map->rho_tilde(), k) * (1 + 1e-12));
      CHECK(map->moment_bound(MultiIndex{k}) <= bound * (1 + 1e-12));
      CHECK(map->moment_frob(MultiIndex{k}) <= map->moment_bound(MultiIndex{k}) * (1 + 1e-12));
    }
  }
  auto map2 = KernelMap::sample(2, 5, 0.5, 6);
  for (const auto& k : ball(2, 12)) {
    CHECK(map2->moment_frob(k) <= map2->moment_bound(k) * (1 + 1e-12));
    CHECK(map2->moment_bound(k) <= map2->zeta() * std::pow(map2->rho_tilde(), k.degree()) * (1 + 1e-12));
  }
  for (int r = 0; r <= 12; ++r) {
    double s = 0.0;
    for (const auto& k : shell(2, r)) s += map2->moment_bound(k);
    CHECK(map2->shell_bound(r) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("kernel total and tail sums are certified") {
  for (int d = 1; d <= 2; ++d) {
    auto map = KernelMap::sample(d, 4, 0.5, 17);
    const int far = d == 1 ? 50 : 20;
    double partial = 0.0;
    for (const auto& k : ball(d, far)) partial += map->moment_frob(k);
    CHECK(map->total_sum() >= partial);

    double previous = INFINITY;
    for (int radius = 0; radius <= 30; radius += 3) {
      const double tail = map->tail_sum(radius);
      CHECK(tail < previous);
      CHECK(tail > 0.0);
      previous = tail;
      double shells = 0.0;
      for (int r = radius + 1; r <= radius + (d == 1 ? 30 : 10); ++r)
        for (const auto& k : shell(d, r)) shells += map->moment_frob(k);
      CHECK(tail >= shells);
    }
    CHECK(map->tail_sum(400) < 1e-40);
    CHECK(map->tail_sum(5) <= geometric_shell_tail(d, map->zeta(), map->rho_tilde(), 5));
  }
}

TEST_CASE("geometric shell tail is an upper bound") {
  for (int d = 1; d <= 3; ++d) {
    double direct = 0.0;
    for (int r = 6; r <= 400; ++r) direct += double(shell_count(d, r)) * std::pow(0.7, r);
    CHECK(geometric_shell_tail(d, 1.0, 0.7, 5) >= direct);
  }
}

TEST_CASE("moment cache is bounded and thread safe") {
  auto map = KernelMap::sample(1, 8, 0.5, 2);
  map->set_cache_capacity(5);
  std::vector<std::thread> workers;
  std::vector<double> norms(4, 0.0);
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] {
      double s = 0.0;
      for (int rep = 0; rep < 5; ++rep)
        for (int k = -10; k <= 10; ++k) s += map->moment(MultiIndex{k})->norm();
      norms[static_cast<std::size_t>(w)] = s;
    });
  for (auto& t : workers) t.join();
  CHECK(map->cache_size() <= 5);
  for (double v : norms) CHECK(v == norms[0]);
  CHECK(max_abs(*map->moment(MultiIndex{3}) - map->compute_moment(MultiIndex{3})) == 0.0);
}

TEST_CASE("model coefficients and evaluation") {
  auto band = std::make_shared<BandLimitedMap>(1, 2);
  const PsdModel zero = PsdModel::zero(band);
  for (const auto& k : ball(1, 6)) CHECK(zero.coeff(k) == Complex(0.0));

  const PsdModel eye = PsdModel::dense(band, Matrix::Identity(5, 5));
  CHECK(eye.coeff(MultiIndex{0}) == Complex(5.0));
  for (int k = 1; k <= 5; ++k) CHECK(eye.coeff(MultiIndex{k}) == Complex(0.0));
  for (double x : {0.0, 0.3, 0.77}) CHECK(eye.eval(std::vector<double>{x}) == doctest::Approx(5.0));

  Rng rng = make_rng(31);
  const Vector v = random_complex(5, 1, rng);
  const PsdModel rank1 = PsdModel::dense(band, v * v.adjoint());
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(1, rng);
    const Complex inner = v.adjoint() * band->features(x);
    CHECK(rank1.eval(x) == doctest::Approx(std::norm(inner)).epsilon(1e-12));
  }
}

TEST_CASE("model values are reconstructed from model coefficients") {
  Rng rng = make_rng(32);
  auto band = std::make_shared<BandLimitedMap>(2, 2);
  const PsdModel model = PsdModel::dense(band, random_psd(band->size(), 4, 3.0, rng));
  for (const auto& k : ball(2, 4)) CHECK(std::abs(model.coeff(-k) - std::conj(model.coeff(k))) < 1e-13);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(2, rng);
    Complex s = 0.0;
    for (const auto& k : ball(2, 4)) s += model.coeff(k) * std::polar(1.0, kTwoPi * (k[0] * x[0] + k[1] * x[1]));
    CHECK(std::abs(s - model.eval(x)) < 1e-8);
  }
}

TEST_CASE("factored models are nonnegative") {
  Rng rng = make_rng(33);
  auto map = KernelMap::sample(1, 6, 0.5, 1);
  const PsdModel model = PsdModel::factored(map, random_complex(6, 2, rng));
  for (int i = 0; i < 500; ++i) CHECK(model.eval(random_point(1, rng)) >= 0.0);
  CHECK(model.min_eigenvalue() >= -1e-12 * model.frob_norm());
  CHECK(model.frob_norm() == doctest::Approx(model.matrix().norm()).epsilon(1e-12));
}

TEST_CASE("non-PSD and non-Hermitian matrices are rejected") {
  auto band = std::make_shared<BandLimitedMap>(1, 1);
  Matrix a = Matrix::Identity(3, 3);
  a(1, 1) = -0.1;
  CHECK_THROWS_AS(PsdModel::dense(band, a), MalformedInput);
  Matrix b = Matrix::Identity(3, 3);
  b(0, 1) = 0.5;
  CHECK_THROWS_AS(PsdModel::dense(band, b), MalformedInput);
  CHECK_THROWS_AS(PsdModel::dense(band, Matrix::Identity(4, 4)), MalformedInput);
}

TEST_CASE("clamping small negative eigenvalues") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1e-14;
  const Matrix c = clamp_small_negative(a);
  CHECK(min_hermitian_eigenvalue(c) >= 0.0);
  CHECK(std::abs(c(0, 0) - 1.0) < 1e-15);
  a(1, 1) = -0.5;
  CHECK(min_hermitian_eigenvalue(clamp_small_negative(a)) == doctest::Approx(-0.5));
}
