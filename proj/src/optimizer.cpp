#include "fsos/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "fft.hpp"
#include "fsos/error.hpp"

namespace fsos {

namespace {

// Mean of the most recent sampled loss values.
class WindowMean {
 public:
  explicit WindowMean(std::size_t width) : width_(width) {}
  void push(double v) {
    values_.push_back(v);
    sum_ += v;
    if (values_.size() > width_) {
      sum_ -= values_.front();
      values_.pop_front();
    }
  }
  double mean() const { return values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size()); }
  std::size_t size() const { return values_.size(); }

 private:
  std::size_t width_;
  std::deque<double> values_;
  double sum_ = 0.0;
};

double pi_at(const PiDistribution& pi, const MultiIndex& k) {
  const double p = pi.pmf(k);
  if (!(p > 0.0)) throw DomainError("frequency " + k.to_string() + " is outside the sampling support");
  return p;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

void check_config(const SolverConfig& c, int n) {
  if (c.iterations < 0) throw PreconditionError("iteration count must be >= 0");
  if (c.smoothing < 0.0) throw PreconditionError("smoothing must be >= 0");
  if (c.rank < 0 || c.rank > n) throw PreconditionError("rank must be in [1, n]");
  if (c.batch < 0) throw PreconditionError("batch must be >= 0");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw PreconditionError("momentum must be in [0, 1)");
  if (c.precondition < 0.0) throw PreconditionError("precondition must be >= 0");
  if (c.step && !(*c.step > 0.0)) throw PreconditionError("step size must be > 0");
  if (!(c.average_from >= 0.0 && c.average_from < 1.0)) throw PreconditionError("average_from must be in [0, 1)");
  if (c.trace_every < 1) throw PreconditionError("trace_every must be >= 1");
}

}  // namespace

Complex pairing(const Matrix& a, const Matrix& m) { return a.cwiseProduct(m.transpose()).sum(); }

Residual residual(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const FeatureMap& map) {
  return {k, f.coeff(k) - pairing(a, *map.moment(k))};
}

double loss_term(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const PiDistribution& pi,
                 const FeatureMap& map) {
  const double p = pi_at(pi, k);
  const Complex r = residual(a, k, f, map).value;
  if (k.is_zero()) return r.real() / p;
  return -std::abs(r) / p;
}

Matrix ascent_direction(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const PiDistribution& pi,
                        const FeatureMap& map) {
  const double p = pi_at(pi, k);
  const auto m = map.moment(k);
  if (k.is_zero()) return -hermitian_part(*m) / p;
  const Complex r = f.coeff(k) - pairing(a, *m);
  const double mag = std::abs(r);
  if (mag == 0.0) return Matrix::Zero(a.rows(), a.cols());
  return (std::conj(r) * (*m) + r * m->adjoint()) / (2.0 * p * mag);
}

SmoothedTerm smoothed_loss(const Matrix& a, const MultiIndex& k, const TrigPoly& f, const PiDistribution& pi,
                           const FeatureMap& map, double alpha) {
  const double p = pi_at(pi, k);
  const auto m = map.moment(k);
  const Complex r = f.coeff(k) - pairing(a, *m);
  if (k.is_zero()) return {r.real() / p, -hermitian_part(*m) / p};
  const double s = std::hypot(alpha * p, std::abs(r));
  if (s == 0.0) return {0.0, Matrix::Zero(a.rows(), a.cols())};
  return {-s / p, (std::conj(r) * (*m) + r * m->adjoint()) / (2.0 * p * s)};
}

Matrix project(const Matrix& m, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("projection radius must be > 0");
  const Matrix h = hermitian_part(m);
  if (h.rows() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver failed in projection: ||M||_F = " << h.norm() << ", max |M_ij| = " << h.cwiseAbs().maxCoeff()
       << ", finite = " << h.allFinite();
    throw NumericalError(os.str());
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double norm = lam.norm();
  if (norm > radius) lam *= radius / norm;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

double expected_objective(const Matrix& a, const TrigPoly& f, const PiDistribution& pi, const FeatureMap& map) {
  double total = 0.0;
  for (const auto& k : pi.support()) {
    const Complex r = f.coeff(k) - pairing(a, *map.moment(k));
    total += k.is_zero() ? r.real() : -std::abs(r);
  }
  return total;
}

double default_radius(const TrigPoly& f) {
  const auto values = grid_values_direct(f, default_objective_grid(f.dim()));
  const double lo = *std::min_element(values.begin(), values.end());
  const double spread = f.coeff(MultiIndex::zero(f.dim())).real() - lo;
  return std::max(1.1 * spread, 1e-3 * std::max(1.0, f_norm(f)));
}

double default_smoothing(const TrigPoly& f) { return 1e-3 * std::max(f_norm(f), 1e-12); }

double default_exact_step(double precondition) { return precondition > 0.0 ? 1e-3 : 1e-4; }

SolveResult sga_solve(const TrigPoly& f, std::shared_ptr<const FeatureMap> map, const PiDistribution& pi,
                      const SolverConfig& config, Rng& rng) {
  const int n = map->size();
  check_config(config, n);
  if (config.batch < 1) throw PreconditionError("projected solver needs batch >= 1");
  const double radius = config.radius > 0.0 ? config.radius : default_radius(f);
  const long steps = config.iterations;
  const double eta = config.step ? *config.step
                                 : radius / (pi.normalizer() * std::sqrt(static_cast<double>(std::max(steps, 1L))));
  const double z = pi.normalizer();

  const long skip = static_cast<long>(std::floor(config.average_from * static_cast<double>(steps)));
  Matrix a = Matrix::Zero(n, n);
  Matrix sum = Matrix::Zero(n, n);
  SolveResult out{PsdModel::zero(map), {}, radius, eta, 0.0};
  WindowMean window(256);
  for (long t = 0; t < steps; ++t) {
    Matrix dir = Matrix::Zero(n, n);
    for (int b = 0; b < config.batch; ++b) {
      const std::size_t pos = pi.sample_position(rng);
      const MultiIndex& k = pi.support()[pos];
      const double p = pi.weights()[pos] / z;
      const auto m = map->moment(k);
      const Complex r = f.coeff(k) - pairing(a, *m);
      if (k.is_zero()) {
        window.push(r.real() / p);
        dir -= hermitian_part(*m) / p;
      } else {
        const double mag = std::abs(r);
        window.push(-mag / p);
        if (mag > 0.0) dir += (std::conj(r) * (*m) + r * m->adjoint()) / (2.0 * p * mag);
      }
    }
    dir /= static_cast<double>(config.batch);
    a = project(a + eta * dir, radius);
    if (t >= skip) sum += a;
    if ((t + 1) % config.trace_every == 0 || t + 1 == steps)
      out.trace.push_back({t + 1, window.mean(), dir.norm()});
  }
  Matrix result = steps == 0 ? sum : Matrix(config.average ? Matrix(sum / static_cast<double>(steps - skip)) : a);
  out.model = PsdModel::dense(map, clamp_small_negative(result));
  return out;
}

namespace {

// Exact expectation over the support of pi of the smoothed objective and its
// U-gradient, with the moments replaced by equal-weight quadrature on an N^d
// grid. N is chosen so that every frequency with a non-negligible moment or a
// nonzero coefficient of f is resolved without aliasing.
class QuadratureExpectation {
 public:
  QuadratureExpectation(const TrigPoly& f, const FeatureMap& map, const PiDistribution& pi, double alpha)
      : dim_(map.dim()) {
    const double z = pi.normalizer();
    const auto& support = pi.support();
    const double base = pi.weights()[0] - mu_weight(support[0]);
    int keep = f.bandwidth();
    for (std::size_t i = 0; i < support.size(); ++i)
      if (pi.weights()[i] - mu_weight(support[i]) > 1e-12 * base) keep = std::max(keep, support[i].degree());
    points_ = detail::fft_size_at_least(2 * keep + 1);
    total_ = 1;
    for (int a = 0; a < dim_; ++a) total_ *= static_cast<std::size_t>(points_);
    if (total_ > (std::size_t{1} << 22))
      throw PreconditionError("quadrature grid " + std::to_string(points_) + "^" + std::to_string(dim_) +
                              " for the exact expectation is too large");

    for (std::size_t i = 0; i < support.size(); ++i) {
      const MultiIndex& k = support[i];
      const double p = pi.weights()[i] / z;
      if (k.degree() > keep) {
        dropped_ += alpha * p;  // f_k = 0 and M^(k) ~ 0 there
        continue;
      }
      std::size_t flat = 0;
      for (int a = 0; a < dim_; ++a)
        flat = flat * static_cast<std::size_t>(points_) + static_cast<std::size_t>(((k[a] % points_) + points_) % points_);
      terms_.push_back({flat, f.coeff(k), alpha * p, k.is_zero()});
    }

    const int n = map.size();
    Matrix feats(static_cast<Eigen::Index>(total_), n);
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (std::size_t j = 0; j < total_; ++j) {
      std::size_t rest = j;
      for (int a = dim_ - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] = static_cast<double>(rest % static_cast<std::size_t>(points_)) / points_;
        rest /= static_cast<std::size_t>(points_);
      }
      feats.row(static_cast<Eigen::Index>(j)) = map.features(x).transpose();
    }
    conj_feats_ = feats.conjugate();
    feats_t_ = feats.transpose();
    gbuf_ = std::make_unique<detail::FftBuffer>(total_);
    wbuf_ = std::make_unique<detail::FftBuffer>(total_);
    gplan_ = std::make_unique<detail::FftPlan>(*gbuf_, dim_, points_, FFTW_FORWARD);
    wplan_ = std::make_unique<detail::FftPlan>(*wbuf_, dim_, points_, FFTW_FORWARD);
  }

  int points() const { return points_; }

  // Returns the smoothed objective; writes 2 G_A U into grad.
  double evaluate(const Matrix& u, Matrix& grad) {
    y_.noalias() = conj_feats_ * u;  // row x: (U^* phi(x))^*
    for (std::size_t j = 0; j < total_; ++j) gbuf_->set(j, y_.row(static_cast<Eigen::Index>(j)).squaredNorm());
    gplan_->execute();
    wbuf_->zero();
    const double scale = 1.0 / static_cast<double>(total_);
    double value = -dropped_;
    for (const auto& t : terms_) {
      const Complex r = t.coeff - gbuf_->at(t.flat) * scale;
      if (t.zero) {
        value += r.real();
        wbuf_->set(t.flat, -1.0);
      } else {
        const double s = std::hypot(t.smooth, std::abs(r));
        value -= s;
        if (s > 0.0) wbuf_->set(t.flat, std::conj(r) / s);
      }
    }
    // h(x) = sum_k w_k exp(-2 pi i k.x), so G_A = mean_x h(x) phi(x) phi(x)^*.
    wplan_->execute();
    for (std::size_t j = 0; j < total_; ++j) y_.row(static_cast<Eigen::Index>(j)) *= wbuf_->at(j);
    grad.noalias() = feats_t_ * y_;
    grad *= 2.0 * scale;
    return value;
  }

 private:
  struct Term {
    std::size_t flat;
    Complex coeff;
    double smooth;
    bool zero;
  };

  int dim_;
  int points_ = 0;
  std::size_t total_ = 0;
  double dropped_ = 0.0;
  std::vector<Term> terms_;
  Matrix conj_feats_, feats_t_, y_;
  std::unique_ptr<detail::FftBuffer> gbuf_, wbuf_;
  std::unique_ptr<detail::FftPlan> gplan_, wplan_;
};

}  // namespace

SolveResult bm_solve(const TrigPoly& f, std::shared_ptr<const FeatureMap> map, const PiDistribution& pi,
                     const SolverConfig& config, Rng& rng) {
  const int n = map->size();
  check_config(config, n);
  const int rank = config.rank == 0 ? n : config.rank;
  const double alpha = config.smoothing > 0.0 ? config.smoothing : default_smoothing(f);
  const double radius = config.radius > 0.0 ? config.radius : default_radius(f);
  const long steps = config.iterations;
  const double z = pi.normalizer();
  const bool exact = config.batch == 0;
  double eta = 0.0;
  if (config.step)
    eta = *config.step;
  else if (exact)
    eta = default_exact_step(config.precondition);
  else
    eta = radius / (z * std::sqrt(static_cast<double>(std::max(steps, 1L))));
  // The smoothed objective is at least E[L_k] - alpha.
  const double floor = -10.0 * (f_norm(f) + alpha);

  Matrix u = Matrix::Zero(n, rank);
  if (config.init_scale > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < u.cols(); ++j)
      for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) = Complex(normal(rng), normal(rng));
    // ||U U^*||_F <= ||U||_F^2
    u *= std::sqrt(config.init_scale) / u.norm();
  }

  Matrix precond;
  if (config.precondition > 0.0) {
    const auto m0 = map->moment(MultiIndex::zero(map->dim()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(*m0));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on M^(0)");
    const double eps = config.precondition * std::max(es.eigenvalues().maxCoeff(), 1e-300);
    const Eigen::VectorXd inv = (es.eigenvalues().cwiseMax(0.0).array() + eps).inverse();
    precond = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    // Start with g_0 = trace(U_0^* M^(0) U_0) = init_scale.
    if (config.init_scale > 0.0) {
      const Eigen::VectorXd isq = inv.cwiseSqrt();
      u = es.eigenvectors() * isq.asDiagonal() * es.eigenvectors().adjoint() * u;
      u *= std::sqrt(config.init_scale / std::max(u.cwiseProduct(((*m0) * u).conjugate()).sum().real(), 1e-300));
    }
  }

  std::optional<QuadratureExpectation> expectation;
  if (exact) expectation.emplace(f, *map, pi, alpha);

  SolveResult out{PsdModel::zero(map), {}, radius, eta, alpha};
  WindowMean window(exact ? 1 : 1024);
  Matrix grad(n, rank), mu(n, rank), mhu(n, rank), velocity = Matrix::Zero(n, rank);
  for (long t = 0; t < steps; ++t) {
    if (exact) {
      window.push(expectation->evaluate(u, grad));
    } else {
      grad.setZero();
      for (int b = 0; b < config.batch; ++b) {
        const std::size_t pos = pi.sample_position(rng);
        const MultiIndex& k = pi.support()[pos];
        const double p = pi.weights()[pos] / z;
        const auto m = map->moment(k);
        mu.noalias() = (*m) * u;
        const Complex tr = u.cwiseProduct(mu.conjugate()).sum();  // conj(trace(U^* M U))
        const Complex r = f.coeff(k) - std::conj(tr);
        if (k.is_zero()) {
          window.push(r.real() / p);
          // M^(0) is Hermitian.
          grad -= (2.0 / p) * mu;
        } else {
          const double s = std::hypot(alpha * p, std::abs(r));
          window.push(-s / p);
          if (s > 0.0) {
            mhu.noalias() = m->adjoint() * u;
            grad += (std::conj(r) * mu + r * mhu) / (p * s);
          }
        }
      }
      grad /= static_cast<double>(config.batch);
    }
    if (precond.size() > 0) grad = precond * grad;
    if (config.momentum > 0.0) {
      velocity = config.momentum * velocity + grad;
      u += eta * velocity;
    } else {
      u += eta * grad;
    }
    if (config.clip) {
      const double an = (u.adjoint() * u).norm();
      if (an > radius) u *= std::sqrt(radius / an);
    }
    const bool finite = u.allFinite();
    if (!finite || ((exact || window.size() >= 256) && window.mean() < floor)) {
      std::ostringstream os;
      os << "factored ascent diverged at iteration " << t + 1 << ": objective estimate " << window.mean()
         << " (floor " << floor << "), ||U||_F = " << u.norm() << ", step " << eta;
      throw NumericalError(os.str());
    }
    if ((t + 1) % config.trace_every == 0 || t + 1 == steps)
      out.trace.push_back({t + 1, window.mean(), grad.norm()});
  }
  // No iterations: report the zero model rather than the random start.
  out.model = steps == 0 ? PsdModel::zero(map) : PsdModel::factored(map, std::move(u));
  return out;
}

}  // namespace fsos
