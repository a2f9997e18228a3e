#include "fft.hpp"

#include <algorithm>
#include <mutex>

#include "fsos/error.hpp"

namespace fsos::detail {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftBuffer::FftBuffer(std::size_t size)
    : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(size, 1)))),
      size_(size) {
  if (data_ == nullptr) throw NumericalError("FFT buffer allocation failed");
  zero();
}

FftBuffer::~FftBuffer() { fftw_free(data_); }

void FftBuffer::zero() { std::fill_n(reinterpret_cast<double*>(data_), 2 * size_, 0.0); }

FftPlan::FftPlan(FftBuffer& buffer, int dim, int points, int sign) {
  std::vector<int> dims(static_cast<std::size_t>(dim), points);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft(dim, dims.data(), buffer.data(), buffer.data(), sign, FFTW_ESTIMATE);
  if (plan_ == nullptr) throw NumericalError("FFTW could not create a plan");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
}

void FftPlan::execute() { fftw_execute(plan_); }

int fft_size_at_least(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace fsos::detail
