#pragma once

#include <fftw3.h>

#include <complex>
#include <vector>

namespace fsos::detail {

/// fftw_malloc'd complex buffer, zero-initialized.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t size);
  ~FftBuffer();
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  std::size_t size() const { return size_; }
  fftw_complex* data() { return data_; }
  std::complex<double> at(std::size_t i) const { return {data_[i][0], data_[i][1]}; }
  void set(std::size_t i, std::complex<double> v) {
    data_[i][0] = v.real();
    data_[i][1] = v.imag();
  }
  void add(std::size_t i, std::complex<double> v) {
    data_[i][0] += v.real();
    data_[i][1] += v.imag();
  }
  void zero();

 private:
  fftw_complex* data_;
  std::size_t size_;
};

/// Reusable in-place d-dimensional transform on an N^d buffer; sign is
/// FFTW_FORWARD (exp(-2 pi i k.j/N)) or FFTW_BACKWARD. Unnormalized.
class FftPlan {
 public:
  FftPlan(FftBuffer& buffer, int dim, int points, int sign);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  void execute();

 private:
  fftw_plan plan_;
};

/// Smallest m >= n of the form 2^a 3^b 5^c.
int fft_size_at_least(int n);

}  // namespace fsos::detail
