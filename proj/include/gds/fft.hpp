#pragma once

// Thin RAII wrapper over FFTW complex-to-complex transforms.  Plans are
// created with FFTW_ESTIMATE; FFTW's planner is not thread-safe, so Dft
// objects must be constructed from one thread at a time.

#include <algorithm>
#include <complex>
#include <new>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace gds {

class Dft
{
 public:
  explicit Dft(std::size_t n)
      : n_(n)
  {
    buffer_ = fftw_alloc_complex(n_);
    if (buffer_ == nullptr)
      throw std::bad_alloc();
    forward_ = fftw_plan_dft_1d(static_cast<int>(n_), buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(static_cast<int>(n_), buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;
  Dft(Dft&& other) noexcept { swap(other); }
  Dft& operator=(Dft&& other) noexcept
  {
    swap(other);
    return *this;
  }

  ~Dft()
  {
    if (forward_)
      fftw_destroy_plan(forward_);
    if (backward_)
      fftw_destroy_plan(backward_);
    if (buffer_)
      fftw_free(buffer_);
  }

  std::size_t size() const { return n_; }

  /// out_k = sum_j in_j exp(-2 pi i jk/n)
  std::vector<std::complex<double>> forward(std::span<const std::complex<double>> in)
  {
    return run(forward_, in);
  }

  /// out_j = sum_k in_k exp(+2 pi i jk/n)   (unnormalized)
  std::vector<std::complex<double>> backward(std::span<const std::complex<double>> in)
  {
    return run(backward_, in);
  }

 private:
  std::vector<std::complex<double>> run(fftw_plan plan, std::span<const std::complex<double>> in)
  {
    if (in.size() != n_)
      throw std::invalid_argument("Dft: input length does not match transform size");
    auto* buf = reinterpret_cast<std::complex<double>*>(buffer_);
    std::copy(in.begin(), in.end(), buf);
    fftw_execute(plan);
    return {buf, buf + n_};
  }

  void swap(Dft& other) noexcept
  {
    std::swap(n_, other.n_);
    std::swap(buffer_, other.buffer_);
    std::swap(forward_, other.forward_);
    std::swap(backward_, other.backward_);
  }

  std::size_t n_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Values sum_m coeffs[m + M] exp(i 2 pi m j / n), j = 0..n-1, for a
/// centered coefficient array of length 2M+1 (n > 2M).
inline std::vector<std::complex<double>> synthesize_centered(
    Dft& dft, std::span<const std::complex<double>> coeffs)
{
  const std::size_t n = dft.size();
  const int modes = static_cast<int>(coeffs.size() / 2);
  std::vector<std::complex<double>> buf(n);
  for (int m = -modes; m <= modes; ++m)
    buf[static_cast<std::size_t>((m + static_cast<int>(n)) % static_cast<int>(n))] +=
        coeffs[static_cast<std::size_t>(m + modes)];
  return dft.backward(buf);
}

/// Centered Fourier-series coefficients (length 2M+1) of n periodic samples:
/// c_m = (1/n) sum_j values_j exp(-i 2 pi m j / n).
inline std::vector<std::complex<double>> analyze_centered(
    Dft& dft, std::span<const std::complex<double>> values, int modes)
{
  const std::size_t n = dft.size();
  auto spec = dft.forward(values);
  std::vector<std::complex<double>> out(2 * static_cast<std::size_t>(modes) + 1);
  for (int m = -modes; m <= modes; ++m)
    out[static_cast<std::size_t>(m + modes)] =
        spec[static_cast<std::size_t>((m + static_cast<int>(n)) % static_cast<int>(n))]
        / static_cast<double>(n);
  return out;
}

}  // namespace gds
