#include "hopinf/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace hopinf {

namespace {

ComplexVector naive(const ComplexVector& v, double sign) {
  const std::size_t n = v.size();
  ComplexVector out(n);
  const double w = sign * 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      // reduce k*m mod n first so the phase stays accurate for large n
      const auto km = static_cast<double>((k * m) % n);
      acc += v[m] * Complex(std::cos(w * km), std::sin(w * km));
    }
    out[k] = acc;
  }
  return out;
}

// FFTW planning touches global state; execution of an existing plan does not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

// Forward and backward complex plans of one size, usable on any arrays.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit FftPlans(Index n) {
    ComplexVector scratch(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                               FFTW_FORWARD, flags);
    backward = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                FFTW_BACKWARD, flags);
    if (!forward || !backward) throw NumericalError("fft: FFTW could not create a plan");
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void run(ComplexVector& v, bool inverse) const {
    fftw_execute_dft(inverse ? backward : forward, as_fftw(v.data()), as_fftw(v.data()));
    if (inverse) {
      const double inv = 1.0 / static_cast<double>(v.size());
      for (auto& z : v) z *= inv;
    }
  }
};


ComplexVector dft(const ComplexVector& v) { return naive(v, -1.0); }

ComplexVector idft(const ComplexVector& v) {
  auto out = naive(v, 1.0);
  const double inv = 1.0 / static_cast<double>(v.size());
  for (auto& z : out) z *= inv;
  return out;
}

ComplexVector dft(const Vector& v) {
  ComplexVector c(v.data(), v.data() + v.size());
  return dft(c);
}

ComplexVector fft(ComplexVector v) {
  if (v.empty()) return v;
  FftPlans(static_cast<Index>(v.size())).run(v, false);
  return v;
}

ComplexVector ifft(ComplexVector v) {
  if (v.empty()) return v;
  FftPlans(static_cast<Index>(v.size())).run(v, true);
  return v;
}

Vector fourier_frequencies(Index n, double length) {
  Vector xi(n);
  for (Index k = 0; k < n; ++k)
    xi(k) = static_cast<double>(k < n / 2 || n == 1 ? k : k - n) / length;
  if (n == 1) xi(0) = 0.0;
  return xi;
}

ComplexVector bbm_multiplier(Index n, double length, double gamma) {
  const Vector xi = fourier_frequencies(n, length);
  const double pi = std::numbers::pi;
  ComplexVector m(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k)
    m[k] = Complex(0.0, -2.0 * pi * xi(k)) / (1.0 + 4.0 * gamma * pi * pi * xi(k) * xi(k));
  if (n % 2 == 0) m[static_cast<std::size_t>(n / 2)] = 0.0;
  return m;
}

SpectralOperator::SpectralOperator(ComplexVector multiplier, bool fast)
    : mult_(std::move(multiplier)), fast_(fast) {
  if (fast_ && size() > 0) plans_ = std::make_shared<const FftPlans>(size());
}

Vector SpectralOperator::apply(const Vector& x) const {
  require_dims(x.size() == size(), "spectral operator: size mismatch");
  ComplexVector c(x.data(), x.data() + x.size());
  if (plans_) {
    plans_->run(c, false);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= mult_[k];
    plans_->run(c, true);
  } else {
    c = dft(c);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= mult_[k];
    c = idft(c);
  }
  Vector y(x.size());
  for (Index i = 0; i < y.size(); ++i) y(i) = c[static_cast<std::size_t>(i)].real();
  return y;
}

Matrix SpectralOperator::dense() const {
  const Index n = size();
  Vector e = Vector::Zero(n);
  e(0) = 1.0;
  const Vector col = apply(e);
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = col((i - j + n) % n);
  return out;
}

}  // namespace hopinf
