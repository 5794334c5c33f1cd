#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "hopinf/types.hpp"

namespace hopinf {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// F(x)_k = sum_m x_m exp(-2 pi i k m / N); the inverse carries the 1/N.
ComplexVector dft(const ComplexVector& v);
ComplexVector idft(const ComplexVector& v);
ComplexVector dft(const Vector& v);

// FFTW transforms, same conventions as dft/idft, any length.
ComplexVector fft(ComplexVector v);
ComplexVector ifft(ComplexVector v);

// Physical frequencies k/length in the order 0, 1, ..., N/2-1, -N/2, ..., -1.
Vector fourier_frequencies(Index n, double length);

struct FftPlans;

// Real circulant operator y = IDFT(mult .* DFT(x)). fast selects FFTW over the
// naive DFT; copies share the FFTW plans, and apply is safe across threads.
class SpectralOperator {
 public:
  SpectralOperator() = default;
  SpectralOperator(ComplexVector multiplier, bool fast);

  Vector apply(const Vector& x) const;
  Matrix dense() const;  // circulant matrix of the same map
  Index size() const { return static_cast<Index>(mult_.size()); }
  const ComplexVector& multiplier() const { return mult_; }

 private:
  ComplexVector mult_;
  bool fast_ = true;
  std::shared_ptr<const FftPlans> plans_;
};

// -2 pi i xi / (1 + 4 gamma pi^2 xi^2) with the Nyquist entry removed so the
// operator is real and skew.
ComplexVector bbm_multiplier(Index n, double length, double gamma);

}  // namespace hopinf
