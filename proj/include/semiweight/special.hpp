#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace semiweight {

// Principal log Gamma for Re z > 0 (Lanczos, g = 7, 9 terms).
std::complex<double> log_gamma(std::complex<double> z);

// In-place radix-agnostic complex FFT via FFTW. sign = -1 forward, +1 inverse
// (inverse is unnormalized; caller divides by n).
void fft_inplace(std::vector<std::complex<double>>& data, int sign);

// C^inf cutoff: 1 for t <= 1/2, 0 for t >= 1, strictly monotone between.
double smooth_step_chi(double t);

// Dyadic partition member phi_n evaluated at xi: supp phi_0 in [-1,1],
// supp phi_1 in [1/2,2], phi_{n+1}(t) = phi_n(t/2) for n >= 1, mirrored for
// n < 0; sums to 1 on R.
double dyadic_phi(int n, double xi);

// Fixed C^inf bump supported on [1/2, 2] with exact derivatives of any order
// (rational-polynomial recurrence against exp(-1/(1-u^2))).
class SmoothBump {
 public:
  explicit SmoothBump(int max_order);
  double value(double lambda) const { return derivative(lambda, 0); }
  double derivative(double lambda, int order) const;
  int max_order() const { return static_cast<int>(poly_.size()) - 1; }

 private:
  std::vector<std::vector<double>> poly_;  // N_k coefficients, ascending degree
};

// Adaptive Gauss-Kronrod 15(7) on [a, b].
struct QuadratureResult {
  double value = 0;
  double error = 0;
  bool converged = true;
};

QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth = 30);

}  // namespace semiweight
