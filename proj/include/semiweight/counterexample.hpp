#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace semiweight {

class GammaOnUnitCircle : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class FitUnstable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TwoPointConfig {
  double v = 1.0;               // weight w0 = (1, v^2)
  std::complex<double> z{1, 0};  // Re z > 0
  std::complex<double> gamma() const { return std::exp(-2.0 * z); }
};

// ||exp(-zG)||_{L^2(w0 dmu0)} from the closed 2x2 eigenvalue formula.
double two_point_weighted_norm_exact(const TwoPointConfig& cfg);

// (|1-g|^4 + (1-|g|^2)^2 + 4 Im(g)^2) / (1-|g|^2)^2 for |g| < 1.
double d_gamma(std::complex<double> gamma);

struct AsymptoticResult {
  double measured = 0;           // Richardson-extrapolated (norm - 1)/eps^2
  double paper_coefficient = 0;  // (1/16)(4|1-g|^2 + d_g/2)
  double deviation = 0;          // |measured - paper| / |paper|
};

AsymptoticResult asymptotic_check(double phi, double r, const std::vector<double>& eps_sweep);

// Factored tensor power of the two-point semigroup with weights (1,(1+e_k)^2).
struct TensorSemigroup {
  std::vector<double> eps_k;
  int factors() const { return static_cast<int>(eps_k.size()); }
};

double log_tensor_norm(const TensorSemigroup& ts, std::complex<double> z);
double tensor_norm(const TensorSemigroup& ts, std::complex<double> z);
double log_tensor_q2(const TensorSemigroup& ts);
double tensor_q2(const TensorSemigroup& ts);

// Q_2 of the two-point semigroup for weight (u, v).
double two_point_q2(double u, double v);

struct FailurePoint {
  double phi = 0;
  double tan2 = 0;
  int factors = 0;
  double log_norm = 0;
  double q2 = 0;
  double eps_sq_sum = 0;
};

struct FailureReport {
  std::vector<FailurePoint> points;
  double r = 0;
  double uniform_q_bound = 0;   // e^{C sum eps_k^2} with C = 1 (exact quadratic bound)
  bool q2_uniform_ok = false;   // every block q2 <= uniform_q_bound
  double slope = 0;             // LSQ fit log_norm ~ slope * tan2 + intercept
  double intercept = 0;
  double fit_r2 = 0;
  double fitted_c = 0;          // growth constant: the fitted slope
  double exp_model_max_residual = 0;
  std::vector<double> power_model_max_residual;  // index s-1, s = 1..s_max
  bool no_polynomial_fit = false;  // every power model residual >= 10x exp model's
  bool growth_ok = false;          // log-norms positive and increasing
  bool hormander_fails = false;    // q2_uniform_ok && growth_ok && no_polynomial_fit
  bool warning_large_r = false;    // small-r linearity of log-norm in r broken
};

FailureReport hormander_failure_experiment(const std::vector<double>& phis, double r,
                                           int s_max);

}  // namespace semiweight
