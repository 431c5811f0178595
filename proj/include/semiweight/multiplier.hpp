#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiweight/measure_semigroup.hpp"
#include "semiweight/weights.hpp"

namespace semiweight {

class MultiplierUndefinedAtEigenvalue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class GridTooCoarse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TailNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class GammaEvalUnstable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form multiplier families plus a tabulated fallback.
struct Multiplier {
  enum class Family { constant, exp_z, resolvent_heat, grid };
  Family family = Family::constant;
  std::complex<double> z{0, 0};  // exp_z: m(l) = exp(-l z)
  double J = 0, eps = 0, t = 0;  // resolvent_heat: (1+l)^{-J-eps} e^{-t l}
  double c0 = 1.0;               // constant
  std::map<double, std::complex<double>> table;

  static Multiplier constant_fn(double c);
  static Multiplier exp_fn(std::complex<double> z);
  static Multiplier resolvent_heat_fn(double J, double eps, double t);

  std::complex<double> operator()(double lambda) const;
  bool defined_at(double lambda) const;
  // k-th derivative of lambda -> m(t lambda); closed form for constant/exp_z.
  std::complex<double> scaled_derivative(double lambda, double tscale, int k) const;
};

// m(A) = sum_j m(lambda_j) e_j <e_j, .>_mu.
CMat apply_multiplier(const Generator& gen, const Multiplier& m);

struct WeightedNormResult {
  double value = 0;
  CVec extremal;  // achieves the norm on L^2(w dmu)
  std::string method = "svd";
};

// Operator norm of M on L^2(w dmu): spectral norm after conjugation by
// diag(sqrt(w_i mu_i)).
WeightedNormResult weighted_operator_norm(const CMat& M, const Weight& w,
                                          const MeasureSpace& space);

struct BesovGrid {
  double lambda_lo = -16.0;
  double lambda_hi = 10.0;
  int log2_points = 14;
  int n_max = 40;
  double alias_tol = 1e-5;  // spectrum mass allowed near Nyquist, relative
};

struct BesovResult {
  double value = 0;       // sum over |n| <= n_max of 2^{J|n|} ||f * phi_n^||_inf
  double tail_bound = 0;  // geometric extrapolation of the truncated terms
  std::vector<double> terms;
};

// Besov B^J_{inf,1} norm of samples of f on the uniform lambda grid.
BesovResult besov_norm(const std::vector<std::complex<double>>& samples, double J,
                       const BesovGrid& grid);

// ||m_t||_{H^inf(Sigma_{pi/2}; J)} for m_t = (1+l)^{-J-eps} e^{-tl}: sup norm
// plus both boundary-trace Besov norms, on a t-adapted grid.
struct HinftyBesovResult {
  double value = 0;
  double tail_bound = 0;
};
HinftyBesovResult hinfty_besov_norm(double J, double eps, double t, int n_max = 40);

struct GammaKernelResult {
  double l1 = 0;          // ||gamma_e||_{L^1(R)}
  double envelope_c = 0;  // sup |gamma_e^(t)| e^{2 eps |t|}
};

// gamma_e^(t) = 1 / (Gamma(1 - it) cosh(alpha t)), alpha = pi/2 + 2 eps.
GammaKernelResult gamma_kernel_l1(double eps_angle, int log2_points = 0);

// Hormander H^s norm sup_{t>0} max_{k<=s} ||d^k/dl^k [eta(l) m(t l)]||_inf
// with eta the fixed bump on [1/2, 2].
double hormander_norm(const Multiplier& m, int s, int t_grid_points = 200,
                      double t_lo = 1e-6, double t_hi = 1e8);

}  // namespace semiweight
