#include "semiweight/special.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace semiweight {

std::complex<double> log_gamma(std::complex<double> z) {
  // Lanczos approximation, g = 7; relative error ~1e-15 on Re z > 0.
  static const double coeff[9] = {0.99999999999980993,  676.5203681218851,
                                  -1259.1392167224028,  771.32342877765313,
                                  -176.61502916214059,  12.507343278686905,
                                  -0.13857109526572012, 9.9843695780195716e-6,
                                  1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // reflection; not hit on the Re z = 1 line this project uses
    const std::complex<double> pi(3.141592653589793238462643, 0.0);
    return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  std::complex<double> x = coeff[0];
  for (int i = 1; i < 9; ++i) x += coeff[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * 3.141592653589793238462643) + (z + 0.5) * std::log(t) - t +
         std::log(x);
}

void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
  // the fftw planner is not thread-safe; execution is
  static std::mutex planner_mutex;
  const int n = static_cast<int>(data.size());
  fftw_complex* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_1d(n, ptr, ptr, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
}

namespace {
double psi_exp(double a) { return a > 0.0 ? std::exp(-1.0 / a) : 0.0; }
}  // namespace

double smooth_step_chi(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double up = psi_exp(2.0 * (1.0 - t));
  const double dn = psi_exp(2.0 * (t - 0.5));
  return up / (up + dn);
}

double dyadic_phi(int n, double xi) {
  const double a = std::abs(xi);
  if (n == 0) return smooth_step_chi(a);
  if ((n > 0) != (xi > 0.0)) return 0.0;
  const int m = n > 0 ? n : -n;
  return smooth_step_chi(std::ldexp(a, -m)) - smooth_step_chi(std::ldexp(a, 1 - m));
}

SmoothBump::SmoothBump(int max_order) {
  // eta(lambda) = exp(-1/(1-u^2)) with u = (4 lambda - 5)/3, supported on
  // [1/2, 2]. Derivatives: eta^(k)(u) = N_k(u)/(1-u^2)^{2k} eta(u) with
  // N_{k+1} = (N_k'(1-u^2) + 4k u N_k)(1-u^2) - 2u N_k.
  poly_.resize(static_cast<size_t>(max_order) + 1);
  poly_[0] = {1.0};
  for (int k = 0; k < max_order; ++k) {
    const auto& nk = poly_[static_cast<size_t>(k)];
    const int deg = static_cast<int>(nk.size()) - 1;
    std::vector<double> next(static_cast<size_t>(deg) + 4, 0.0);
    auto add = [&next](int pow, double c) {
      if (c != 0.0) next[static_cast<size_t>(pow)] += c;
    };
    for (int p = 0; p <= deg; ++p) {
      const double c = nk[static_cast<size_t>(p)];
      if (c == 0.0) continue;
      // N_k' (1-u^2)^2 -> p c u^{p-1} (1 - 2u^2 + u^4)
      if (p >= 1) {
        add(p - 1, p * c);
        add(p + 1, -2.0 * p * c);
        add(p + 3, p * c);
      }
      // 4k u N_k (1-u^2) -> 4k c (u^{p+1} - u^{p+3})
      add(p + 1, 4.0 * k * c);
      add(p + 3, -4.0 * k * c);
      // -2u N_k
      add(p + 1, -2.0 * c);
    }
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    poly_[static_cast<size_t>(k + 1)] = std::move(next);
  }
}

double SmoothBump::derivative(double lambda, int order) const {
  if (order < 0 || order >= static_cast<int>(poly_.size()))
    throw std::invalid_argument("bump derivative order out of range");
  const double u = (4.0 * lambda - 5.0) / 3.0;
  const double om = 1.0 - u * u;
  if (om <= 1e-12) return 0.0;
  double p = 0.0;
  const auto& nk = poly_[static_cast<size_t>(order)];
  for (int k = static_cast<int>(nk.size()) - 1; k >= 0; --k)
    p = p * u + nk[static_cast<size_t>(k)];
  const double base = std::exp(-1.0 / om);
  const double chain = std::pow(4.0 / 3.0, order);  // d/dlambda = (4/3) d/du
  return chain * p * std::pow(om, -2.0 * order) * base;
}

namespace {

// Gauss-Kronrod 15(7) nodes/weights on [-1, 1] (QUADPACK dqk15).
const double kGkNodes[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
const double kGkWeights[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                              0.140653259715525, 0.169004726639267, 0.190350578064785,
                              0.204432940075298, 0.209482141084728};
const double kGaussWeights[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                 0.417959183673469};

void gk15(const std::function<double(double)>& f, double a, double b, double* value,
          double* err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    double pair;
    if (i == 7) {
      pair = f(c);
    } else {
      pair = f(c - h * kGkNodes[i]) + f(c + h * kGkNodes[i]);
    }
    resk += kGkWeights[i] * pair;
    // Gauss-7 nodes are the odd-indexed ones plus the center.
    if (i % 2 == 1) resg += kGaussWeights[i / 2] * pair;
  }
  *value = resk * h;
  *err = std::abs((resk - resg) * h);
}

void adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
           int depth, QuadratureResult* out) {
  double v, e;
  gk15(f, a, b, &v, &e);
  if (e <= abs_tol || depth <= 0) {
    out->value += v;
    out->error += e;
    if (e > abs_tol) out->converged = false;
    return;
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * abs_tol, depth - 1, out);
  adapt(f, mid, b, 0.5 * abs_tol, depth - 1, out);
}

}  // namespace

QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth) {
  QuadratureResult res;
  adapt(f, a, b, abs_tol, max_depth, &res);
  return res;
}

}  // namespace semiweight
