#include "semiweight/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace semiweight {

double two_point_weighted_norm_exact(const TwoPointConfig& cfg) {
  if (!(cfg.v > 0.0)) throw std::invalid_argument("weight parameter v must be positive");
  const std::complex<double> g = cfg.gamma();
  const double v = cfg.v;
  const double a = std::norm(1.0 + g) + v * v * std::norm(1.0 - g);
  const double d = std::norm(1.0 + g) + std::norm(1.0 - g) / (v * v);
  const std::complex<double> beta((v + 1.0 / v) * (1.0 - std::norm(g)),
                                  2.0 * (v - 1.0 / v) * g.imag());
  const double top = 0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4.0 * std::norm(beta)));
  return std::sqrt(0.25 * top);
}

double d_gamma(std::complex<double> gamma) {
  const double one_minus = 1.0 - std::norm(gamma);
  if (std::abs(one_minus) < 1e-14)
    throw GammaOnUnitCircle("d_gamma undefined for |gamma| = 1");
  const double a = std::norm(1.0 - gamma);
  return (a * a + one_minus * one_minus + 4.0 * gamma.imag() * gamma.imag()) /
         (one_minus * one_minus);
}

AsymptoticResult asymptotic_check(double phi, double r, const std::vector<double>& eps_sweep) {
  if (eps_sweep.size() < 2) throw std::invalid_argument("eps sweep needs at least two values");
  const std::complex<double> z = r * std::complex<double>(std::cos(phi), std::sin(phi));
  const std::complex<double> g = std::exp(-2.0 * z);

  std::vector<double> eps(eps_sweep);
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  std::vector<double> c(eps.size());
  for (size_t i = 0; i < eps.size(); ++i) {
    const double nrm = two_point_weighted_norm_exact({1.0 + eps[i], z});
    c[i] = (nrm - 1.0) / (eps[i] * eps[i]);
  }
  // Richardson on the leading O(eps) error of (norm-1)/eps^2
  std::vector<double> extr(c);
  for (size_t stage = 1; stage < eps.size(); ++stage) {
    for (size_t i = 0; i + stage < eps.size(); ++i) {
      const double h0 = eps[i], h1 = eps[i + 1];
      extr[i] = (h0 * extr[i + 1] - h1 * extr[i]) / (h0 - h1);
    }
  }
  const double measured = extr[0];
  const double last_raw = c.back();
  if (!std::isfinite(measured) ||
      std::abs(measured - last_raw) > 0.5 * std::max(std::abs(last_raw), 1e-300))
    throw FitUnstable("Richardson extrapolation drifted; refine the eps sweep");

  AsymptoticResult res;
  res.measured = measured;
  res.paper_coefficient = (4.0 * std::norm(1.0 - g) + 0.5 * d_gamma(g)) / 16.0;
  res.deviation = std::abs(res.measured - res.paper_coefficient) /
                  std::max(std::abs(res.paper_coefficient), 1e-300);
  return res;
}

double two_point_q2(double u, double v) {
  if (!(u > 0.0) || !(v > 0.0)) throw std::invalid_argument("weight entries must be positive");
  return 0.25 * (2.0 + u / v + v / u);
}

double log_tensor_norm(const TensorSemigroup& ts, std::complex<double> z) {
  double acc = 0.0;
  for (double e : ts.eps_k) acc += std::log(two_point_weighted_norm_exact({1.0 + e, z}));
  return acc;
}

double tensor_norm(const TensorSemigroup& ts, std::complex<double> z) {
  return std::exp(log_tensor_norm(ts, z));
}

double log_tensor_q2(const TensorSemigroup& ts) {
  double acc = 0.0;
  for (double e : ts.eps_k) acc += std::log(two_point_q2(1.0, (1.0 + e) * (1.0 + e)));
  return acc;
}

double tensor_q2(const TensorSemigroup& ts) { return std::exp(log_tensor_q2(ts)); }

namespace {

struct LinFit {
  double slope, intercept, r2, max_residual;
};

LinFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinFit f{};
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_tot = 0;
  f.max_residual = 0;
  for (size_t i = 0; i < n; ++i) {
    const double res = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += res * res;
    ss_tot += (y[i] - my) * (y[i] - my);
    f.max_residual = std::max(f.max_residual, std::abs(res));
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

std::vector<FailurePoint> run_grid(const std::vector<double>& phis, double r) {
  std::vector<FailurePoint> pts;
  for (double phi : phis) {
    const double t2 = std::tan(phi) * std::tan(phi);
    const int n = std::max(1, static_cast<int>(std::ceil(t2)));
    TensorSemigroup ts;
    ts.eps_k.assign(static_cast<size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    const std::complex<double> z = r * std::complex<double>(std::cos(phi), std::sin(phi));
    FailurePoint p;
    p.phi = phi;
    p.tan2 = t2;
    p.factors = n;
    p.log_norm = log_tensor_norm(ts, z);
    p.q2 = tensor_q2(ts);
    p.eps_sq_sum = std::inner_product(ts.eps_k.begin(), ts.eps_k.end(), ts.eps_k.begin(), 0.0);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

FailureReport hormander_failure_experiment(const std::vector<double>& phis, double r,
                                           int s_max) {
  if (phis.empty()) throw std::invalid_argument("need at least one angle");
  FailureReport rep;
  rep.r = r;
  rep.points = run_grid(phis, r);

  // Q^G_2((1,(1+e)^2)) <= 1 + e^2 exactly, so the blocks obey e^{sum eps_k^2}.
  double max_eps_sum = 0.0;
  for (const auto& p : rep.points) max_eps_sum = std::max(max_eps_sum, p.eps_sq_sum);
  rep.uniform_q_bound = std::exp(max_eps_sum);
  rep.q2_uniform_ok = true;
  for (const auto& p : rep.points)
    if (p.q2 > rep.uniform_q_bound * (1.0 + 1e-12)) rep.q2_uniform_ok = false;

  std::vector<double> tan2s, lognorms;
  for (const auto& p : rep.points) {
    tan2s.push_back(p.tan2);
    lognorms.push_back(p.log_norm);
  }
  if (rep.points.size() < 2) {
    // one-point runs report the grid only; no fits, no verdict
    rep.growth_ok = rep.points[0].log_norm > 0.0;
    return rep;
  }
  const LinFit ef = fit_linear(tan2s, lognorms);
  rep.slope = ef.slope;
  rep.intercept = ef.intercept;
  rep.fit_r2 = ef.r2;
  rep.fitted_c = ef.slope;
  rep.exp_model_max_residual = ef.max_residual;

  rep.growth_ok = true;
  for (size_t i = 0; i < rep.points.size(); ++i) {
    if (rep.points[i].log_norm <= 0.0) rep.growth_ok = false;
    if (i > 0 && rep.points[i].log_norm <= rep.points[i - 1].log_norm) rep.growth_ok = false;
  }

  // |tan phi|^s models: only the prefactor is free, fitted by least squares
  rep.no_polynomial_fit = true;
  for (int s = 1; s <= s_max; ++s) {
    double mean = 0.0;
    for (size_t i = 0; i < tan2s.size(); ++i)
      mean += lognorms[i] - 0.5 * s * std::log(tan2s[i]);
    mean /= static_cast<double>(tan2s.size());
    double max_res = 0.0;
    for (size_t i = 0; i < tan2s.size(); ++i)
      max_res = std::max(max_res,
                         std::abs(lognorms[i] - (mean + 0.5 * s * std::log(tan2s[i]))));
    rep.power_model_max_residual.push_back(max_res);
    if (max_res < 10.0 * std::max(rep.exp_model_max_residual, 1e-300))
      rep.no_polynomial_fit = false;
  }

  rep.hormander_fails = rep.q2_uniform_ok && rep.growth_ok && rep.no_polynomial_fit;

  // same grid at r/2: in the small-r regime log-norm scales linearly with r
  const auto half = run_grid(phis, 0.5 * r);
  for (size_t i = 0; i < rep.points.size(); ++i) {
    const double ratio = rep.points[i].log_norm / std::max(half[i].log_norm, 1e-300);
    if (std::abs(ratio - 2.0) > 0.25) rep.warning_large_r = true;
  }
  return rep;
}

}  // namespace semiweight
