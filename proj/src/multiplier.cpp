#include "semiweight/multiplier.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiweight/special.hpp"

namespace semiweight {

Multiplier Multiplier::constant_fn(double c) {
  Multiplier m;
  m.family = Family::constant;
  m.c0 = c;
  return m;
}

Multiplier Multiplier::exp_fn(std::complex<double> z) {
  Multiplier m;
  m.family = Family::exp_z;
  m.z = z;
  return m;
}

Multiplier Multiplier::resolvent_heat_fn(double J, double eps, double t) {
  Multiplier m;
  m.family = Family::resolvent_heat;
  m.J = J;
  m.eps = eps;
  m.t = t;
  return m;
}

std::complex<double> Multiplier::operator()(double lambda) const {
  switch (family) {
    case Family::constant:
      return c0;
    case Family::exp_z:
      return std::exp(-lambda * z);
    case Family::resolvent_heat:
      return std::pow(std::complex<double>(1.0 + lambda, 0.0), -(J + eps)) *
             std::exp(-t * lambda);
    case Family::grid: {
      for (const auto& [l, v] : table)
        if (std::abs(l - lambda) <= 1e-9 * std::max(1.0, std::abs(lambda))) return v;
      std::ostringstream os;
      os << "grid multiplier has no value at lambda = " << lambda;
      throw MultiplierUndefinedAtEigenvalue(os.str());
    }
  }
  return 0.0;
}

bool Multiplier::defined_at(double lambda) const {
  if (family == Family::resolvent_heat && lambda <= -1.0) return false;
  if (family == Family::grid) {
    for (const auto& [l, v] : table)
      if (std::abs(l - lambda) <= 1e-9 * std::max(1.0, std::abs(lambda))) return true;
    return false;
  }
  return true;
}

std::complex<double> Multiplier::scaled_derivative(double lambda, double tscale, int k) const {
  switch (family) {
    case Family::constant:
      return k == 0 ? std::complex<double>(c0, 0) : std::complex<double>(0, 0);
    case Family::exp_z: {
      const std::complex<double> a = -tscale * z;
      return std::pow(a, k) * std::exp(a * lambda);
    }
    default:
      throw std::invalid_argument("closed-form derivatives only for constant/exp families");
  }
}

CMat apply_multiplier(const Generator& gen, const Multiplier& m) {
  const int n = gen.size();
  const Vec& lam = gen.spec.eigenvalues;
  const Mat& E = gen.spec.eigenvectors;
  CVec diag(n);
  for (int j = 0; j < n; ++j) {
    if (!m.defined_at(lam[j])) {
      std::ostringstream os;
      os << "multiplier undefined at eigenvalue " << lam[j];
      throw MultiplierUndefinedAtEigenvalue(os.str());
    }
    diag[j] = m(lam[j]);
  }
  return E.cast<std::complex<double>>() * diag.asDiagonal() *
         E.transpose().cast<std::complex<double>>() *
         gen.space.mu.cast<std::complex<double>>().asDiagonal();
}

WeightedNormResult weighted_operator_norm(const CMat& M, const Weight& w,
                                          const MeasureSpace& space) {
  const int n = static_cast<int>(M.rows());
  if (w.size() != n || space.size() != n)
    throw DimensionMismatch("norm inputs must share one dimension");
  const Vec d = (w.w.array() * space.mu.array()).sqrt();
  const CMat S = d.cast<std::complex<double>>().asDiagonal() * M *
                 d.cwiseInverse().cast<std::complex<double>>().asDiagonal();
  Eigen::JacobiSVD<CMat> svd(S, Eigen::ComputeThinV);
  WeightedNormResult res;
  res.value = svd.singularValues()[0];
  res.extremal = d.cwiseInverse().cast<std::complex<double>>().asDiagonal() *
                 CVec(svd.matrixV().col(0));
  res.method = "svd";
  return res;
}

namespace {

std::vector<double> fft_angular_freqs(int m, double dx) {
  std::vector<double> xi(static_cast<size_t>(m));
  const double step = 2.0 * 3.141592653589793238462643 / (m * dx);
  for (int k = 0; k < m; ++k) {
    const int kk = (k <= m / 2) ? k : k - m;
    xi[static_cast<size_t>(k)] = step * kk;
  }
  return xi;
}

}  // namespace

BesovResult besov_norm(const std::vector<std::complex<double>>& samples, double J,
                       const BesovGrid& grid) {
  const int m = static_cast<int>(samples.size());
  if (m < 8) throw std::invalid_argument("besov_norm needs at least 8 samples");
  const double dx = (grid.lambda_hi - grid.lambda_lo) / m;
  std::vector<std::complex<double>> spec(samples);
  fft_inplace(spec, -1);
  const auto xi = fft_angular_freqs(m, dx);

  // aliasing check: relative spectral mass near the Nyquist edge
  double total = 0.0, edge = 0.0;
  const double xi_max = 3.141592653589793238462643 / dx;
  for (int k = 0; k < m; ++k) {
    const double a = std::abs(spec[static_cast<size_t>(k)]);
    total += a;
    if (std::abs(xi[static_cast<size_t>(k)]) > 0.9 * xi_max) edge += a;
  }
  if (total > 0.0 && edge / total > grid.alias_tol)
    throw GridTooCoarse("spectral mass near the Nyquist edge; refine the lambda grid");

  BesovResult res;
  std::vector<std::complex<double>> band(static_cast<size_t>(m));
  for (int n = -grid.n_max; n <= grid.n_max; ++n) {
    for (int k = 0; k < m; ++k)
      band[static_cast<size_t>(k)] =
          spec[static_cast<size_t>(k)] * dyadic_phi(n, xi[static_cast<size_t>(k)]);
    fft_inplace(band, +1);
    double sup = 0.0;
    for (const auto& v : band) sup = std::max(sup, std::abs(v));
    sup /= m;
    res.terms.push_back(std::pow(2.0, J * std::abs(n)) * sup);
  }
  for (double tv : res.terms) res.value += tv;

  // geometric tail estimate from the outermost non-vanishing dyadic pair sums
  std::vector<double> pair_sum(static_cast<size_t>(grid.n_max) + 1, 0.0);
  for (int n = -grid.n_max; n <= grid.n_max; ++n)
    pair_sum[static_cast<size_t>(std::abs(n))] += res.terms[static_cast<size_t>(n + grid.n_max)];
  int hi = grid.n_max;
  const double floor_level = 1e-13 * std::max(res.value, 1e-300);
  while (hi > 1 && pair_sum[static_cast<size_t>(hi)] <= floor_level) --hi;
  const double t_hi = pair_sum[static_cast<size_t>(hi)];
  const double t_prev = pair_sum[static_cast<size_t>(hi - 1)];
  if (t_hi > floor_level && hi >= 1) {
    const double rho = t_hi / std::max(t_prev, 1e-300);
    if (rho >= 1.0) {
      if (hi == grid.n_max)
        throw TailNotConverged("dyadic terms not decaying at n_max; raise n_max");
      res.tail_bound = t_hi;  // isolated bump inside the resolved range
    } else {
      res.tail_bound = t_hi * rho / (1.0 - rho);
    }
  }
  return res;
}

namespace {

std::complex<double> m_t_boundary(double lambda, double t, double J, double eps, int sign) {
  const std::complex<double> z = std::complex<double>(0.0, sign) * std::exp(lambda);
  return std::pow(1.0 + z, -(J + eps)) * std::exp(-t * z);
}

}  // namespace

HinftyBesovResult hinfty_besov_norm(double J, double eps, double t, int n_max) {
  // grid adapted to the chirp frequency ~ t e^lambda on [lambda_lo, lambda_hi]
  BesovGrid grid;
  grid.lambda_lo = -16.0;
  grid.lambda_hi = 10.0;
  grid.n_max = n_max;
  const double xi_need = 64.0 * std::max(t, 1.0);
  const double dx_need = 3.141592653589793238462643 / (2.0 * xi_need);
  int log2m = 11;
  while ((grid.lambda_hi - grid.lambda_lo) / std::ldexp(1.0, log2m) > dx_need && log2m < 26)
    ++log2m;
  const int m = 1 << log2m;
  const double dx = (grid.lambda_hi - grid.lambda_lo) / m;

  HinftyBesovResult out;
  out.value = 1.0;  // sup-norm term: |m_t| <= 1 on the closed right half-plane
  for (int sign : {+1, -1}) {
    std::vector<std::complex<double>> samples(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
      const double lam = grid.lambda_lo + dx * k;
      std::complex<double> v = m_t_boundary(lam, t, J, eps, sign);
      // smooth left-edge taper: the trace tends to 1 at -infinity and the
      // transform is periodized
      const double u = (lam - grid.lambda_lo) / 4.0;
      if (u < 1.0) v *= 1.0 - smooth_step_chi(0.5 + 0.5 * std::clamp(u, 0.0, 1.0));
      samples[static_cast<size_t>(k)] = v;
    }
    const BesovResult r = besov_norm(samples, J, grid);
    out.value += r.value;
    out.tail_bound += r.tail_bound;
  }
  return out;
}

GammaKernelResult gamma_kernel_l1(double eps_angle, int log2_points) {
  if (!(eps_angle > 0.0 && eps_angle < 1.0))
    throw std::invalid_argument("eps_angle must lie in (0, 1)");
  const double alpha = 0.5 * 3.141592653589793238462643 + 2.0 * eps_angle;
  const double t_span = 40.0 / (2.0 * eps_angle);  // envelope decays e^{-2 eps |t|}
  int log2m = log2_points;
  if (log2m == 0) {
    log2m = 14;
    while (2.0 * t_span / std::ldexp(1.0, log2m) > 1.0 / 16.0 && log2m < 24) ++log2m;
  }
  const int m = 1 << log2m;
  const double dt = 2.0 * t_span / m;
  if (dt > 1.0 / 8.0)
    throw GridTooCoarse("gamma kernel grid step too large for this eps_angle");

  GammaKernelResult res;
  std::vector<std::complex<double>> gh(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double t = -t_span + dt * k;
    // log-domain evaluation; cosh overflows long before the product matters
    const double at = std::abs(alpha * t);
    const double log_cosh = at + std::log1p(std::exp(-2.0 * at)) - std::log(2.0);
    const std::complex<double> lg = log_gamma(std::complex<double>(1.0, -t));
    const std::complex<double> v = std::exp(-lg - log_cosh);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw GammaEvalUnstable("gamma kernel evaluation overflowed");
    gh[static_cast<size_t>(k)] = v;
    res.envelope_c = std::max(res.envelope_c, std::abs(v) * std::exp(2.0 * eps_angle * std::abs(t)));
  }
  if (std::abs(gh.front()) > 1e-12 * res.envelope_c)
    throw GridTooCoarse("gamma kernel span too short for this eps_angle");

  // gamma_e(x) = (1/2pi) int gh(t) e^{ixt} dt; modulate to center the grid
  for (int k = 0; k < m; ++k)
    if (k % 2 == 1) gh[static_cast<size_t>(k)] = -gh[static_cast<size_t>(k)];
  fft_inplace(gh, +1);
  const double dxi = 2.0 * 3.141592653589793238462643 / (m * dt);
  double l1 = 0.0;
  for (const auto& v : gh) l1 += std::abs(v);
  l1 *= dt / (2.0 * 3.141592653589793238462643) * dxi;
  res.l1 = l1;
  return res;
}

double hormander_norm(const Multiplier& m, int s, int t_grid_points, double t_lo,
                      double t_hi) {
  if (s < 0) throw std::invalid_argument("order s must be >= 0");
  static thread_local SmoothBump bump(24);
  if (s > bump.max_order()) throw std::invalid_argument("order s exceeds available bump order");
  const int n_lambda = 481;
  double best = 0.0;
  for (int it = 0; it < t_grid_points; ++it) {
    const double t = t_lo * std::pow(t_hi / t_lo, it / static_cast<double>(t_grid_points - 1));
    double local = 0.0;
    for (int il = 0; il < n_lambda; ++il) {
      const double lam = 0.5 + 1.5 * il / static_cast<double>(n_lambda - 1);
      for (int k = 0; k <= s; ++k) {
        // d^k/dl^k [eta(l) m(t l)] by Leibniz
        std::complex<double> acc(0, 0);
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
          acc += binom * bump.derivative(lam, k - j) * m.scaled_derivative(lam, t, j);
          binom = binom * (k - j) / (j + 1.0);
        }
        local = std::max(local, std::abs(acc));
      }
    }
    best = std::max(best, local);
  }
  return best;
}

}  // namespace semiweight
