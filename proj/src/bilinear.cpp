#include "semiweight/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semiweight/special.hpp"

namespace semiweight {

double weighted_l2_norm(const MeasureSpace& space, const CVec& f, const Vec& w) {
  double s = 0.0;
  for (int i = 0; i < space.size(); ++i) s += std::norm(f[i]) * w[i] * space.mu[i];
  return std::sqrt(s);
}

namespace {

double bellman_eps_for(const Vec& v, const Vec& w) {
  double eps = 1.0;
  eps = std::min(eps, v.minCoeff());
  eps = std::min(eps, w.minCoeff());
  eps = std::min(eps, 1.0 / v.maxCoeff());
  eps = std::min(eps, 1.0 / w.maxCoeff());
  return std::min(eps, 0.999);
}

double re_pairing(const Gradient6& g, const std::complex<double>& zx,
                  const std::complex<double>& zy, double zr, double zs) {
  return g.x1 * zx.real() + g.x2 * zx.imag() + g.y1 * zy.real() + g.y2 * zy.imag() +
         g.r * zr + g.s * zs;
}

}  // namespace

BilinearInstance make_instance(Generator gen, Weight w, CVec f, CVec g, const TimeGrid& grid) {
  BilinearInstance inst{std::move(gen), std::move(w), std::move(f), std::move(g), {}, 1.0, {}};
  if (inst.w.size() != inst.gen.size() || inst.f.size() != inst.gen.size() ||
      inst.g.size() != inst.gen.size())
    throw DimensionMismatch("instance fields must match the space dimension");
  inst.v = 2.0 * inst.w.winv;
  inst.q2 = q2_characteristic(inst.gen, inst.w, grid).value;
  inst.cfg.Q = 4.0 * inst.q2;
  inst.cfg.eps = bellman_eps_for(inst.v, inst.w.w);
  inst.cfg.C = calibration_level(5);
  // the normalization must keep (T_t v, T_t w) inside the Bellman domain
  TimeGrid probe;
  probe.points = 17;
  for (double t : probe.times()) {
    const Mat T = semigroup_at(inst.gen, t);
    const Vec prod = (T * inst.v).array() * (T * inst.w.w).array();
    if (prod.minCoeff() < 2.0 * (1.0 - 1e-9) ||
        prod.maxCoeff() > 0.5 * inst.cfg.Q * (1.0 + 1e-9))
      throw DomainViolation("instance normalization leaves [2, Q/2] at t = " +
                            std::to_string(t));
  }
  return inst;
}

OneStepResult one_step_inequality(const Mat& T, const MeasureSpace& space, const CVec& f,
                                  const CVec& g, const Vec& v1, const Vec& v2,
                                  const BellmanConfig& cfg) {
  const int n = space.size();
  if (f.size() != n || g.size() != n || v1.size() != n || v2.size() != n)
    throw DimensionMismatch("one-step fields must match the space dimension");
  const CVec df = f - T * f;
  const CVec dg = g - T * g;
  const Vec dv1 = v1 - T * v1;
  const Vec dv2 = v2 - T * v2;
  OneStepResult res;
  std::complex<double> lhs(0, 0);
  for (int i = 0; i < n; ++i) {
    const BellmanEval e = eval(BellmanPoint{f[i], g[i], v1[i], v2[i]}, cfg);
    res.rhs_bracket += space.mu[i] * re_pairing(e.grad, df[i], dg[i], dv1[i], dv2[i]);
    lhs += space.mu[i] * df[i] * g[i];
  }
  res.lhs = std::abs(lhs);
  const double denom = cfg.Q * res.rhs_bracket;
  res.ratio = (res.lhs == 0.0) ? 0.0 : res.lhs / denom;
  return res;
}

OneStepResult toy_two_point_inequality(const CVec& f, const CVec& g, const Vec& v1,
                                       const Vec& v2, const BellmanConfig& cfg) {
  if (f.size() != 2 || g.size() != 2 || v1.size() != 2 || v2.size() != 2)
    throw DimensionMismatch("toy inequality lives on the two-point space");
  OneStepResult res;
  res.lhs = std::abs((f[0] - f[1]) * (g[0] - g[1]));
  const BellmanEval ea = eval(BellmanPoint{f[0], g[0], v1[0], v2[0]}, cfg);
  const BellmanEval eb = eval(BellmanPoint{f[1], g[1], v1[1], v2[1]}, cfg);
  // G f = (f_a - f_b, f_b - f_a)
  res.rhs_bracket = re_pairing(ea.grad, f[0] - f[1], g[0] - g[1], v1[0] - v1[1], v2[0] - v2[1]) +
                    re_pairing(eb.grad, f[1] - f[0], g[1] - g[0], v1[1] - v1[0], v2[1] - v2[0]);
  const double denom = cfg.Q * res.rhs_bracket;
  res.ratio = (res.lhs == 0.0) ? 0.0 : res.lhs / denom;
  return res;
}

namespace {

struct EnergyEngine {
  const Generator& gen;
  const CVec& f;
  const CVec& g;
  Vec v_omega, w_omega;   // weight fields restricted to Omega
  double v_inf = 0, w_inf = 0;  // cemetery values (0 disables the correction)
  const BellmanConfig& cfg;
  bool cemetery = false;

  struct State {
    double energy;
    double neg_dE;
    double bracket_abs;
    double min_correction;
  };

  State at(double t) const {
    const Mat T = semigroup_at(gen, t);
    const CVec ft = T * f;
    const CVec gt = T * g;
    const Vec one = Vec::Ones(gen.size());
    const Vec t_one = T * one;
    Vec vt = T * v_omega;
    Vec wt = T * w_omega;
    if (cemetery) {
      vt += v_inf * (one - t_one);
      wt += w_inf * (one - t_one);
    }
    const CVec af = gen.A * ft;
    const CVec ag = gen.A * gt;
    const Vec av = gen.A * (T * v_omega);
    const Vec aw = gen.A * (T * w_omega);
    const Vec a_one = gen.A * t_one;
    State st{0, 0, 0, std::numeric_limits<double>::infinity()};
    std::complex<double> br(0, 0);
    for (int i = 0; i < gen.size(); ++i) {
      const BellmanEval e = eval(BellmanPoint{ft[i], gt[i], vt[i], wt[i]}, cfg);
      st.energy += gen.space.mu[i] * e.value;
      double zr = av[i], zs = aw[i];
      if (cemetery) {
        zr -= v_inf * a_one[i];
        zs -= w_inf * a_one[i];
        const double corr = e.grad.r * v_inf * (t_one[i] - 1.0) +
                            e.grad.s * w_inf * (t_one[i] - 1.0);
        st.min_correction = std::min(st.min_correction, corr);
      }
      st.neg_dE += gen.space.mu[i] * re_pairing(e.grad, af[i], ag[i], zr, zs);
      br += gen.space.mu[i] * af[i] * gt[i];
    }
    st.bracket_abs = std::abs(br);
    if (!cemetery) st.min_correction = 0.0;
    return st;
  }

  double energy_only(double t) const { return at(t).energy; }
};

std::vector<double> default_energy_grid() {
  TimeGrid g;
  g.t_min = 1e-4;
  g.t_max = 1e3;
  g.points = 81;
  g.include_zero = false;
  g.include_infinity = false;
  return g.times();
}

}  // namespace

EnergyCurve energy_curve(const BilinearInstance& inst, const std::vector<double>& ts) {
  EnergyEngine eng{inst.gen, inst.f, inst.g, inst.v, inst.w.w, 0, 0, inst.cfg, false};
  EnergyCurve out;
  for (double t : ts) {
    EnergyEngine::State st;
    try {
      st = eng.at(t);
    } catch (const DomainViolation& e) {
      std::ostringstream os;
      os << "energy curve leaves the Bellman domain at t = " << t << ": " << e.what();
      throw DomainViolation(os.str());
    }
    out.t.push_back(t);
    out.energy.push_back(st.energy);
    out.neg_dE.push_back(st.neg_dE);
    out.bracket_abs.push_back(st.bracket_abs);
    const double h = std::max(1e-6, 1e-5 * t);
    const double fd = -(eng.energy_only(t + h) - eng.energy_only(std::max(t - h, 0.0))) /
                      (t - h >= 0.0 ? 2.0 * h : h);
    out.neg_dE_fd.push_back(fd);
  }
  return out;
}

double bilinear_integral(const Generator& gen, const CVec& f, const CVec& g,
                         const QuadratureSpec& spec) {
  const int n = gen.size();
  if (f.size() != n || g.size() != n) throw DimensionMismatch("data must match the space");
  const Vec& lam = gen.spec.eigenvalues;
  const Mat& E = gen.spec.eigenvectors;
  const double lam_max = lam.maxCoeff();
  const double ker_tol = 1e-12 * std::max(1.0, lam_max);

  // integrand = |sum_j lam_j <f,e_j>_mu <g,e_j>_mu e^{-2 lam_j t}|; kernel
  // modes drop out analytically.
  std::vector<double> lams;
  std::vector<std::complex<double>> coeffs;
  double scale = 0.0;  // analytic bound: integral <= sum |c_j| / 2
  for (int j = 0; j < n; ++j) {
    if (lam[j] <= ker_tol) continue;
    const Vec ej = E.col(j);
    std::complex<double> cf(0, 0), cg(0, 0);
    for (int i = 0; i < n; ++i) {
      cf += f[i] * ej[i] * gen.space.mu[i];
      cg += g[i] * ej[i] * gen.space.mu[i];
    }
    const std::complex<double> c = cf * cg;
    if (std::abs(c) == 0.0) continue;
    lams.push_back(lam[j]);
    coeffs.push_back(c * lam[j]);
    scale += std::abs(c);
  }
  if (lams.empty()) return 0.0;
  scale *= 0.5;

  auto integrand = [&](double t) {
    std::complex<double> s(0, 0);
    for (size_t j = 0; j < lams.size(); ++j) s += coeffs[j] * std::exp(-2.0 * lams[j] * t);
    return std::abs(s);
  };
  auto tail_bound = [&](double t) {
    double s = 0.0;
    for (size_t j = 0; j < lams.size(); ++j)
      s += std::abs(coeffs[j]) * std::exp(-2.0 * lams[j] * t) / (2.0 * lams[j]);
    return s;
  };

  const double lam_min = *std::min_element(lams.begin(), lams.end());
  const double base = 1.0 / lam_min;
  // head window well below the fastest time scale, then dyadic windows
  int k = static_cast<int>(std::floor(std::log2(lam_min / lam_max))) - 3;
  double total = 0.0;
  double t_lo = 0.0;
  double t_hi = std::ldexp(base, k);
  const double abs_tol = spec.quad_tol * std::max(scale, 1e-300);
  int windows = 0;
  while (true) {
    const QuadratureResult qr = integrate_gk(integrand, t_lo, t_hi, abs_tol, spec.max_depth);
    if (!qr.converged) throw QuadratureNotConverged("window did not converge");
    total += qr.value;
    if (tail_bound(t_hi) < spec.tail_tol * std::max(scale, 1e-300)) break;
    if (++windows > spec.max_windows) throw QuadratureNotConverged("window budget exhausted");
    t_lo = t_hi;
    ++k;
    t_hi = std::ldexp(base, k);
  }
  return total;
}

SubmarkovianReport submarkovian_bilinear_check(const Generator& gen, const Weight& w,
                                               const CVec& f, const CVec& g,
                                               const std::vector<double>& ts_in) {
  SubmarkovianReport rep;
  rep.q2_tilde = q2_tilde_characteristic(gen, w).value;
  const int n = gen.size();
  Vec v_prime(n), w_prime(n);
  for (int i = 0; i < n; ++i) {
    w_prime[i] = w.w[i];
    v_prime[i] = 2.0 * w.winv[i];
  }
  const double v_inf = 2.0, w_inf = 1.0;  // v = 2 (w')^{-1} with w'(inf) = 1
  BellmanConfig cfg;
  cfg.Q = 4.0 * rep.q2_tilde;
  cfg.C = calibration_level(5);
  Vec v_all(n + 1), w_all(n + 1);
  v_all.head(n) = v_prime;
  v_all[n] = v_inf;
  w_all.head(n) = w_prime;
  w_all[n] = w_inf;
  cfg.eps = bellman_eps_for(v_all, w_all);

  EnergyEngine eng{gen, f, g, v_prime, w_prime, v_inf, w_inf, cfg, true};
  const std::vector<double> ts = ts_in.empty() ? default_energy_grid() : ts_in;
  rep.min_correction = std::numeric_limits<double>::infinity();
  double prev_energy = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const auto st = eng.at(t);
    rep.min_correction = std::min(rep.min_correction, st.min_correction);
    if (st.energy > prev_energy + 1e-9 * std::max(1.0, prev_energy)) {
      rep.energy_monotone = false;
      rep.max_energy_increase = std::max(rep.max_energy_increase, st.energy - prev_energy);
    }
    prev_energy = st.energy;
  }
  rep.integral = bilinear_integral(gen, f, g);
  rep.norm_f = weighted_l2_norm(gen.space, f, w.w);
  rep.norm_g = weighted_l2_norm(gen.space, g, w.winv);
  const double denom = rep.q2_tilde * rep.norm_f * rep.norm_g;
  rep.bound_ratio = denom > 0.0 ? rep.integral / denom : 0.0;
  return rep;
}

}  // namespace semiweight
