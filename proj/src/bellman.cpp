#include "semiweight/bellman.hpp"

#include <cmath>
#include <sstream>

namespace semiweight {

namespace {

struct Aux {
  double N, K, Nr, Ns, Kr, Ks;
};

Aux aux_at(double r, double s, double Q) {
  const double rs = r * s;
  const double root = std::sqrt(rs / Q);
  const double rs32 = rs * std::sqrt(rs);
  const double q32 = Q * std::sqrt(Q);
  Aux a;
  a.N = root * (1.0 - rs32 / (128.0 * q32));
  a.K = root * (1.0 - std::sqrt(rs) / (8.0 * std::sqrt(Q)));
  const double n_core = root * (0.5 - rs32 / (64.0 * q32));
  const double k_core = root * (0.5 - std::sqrt(rs) / (8.0 * std::sqrt(Q)));
  a.Nr = n_core / r;
  a.Ns = n_core / s;
  a.Kr = k_core / r;
  a.Ks = k_core / s;
  return a;
}

// |x|^2 / (2r - 1/(s(M+1))) + |y|^2 / s with M = N or K; Mr, Ms its partials.
PieceEval ratio_piece(const BellmanPoint& v, double M, double Mr, double Ms) {
  const double ax2 = std::norm(v.x), ay2 = std::norm(v.y);
  const double g = 2.0 * v.r - 1.0 / (v.s * (M + 1.0));
  const double gr = 2.0 + Mr / (v.s * (M + 1.0) * (M + 1.0));
  const double gs = 1.0 / (v.s * v.s * (M + 1.0)) + Ms / (v.s * (M + 1.0) * (M + 1.0));
  PieceEval p;
  p.value = ax2 / g + ay2 / v.s;
  p.grad.x1 = 2.0 * v.x.real() / g;
  p.grad.x2 = 2.0 * v.x.imag() / g;
  p.grad.y1 = 2.0 * v.y.real() / v.s;
  p.grad.y2 = 2.0 * v.y.imag() / v.s;
  p.grad.r = -ax2 * gr / (g * g);
  p.grad.s = -ax2 * gs / (g * g) - ay2 / (v.s * v.s);
  return p;
}

PieceEval swap_xy(PieceEval p) {
  std::swap(p.grad.x1, p.grad.y1);
  std::swap(p.grad.x2, p.grad.y2);
  std::swap(p.grad.r, p.grad.s);
  return p;
}

BellmanPoint swapped(const BellmanPoint& v) { return BellmanPoint{v.y, v.x, v.s, v.r}; }

PieceEval piece_b1(const BellmanPoint& v) {
  const double ax2 = std::norm(v.x), ay2 = std::norm(v.y);
  PieceEval p;
  p.value = ax2 / v.r + ay2 / v.s;
  p.grad.x1 = 2.0 * v.x.real() / v.r;
  p.grad.x2 = 2.0 * v.x.imag() / v.r;
  p.grad.y1 = 2.0 * v.y.real() / v.s;
  p.grad.y2 = 2.0 * v.y.imag() / v.s;
  p.grad.r = -ax2 / (v.r * v.r);
  p.grad.s = -ay2 / (v.s * v.s);
  return p;
}

PieceEval piece_b4(const BellmanPoint& v, const Aux& aux, H4Case* which) {
  const double ax = std::abs(v.x), ay = std::abs(v.y);
  const double K = aux.K;
  const double a = ax * v.s - ay * K;  // sup over alpha is interior iff a>0 and b>0
  const double b = ay * v.r - ax * K;
  PieceEval p;
  if (a > 0.0 && b > 0.0) {
    *which = H4Case::interior;
    const double D = v.r * v.s - K * K;
    const double P = ax * ax * v.s - 2.0 * ax * ay * K + ay * ay * v.r;
    p.value = P / D;
    const double dax = (2.0 * ax * v.s - 2.0 * ay * K) / D;  // d/d|x| = 2a/D
    const double day = (2.0 * ay * v.r - 2.0 * ax * K) / D;
    p.grad.x1 = dax * v.x.real() / ax;
    p.grad.x2 = dax * v.x.imag() / ax;
    p.grad.y1 = day * v.y.real() / ay;
    p.grad.y2 = day * v.y.imag() / ay;
    const double dHr = -(a * a) / (D * D);
    const double dHs = -(b * b) / (D * D);
    const double dHK = -2.0 * a * b / (D * D);
    p.grad.r = dHr + dHK * aux.Kr;
    p.grad.s = dHs + dHK * aux.Ks;
  } else if (a > 0.0) {  // b <= 0: beta decreasing in alpha, sup at alpha -> 0
    *which = H4Case::x_over_r;
    p.value = ax * ax / v.r;
    p.grad.x1 = 2.0 * v.x.real() / v.r;
    p.grad.x2 = 2.0 * v.x.imag() / v.r;
    p.grad.r = -ax * ax / (v.r * v.r);
  } else if (b > 0.0) {  // a <= 0: beta increasing, sup at alpha -> infinity
    *which = H4Case::y_over_s;
    p.value = ay * ay / v.s;
    p.grad.y1 = 2.0 * v.y.real() / v.s;
    p.grad.y2 = 2.0 * v.y.imag() / v.s;
    p.grad.s = -ay * ay / (v.s * v.s);
  } else {  // both <= 0 forces x = y = 0 on the domain (K^2 < rs)
    *which = H4Case::zero;
  }
  return p;
}

void require_domain(const BellmanPoint& v, const BellmanConfig& cfg) {
  if (!in_domain(v, cfg)) {
    std::ostringstream os;
    os << "point (r=" << v.r << ", s=" << v.s << ", rs=" << v.r * v.s
       << ") outside D_Q^eps with Q=" << cfg.Q << " eps=" << cfg.eps;
    throw DomainViolation(os.str());
  }
}

}  // namespace

bool in_domain(const BellmanPoint& v, const BellmanConfig& cfg, double slack) {
  const double rs = v.r * v.s;
  const double lo = 1.0 - slack, hi = cfg.Q * (1.0 + slack);
  const double e_lo = cfg.eps * (1.0 - slack), e_hi = (1.0 / cfg.eps) * (1.0 + slack);
  return std::isfinite(v.r) && std::isfinite(v.s) && v.r >= e_lo && v.r <= e_hi &&
         v.s >= e_lo && v.s <= e_hi && rs >= lo && rs <= hi && std::isfinite(std::norm(v.x)) &&
         std::isfinite(std::norm(v.y));
}

std::array<PieceEval, 6> eval_pieces(const BellmanPoint& v, const BellmanConfig& cfg) {
  require_domain(v, cfg);
  const Aux aux = aux_at(v.r, v.s, cfg.Q);
  const Aux aux_sw = aux_at(v.s, v.r, cfg.Q);  // N,K symmetric; partials swap
  H4Case dummy;
  std::array<PieceEval, 6> out;
  out[0] = piece_b1(v);
  out[1] = ratio_piece(v, aux.N, aux.Nr, aux.Ns);
  out[2] = swap_xy(ratio_piece(swapped(v), aux_sw.N, aux_sw.Nr, aux_sw.Ns));
  out[3] = piece_b4(v, aux, &dummy);
  out[4] = ratio_piece(v, aux.K, aux.Kr, aux.Ks);
  out[5] = swap_xy(ratio_piece(swapped(v), aux_sw.K, aux_sw.Kr, aux_sw.Ks));
  return out;
}

BellmanEval eval(const BellmanPoint& v, const BellmanConfig& cfg) {
  require_domain(v, cfg);
  const Aux aux = aux_at(v.r, v.s, cfg.Q);
  const Aux aux_sw = aux_at(v.s, v.r, cfg.Q);
  BellmanEval e;
  PieceEval parts[6];
  parts[0] = piece_b1(v);
  parts[1] = ratio_piece(v, aux.N, aux.Nr, aux.Ns);
  parts[2] = swap_xy(ratio_piece(swapped(v), aux_sw.N, aux_sw.Nr, aux_sw.Ns));
  parts[3] = piece_b4(v, aux, &e.active_piece);
  parts[4] = ratio_piece(v, aux.K, aux.Kr, aux.Ks);
  parts[5] = swap_xy(ratio_piece(swapped(v), aux_sw.K, aux_sw.Kr, aux_sw.Ks));
  for (int i = 0; i < 6; ++i) {
    const double c = cfg.C[static_cast<size_t>(i)];
    e.value += c * parts[i].value;
    e.grad.x1 += c * parts[i].grad.x1;
    e.grad.x2 += c * parts[i].grad.x2;
    e.grad.y1 += c * parts[i].grad.y1;
    e.grad.y2 += c * parts[i].grad.y2;
    e.grad.r += c * parts[i].grad.r;
    e.grad.s += c * parts[i].grad.s;
  }
  return e;
}

double one_leg_defect(const BellmanPoint& v, const BellmanPoint& v0, const BellmanConfig& cfg) {
  const BellmanEval e = eval(v, cfg);
  const BellmanEval e0 = eval(v0, cfg);
  const double dx1 = v.x.real() - v0.x.real(), dx2 = v.x.imag() - v0.x.imag();
  const double dy1 = v.y.real() - v0.y.real(), dy2 = v.y.imag() - v0.y.imag();
  const double dr = v.r - v0.r, ds = v.s - v0.s;
  const double lin = e0.grad.x1 * dx1 + e0.grad.x2 * dx2 + e0.grad.y1 * dy1 +
                     e0.grad.y2 * dy2 + e0.grad.r * dr + e0.grad.s * ds;
  const double gain = (2.0 / cfg.Q) * std::hypot(dx1, dx2) * std::hypot(dy1, dy2);
  return e.value - e0.value - lin - gain;
}

BellmanPoint sample_domain_point(Rng& rng, const BellmanConfig& cfg, double xy_max) {
  // log-uniform r; rs uniform in [1, Q]; x, y complex gaussian rescaled so
  // |x|, |y| are uniform in [0, xy_max].
  for (int tries = 0; tries < 10000; ++tries) {
    const double r = rng.log_uniform(cfg.eps, 1.0 / cfg.eps);
    const double rs = rng.uniform(1.0, cfg.Q);
    const double s = rs / r;
    if (s < cfg.eps || s > 1.0 / cfg.eps) continue;
    auto draw = [&rng, xy_max]() {
      std::complex<double> z(rng.normal(), rng.normal());
      const double a = std::abs(z);
      const double want = rng.uniform(0.0, xy_max);
      return (a > 1e-300) ? z * (want / a) : std::complex<double>(want, 0.0);
    };
    return BellmanPoint{draw(), draw(), r, s};
  }
  throw std::runtime_error("domain sampler rejection rate too high");
}

namespace {

// Pairs of the form V = (c x0, d y0, c r0, d s0) keep the first block's
// defect at zero, so they stress exactly the directions the remaining blocks
// must cover.
bool conical_partner(Rng& rng, const BellmanConfig& cfg, const BellmanPoint& v0,
                     BellmanPoint* out) {
  const double c = rng.log_uniform(0.25, 4.0);
  const double d = rng.log_uniform(0.25, 4.0);
  BellmanPoint v{c * v0.x, d * v0.y, c * v0.r, d * v0.s};
  if (!in_domain(v, cfg, 0.0)) return false;
  *out = v;
  return true;
}

}  // namespace

std::array<double, 6> calibration_level(int level) {
  // geometric ladder: the first block leads (error estimate), the four ratio
  // blocks follow one step behind (they carry the conical one-leg gain), the
  // envelope block trails one more
  const double c1 = std::ldexp(1.0, level);
  const double lam = std::ldexp(1.0, std::max(level - 1, 0));
  const double c4 = std::ldexp(1.0, std::max(level - 2, 0));
  return {c1, lam, lam, c4, lam, lam};
}

namespace {

struct PropertyMargins {
  double size_constant, sign_margin, one_leg_margin, convexity_margin, error_constant;
  BellmanPoint worst_sign, worst_one_leg_a, worst_one_leg_b, worst_convexity, worst_error;
};

PropertyMargins measure_properties(const BellmanConfig& cfg, long budget, uint64_t seed) {
  Rng rng(seed);
  PropertyMargins m{};
  m.size_constant = 0.0;
  m.sign_margin = std::numeric_limits<double>::infinity();
  m.one_leg_margin = std::numeric_limits<double>::infinity();
  m.convexity_margin = std::numeric_limits<double>::infinity();
  m.error_constant = std::numeric_limits<double>::infinity();

  const long n_points = budget;
  for (long k = 0; k < n_points; ++k) {
    const BellmanPoint v = sample_domain_point(rng, cfg);
    const BellmanEval e = eval(v, cfg);
    const double b1 = std::norm(v.x) / v.r + std::norm(v.y) / v.s;
    if (b1 > 1e-12) m.size_constant = std::max(m.size_constant, e.value / b1);
    const double sgn = -std::max(e.grad.r, e.grad.s);
    if (sgn < m.sign_margin) {
      m.sign_margin = sgn;
      m.worst_sign = v;
    }
    const double xy = std::abs(v.x) * std::abs(v.y);
    if (xy > 1e-12) {
      const double err = e.grad.x1 * v.x.real() + e.grad.x2 * v.x.imag() +
                         e.grad.y1 * v.y.real() + e.grad.y2 * v.y.imag() + e.grad.r * v.r +
                         e.grad.s * v.s;
      const double c = cfg.Q * err / xy;
      if (c < m.error_constant) {
        m.error_constant = c;
        m.worst_error = v;
      }
    }
  }

  const long n_pairs = budget;
  for (long k = 0; k < n_pairs; ++k) {
    const BellmanPoint a = sample_domain_point(rng, cfg);
    BellmanPoint b;
    if (k % 2 == 0) {
      b = sample_domain_point(rng, cfg);
    } else if (!conical_partner(rng, cfg, a, &b)) {
      continue;
    }
    const double d = one_leg_defect(b, a, cfg);
    if (d < m.one_leg_margin) {
      m.one_leg_margin = d;
      m.worst_one_leg_a = b;
      m.worst_one_leg_b = a;
    }
  }

  // Hessian in pure (dx, dy, 0, 0) directions at points safely inside one
  // smooth piece of B4 (B is only piecewise C^2).
  const double h = 1e-4;
  const long n_hess = std::max<long>(100, budget / 10);
  long done = 0;
  while (done < n_hess) {
    const BellmanPoint v = sample_domain_point(rng, cfg);
    const Aux aux = aux_at(v.r, v.s, cfg.Q);
    const double a = std::abs(v.x) * v.s - std::abs(v.y) * aux.K;
    const double b = std::abs(v.y) * v.r - std::abs(v.x) * aux.K;
    const double margin_needed = 10.0 * h * (v.r + v.s + std::abs(v.x) + std::abs(v.y) + 1.0);
    if (std::min(std::abs(a), std::abs(b)) < margin_needed) continue;
    ++done;
    const double th1 = rng.uniform(0.0, 6.283185307179586);
    const double th2 = rng.uniform(0.0, 6.283185307179586);
    const std::complex<double> ux(std::cos(th1), std::sin(th1));
    const std::complex<double> uy(std::cos(th2), std::sin(th2));
    auto at = [&](double sign) {
      BellmanPoint w = v;
      w.x += sign * h * ux;
      w.y += sign * h * uy;
      return eval(w, cfg).value;
    };
    const double quad = (at(1.0) - 2.0 * eval(v, cfg).value + at(-1.0)) / (h * h);
    const double margin = quad - 2.0 / cfg.Q;  // |dx| = |dy| = 1
    if (margin < m.convexity_margin) {
      m.convexity_margin = margin;
      m.worst_convexity = v;
    }
  }
  return m;
}

std::string describe(const BellmanPoint& v) {
  std::ostringstream os;
  os << "(x=" << v.x.real() << "+" << v.x.imag() << "i, y=" << v.y.real() << "+"
     << v.y.imag() << "i, r=" << v.r << ", s=" << v.s << ")";
  return os.str();
}

}  // namespace

CalibrationCertificate calibrate_constants(double Q, double eps, long sample_budget,
                                           uint64_t seed) {
  if (Q < BellmanConfig::kQMin) {
    std::ostringstream os;
    os << "Q = " << Q << " below Q_min = " << BellmanConfig::kQMin;
    throw std::invalid_argument(os.str());
  }
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");

  BellmanConfig cfg;
  cfg.Q = Q;
  cfg.eps = eps;
  // the one-leg gain is tight along the conical directions, so allow a hair
  // of numerical slack there; the other margins use the plain tolerance
  const double tol = 1e-9;
  const double one_leg_tol = 1e-7;
  PropertyMargins last{};
  for (int doubling = 0; doubling <= 24; ++doubling) {
    cfg.C = calibration_level(doubling);
    last = measure_properties(cfg, sample_budget, seed);
    const bool ok = last.sign_margin >= -tol && last.one_leg_margin >= -one_leg_tol &&
                    last.convexity_margin >= -tol && last.error_constant > 0.0;
    if (ok) {
      CalibrationCertificate cert;
      cert.cfg = cfg;
      cert.size_constant = last.size_constant;
      cert.sign_margin = last.sign_margin;
      cert.one_leg_margin = last.one_leg_margin;
      cert.convexity_margin = last.convexity_margin;
      cert.error_constant = last.error_constant;
      cert.samples = sample_budget;
      cert.seed = seed;
      cert.doublings = doubling;
      return cert;
    }
  }
  std::string prop, witness;
  if (last.sign_margin < -tol) {
    prop = "derivative-sign";
    witness = describe(last.worst_sign);
  } else if (last.one_leg_margin < -one_leg_tol) {
    prop = "one-leg-convexity";
    witness = describe(last.worst_one_leg_a) + " / " + describe(last.worst_one_leg_b);
  } else if (last.convexity_margin < -tol) {
    prop = "hessian-convexity";
    witness = describe(last.worst_convexity);
  } else {
    prop = "error-estimate";
    witness = describe(last.worst_error);
  }
  throw CalibrationFailed("calibration failed for property " + prop + " at " + witness, prop,
                          witness);
}

DerivativeBoundsReport derivative_bounds_check(const MeasureSpace& space, const CVec& f,
                                               const CVec& g, const Vec& v1, const Vec& v2,
                                               const BellmanConfig& cfg) {
  const int n = space.size();
  if (f.size() != n || g.size() != n || v1.size() != n || v2.size() != n)
    throw DimensionMismatch("field lengths do not match space");
  DerivativeBoundsReport rep;
  for (int i = 0; i < n; ++i) {
    const BellmanPoint v{f[i], g[i], v1[i], v2[i]};
    const BellmanEval e = eval(v, cfg);
    rep.l1_dr += std::abs(e.grad.r) * space.mu[i];
    rep.l1_ds += std::abs(e.grad.s) * space.mu[i];
    rep.linf_dr = std::max(rep.linf_dr, std::abs(e.grad.r));
    rep.linf_ds = std::max(rep.linf_ds, std::abs(e.grad.s));
    rep.l2sq_dx += (e.grad.x1 * e.grad.x1 + e.grad.x2 * e.grad.x2) * space.mu[i];
    rep.l2sq_dy += (e.grad.y1 * e.grad.y1 + e.grad.y2 * e.grad.y2) * space.mu[i];
    rep.data_l2sq += (std::norm(f[i]) + std::norm(g[i])) * space.mu[i];
  }
  if (rep.data_l2sq > 0.0)
    rep.fitted_c = std::max({rep.l1_dr, rep.l1_ds, rep.l2sq_dx, rep.l2sq_dy}) / rep.data_l2sq;

  // Lipschitz ratio of d_r B, d_s B along (r,s) segments at frozen (x, y).
  Rng rng(7);
  for (int i = 0; i < n; ++i) {
    const BellmanPoint base{f[i], g[i], v1[i], v2[i]};
    const double xy2 = std::norm(f[i]) + std::norm(g[i]);
    if (xy2 < 1e-12) continue;
    const BellmanEval e0 = eval(base, cfg);
    for (int k = 0; k < 16; ++k) {
      BellmanPoint moved = base;
      const double dr = rng.uniform(-0.05, 0.05) * base.r;
      const double ds = rng.uniform(-0.05, 0.05) * base.s;
      moved.r += dr;
      moved.s += ds;
      if (!in_domain(moved, cfg, 0.0)) continue;
      const BellmanEval e1 = eval(moved, cfg);
      const double denom = xy2 * (std::abs(dr) + std::abs(ds));
      if (denom < 1e-14) continue;
      rep.lipschitz_ratio = std::max(
          rep.lipschitz_ratio,
          std::max(std::abs(e1.grad.r - e0.grad.r), std::abs(e1.grad.s - e0.grad.s)) / denom);
    }
  }
  return rep;
}

}  // namespace semiweight
