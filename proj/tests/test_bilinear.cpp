#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semiweight/bilinear.hpp"

using namespace semiweight;

namespace {

Generator two_point() {
  Mat g(2, 2);
  g << 1, -1, -1, 1;
  return build_generator(make_space(Vec::Ones(2)), g, GeneratorKind::markovian);
}

CVec random_cvec(Rng& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = std::complex<double>(rng.normal(), rng.normal());
  return v;
}

BellmanConfig mk_cfg(double Q, double eps) {
  BellmanConfig c;
  c.Q = Q;
  c.eps = eps;
  return c;
}

}  // namespace

TEST_CASE("one-step inequality at T = Id is degenerate") {
  const MeasureSpace sp = make_space(Vec::Ones(3));
  Rng rng(1);
  const CVec f = random_cvec(rng, 3), g = random_cvec(rng, 3);
  Vec v1(3), v2(3);
  v1 << 1, 2, 3;
  v2 << 2, 1, 1;
  const auto res = one_step_inequality(Mat::Identity(3, 3), sp, f, g, v1, v2, mk_cfg(16, 0.1));
  CHECK(res.lhs == 0.0);
  CHECK(res.rhs_bracket == 0.0);
  CHECK(res.ratio == 0.0);
}

TEST_CASE("one-step with pure weight data") {
  const Generator gen = two_point();
  const Mat T = semigroup_at(gen, 1.0);
  const CVec z = CVec::Zero(2);
  Vec v1(2), v2(2);
  v1 << 1.0, 2.0;
  v2 << 2.0, 1.5;
  const auto res =
      one_step_inequality(T, gen.space, z, z, v1, v2, mk_cfg(16, 0.2));
  CHECK(res.lhs == 0.0);
  CHECK(res.rhs_bracket >= -1e-12);
}

TEST_CASE("one-step randomized submarkovian sweep") {
  Rng rng(17);
  double max_ratio = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const int n = rng.uniform_int(2, 8);
    const Generator gen = random_submarkovian(rng, n);
    const Mat T = semigroup_at(gen, rng.log_uniform(1e-2, 10.0));
    const double spread = rng.uniform(0.1, 1.1);
    Vec v1(n), v2(n);
    for (int i = 0; i < n; ++i) {
      v1[i] = std::exp(rng.uniform(-spread, spread));
      v2[i] = std::exp(rng.uniform(-spread, spread));
      const double prod = v1[i] * v2[i];
      if (prod < 1.0) v2[i] /= prod;  // force 1 <= v1 v2
    }
    BellmanConfig cfg;
    cfg.Q = std::max(16.0, (v1.array() * v2.array()).maxCoeff() * 1.01);
    cfg.eps = std::min({v1.minCoeff(), v2.minCoeff(), 1.0 / v1.maxCoeff(),
                        1.0 / v2.maxCoeff(), 0.9});
    const CVec f = random_cvec(rng, n), g = random_cvec(rng, n);
    const auto res = one_step_inequality(T, gen.space, f, g, v1, v2, cfg);
    CHECK(res.rhs_bracket >= -1e-9);
    if (res.rhs_bracket > 0.0) max_ratio = std::max(max_ratio, res.ratio);
  }
  CHECK(max_ratio > 0.0);
  CHECK(max_ratio < 1.0);  // calibrated C for the sweep; recorded bound
}

TEST_CASE("toy two-point inequality") {
  SUBCASE("equal f values vanish on the left") {
    CVec f(2), g(2);
    f << std::complex<double>(1, 1), std::complex<double>(1, 1);
    g << 2.0, -1.0;
    Vec v1(2), v2(2);
    v1 << 1, 1;
    v2 << 1, 1;
    const auto res = toy_two_point_inequality(f, g, v1, v2, mk_cfg(16, 0.3));
    CHECK(res.lhs == 0.0);
  }

  SUBCASE("unit weights with odd data") {
    CVec f(2), g(2);
    f << 1.0, -1.0;
    g << 1.0, -1.0;
    Vec v1(2), v2(2);
    v1 << 1, 1;
    v2 << 1, 1;
    const auto res = toy_two_point_inequality(f, g, v1, v2, mk_cfg(16, 0.3));
    CHECK(res.lhs == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(res.rhs_bracket > 0.0);
    CHECK(res.ratio > 0.0);
    CHECK(res.ratio <= 1.0);
  }

  SUBCASE("randomized sweep across Q at the calibrated ladder levels") {
    for (const auto& [Q, level] : std::vector<std::pair<double, int>>{
             {4.0, 4}, {16.0, 4}, {100.0, 5}}) {
      Rng rng(static_cast<uint64_t>(31 + Q));
      double max_ratio = 0.0;
      for (int rep = 0; rep < 100000; ++rep) {
        CVec f = random_cvec(rng, 2), g = random_cvec(rng, 2);
        Vec v1(2), v2(2);
        for (int i = 0; i < 2; ++i) {
          v1[i] = rng.log_uniform(0.3, 3.0);
          const double lo = 1.0 / v1[i], hi = Q / v1[i];
          v2[i] = rng.uniform(lo, std::min(hi, lo + 5.0));
        }
        BellmanConfig cfg;
        cfg.Q = Q;
        cfg.C = calibration_level(level);
        cfg.eps = std::min({v1.minCoeff(), v2.minCoeff(), 1.0 / v1.maxCoeff(),
                            1.0 / v2.maxCoeff(), 0.9});
        const auto res = toy_two_point_inequality(f, g, v1, v2, cfg);
        CHECK(res.rhs_bracket >= -1e-9);
        if (res.rhs_bracket > 0) max_ratio = std::max(max_ratio, res.ratio);
      }
      CHECK(max_ratio < 1.0);
    }
  }
}

TEST_CASE("energy curve") {
  Rng rng(23);

  SUBCASE("zero data gives the zero functional") {
    const Generator gen = random_markovian(rng, 4);
    const Weight w = make_weight(random_weight(rng, 4, 1.0));
    const auto inst = make_instance(gen, w, CVec::Zero(4), CVec::Zero(4));
    const auto curve = energy_curve(inst, {0.01, 0.1, 1.0, 10.0});
    for (size_t i = 0; i < curve.t.size(); ++i) {
      CHECK(curve.energy[i] == 0.0);
      CHECK(curve.neg_dE[i] == 0.0);
      CHECK(curve.bracket_abs[i] == 0.0);
    }
  }

  SUBCASE("domain violations name the offending time") {
    const Generator gen = random_markovian(rng, 3);
    const Weight w = make_weight(random_weight(rng, 3, 1.0));
    auto inst = make_instance(gen, w, random_cvec(rng, 3), random_cvec(rng, 3));
    inst.cfg.Q = 1.9;  // the transported products sit above 2, outside [1, Q]
    try {
      energy_curve(inst, {0.5});
      CHECK(false);
    } catch (const DomainViolation& e) {
      CHECK(std::string(e.what()).find("t = 0.5") != std::string::npos);
    }
  }

  SUBCASE("analytic derivative matches finite differences and decay holds") {
    TimeGrid tg;
    tg.t_min = 1e-3;
    tg.t_max = 100.0;
    tg.points = 41;
    tg.include_zero = false;
    tg.include_infinity = false;
    const auto ts = tg.times();
    double min_c = 1e300;
    for (int rep = 0; rep < 60; ++rep) {
      const int n = rng.uniform_int(2, 8);
      const Generator gen = random_markovian(rng, n);
      const Weight w = make_weight(random_weight(rng, n, 1.2));
      const auto inst = make_instance(gen, w, random_cvec(rng, n), random_cvec(rng, n));
      const auto curve = energy_curve(inst, ts);
      for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(curve.energy[i] >= 0.0);
        if (i > 0)
          CHECK(curve.energy[i] <= curve.energy[i - 1] + 1e-9 * std::max(1.0, curve.energy[0]));
        // derivatives below ~1e-6 of the energy scale sit at the central
        // difference rounding floor; compare relative to that scale
        const double scale = std::max(std::abs(curve.neg_dE[i]), 1e-6 * curve.energy[0]);
        CHECK(std::abs(curve.neg_dE[i] - curve.neg_dE_fd[i]) <= 1e-5 * scale);
        if (curve.bracket_abs[i] > 1e-12 * curve.energy[0])
          min_c = std::min(min_c, inst.cfg.Q * curve.neg_dE[i] / curve.bracket_abs[i]);
      }
    }
    CHECK(min_c > 0.0);  // quantitative monotonicity with recorded constant
  }
}

TEST_CASE("initial energy is controlled by the weighted data norms") {
  Rng rng(41);
  double worst = 0.0;
  double c_total = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const int n = rng.uniform_int(2, 8);
    const Generator gen = random_markovian(rng, n);
    const Weight w = make_weight(random_weight(rng, n, 1.3));
    const CVec f = random_cvec(rng, n), g = random_cvec(rng, n);
    const auto inst = make_instance(gen, w, f, g);
    c_total = 0.0;
    for (double c : inst.cfg.C) c_total += c;
    const auto curve = energy_curve(inst, {1e-6});
    const double nf2 = std::pow(weighted_l2_norm(gen.space, f, w.w), 2);
    const double ng2 = std::pow(weighted_l2_norm(gen.space, g, w.winv), 2);
    worst = std::max(worst, curve.energy[0] / (nf2 + ng2));
  }
  // termwise each block sits below the first, and the first integrates to
  // (1/2)||f||_w^2 + ||g||_{1/w}^2
  CHECK(worst <= c_total + 1e-9);
}

TEST_CASE("bilinear integral") {
  Rng rng(29);

  SUBCASE("kernel-orthogonal data integrates to zero") {
    const Generator gen = random_markovian(rng, 5);
    // g spanned by the constant kernel mode only
    const CVec g = CVec::Ones(5);
    const CVec f = random_cvec(rng, 5);
    CHECK(bilinear_integral(gen, f, g) < 1e-12);
  }

  SUBCASE("single mode integrates to one half") {
    const Generator gen = random_markovian(rng, 6);
    const int j = 3;
    CVec e = gen.spec.eigenvectors.col(j).cast<std::complex<double>>();
    const double got = bilinear_integral(gen, e, e);
    CHECK(got == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("matches a dense trapezoid oracle") {
    for (int rep = 0; rep < 10; ++rep) {
      const int n = rng.uniform_int(2, 7);
      const Generator gen = random_markovian(rng, n);
      const CVec f = random_cvec(rng, n), g = random_cvec(rng, n);
      const double got = bilinear_integral(gen, f, g);
      // oracle: fine log-spaced trapezoid on the spectral sum
      const Vec& lam = gen.spec.eigenvalues;
      const Mat& E = gen.spec.eigenvectors;
      std::vector<std::pair<double, std::complex<double>>> modes;
      for (int k = 0; k < n; ++k) {
        if (lam[k] < 1e-12) continue;
        std::complex<double> cf(0, 0), cg(0, 0);
        for (int i = 0; i < n; ++i) {
          cf += f[i] * E(i, k) * gen.space.mu[i];
          cg += g[i] * E(i, k) * gen.space.mu[i];
        }
        modes.emplace_back(lam[k], cf * cg * lam[k]);
      }
      auto integrand = [&](double t) {
        std::complex<double> s(0, 0);
        for (auto& [l, c] : modes) s += c * std::exp(-2.0 * l * t);
        return std::abs(s);
      };
      double oracle = 0.0;
      const int m = 400000;
      double prev_t = 0.0, prev_v = integrand(0.0);
      for (int k = 1; k <= m; ++k) {
        const double t = 1e-7 * std::pow(1e10 / 1e-7, k / static_cast<double>(m));
        const double v = integrand(t);
        oracle += 0.5 * (v + prev_v) * (t - prev_t);
        prev_t = t;
        prev_v = v;
      }
      CHECK(got == doctest::Approx(oracle).epsilon(1e-5));
    }
  }

  SUBCASE("scaling symmetry of the normalized ratio") {
    const Generator gen = random_markovian(rng, 5);
    const Weight w = make_weight(random_weight(rng, 5, 1.0));
    const CVec f = random_cvec(rng, 5), g = random_cvec(rng, 5);
    const double lam = 3.7;
    const double base = bilinear_integral(gen, f, g) /
                        (weighted_l2_norm(gen.space, f, w.w) *
                         weighted_l2_norm(gen.space, g, w.w.cwiseInverse()));
    const CVec f2 = lam * f;
    const CVec g2 = f.size() ? (g / lam).eval() : g;
    const double scaled = bilinear_integral(gen, f2, g2) /
                          (weighted_l2_norm(gen.space, f2, w.w) *
                           weighted_l2_norm(gen.space, g2, w.w.cwiseInverse()));
    CHECK(base == doctest::Approx(scaled).epsilon(1e-12));
  }

  SUBCASE("bounded by the characteristic times weighted norms") {
    double max_ratio = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      const int n = rng.uniform_int(2, 8);
      const Generator gen = random_markovian(rng, n);
      const Weight w = make_weight(random_weight(rng, n, 1.5));
      const CVec f = random_cvec(rng, n), g = random_cvec(rng, n);
      const double q2 = q2_characteristic(gen, w).value;
      const double val = bilinear_integral(gen, f, g);
      const double ratio = val / (q2 * weighted_l2_norm(gen.space, f, w.w) *
                                  weighted_l2_norm(gen.space, g, w.w.cwiseInverse()));
      max_ratio = std::max(max_ratio, ratio);
    }
    CHECK(max_ratio < 1.0);
  }
}

TEST_CASE("submarkovian bilinear check") {
  Rng rng(37);

  SUBCASE("markovian generators reduce exactly") {
    const Generator gen = random_markovian(rng, 4);
    const Weight w = make_weight(random_weight(rng, 4, 1.0));
    const CVec f = random_cvec(rng, 4), g = random_cvec(rng, 4);
    const auto rep = submarkovian_bilinear_check(gen, w, f, g);
    CHECK(rep.min_correction == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(rep.min_correction) < 1e-10);
    CHECK(rep.q2_tilde == doctest::Approx(q2_characteristic(gen, w).value).epsilon(1e-12));
    CHECK(rep.energy_monotone);
  }

  SUBCASE("two-point killed chain") {
    Mat a(2, 2);
    a << 1.4, -1.0, -1.0, 1.7;
    const Generator gen =
        build_generator(make_space(Vec::Ones(2)), a, GeneratorKind::submarkovian);
    Vec wv(2);
    wv << 1.0, 4.0;
    const CVec f = random_cvec(rng, 2), g = random_cvec(rng, 2);
    const auto rep = submarkovian_bilinear_check(gen, make_weight(wv), f, g);
    CHECK(rep.min_correction >= -1e-12);
    CHECK(rep.energy_monotone);
    CHECK(rep.bound_ratio < 1.0);
  }

  SUBCASE("randomized sweep") {
    double max_ratio = 0.0;
    for (int rep_i = 0; rep_i < 40; ++rep_i) {
      const int n = rng.uniform_int(2, 6);
      const Generator gen = random_submarkovian(rng, n);
      const Weight w = make_weight(random_weight(rng, n, 1.0));
      const CVec f = random_cvec(rng, n), g = random_cvec(rng, n);
      const auto rep = submarkovian_bilinear_check(gen, w, f, g);
      CHECK(rep.min_correction >= -1e-12);
      CHECK(rep.energy_monotone);
      max_ratio = std::max(max_ratio, rep.bound_ratio);
    }
    CHECK(max_ratio < 1.0);
  }
}
