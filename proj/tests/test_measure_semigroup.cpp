#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semiweight/measure_semigroup.hpp"

using namespace semiweight;

namespace {

Generator two_point() {
  Mat g(2, 2);
  g << 1, -1, -1, 1;
  return build_generator(make_space(Vec::Ones(2)), g, GeneratorKind::markovian);
}

}  // namespace

TEST_CASE("two-point generator validates") {
  const Generator gen = two_point();
  CHECK(gen.size() == 2);
  CHECK(gen.spec.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gen.spec.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero generator is the identity semigroup") {
  const int n = 4;
  const Generator gen =
      build_generator(make_space(Vec::Ones(n) * 0.7), Mat::Zero(n, n), GeneratorKind::markovian);
  const Mat T = semigroup_at(gen, 3.0);
  CHECK((T - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("asymmetric mass breaks self-adjointness") {
  Mat g(2, 2);
  g << 1, -1, -1, 1;
  Vec mu(2);
  mu << 1, 2;
  bool threw = false;
  try {
    build_generator(make_space(mu), g, GeneratorKind::markovian);
  } catch (const ValidationError& e) {
    threw = true;
    bool found = false;
    for (const auto& is : e.issues) found |= is.code == "NotSelfAdjoint";
    CHECK(found);
  }
  CHECK(threw);
}

TEST_CASE("validation reports every violated invariant") {
  Mat a(2, 2);
  a << -1, 2, 2, -1;  // positive off-diagonal, nonzero row sums, negative spectrum
  try {
    build_generator(make_space(Vec::Ones(2)), a, GeneratorKind::markovian);
    CHECK(false);
  } catch (const ValidationError& e) {
    bool off = false, row = false, spec_neg = false;
    for (const auto& is : e.issues) {
      off |= is.code == "PositiveOffDiagonal";
      row |= is.code == "RowSumViolation";
      spec_neg |= is.code == "NegativeSpectrum";
    }
    CHECK(off);
    CHECK(row);
    CHECK(spec_neg);
  }
}

TEST_CASE("two-point semigroup closed form") {
  const Generator gen = two_point();
  const double t = 0.5 * std::log(2.0);  // e^{-2t} = 1/2
  const Mat T = semigroup_at(gen, t);
  CHECK(T(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(T(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(T(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(T(1, 1) == doctest::Approx(0.75).epsilon(1e-12));

  const Mat T0 = semigroup_at(gen, 0.0);
  CHECK((T0 - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const Mat Tinf = semigroup_at(gen, kTimeInfinity);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(Tinf(i, j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spectral decomposition is mu-orthonormal and diagonalizes A") {
  Rng rng(61);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = rng.uniform_int(2, 8);
    const Generator gen = rep % 2 ? random_markovian(rng, n) : random_submarkovian(rng, n);
    const Mat& E = gen.spec.eigenvectors;
    const Vec& lam = gen.spec.eigenvalues;
    const Mat gram = E.transpose() * gen.space.mu.asDiagonal() * E;
    CHECK((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((gen.A * E - E * lam.asDiagonal()).cwiseAbs().maxCoeff() < 1e-9);
    for (int j = 1; j < n; ++j) CHECK(lam[j] >= lam[j - 1]);
  }
}

TEST_CASE("semigroup law and markovian structure on random generators") {
  Rng rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = (rep == 0) ? 32 : rng.uniform_int(2, 8);
    const Generator gen = random_markovian(rng, n);
    const double t1 = rng.log_uniform(1e-3, 5.0);
    const double t2 = rng.log_uniform(1e-3, 5.0);
    const Mat lhs = semigroup_at(gen, t1) * semigroup_at(gen, t2);
    const Mat rhs = semigroup_at(gen, t1 + t2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);

    const Mat T = semigroup_at(gen, t1);
    CHECK(T.minCoeff() > -1e-10);
    CHECK((T.rowwise().sum() - Vec::Ones(n)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("cemetery extension") {
  Rng rng(5);
  const Generator base = random_submarkovian(rng, 4);
  const CemeterySemigroup cs{base};

  SUBCASE("markovian base has no correction") {
    const Generator mk = random_markovian(rng, 4);
    const CemeterySemigroup mcs{mk};
    Vec fp(5);
    for (int i = 0; i < 5; ++i) fp[i] = rng.uniform(-2, 2);
    const Vec out = cemetery_apply(mcs, 0.7, fp);
    const Vec direct = semigroup_at(mk, 0.7) * fp.head(4);
    CHECK((out.head(4) - direct).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(out[4] == fp[4]);
  }

  SUBCASE("constants are preserved and positivity holds") {
    for (double t : {0.0, 1e-3, 0.1, 1.0, 10.0, 1e3}) {
      const Vec ones = Vec::Ones(5);
      const Vec out = cemetery_apply(cs, t, ones);
      CHECK((out - ones).cwiseAbs().maxCoeff() < 1e-10);
      Vec fp(5);
      for (int i = 0; i < 5; ++i) fp[i] = rng.uniform(0.0, 3.0);
      CHECK(cemetery_apply(cs, t, fp).minCoeff() > -1e-10);
    }
  }

  SUBCASE("pure cemetery data sees the mass defect") {
    Vec fp = Vec::Zero(5);
    fp[4] = 1.0;
    const double t = 0.9;
    const Vec out = cemetery_apply(cs, t, fp);
    const Vec defect = Vec::Ones(4) - semigroup_at(base, t) * Vec::Ones(4);
    CHECK((out.head(4) - defect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(defect.minCoeff() > 0.0);  // killing is strictly on for this sampler
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(cemetery_apply(cs, 1.0, Vec::Ones(4)), DimensionMismatch);
  }
}

TEST_CASE("pointwise Cauchy-Schwarz") {
  SUBCASE("identity gives equality") {
    CVec f(3), g(3);
    f << std::complex<double>(1, 2), std::complex<double>(0, -1), std::complex<double>(3, 0);
    g << std::complex<double>(2, 0), std::complex<double>(1, 1), std::complex<double>(-1, 2);
    CHECK(check_pointwise_cs(Mat::Identity(3, 3), f, g));
  }

  SUBCASE("two-point semigroup example") {
    Mat gm(2, 2);
    gm << 1, -1, -1, 1;
    const Generator gen =
        build_generator(make_space(Vec::Ones(2)), gm, GeneratorKind::markovian);
    CVec f(2), g(2);
    f << 1.0, 2.0;
    g << 1.0, 1.0;
    CHECK(check_pointwise_cs(semigroup_at(gen, 0.35), f, g));
  }

  SUBCASE("randomized sweep over positive contractions") {
    Rng rng(42);
    for (int rep = 0; rep < 10000; ++rep) {
      const int n = 6;
      Generator g1 = random_markovian(rng, n);
      Generator g2 = random_markovian(rng, n);
      const Mat T = semigroup_at(g1, rng.log_uniform(1e-2, 10.0)) *
                    semigroup_at(g2, rng.log_uniform(1e-2, 10.0));
      CVec f(n), g(n);
      for (int i = 0; i < n; ++i) {
        f[i] = std::complex<double>(rng.normal(), rng.normal());
        g[i] = std::complex<double>(rng.normal(), rng.normal());
      }
      CHECK(check_pointwise_cs(T, f, g));
    }
  }
}
