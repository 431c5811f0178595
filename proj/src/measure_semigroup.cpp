#include "semiweight/measure_semigroup.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace semiweight {

MeasureSpace make_space(Vec mu) {
  if (mu.size() < 1) throw ValidationError("measure space needs n >= 1", {{"EmptySpace", ""}});
  for (int i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) {
      std::ostringstream os;
      os << "mu[" << i << "] = " << mu[i];
      throw ValidationError("point masses must be strictly positive and finite",
                            {{"NonPositiveMass", os.str()}});
    }
  }
  return MeasureSpace{std::move(mu)};
}

double mu_dot(const MeasureSpace& space, const Vec& f, const Vec& g) {
  return (f.array() * g.array() * space.mu.array()).sum();
}

std::complex<double> mu_dot(const MeasureSpace& space, const CVec& f, const CVec& g) {
  return (f.array() * g.array() * space.mu.array().cast<std::complex<double>>()).sum();
}

namespace {

SpectralDecomposition decompose(const MeasureSpace& space, const Mat& A) {
  const Vec d = space.mu.array().sqrt();
  Mat S = d.asDiagonal() * A * d.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();  // exact symmetry for the solver
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  SpectralDecomposition sd;
  sd.eigenvalues = es.eigenvalues();
  sd.eigenvectors = d.cwiseInverse().asDiagonal() * es.eigenvectors();
  return sd;
}

}  // namespace

Generator build_generator(const MeasureSpace& space, const Mat& A, GeneratorKind kind,
                          const Tolerances& tol) {
  const int n = space.size();
  if (A.rows() != n || A.cols() != n)
    throw DimensionMismatch("generator matrix must be n x n with n = space size");
  if (!A.allFinite())
    throw ValidationError("generator entries must be finite", {{"NonFiniteEntry", ""}});

  std::vector<ValidationIssue> issues;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double eps = tol.rel * scale;

  double worst_sa = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      worst_sa = std::max(worst_sa, std::abs(space.mu[i] * A(i, j) - space.mu[j] * A(j, i)));
  if (worst_sa > eps * space.mu.maxCoeff()) {
    std::ostringstream os;
    os << "max |mu_i A_ij - mu_j A_ji| = " << worst_sa;
    issues.push_back({"NotSelfAdjoint", os.str()});
  }

  double worst_off = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) worst_off = std::max(worst_off, A(i, j));
  if (worst_off > eps) {
    std::ostringstream os;
    os << "max off-diagonal entry = " << worst_off;
    issues.push_back({"PositiveOffDiagonal", os.str()});
  }

  const Vec row_sums = A.rowwise().sum();
  if (kind == GeneratorKind::markovian) {
    const double worst = row_sums.cwiseAbs().maxCoeff();
    if (worst > eps) {
      std::ostringstream os;
      os << "max |row sum| = " << worst;
      issues.push_back({"RowSumViolation", os.str()});
    }
  } else {
    const double worst = row_sums.minCoeff();
    if (worst < -eps) {
      std::ostringstream os;
      os << "min row sum = " << worst;
      issues.push_back({"RowSumViolation", os.str()});
    }
  }

  SpectralDecomposition sd = decompose(space, A);
  if (sd.eigenvalues.minCoeff() < -eps) {
    std::ostringstream os;
    os << "min eigenvalue = " << sd.eigenvalues.minCoeff();
    issues.push_back({"NegativeSpectrum", os.str()});
  }

  if (!issues.empty()) {
    std::ostringstream os;
    os << "invalid generator:";
    for (const auto& is : issues) os << " [" << is.code << "] " << is.detail << ";";
    throw ValidationError(os.str(), issues);
  }
  return Generator{space, A, kind, std::move(sd)};
}

Mat semigroup_at(const Generator& gen, double t) {
  if (std::isnan(t) || t < 0.0) throw std::invalid_argument("semigroup time must be >= 0");
  const int n = gen.size();
  const Vec& lam = gen.spec.eigenvalues;
  const Mat& E = gen.spec.eigenvectors;
  Vec factors(n);
  if (t == kTimeInfinity) {
    const double ker_tol = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (int j = 0; j < n; ++j) factors[j] = (lam[j] <= ker_tol) ? 1.0 : 0.0;
  } else {
    for (int j = 0; j < n; ++j) factors[j] = std::exp(-t * std::max(lam[j], 0.0));
  }
  return E * factors.asDiagonal() * E.transpose() * gen.space.mu.asDiagonal();
}

CVec semigroup_apply(const Generator& gen, double t, const CVec& f) {
  if (f.size() != gen.size()) throw DimensionMismatch("vector length does not match space");
  return semigroup_at(gen, t) * f;
}

Vec semigroup_apply(const Generator& gen, double t, const Vec& f) {
  if (f.size() != gen.size()) throw DimensionMismatch("vector length does not match space");
  return semigroup_at(gen, t) * f;
}

Vec cemetery_apply(const CemeterySemigroup& cs, double t, const Vec& f_prime) {
  const int n = cs.base.size();
  if (f_prime.size() != n + 1)
    throw DimensionMismatch("cemetery vector must have length n + 1");
  const Mat T = semigroup_at(cs.base, t);
  const double f_inf = f_prime[n];
  Vec out(n + 1);
  out.head(n) = T * f_prime.head(n) + f_inf * (Vec::Ones(n) - T * Vec::Ones(n));
  out[n] = f_inf;
  return out;
}

bool check_pointwise_cs(const Mat& T, const CVec& f, const CVec& g, double tol) {
  const int n = static_cast<int>(T.rows());
  if (f.size() != n || g.size() != n) throw DimensionMismatch("vector length does not match T");
  const CVec tfg = T * (f.array() * g.array()).matrix();
  const Vec tf2 = T * f.cwiseAbs2();
  const Vec tg2 = T * g.cwiseAbs2();
  for (int i = 0; i < n; ++i) {
    const double lhs = std::norm(tfg[i]);
    const double rhs = tf2[i] * tg2[i];
    if (lhs > rhs + tol * std::max(1.0, rhs)) return false;
  }
  return true;
}

Generator random_markovian(Rng& rng, int n, double coupling_scale) {
  Vec mu(n);
  for (int i = 0; i < n; ++i) mu[i] = rng.uniform(0.2, 5.0);
  Mat W = Mat::Zero(n, n);  // symmetric couplings in the mu-symmetrized frame
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) W(i, j) = W(j, i) = coupling_scale * rng.uniform();
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      A(i, j) = -W(i, j) / mu[i];
      diag += W(i, j) / mu[i];
    }
    A(i, i) = diag;
  }
  return build_generator(make_space(mu), A, GeneratorKind::markovian);
}

Generator random_submarkovian(Rng& rng, int n, double coupling_scale, double killing_scale) {
  Generator g = random_markovian(rng, n, coupling_scale);
  Mat A = g.A;
  for (int i = 0; i < n; ++i) A(i, i) += killing_scale * rng.uniform();
  return build_generator(g.space, A, GeneratorKind::submarkovian);
}

Vec random_weight(Rng& rng, int n, double log_spread) {
  Vec w(n);
  for (int i = 0; i < n; ++i) w[i] = std::exp(rng.uniform(-log_spread, log_spread));
  return w;
}

}  // namespace semiweight
