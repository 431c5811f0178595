#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiweight/rng.hpp"

namespace semiweight {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Sentinel time mapping semigroup_at to the projection onto ker(A).
inline constexpr double kTimeInfinity = std::numeric_limits<double>::infinity();

struct ValidationIssue {
  std::string code;    // NotSelfAdjoint, PositiveOffDiagonal, RowSumViolation, ...
  std::string detail;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string what, std::vector<ValidationIssue> issues)
      : std::runtime_error(std::move(what)), issues(std::move(issues)) {}
  std::vector<ValidationIssue> issues;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MeasureSpace {
  Vec mu;  // strictly positive point masses
  int size() const { return static_cast<int>(mu.size()); }
  double total_mass() const { return mu.sum(); }
};

MeasureSpace make_space(Vec mu);

enum class GeneratorKind { markovian, submarkovian };

struct Tolerances {
  double rel = 1e-9;
};

// mu-orthonormal eigensystem of A, eigenvalues ascending.
struct SpectralDecomposition {
  Vec eigenvalues;
  Mat eigenvectors;  // column j is e_j with <e_j, e_k>_mu = delta_jk
};

struct Generator {
  MeasureSpace space;
  Mat A;
  GeneratorKind kind = GeneratorKind::markovian;
  SpectralDecomposition spec;
  int size() const { return space.size(); }
};

// Bilinear mu-bracket <f, g>_mu = sum_i f_i g_i mu_i (no conjugation).
double mu_dot(const MeasureSpace& space, const Vec& f, const Vec& g);
std::complex<double> mu_dot(const MeasureSpace& space, const CVec& f, const CVec& g);

// Validates all Generator invariants; throws ValidationError listing every
// violated one (codes: NotSelfAdjoint, PositiveOffDiagonal, RowSumViolation,
// NegativeSpectrum).
Generator build_generator(const MeasureSpace& space, const Mat& A, GeneratorKind kind,
                          const Tolerances& tol = {});

// exp(-tA) assembled from the spectral decomposition; t = kTimeInfinity gives
// the projection onto the kernel of A.
Mat semigroup_at(const Generator& gen, double t);

CVec semigroup_apply(const Generator& gen, double t, const CVec& f);
Vec semigroup_apply(const Generator& gen, double t, const Vec& f);

// Conservative one-point extension over Omega' = Omega + {infinity}. Vectors
// over Omega' carry the cemetery value in the last slot.
struct CemeterySemigroup {
  Generator base;
};

Vec cemetery_apply(const CemeterySemigroup& cs, double t, const Vec& f_prime);

// Pointwise Cauchy-Schwarz |T(fg)|^2 <= T(|f|^2) T(|g|^2) for a positive
// L^inf contraction given as a matrix.
bool check_pointwise_cs(const Mat& T, const CVec& f, const CVec& g, double tol = 1e-10);

// Detailed-balance samplers: invariants hold by construction.
Generator random_markovian(Rng& rng, int n, double coupling_scale = 1.0);
Generator random_submarkovian(Rng& rng, int n, double coupling_scale = 1.0,
                              double killing_scale = 0.5);
Vec random_weight(Rng& rng, int n, double log_spread);

}  // namespace semiweight
