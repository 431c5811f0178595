#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiweight/measure_semigroup.hpp"
#include "semiweight/rng.hpp"

namespace semiweight {

class DomainViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class CalibrationFailed : public std::runtime_error {
 public:
  CalibrationFailed(std::string what, std::string property, std::string witness)
      : std::runtime_error(std::move(what)),
        property(std::move(property)),
        witness(std::move(witness)) {}
  std::string property;
  std::string witness;
};

struct BellmanPoint {
  std::complex<double> x;
  std::complex<double> y;
  double r = 1.0;
  double s = 1.0;
};

struct BellmanConfig {
  double Q = 16.0;
  double eps = 0.05;
  std::array<double, 6> C{1, 1, 1, 1, 1, 1};
  static constexpr double kQMin = 16.0;
};

// Real gradient in (x1, x2, y1, y2, r, s); the complex derivative convention
// d_x = d_x1 - i d_x2 pairs with it via Re[d_x B . z] = x1 z1 + x2 z2.
struct Gradient6 {
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0, r = 0, s = 0;
};

enum class H4Case { zero, x_over_r, y_over_s, interior };

struct PieceEval {
  double value = 0;
  Gradient6 grad;
};

struct BellmanEval {
  double value = 0;
  Gradient6 grad;
  H4Case active_piece = H4Case::zero;
};

bool in_domain(const BellmanPoint& v, const BellmanConfig& cfg, double slack = 1e-9);

// The six building blocks and their exact gradients. Throws DomainViolation
// outside D_Q^eps.
std::array<PieceEval, 6> eval_pieces(const BellmanPoint& v, const BellmanConfig& cfg);

BellmanEval eval(const BellmanPoint& v, const BellmanConfig& cfg);

// B(V) - B(V0) - dB(V0)(V - V0) - (2/Q)|x - x0||y - y0|
double one_leg_defect(const BellmanPoint& v, const BellmanPoint& v0, const BellmanConfig& cfg);

struct CalibrationCertificate {
  BellmanConfig cfg;
  double size_constant = 0;   // measured sup B / (|x|^2/r + |y|^2/s)
  double sign_margin = 0;     // -max(dB/dr, dB/ds), >= 0 required
  double one_leg_margin = 0;  // min one_leg_defect over pairs, >= 0 required
  double convexity_margin = 0;  // min d2B(dx,dy) - (2/Q)|dx||dy| at interior points
  double error_constant = 0;  // c with Re[dB . V] >= (c/Q)|x||y|, > 0 required
  long samples = 0;
  uint64_t seed = 0;
  int doublings = 0;  // times C1 was doubled
};

// Combination constants at a given ladder level; level 0 is all ones.
std::array<double, 6> calibration_level(int level);

// Walks the geometric ladder of combination constants until every sampled
// property holds with margin; the pair sample mixes random and conical pairs
// so the tight one-leg directions are stressed. Throws CalibrationFailed
// with the first violated property and a witness point if the cap is
// reached.
CalibrationCertificate calibrate_constants(double Q, double eps, long sample_budget,
                                           uint64_t seed);

BellmanPoint sample_domain_point(Rng& rng, const BellmanConfig& cfg, double xy_max = 10.0);

struct DerivativeBoundsReport {
  double l1_dr = 0, l1_ds = 0;        // ||d_r B(f,g,v1,v2)||_L1, same for d_s
  double linf_dr = 0, linf_ds = 0;    // L^inf norms of the same fields
  double l2sq_dx = 0, l2sq_dy = 0;    // ||d_x B||_2^2 summed over x1,x2 (resp. y)
  double data_l2sq = 0;               // ||f||_2^2 + ||g||_2^2 (unweighted)
  double fitted_c = 0;                // max of the L1/L2 quantities over data_l2sq
  double lipschitz_ratio = 0;         // max |delta d_r B| / ((|x|^2+|y|^2)(|dr|+|ds|))
};

DerivativeBoundsReport derivative_bounds_check(const MeasureSpace& space, const CVec& f,
                                               const CVec& g, const Vec& v1, const Vec& v2,
                                               const BellmanConfig& cfg);

}  // namespace semiweight
