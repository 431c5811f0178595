#pragma once

#include <vector>

#include "semiweight/bellman.hpp"
#include "semiweight/measure_semigroup.hpp"
#include "semiweight/weights.hpp"

namespace semiweight {

class QuadratureNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Theorem-normalised instance: v = 2 w^{-1}, Q = 4 Q_2^A(w), eps from the
// weight bounds, so eps <= v, w <= 1/eps and 2 <= T_t v . T_t w <= Q/2.
struct BilinearInstance {
  Generator gen;
  Weight w;
  CVec f, g;
  Vec v;
  double q2 = 1.0;
  BellmanConfig cfg;
};

BilinearInstance make_instance(Generator gen, Weight w, CVec f, CVec g,
                               const TimeGrid& grid = {});

struct OneStepResult {
  double lhs = 0;          // |<(Id - T) f, g>_mu|
  double rhs_bracket = 0;  // Re integral of dB against the four increments
  double ratio = 0;        // lhs / (Q . rhs_bracket)
};

OneStepResult one_step_inequality(const Mat& T, const MeasureSpace& space, const CVec& f,
                                  const CVec& g, const Vec& v1, const Vec& v2,
                                  const BellmanConfig& cfg);

// Two-point space {a, b}, nu = (1,1), generator G = [[1,-1],[-1,1]].
OneStepResult toy_two_point_inequality(const CVec& f, const CVec& g, const Vec& v1,
                                       const Vec& v2, const BellmanConfig& cfg);

struct EnergyCurve {
  std::vector<double> t;
  std::vector<double> energy;       // E(t)
  std::vector<double> neg_dE;       // -E'(t), analytic formula
  std::vector<double> neg_dE_fd;    // central finite difference of E
  std::vector<double> bracket_abs;  // |<A T_t f, T_t g>_mu|
};

EnergyCurve energy_curve(const BilinearInstance& inst, const std::vector<double>& ts);

struct QuadratureSpec {
  double tail_tol = 1e-12;  // relative to the analytic whole-line bound
  double quad_tol = 1e-11;
  int max_windows = 240;
  int max_depth = 28;
};

// Integral over (0, infinity) of |<A T_t f, T_t g>_mu| dt.
double bilinear_integral(const Generator& gen, const CVec& f, const CVec& g,
                         const QuadratureSpec& spec = {});

struct SubmarkovianReport {
  double q2_tilde = 1.0;
  double integral = 0.0;
  double norm_f = 0.0;      // ||f||_{L^2(w dmu)}
  double norm_g = 0.0;      // ||g||_{L^2(w^-1 dmu)}
  double bound_ratio = 0.0;  // integral / (q2_tilde . norm_f . norm_g)
  double min_correction = 0.0;  // min over grid/points of the cemetery term
  bool energy_monotone = true;
  double max_energy_increase = 0.0;
};

// Energy chain for a submarkovian generator with S_t-transported weights and
// the cemetery-corrected derivative; reduces to the markovian chain when the
// generator is conservative.
SubmarkovianReport submarkovian_bilinear_check(const Generator& gen, const Weight& w,
                                               const CVec& f, const CVec& g,
                                               const std::vector<double>& ts = {});

double weighted_l2_norm(const MeasureSpace& space, const CVec& f, const Vec& w);

}  // namespace semiweight
