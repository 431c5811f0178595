#pragma once

#include <utility>
#include <vector>

#include "semiweight/measure_semigroup.hpp"

namespace semiweight {

struct Weight {
  Vec w;
  Vec winv;  // carried alongside so inverting never re-rounds
  int size() const { return static_cast<int>(w.size()); }
  Weight inverse() const { return Weight{winv, w}; }
};

Weight make_weight(Vec w);

// Entrywise clamp to [1/n, n].
Weight cutoff(const Weight& w, int n);

struct TimeGrid {
  double t_min = 1e-6;
  double t_max = 1e6;
  int points = 257;
  bool include_zero = true;
  bool include_infinity = true;
  std::vector<double> times() const;  // ascending, infinity last
};

struct CharacteristicResult {
  double value = 1.0;
  double argmax_t = 0.0;
  std::vector<std::pair<double, double>> curve;  // (t, max_x T_t w . T_t w^-1)
  bool under_resolved = false;  // argmax at an interior cell with coarse neighbors
};

CharacteristicResult q2_characteristic(const Generator& gen, const Weight& w,
                                       const TimeGrid& grid = {});

// Characteristic of the conservative cemetery extension; w'(inf) = 1 appended.
CharacteristicResult q2_tilde_characteristic(const Generator& gen, const Weight& w,
                                             const TimeGrid& grid = {});

bool cutoff_monotonicity_check(const Generator& gen, const Weight& w, int n,
                               const TimeGrid& grid = {}, double tol = 1e-9);

struct DiscreteMetricSpace {
  MeasureSpace base;
  Mat dist;
  double doubling_constant = 1.0;  // audit: sup mu(B(x,2r)) / mu(B(x,r))
};

DiscreteMetricSpace make_metric_space(MeasureSpace base, Mat dist, double tol = 1e-9);

// sup over closed balls of (avg_B w)(avg_B w^-1); radii run over the distinct
// distances from each center.
double classical_characteristic(const DiscreteMetricSpace& ms, const Weight& w);

// Nearest-neighbour cycle: generator with unit couplings, geodesic distance.
struct CycleSpace {
  Generator gen;
  DiscreteMetricSpace metric;
};
CycleSpace make_cycle(int n);

}  // namespace semiweight
