#include "semiweight/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semiweight {

Weight make_weight(Vec w) {
  for (int i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      std::ostringstream os;
      os << "w[" << i << "] = " << w[i];
      throw ValidationError("weights must be strictly positive and finite",
                            {{"NonPositiveWeight", os.str()}});
    }
  }
  Vec winv = w.cwiseInverse();
  return Weight{std::move(w), std::move(winv)};
}

Weight cutoff(const Weight& w, int n) {
  if (n < 1) throw std::invalid_argument("cutoff level must be >= 1");
  const double lo = 1.0 / n, hi = static_cast<double>(n);
  return make_weight(w.w.cwiseMax(lo).cwiseMin(hi));
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> ts;
  if (include_zero) ts.push_back(0.0);
  if (points == 1) {
    ts.push_back(t_min);
  } else {
    const double l0 = std::log(t_min), l1 = std::log(t_max);
    for (int k = 0; k < points; ++k)
      ts.push_back(std::exp(l0 + (l1 - l0) * k / static_cast<double>(points - 1)));
  }
  if (include_infinity) ts.push_back(kTimeInfinity);
  return ts;
}

namespace {

CharacteristicResult characteristic_over(const Generator& gen, const TimeGrid& grid,
                                         const Vec& wv, const Vec& wi, bool cemetery) {
  const int n = gen.size();
  CemeterySemigroup cs{gen};
  Vec wp, wpi;
  if (cemetery) {
    wp.resize(n + 1);
    wpi.resize(n + 1);
    wp.head(n) = wv;
    wp[n] = 1.0;
    wpi.head(n) = wi;
    wpi[n] = 1.0;
  }
  auto value_at = [&](double t) {
    if (cemetery) {
      const Vec a = cemetery_apply(cs, t, wp);
      const Vec b = cemetery_apply(cs, t, wpi);
      return (a.array() * b.array()).maxCoeff();
    }
    const Mat T = semigroup_at(gen, t);
    return ((T * wv).array() * (T * wi).array()).maxCoeff();
  };

  CharacteristicResult res;
  res.value = 0.0;
  const auto ts = grid.times();
  size_t best = 0;
  for (size_t k = 0; k < ts.size(); ++k) {
    const double m = value_at(ts[k]);
    res.curve.emplace_back(ts[k], m);
    if (m > res.value) {
      res.value = m;
      res.argmax_t = ts[k];
      best = k;
    }
  }

  // under-resolution flag from the raw grid, before refinement
  if (best > 0 && best + 1 < ts.size()) {
    const double l = res.curve[best - 1].second, r = res.curve[best + 1].second;
    const double rel =
        std::max(std::abs(res.value - l), std::abs(res.value - r)) / std::max(1.0, res.value);
    if (rel > 1e-4) res.under_resolved = true;
  }

  // zoom around a finite interior argmax so the sup over t is resolved well
  // beyond the grid spacing
  if (std::isfinite(res.argmax_t) && res.argmax_t > 0.0) {
    double lo = res.argmax_t, hi = res.argmax_t;
    if (best > 0 && ts[best - 1] > 0.0) {
      lo = ts[best - 1];
    } else {
      lo = res.argmax_t / 4.0;
    }
    if (best + 1 < ts.size() && std::isfinite(ts[best + 1])) {
      hi = ts[best + 1];
    } else {
      hi = res.argmax_t * 4.0;
    }
    for (int round = 0; round < 4; ++round) {
      const int m_pts = 33;
      double zbest_t = res.argmax_t;
      double zbest_v = res.value;
      int zbest_i = -1;
      for (int i = 0; i < m_pts; ++i) {
        const double t =
            std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (m_pts - 1.0));
        const double v = value_at(t);
        if (v > zbest_v) {
          zbest_v = v;
          zbest_t = t;
          zbest_i = i;
        }
      }
      res.value = zbest_v;
      res.argmax_t = zbest_t;
      if (zbest_i < 0) break;
      const double step = (std::log(hi) - std::log(lo)) / (m_pts - 1.0);
      const double lo_new = std::exp(std::log(zbest_t) - step);
      const double hi_new = std::exp(std::log(zbest_t) + step);
      lo = std::max(lo_new, 1e-300);
      hi = hi_new;
    }
  }

  // t = infinity is an exact endpoint; prefer it when it ties the max.
  if (grid.include_infinity && !res.curve.empty()) {
    const double v_inf = res.curve.back().second;
    if (v_inf >= res.value * (1.0 - 1e-12)) {
      res.value = std::max(res.value, v_inf);
      res.argmax_t = res.curve.back().first;
    }
  }
  return res;
}

}  // namespace

CharacteristicResult q2_characteristic(const Generator& gen, const Weight& w,
                                       const TimeGrid& grid) {
  if (w.size() != gen.size()) throw DimensionMismatch("weight length does not match space");
  return characteristic_over(gen, grid, w.w, w.winv, false);
}

CharacteristicResult q2_tilde_characteristic(const Generator& gen, const Weight& w,
                                             const TimeGrid& grid) {
  if (w.size() != gen.size()) throw DimensionMismatch("weight length does not match space");
  return characteristic_over(gen, grid, w.w, w.winv, true);
}

bool cutoff_monotonicity_check(const Generator& gen, const Weight& w, int n,
                               const TimeGrid& grid, double tol) {
  const double full = q2_characteristic(gen, w, grid).value;
  const double cut = q2_characteristic(gen, cutoff(w, n), grid).value;
  return cut <= full + tol * std::max(1.0, full);
}

DiscreteMetricSpace make_metric_space(MeasureSpace base, Mat dist, double tol) {
  const int n = base.size();
  if (dist.rows() != n || dist.cols() != n)
    throw DimensionMismatch("distance matrix must be n x n");
  std::vector<ValidationIssue> issues;
  const double scale = std::max(1.0, dist.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    if (std::abs(dist(i, i)) > tol * scale) issues.push_back({"NonZeroDiagonal", ""});
    for (int j = 0; j < n; ++j) {
      if (dist(i, j) < -tol * scale) issues.push_back({"NegativeDistance", ""});
      if (std::abs(dist(i, j) - dist(j, i)) > tol * scale) issues.push_back({"NotSymmetric", ""});
      for (int k = 0; k < n; ++k)
        if (dist(i, j) > dist(i, k) + dist(k, j) + tol * scale) {
          issues.push_back({"TriangleInequality", ""});
          i = j = n;  // one witness suffices
          break;
        }
    }
  }
  if (!issues.empty()) throw ValidationError("invalid metric space", issues);

  DiscreteMetricSpace ms{std::move(base), std::move(dist), 1.0};
  // doubling audit over all centers and occurring radii
  for (int i = 0; i < ms.base.size(); ++i) {
    for (int j = 0; j < ms.base.size(); ++j) {
      const double r = ms.dist(i, j);
      if (r <= 0) continue;
      double b1 = 0, b2 = 0;
      for (int k = 0; k < ms.base.size(); ++k) {
        if (ms.dist(i, k) <= r) b1 += ms.base.mu[k];
        if (ms.dist(i, k) <= 2 * r) b2 += ms.base.mu[k];
      }
      ms.doubling_constant = std::max(ms.doubling_constant, b2 / b1);
    }
  }
  return ms;
}

double classical_characteristic(const DiscreteMetricSpace& ms, const Weight& w) {
  const int n = ms.base.size();
  if (w.size() != n) throw DimensionMismatch("weight length does not match space");
  double best = 0.0;
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) order[j] = {ms.dist(i, j), j};
    std::sort(order.begin(), order.end());
    double sw = 0, swi = 0, sm = 0;
    for (int k = 0; k < n; ++k) {
      const int j = order[k].second;
      sw += w.w[j] * ms.base.mu[j];
      swi += ms.base.mu[j] / w.w[j];
      sm += ms.base.mu[j];
      // close the ball: include every point at exactly this radius
      if (k + 1 < n && order[k + 1].first <= order[k].first) continue;
      best = std::max(best, (sw / sm) * (swi / sm));
    }
  }
  return best;
}

CycleSpace make_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  MeasureSpace space = make_space(Vec::Ones(n));
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int l = (i + n - 1) % n, r = (i + 1) % n;
    A(i, l) -= 0.5;
    A(i, r) -= 0.5;
    A(i, i) = -(A(i, l) + A(i, r));
  }
  Mat dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int d = std::abs(i - j);
      dist(i, j) = std::min(d, n - d);
    }
  return CycleSpace{build_generator(space, A, GeneratorKind::markovian),
                    make_metric_space(space, dist)};
}

}  // namespace semiweight
