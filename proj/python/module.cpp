#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semiweight/bellman.hpp"
#include "semiweight/bilinear.hpp"
#include "semiweight/counterexample.hpp"
#include "semiweight/multiplier.hpp"
#include "semiweight/weights.hpp"

namespace py = pybind11;
using namespace semiweight;

namespace {

Generator make_generator(const Vec& mu, const Mat& a, const std::string& kind) {
  const GeneratorKind k =
      kind == "submarkovian" ? GeneratorKind::submarkovian : GeneratorKind::markovian;
  return build_generator(make_space(mu), a, k);
}

Multiplier multiplier_from(const std::string& family, std::complex<double> z, double J,
                           double eps, double t, double c) {
  if (family == "constant") return Multiplier::constant_fn(c);
  if (family == "exp") return Multiplier::exp_fn(z);
  if (family == "resolvent_heat") return Multiplier::resolvent_heat_fn(J, eps, t);
  throw std::invalid_argument("unknown multiplier family " + family);
}

}  // namespace

PYBIND11_MODULE(semiweight, m) {
  m.doc() = "markovian semigroups, weight characteristics, Bellman machinery and the "
            "two-point tensor counterexample on weighted L2 spaces";

  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<DomainViolation>(m, "DomainViolation");
  py::register_exception<CalibrationFailed>(m, "CalibrationFailed");

  py::class_<Generator>(m, "Generator")
      .def_property_readonly("n", &Generator::size)
      .def_property_readonly("mu", [](const Generator& g) { return g.space.mu; })
      .def_property_readonly("A", [](const Generator& g) { return g.A; })
      .def_property_readonly("eigenvalues",
                             [](const Generator& g) { return g.spec.eigenvalues; })
      .def_property_readonly("eigenvectors",
                             [](const Generator& g) { return g.spec.eigenvectors; });

  m.def("build_generator", &make_generator, py::arg("mu"), py::arg("A"),
        py::arg("kind") = "markovian");
  m.def("semigroup_at",
        [](const Generator& g, double t) { return semigroup_at(g, t); });
  m.def("cemetery_apply", [](const Generator& g, double t, const Vec& fp) {
    return cemetery_apply(CemeterySemigroup{g}, t, fp);
  });
  m.def("check_pointwise_cs",
        [](const Mat& T, const CVec& f, const CVec& g) { return check_pointwise_cs(T, f, g); });

  m.def("cutoff", [](const Vec& w, int n) { return cutoff(make_weight(w), n).w; });
  m.def(
      "q2_characteristic",
      [](const Generator& g, const Vec& w) {
        const auto res = q2_characteristic(g, make_weight(w));
        return py::make_tuple(res.value, res.argmax_t, res.curve);
      },
      "returns (value, argmax_t, curve)");
  m.def("q2_tilde_characteristic", [](const Generator& g, const Vec& w) {
    return q2_tilde_characteristic(g, make_weight(w)).value;
  });
  m.def("classical_characteristic", [](const Vec& mu, const Mat& dist, const Vec& w) {
    return classical_characteristic(make_metric_space(make_space(mu), dist), make_weight(w));
  });

  py::class_<BellmanEval>(m, "BellmanEval")
      .def_readonly("value", &BellmanEval::value)
      .def_property_readonly("gradient", [](const BellmanEval& e) {
        return py::make_tuple(e.grad.x1, e.grad.x2, e.grad.y1, e.grad.y2, e.grad.r, e.grad.s);
      });
  m.def(
      "bellman_eval",
      [](std::complex<double> x, std::complex<double> y, double r, double s, double Q,
         double eps) {
        BellmanConfig cfg;
        cfg.Q = Q;
        cfg.eps = eps;
        return eval(BellmanPoint{x, y, r, s}, cfg);
      },
      py::arg("x"), py::arg("y"), py::arg("r"), py::arg("s"), py::arg("Q") = 16.0,
      py::arg("eps") = 0.05);
  m.def(
      "one_leg_defect",
      [](std::complex<double> x, std::complex<double> y, double r, double s,
         std::complex<double> x0, std::complex<double> y0, double r0, double s0, double Q,
         double eps) {
        BellmanConfig cfg;
        cfg.Q = Q;
        cfg.eps = eps;
        return one_leg_defect(BellmanPoint{x, y, r, s}, BellmanPoint{x0, y0, r0, s0}, cfg);
      },
      py::arg("x"), py::arg("y"), py::arg("r"), py::arg("s"), py::arg("x0"), py::arg("y0"),
      py::arg("r0"), py::arg("s0"), py::arg("Q") = 16.0, py::arg("eps") = 0.05);
  m.def(
      "calibrate_constants",
      [](double Q, double eps, long samples, uint64_t seed) {
        const auto cert = calibrate_constants(Q, eps, samples, seed);
        py::dict d;
        d["C"] = cert.cfg.C;
        d["size"] = cert.size_constant;
        d["signs"] = cert.sign_margin;
        d["one_leg"] = cert.one_leg_margin;
        d["convexity"] = cert.convexity_margin;
        d["error"] = cert.error_constant;
        d["samples"] = cert.samples;
        d["seed"] = cert.seed;
        return d;
      },
      py::arg("Q") = 16.0, py::arg("eps") = 0.05, py::arg("samples") = 100000,
      py::arg("seed") = 1);

  m.def("one_step_inequality",
        [](const Mat& T, const Vec& mu, const CVec& f, const CVec& g, const Vec& v1,
           const Vec& v2, double Q, double eps) {
          BellmanConfig cfg;
          cfg.Q = Q;
          cfg.eps = eps;
          const auto res = one_step_inequality(T, make_space(mu), f, g, v1, v2, cfg);
          return py::make_tuple(res.lhs, res.rhs_bracket, res.ratio);
        });
  m.def("energy_curve", [](const Generator& gen, const Vec& w, const CVec& f, const CVec& g,
                           const std::vector<double>& ts) {
    const auto inst = make_instance(gen, make_weight(w), f, g);
    const auto c = energy_curve(inst, ts);
    py::dict d;
    d["t"] = c.t;
    d["E"] = c.energy;
    d["neg_dE"] = c.neg_dE;
    d["neg_dE_fd"] = c.neg_dE_fd;
    d["bracket"] = c.bracket_abs;
    return d;
  });
  m.def("bilinear_integral", [](const Generator& gen, const CVec& f, const CVec& g) {
    return bilinear_integral(gen, f, g);
  });
  m.def("submarkovian_bilinear_check",
        [](const Generator& gen, const Vec& w, const CVec& f, const CVec& g) {
          const auto rep = submarkovian_bilinear_check(gen, make_weight(w), f, g);
          py::dict d;
          d["q2_tilde"] = rep.q2_tilde;
          d["integral"] = rep.integral;
          d["bound_ratio"] = rep.bound_ratio;
          d["min_correction"] = rep.min_correction;
          d["energy_monotone"] = rep.energy_monotone;
          return d;
        });

  m.def(
      "apply_multiplier",
      [](const Generator& gen, const std::string& family, std::complex<double> z, double J,
         double eps, double t, double c) {
        return apply_multiplier(gen, multiplier_from(family, z, J, eps, t, c));
      },
      py::arg("gen"), py::arg("family"), py::arg("z") = std::complex<double>(1.0, 0.0),
      py::arg("J") = 0.0, py::arg("eps") = 0.0, py::arg("t") = 0.0, py::arg("c") = 1.0);
  m.def("weighted_operator_norm", [](const CMat& M, const Vec& w, const Vec& mu) {
    const auto res = weighted_operator_norm(M, make_weight(w), make_space(mu));
    return py::make_tuple(res.value, res.extremal);
  });
  m.def("hinfty_besov_norm",
        [](double J, double eps, double t) { return hinfty_besov_norm(J, eps, t).value; });
  m.def("gamma_kernel_l1", [](double eps) {
    const auto res = gamma_kernel_l1(eps);
    return py::make_tuple(res.l1, res.envelope_c);
  });
  m.def(
      "hormander_norm",
      [](const std::string& family, std::complex<double> z, double c, int s) {
        return hormander_norm(multiplier_from(family, z, 0, 0, 0, c), s);
      },
      py::arg("family"), py::arg("z") = std::complex<double>(1.0, 0.0), py::arg("c") = 1.0,
      py::arg("s") = 2);

  m.def("two_point_weighted_norm_exact",
        [](double v, std::complex<double> z) { return two_point_weighted_norm_exact({v, z}); });
  m.def("d_gamma", [](std::complex<double> g) { return d_gamma(g); });
  m.def("asymptotic_check",
        [](double phi, double r, const std::vector<double>& sweep) {
          const auto res = asymptotic_check(phi, r, sweep);
          return py::make_tuple(res.measured, res.paper_coefficient, res.deviation);
        });
  m.def("tensor_norm", [](const std::vector<double>& eps_k, std::complex<double> z) {
    return tensor_norm(TensorSemigroup{eps_k}, z);
  });
  m.def("tensor_q2",
        [](const std::vector<double>& eps_k) { return tensor_q2(TensorSemigroup{eps_k}); });
  m.def("hormander_failure_experiment",
        [](const std::vector<double>& phis, double r, int s_max) {
          const auto rep = hormander_failure_experiment(phis, r, s_max);
          py::dict d;
          d["hormander_fails"] = rep.hormander_fails;
          d["fitted_c"] = rep.fitted_c;
          d["uniform_Q"] = rep.uniform_q_bound;
          d["slope"] = rep.slope;
          d["fit_r2"] = rep.fit_r2;
          d["q2_uniform_ok"] = rep.q2_uniform_ok;
          d["no_polynomial_fit"] = rep.no_polynomial_fit;
          d["warning_large_r"] = rep.warning_large_r;
          py::list pts;
          for (const auto& p : rep.points) {
            py::dict pd;
            pd["phi"] = p.phi;
            pd["tan2"] = p.tan2;
            pd["N"] = p.factors;
            pd["log_norm"] = p.log_norm;
            pd["q2"] = p.q2;
            pts.append(pd);
          }
          d["points"] = pts;
          return d;
        },
        py::arg("phis"), py::arg("r") = 1e-3, py::arg("s_max") = 16);
}
