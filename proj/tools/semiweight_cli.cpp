// Command-line front end: q2 characteristics, Bellman calibration, bilinear
// sweeps, the Hormander counterexample, semigroup matrices and norm sweeps.
// Exit codes: 0 ok, 1 property violation, 2 input/validation error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "semiweight/bellman.hpp"
#include "semiweight/bilinear.hpp"
#include "semiweight/counterexample.hpp"
#include "semiweight/multiplier.hpp"
#include "semiweight/report.hpp"
#include "semiweight/rng.hpp"
#include "semiweight/weights.hpp"

namespace sw = semiweight;
namespace fs = std::filesystem;

namespace {

sw::Json base_report(const std::string& command, uint64_t seed) {
  sw::Json j;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

void write_json(const fs::path& path, const sw::Json& j) {
  sw::write_text_file(path.string(), j.dump(2) + "\n");
}

sw::Json curve_json(const sw::CharacteristicResult& res) {
  sw::Json j;
  j["value"] = res.value;
  j["argmax_t"] = std::isinf(res.argmax_t) ? sw::Json("inf") : sw::Json(res.argmax_t);
  j["under_resolved"] = res.under_resolved;
  sw::Json curve = sw::Json::array();
  for (const auto& [t, v] : res.curve)
    curve.push_back({std::isinf(t) ? sw::Json("inf") : sw::Json(t), v});
  j["curve"] = curve;
  return j;
}

std::string curve_csv(const sw::CharacteristicResult& res) {
  std::ostringstream os;
  os << "t,value\n";
  for (const auto& [t, v] : res.curve)
    os << (std::isinf(t) ? "inf" : sw::format_double(t)) << "," << sw::format_double(v)
       << "\n";
  return os.str();
}

int run_q2(const std::string& gen_path, const std::string& weight_path,
           const std::string& out_dir, bool tilde, double t_min, double t_max, int points,
           uint64_t seed) {
  const sw::Generator gen = sw::load_generator(gen_path);
  const sw::Weight w = sw::load_weight(weight_path);
  sw::TimeGrid grid;
  grid.t_min = t_min;
  grid.t_max = t_max;
  grid.points = points;
  const auto res = tilde ? sw::q2_tilde_characteristic(gen, w, grid)
                         : sw::q2_characteristic(gen, w, grid);
  fs::create_directories(out_dir);
  sw::Json j = base_report(tilde ? "q2-tilde" : "q2", seed);
  j["gen"] = gen_path;
  j["weight"] = weight_path;
  j["grid"] = {{"t_min", t_min}, {"t_max", t_max}, {"points", points}};
  j.update(curve_json(res));
  write_json(fs::path(out_dir) / "q2.json", j);
  sw::write_text_file((fs::path(out_dir) / "curve.csv").string(), curve_csv(res));
  std::cout << (tilde ? "Q~_2" : "Q_2") << " = " << sw::format_double(res.value)
            << " (argmax t = " << (std::isinf(res.argmax_t) ? std::string("inf")
                                                            : sw::format_double(res.argmax_t))
            << ")\n";
  return 0;
}

int run_calibrate(double q, double eps, long samples, uint64_t seed,
                  const std::string& out_dir) {
  if (q < sw::BellmanConfig::kQMin) {
    std::cerr << "error: Q = " << q << " below Q_min = " << sw::BellmanConfig::kQMin << "\n";
    return 2;
  }
  fs::create_directories(out_dir);
  try {
    const auto cert = sw::calibrate_constants(q, eps, samples, seed);
    sw::Json j = base_report("bellman-calibrate", seed);
    j["Q"] = q;
    j["eps"] = eps;
    j["C"] = cert.cfg.C;
    j["margins"] = {{"size", cert.size_constant},
                    {"signs", cert.sign_margin},
                    {"one_leg", cert.one_leg_margin},
                    {"convexity", cert.convexity_margin},
                    {"error", cert.error_constant}};
    j["samples"] = cert.samples;
    j["doublings"] = cert.doublings;
    write_json(fs::path(out_dir) / "certificate.json", j);
    std::cout << "calibrated C1 = " << cert.cfg.C[0]
              << ", error constant = " << sw::format_double(cert.error_constant) << "\n";
    return 0;
  } catch (const sw::CalibrationFailed& e) {
    std::cerr << "calibration failed: property " << e.property << " witness " << e.witness
              << "\n";
    return 1;
  }
}

int run_bilinear(const std::string& gen_path, const std::string& weight_path, long trials,
                 uint64_t seed, const std::string& out_dir, bool submarkovian) {
  const sw::Generator gen = sw::load_generator(gen_path);
  const sw::Weight w = sw::load_weight(weight_path);
  fs::create_directories(out_dir);
  sw::Rng rng(seed);
  sw::Json j = base_report(submarkovian ? "bilinear-submarkovian" : "bilinear", seed);
  j["gen"] = gen_path;
  j["weight"] = weight_path;
  j["trials"] = trials;
  sw::Json rows = sw::Json::array();
  double max_ratio = 0.0;
  bool wrote_curve = false;
  bool violation = false;
  for (long k = 0; k < trials; ++k) {
    sw::CVec f(gen.size()), g(gen.size());
    for (int i = 0; i < gen.size(); ++i) {
      f[i] = std::complex<double>(rng.normal(), rng.normal());
      g[i] = std::complex<double>(rng.normal(), rng.normal());
    }
    sw::Json row;
    if (submarkovian) {
      const auto rep = sw::submarkovian_bilinear_check(gen, w, f, g);
      row["q2_tilde"] = rep.q2_tilde;
      row["Q"] = 4.0 * rep.q2_tilde;
      row["integral"] = rep.integral;
      row["ratio"] = rep.bound_ratio;
      row["min_correction"] = rep.min_correction;
      row["energy_monotone"] = rep.energy_monotone;
      max_ratio = std::max(max_ratio, rep.bound_ratio);
      if (!rep.energy_monotone || rep.min_correction < -1e-12) violation = true;
    } else {
      const auto inst = sw::make_instance(gen, w, f, g);
      const double integral = sw::bilinear_integral(inst.gen, f, g);
      const double nf = sw::weighted_l2_norm(gen.space, f, w.w);
      const double ng = sw::weighted_l2_norm(gen.space, g, w.winv);
      const double ratio = integral / std::max(inst.q2 * nf * ng, 1e-300);
      row["q2"] = inst.q2;
      row["Q"] = inst.cfg.Q;
      row["integral"] = integral;
      row["lhs"] = integral;
      row["rhs"] = inst.q2 * nf * ng;
      row["ratio"] = ratio;
      max_ratio = std::max(max_ratio, ratio);
      if (!wrote_curve) {
        sw::TimeGrid eg;
        eg.t_min = 1e-4;
        eg.t_max = 1e3;
        eg.points = 81;
        eg.include_zero = false;
        eg.include_infinity = false;
        const auto curve = sw::energy_curve(inst, eg.times());
        std::ostringstream os;
        os << "t,E,dE_analytic,dE_fd,integrand\n";
        for (size_t i = 0; i < curve.t.size(); ++i)
          os << sw::format_double(curve.t[i]) << "," << sw::format_double(curve.energy[i])
             << "," << sw::format_double(curve.neg_dE[i]) << ","
             << sw::format_double(curve.neg_dE_fd[i]) << ","
             << sw::format_double(curve.bracket_abs[i]) << "\n";
        sw::write_text_file((fs::path(out_dir) / "curve.csv").string(), os.str());
        row["curve_file"] = "curve.csv";
        wrote_curve = true;
      }
    }
    row["instance_hash"] = sw::content_hash(row.dump());
    rows.push_back(row);
  }
  j["max_ratio"] = max_ratio;
  j["violation_found"] = violation;
  j["instances"] = rows;
  write_json(fs::path(out_dir) / "report.json", j);
  std::cout << "bilinear sweep: " << trials << " trials, max ratio = "
            << sw::format_double(max_ratio) << (violation ? " (violation found)" : "")
            << "\n";
  return violation ? 1 : 0;
}

int run_counterexample(const std::string& phi_list, double r, int s_max,
                       const std::string& out_dir) {
  std::vector<double> phis;
  std::stringstream ss(phi_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) phis.push_back(std::stod(tok));
  const auto rep = sw::hormander_failure_experiment(phis, r, s_max);
  fs::create_directories(out_dir);
  std::ostringstream os;
  os << "phi,tan2,N,log_norm,q2,eps_sq_sum,fit_residual\n";
  for (const auto& p : rep.points) {
    const double resid = p.log_norm - (rep.intercept + rep.slope * p.tan2);
    os << sw::format_double(p.phi) << "," << sw::format_double(p.tan2) << "," << p.factors
       << "," << sw::format_double(p.log_norm) << "," << sw::format_double(p.q2) << ","
       << sw::format_double(p.eps_sq_sum) << "," << sw::format_double(resid) << "\n";
  }
  sw::write_text_file((fs::path(out_dir) / "points.csv").string(), os.str());
  sw::Json j = base_report("counterexample", 0);
  j["phis"] = phis;
  j["r"] = r;
  j["s_max"] = s_max;
  j["hormander_fails"] = rep.hormander_fails;
  j["fitted_c"] = rep.fitted_c;
  j["uniform_Q"] = rep.uniform_q_bound;
  j["q2_uniform_ok"] = rep.q2_uniform_ok;
  j["growth_ok"] = rep.growth_ok;
  j["no_polynomial_fit"] = rep.no_polynomial_fit;
  j["fit_r2"] = rep.fit_r2;
  j["slope"] = rep.slope;
  j["exp_model_max_residual"] = rep.exp_model_max_residual;
  j["power_model_max_residual"] = rep.power_model_max_residual;
  j["warning_large_r"] = rep.warning_large_r;
  write_json(fs::path(out_dir) / "verdict.json", j);
  std::cout << "hormander_fails = " << (rep.hormander_fails ? "true" : "false")
            << ", fitted c = " << sw::format_double(rep.fitted_c)
            << (rep.warning_large_r ? " (warning: r too large)" : "") << "\n";
  return 0;
}

int run_matrix(const std::string& gen_path, double t, const std::string& out_file) {
  const sw::Generator gen = sw::load_generator(gen_path);
  sw::write_text_file(out_file, sw::matrix_to_csv(sw::semigroup_at(gen, t)));
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

int run_sweep(const std::string& kind, double j_param, double eps, double r,
              const std::string& params_json, const std::string& out_file) {
  if (!params_json.empty()) {
    const sw::Json p = sw::Json::parse(params_json);
    if (p.contains("j")) j_param = p.at("j").get<double>();
    if (p.contains("eps")) eps = p.at("eps").get<double>();
    if (p.contains("r")) r = p.at("r").get<double>();
  }
  std::ostringstream os;
  if (kind == "besov") {
    os << "t,norm\n";
    for (double t = 1.0; t <= 1000.0 * 1.0001; t *= std::pow(1000.0, 1.0 / 12.0))
      os << sw::format_double(t) << ","
         << sw::format_double(sw::hinfty_besov_norm(j_param, eps, t).value) << "\n";
  } else if (kind == "gamma") {
    os << "eps,l1\n";
    for (double e = 1e-3; e <= 0.1 * 1.0001; e *= std::pow(100.0, 1.0 / 8.0))
      os << sw::format_double(e) << "," << sw::format_double(sw::gamma_kernel_l1(e).l1)
         << "\n";
  } else if (kind == "hormander") {
    os << "phi,value\n";
    const int s = static_cast<int>(j_param);
    for (double phi = 0.6; phi < 1.55; phi += 0.05) {
      const auto m = sw::Multiplier::exp_fn(
          r * std::complex<double>(std::cos(phi), std::sin(phi)));
      os << sw::format_double(phi) << "," << sw::format_double(sw::hormander_norm(m, s))
         << "\n";
    }
  } else {
    std::cerr << "unknown sweep kind " << kind << "\n";
    return 2;
  }
  sw::write_text_file(out_file, os.str());
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted-L2 semigroup calculus laboratory"};
  app.require_subcommand(1);

  std::string gen_path, weight_path, out_dir = "out", out_file = "sweep.csv";
  std::string phi_list = "1.1071487177940904,1.3258176636680326,1.4464413322481351,1.5083775167989393";
  std::string sweep_kind = "besov";
  uint64_t seed = 1;
  double q = 16.0, eps = 0.05, r = 1e-3, t = 1.0, t_min = 1e-6, t_max = 1e6;
  double j_param = 2.0;
  int points = 257, s_max = 16;
  long trials = 16, samples = 100000;
  bool tilde = false, submarkovian = false;

  auto* q2cmd = app.add_subcommand("q2", "semigroup weight characteristic");
  q2cmd->add_option("--gen", gen_path)->required();
  q2cmd->add_option("--weight", weight_path)->required();
  q2cmd->add_option("--out", out_dir);
  q2cmd->add_flag("--tilde", tilde);
  q2cmd->add_option("--tmin", t_min);
  q2cmd->add_option("--tmax", t_max);
  q2cmd->add_option("--points", points);
  q2cmd->add_option("--seed", seed);

  auto* cal = app.add_subcommand("bellman-calibrate", "calibrate Bellman constants");
  cal->add_option("--q", q);
  cal->add_option("--eps", eps);
  cal->add_option("--samples", samples);
  cal->add_option("--seed", seed);
  cal->add_option("--out", out_dir);

  auto* bil = app.add_subcommand("bilinear", "bilinear estimate sweep");
  bil->add_option("--gen", gen_path)->required();
  bil->add_option("--weight", weight_path)->required();
  bil->add_option("--trials", trials);
  bil->add_option("--seed", seed);
  bil->add_option("--out", out_dir);
  bil->add_flag("--submarkovian", submarkovian);

  auto* ce = app.add_subcommand("counterexample", "Hormander failure experiment");
  ce->add_option("--phis", phi_list);
  ce->add_option("--r", r);
  ce->add_option("--smax", s_max);
  ce->add_option("--out", out_dir);

  auto* mx = app.add_subcommand("matrix", "emit exp(-tA) as CSV");
  mx->add_option("--gen", gen_path)->required();
  mx->add_option("--t", t);
  mx->add_option("--out", out_file);

  std::string sweep_params;
  auto* sw_cmd = app.add_subcommand("sweep", "norm sweeps as CSV");
  sw_cmd->add_option("--kind", sweep_kind);
  sw_cmd->add_option("--j", j_param);
  sw_cmd->add_option("--eps", eps);
  sw_cmd->add_option("--r", r);
  sw_cmd->add_option("--params", sweep_params, "JSON overrides for the family parameters");
  sw_cmd->add_option("--out", out_file);

  CLI11_PARSE(app, argc, argv);

  try {
    if (q2cmd->parsed())
      return run_q2(gen_path, weight_path, out_dir, tilde, t_min, t_max, points, seed);
    if (cal->parsed()) return run_calibrate(q, eps, samples, seed, out_dir);
    if (bil->parsed())
      return run_bilinear(gen_path, weight_path, trials, seed, out_dir, submarkovian);
    if (ce->parsed()) return run_counterexample(phi_list, r, s_max, out_dir);
    if (mx->parsed()) return run_matrix(gen_path, t, out_file);
    if (sw_cmd->parsed()) return run_sweep(sweep_kind, j_param, eps, r, sweep_params, out_file);
  } catch (const sw::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const sw::DimensionMismatch& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const sw::DomainViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
