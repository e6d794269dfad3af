#include "sclaw/cli/app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "sclaw/bounds.hpp"
#include "sclaw/certificates.hpp"
#include "sclaw/cli/config.hpp"
#include "sclaw/cli/output.hpp"
#include "sclaw/errors.hpp"
#include "sclaw/harness.hpp"
#include "sclaw/io.hpp"
#include "sclaw/kinetic.hpp"
#include "sclaw/rate.hpp"
#include "sclaw/solvers.hpp"

namespace sclaw::cli {

namespace {

struct Options {
  std::string command;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

class Console {
 public:
  explicit Console(bool quiet) : quiet_(quiet) {}
  template <class T>
  Console& operator<<(const T& x) {
    if (!quiet_) std::cout << x;
    return *this;
  }

 private:
  bool quiet_;
};

double require_iota(const RunConfig& c) {
  if (!c.harness.iota) throw ConfigError("missing key: harness.iota");
  return *c.harness.iota;
}

OutputDir open_out(const Options& o) { return OutputDir(o.out.empty() ? "sclaw-out" : o.out); }

int cmd_validate(const RunConfig& c, const Options& o, Console& con) {
  const auto flux = c.flux.build();
  const NoiseModel noise(c.noise.modes, c.noise.R_val);
  auto rf = validate_flux(flux, c.noise.R_val, c.noise.lattice_n);
  auto rn = validate_noise(noise, c.noise.R_val, c.noise.lattice_n);
  auto env = validate_gamma_envelope(flux.q0(), c.mollifier.delta, c.noise.R_val);

  std::vector<std::pair<std::string, CertificateEntry>> all;
  for (const auto& e : rf.entries) all.emplace_back("model.flux", e);
  for (const auto& e : rn.entries) all.emplace_back("model.noise", e);
  all.emplace_back("model.flux.q0", env);

  std::string csv = "name,pass,worst_ratio,argmax\n";
  con << "check                 pass   worst_ratio\n";
  for (const auto& [key, e] : all) {
    std::string arg;
    for (std::size_t i = 0; i < e.argmax.size(); ++i) arg += (i ? ";" : "") + format_double(e.argmax[i]);
    csv += e.name + "," + (e.pass ? "true" : "false") + "," + format_double(e.worst_ratio) + "," + arg + "\n";
    std::ostringstream line;
    line.width(22);
    line << std::left << e.name << (e.pass ? "yes    " : "NO     ") << format_double(e.worst_ratio) << "\n";
    con << line.str();
  }
  con << "D0 = " << format_double(rn.D0) << ", D1 = " << format_double(rn.D1) << "\n";
  if (!o.out.empty()) {
    auto out = open_out(o);
    out.write("certificates.csv", csv);
    out.write_manifest(resolved_json(c), c.sim.seed);
  }
  for (const auto& [key, e] : all)
    if (!e.pass) throw ConfigError("invalid value for key: " + key + " (certificate " + e.name + " fails)");
  return kOk;
}

int cmd_simulate(const RunConfig& c, const Options& o, Console& con) {
  const auto m = c.models();
  const auto eta = make_initial(m.initial, TorusGrid(c.sim.cells));
  const auto [u, v] = coupled_pair(eta, c.sim, m.flux, m.noise, 0);
  auto out = open_out(o);
  out.write("u.csv", trajectory_csv(u));
  out.write("v.csv", trajectory_csv(v));
  out.write_manifest(resolved_json(c), c.sim.seed);
  con << "path 0: ||u - v||_L1L1 = " << format_double(l1l1_distance(u, v)) << "\n";
  return kOk;
}

PlotTable eps_log_p_table(const ScanTable& t) {
  PlotTable p{{"epsilon", "eps_log_p"}, {}};
  for (const auto& r : t.rows) p.rows.push_back({r.epsilon, r.eps_log_p});
  return p;
}

void print_scan(const ScanTable& t, Console& con) {
  for (const auto& r : t.rows)
    con << "eps=" << format_double(r.epsilon) << "  hits=" << r.estimate.hits << "/" << r.estimate.n
        << "  p_hat=" << format_double(r.estimate.p_hat) << "  eps*log(p)=" << format_double(r.eps_log_p) << "\n";
}

int cmd_tail(const RunConfig& c, const Options& o, Console& con) {
  const double iota = require_iota(c);
  const double eps = c.sim.epsilon;
  const auto t = exp_equiv_scan(std::span(&eps, 1), iota, c.harness.paths, c.sim, c.models());
  auto out = open_out(o);
  out.write("scan.csv", scan_csv(t));
  out.write("schedule.csv", schedule_csv(t));
  out.write_manifest(resolved_json(c), c.sim.seed);
  print_scan(t, con);
  return kOk;
}

int cmd_scan(const RunConfig& c, const Options& o, Console& con) {
  const double iota = require_iota(c);
  const auto models = c.models();
  const auto t = exp_equiv_scan(c.harness.ladder, iota, c.harness.paths, c.sim, models);
  auto out = open_out(o);
  out.write("scan.csv", scan_csv(t));
  out.write("schedule.csv", schedule_csv(t));
  emit_plot_data(out, PlotKind::eps_log_p, eps_log_p_table(t));
  print_scan(t, con);
  if (!c.harness.moment_p.empty()) {
    const auto mt = moment_scan(c.harness.moment_ladder, c.harness.moment_p, c.harness.moment_paths, c.sim, models);
    out.write("moments.csv", moment_csv(mt));
    out.write("moments_sup.csv", moment_sup_csv(mt));
    PlotTable p{{"epsilon"}, {}};
    for (double q : c.harness.moment_p) p.columns.push_back("u_p" + format_double(q));
    for (double eps : c.harness.moment_ladder) {
      std::vector<double> row{eps};
      for (double q : c.harness.moment_p)
        for (const auto& r : mt.rows)
          if (r.epsilon == eps && r.p == q) row.push_back(r.u_mean);
      p.rows.push_back(row);
    }
    emit_plot_data(out, PlotKind::moment_scan, p);
    for (const auto& s : mt.sup)
      con << "p=" << format_double(s.p) << "  max/min over ladder: u " << format_double(s.u_ratio) << ", v "
          << format_double(s.v_ratio) << "\n";
  }
  out.write_manifest(resolved_json(c), c.sim.seed);
  return kOk;
}

int cmd_scaling(const RunConfig& c, const Options& o, Console& con) {
  if (c.harness.paths < 200) throw ConfigError("invalid value for key: harness.paths (scaling needs >= 200)");
  const auto res = scaling_check(c.sim.epsilon, c.harness.functionals, c.harness.paths, c.sim, c.models());
  auto out = open_out(o);
  out.write("scaling.csv", scaling_csv(res, c.sim.epsilon, c.harness.paths));
  out.write_manifest(resolved_json(c), c.sim.seed);
  for (const auto& r : res)
    con << to_string(r.functional) << ": " << (r.exact_branch ? "exact diff=" : "KS D=")
        << format_double(r.exact_branch ? r.max_abs_diff : r.ks.statistic)
        << (r.exact_branch ? "" : "  p=" + format_double(r.ks.p_value)) << (r.pass() ? "  ok" : "  REJECT") << "\n";
  return kOk;
}

int cmd_doubling(const RunConfig& c, const Options& o, Console& con) {
  const auto m = c.models();
  const MollifierPair moll(c.mollifier.gamma, c.mollifier.delta);
  const TorusGrid grid(c.sim.cells);
  const auto eta = make_initial(m.initial, grid);
  const double eps = c.sim.epsilon;
  const std::size_t nb = c.harness.bound_paths, nm = c.harness.martingale_paths;
  const std::size_t n = std::max(nb, nm);

  std::vector<std::vector<BoundReport>> reports(nb);
  std::vector<MartingaleSample> samples(nm);
  std::optional<std::pair<ScalarField, ScalarField>> endpoint;
  parallel_for(n, default_workers(), [&](std::size_t i) {
    MartingaleAccumulator acc(moll, eps, m.noise, grid);
    CoupledObserver obs;
    if (i < nm)
      obs = [&acc](int s, double t, double dt, const ScalarField& u, const ScalarField& v,
                   std::span<const double> inc) { acc.observe(s, t, dt, u, v, inc); };
    const auto [u, v] = coupled_pair(eta, c.sim, m.flux, m.noise, static_cast<std::uint32_t>(i), obs);
    if (i < nm) samples[i] = {acc.value(), acc.sup_square(), acc.quadratic_variation()};
    if (i < nb) {
      const auto j = bound_check_J(u, v, moll, eps, m.noise, static_cast<std::int64_t>(i));
      reports[i] = {j.j1, j.j2, j.direct, bound_check_I(u, v, moll, eps, m.flux, static_cast<std::int64_t>(i))};
    }
    if (i == 0) endpoint.emplace(u.back(), v.back());
  });

  auto out = open_out(o);
  std::string csv = bound_csv_header() + "\n";
  std::size_t violations = 0;
  for (const auto& rs : reports)
    for (const auto& r : rs) {
      csv += bound_csv_row(r) + "\n";
      violations += !r.pass;
    }
  out.write("bounds.csv", csv);

  const auto mr = martingale_diagnostic(samples);
  out.write("martingale.csv",
            "n,epsilon,gamma,delta,mean,ci_lo,ci_hi,covers_zero,mean_sup_square,mean_qv,ratio,ratio_se,doob_pass\n" +
                std::to_string(mr.n) + "," + format_double(eps) + "," + format_double(moll.gamma()) + "," +
                format_double(moll.delta()) + "," + format_double(mr.mean) + "," + format_double(mr.ci_lo) + "," +
                format_double(mr.ci_hi) + "," + (mr.covers_zero ? "true" : "false") + "," +
                format_double(mr.mean_sup_square) + "," + format_double(mr.mean_qv) + "," + format_double(mr.ratio) +
                "," + format_double(mr.ratio_se) + "," + (mr.doob_pass ? "true" : "false") + "\n");

  PlotTable ladder{{"gamma", "delta", "E", "abs_E", "H1", "H2", "omega"}, {}};
  std::string lcsv = "gamma,delta,E,abs_E,H1,H2,omega\n";
  for (const auto& [g, d] : c.mollifier.ladder) {
    const auto s = error_split(endpoint->first, endpoint->second, MollifierPair(g, d));
    ladder.rows.push_back({g, d, s.E, std::fabs(s.E), s.H1, s.H2, s.omega});
  }
  emit_plot_data(out, PlotKind::error_ladder, ladder);
  out.write_manifest(resolved_json(c), c.sim.seed);

  con << "bound checks: " << nb * 4 - violations << "/" << nb * 4 << " pass\n";
  con << "martingale: mean " << format_double(mr.mean) << " CI [" << format_double(mr.ci_lo) << ", "
      << format_double(mr.ci_hi) << "], sup/qv ratio " << format_double(mr.ratio) << "\n";
  if (violations > 0)
    throw NumericalFailure("doubling: " + std::to_string(violations) + " bound violations (see bounds.csv)");
  return kOk;
}

int cmd_rate(const RunConfig& c, const Options& o, Console& con) {
  if (!c.rate.target) throw ConfigError("missing key: rate.target");
  const auto& tgt = *c.rate.target;
  const NoiseModel noise(c.noise.modes, c.noise.R_val);
  const TorusGrid grid(c.sim.cells);
  const auto eta = make_initial(c.initial, grid);
  const int steps = c.rate.steps;

  Trajectory target(grid);
  if (tgt.kind == "skeleton") {
    if (tgt.control.size() != static_cast<std::size_t>(noise.K()) * tgt.control_bins)
      throw ConfigError("invalid value for key: rate.target.control (needs K*control_bins values)");
    target = solve_skeleton(eta, Control(noise.K(), tgt.control_bins, tgt.control), noise, steps);
  } else {
    const double slope = tgt.kind == "linear_drift" ? tgt.slope : 0.0;
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      std::vector<double> vals(eta.values().begin(), eta.values().end());
      for (double& x : vals) x += slope * t;
      target.append(t, ScalarField(grid, std::move(vals)));
    }
  }
  if (noise.K() < 1) throw ConfigError("missing key: model.noise.modes (rate needs at least one mode)");

  RateOptions opt;
  opt.lambda_ladder = c.rate.lambda_ladder;
  opt.tol_feas = c.rate.tol_feas;
  opt.fd_step = c.rate.fd_step;
  opt.max_iterations = c.rate.max_iterations;
  const auto r = rate_estimate(target, noise.K(), c.rate.bins, opt, noise, eta);

  auto out = open_out(o);
  std::string txt;
  txt += "I_hat: " + format_double(r.I_hat) + "\n";
  txt += "residual: " + format_double(r.residual) + "\n";
  txt += "feasible: " + std::string(r.feasible ? "true" : "false") + "\n";
  txt += "action: " + format_double(action(r.h_opt)) + "\n";
  txt += "tol_feas: " + format_double(opt.tol_feas) + "\n";
  txt += "modes: " + std::to_string(r.h_opt.modes()) + "\n";
  txt += "bins: " + std::to_string(r.h_opt.bins()) + "\n";
  out.write("rate.txt", txt);
  std::string h = "bin,mode,value\n";
  for (int b = 0; b < r.h_opt.bins(); ++b)
    for (int k = 0; k < r.h_opt.modes(); ++k)
      h += std::to_string(b) + "," + std::to_string(k) + "," + format_double(r.h_opt.at(k, b)) + "\n";
  out.write("h_opt.csv", h);
  out.write_manifest(resolved_json(c), c.sim.seed);
  con << txt;
  if (!r.feasible) {
    std::cerr << "rate target infeasible: best residual " << format_double(r.residual) << " > tol_feas\n";
    return kInfeasible;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Stochastic conservation law simulator and diagnostics"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  app.add_option("--config", o.config, "JSON configuration file")->required();
  app.add_option("--out", o.out, "output directory (default: sclaw-out)");
  auto* seed_opt = app.add_option("--seed", seed, "override sim.seed");
  app.add_flag("--quiet", o.quiet, "suppress console summaries");
  for (const char* name : {"validate", "simulate", "tail", "scan", "scaling", "doubling", "rate"})
    app.add_subcommand(name, "")->callback([&o, name] { o.command = name; });
  app.get_subcommand("validate")->description("check the flux and noise certificates");
  app.get_subcommand("simulate")->description("one coupled path, written as u.csv and v.csv");
  app.get_subcommand("tail")->description("tail probability at sim.epsilon");
  app.get_subcommand("scan")->description("tail probabilities over harness.ladder (and moments)");
  app.get_subcommand("scaling")->description("scaling-in-law KS comparison");
  app.get_subcommand("doubling")->description("pathwise bound certificates and martingale diagnostic");
  app.get_subcommand("rate")->description("rate function estimate for rate.target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (seed_opt->count() > 0) o.seed = seed;

  try {
    auto cfg = load_config(o.config);
    if (o.seed) cfg.sim.seed = *o.seed;
    Console con(o.quiet);
    if (o.command == "validate") return cmd_validate(cfg, o, con);
    if (o.command == "simulate") return cmd_simulate(cfg, o, con);
    if (o.command == "tail") return cmd_tail(cfg, o, con);
    if (o.command == "scan") return cmd_scan(cfg, o, con);
    if (o.command == "scaling") return cmd_scaling(cfg, o, con);
    if (o.command == "doubling") return cmd_doubling(cfg, o, con);
    if (o.command == "rate") return cmd_rate(cfg, o, con);
    std::cerr << "unknown command\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace sclaw::cli
