#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/version.hpp>

#include "io.hpp"
#include "plshoot/bounds.hpp"
#include "plshoot/error.hpp"
#include "plshoot/polar.hpp"
#include "plshoot/powers.hpp"
#include "plshoot/ptrig.hpp"
#include "plshoot/shoot.hpp"
#include "plshoot/version.hpp"

namespace plshoot::cli {

using nlohmann::json;

namespace {

std::string header(const RunConfig& cfg) { return "# config_hash=" + hex64(fnv1a64(canonical(cfg))) + "\n"; }

json stamped(const RunConfig& cfg) {
  json j = json::object();
  j["config_hash"] = hex64(fnv1a64(canonical(cfg)));
  return j;
}

ProblemParams params_of(const RunConfig& cfg, double r_max) {
  ProblemParams pp;
  pp.N = cfg.N;
  pp.p = cfg.p;
  pp.lambda = cfg.lambda.value_or(1.0);
  pp.r_max = r_max;
  pp.tol = cfg.tol;
  return pp;
}

double first_seed(const Nonlinearity& nl, double p, double N) {
  return landmarks(nl, p, N).A * SearchOptions{}.grid_ratio;
}

double resolve_r_max(const RunConfig& cfg, const Nonlinearity& nl, double lambda_ref) {
  if (cfg.r_max) return *cfg.r_max;
  return default_r_max(nl, cfg.p, cfg.N, lambda_ref, cfg.theta_growth, barrier(nl, cfg.p));
}

std::string trajectory_csv(const RunConfig& cfg, const Trajectory& traj) {
  const double q = traj.p() / (traj.p() - 1.0);
  const AngularTrace trace = track_angle(traj);
  std::string out = header(cfg) + "r,u,uprime,v,E,rho,theta\n";
  const auto& S = traj.samples();
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Sample& s = S[i];
    out += fmt(s.state.r) + "," + fmt(s.state.u) + "," + fmt(phi(s.state.v, q)) + "," + fmt(s.state.v) + "," +
           fmt(s.E) + ",";
    // Polar columns stay empty past the rho floor.
    if (i < trace.samples.size()) out += fmt(trace.samples[i].rho) + "," + fmt(trace.samples[i].theta);
    else out += ",";
    out += "\n";
  }
  return out;
}

json events_json(const Trajectory& traj) {
  json arr = json::array();
  for (const Event& e : traj.events()) {
    arr.push_back({{"kind", to_string(e.kind)}, {"r", num(e.r)}, {"u", num(e.state.u)}, {"v", num(e.state.v)},
                   {"E", num(e.E)}});
  }
  return arr;
}

std::string cmd_solve(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  const ProblemParams pp = params_of(cfg, resolve_r_max(cfg, nl, *cfg.lambda));
  const Trajectory traj = integrate(pp, nl);
  sink("trajectory.csv", trajectory_csv(cfg, traj));
  json j = stamped(cfg);
  j["lambda"] = num(pp.lambda);
  j["r_max"] = num(pp.r_max);
  j["stop_reason"] = to_string(traj.stop_reason());
  j["r_end"] = num(traj.r_end());
  j["simple_zeros"] = traj.count(EventKind::SimpleZero);
  j["closest_approach"] = num(traj.closest_approach());
  j["events"] = events_json(traj);
  sink("events.json", dump(j));
  std::ostringstream os;
  os << "solve: lambda = " << fmt(pp.lambda) << ", stop = " << to_string(traj.stop_reason())
     << ", zeros = " << traj.count(EventKind::SimpleZero);
  return os.str();
}

std::string cmd_sweep(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  const ProblemParams pp = params_of(cfg, resolve_r_max(cfg, nl, cfg.lambda_grid.back()));
  SweepOptions so;
  so.refine = cfg.refine;
  const auto rows = sweep(cfg.lambda_grid, pp, nl, so);
  std::string csv = header(cfg) + "lambda,kind,k,r_energy_zero,r_support\n";
  int flagged = 0;
  for (const SweepRow& row : rows) {
    const ShootClass& c = row.cls;
    csv += fmt(c.lambda) + "," + to_string(c.kind) + "," + std::to_string(c.k) + "," + fmt(c.r_energy_zero) + "," +
           (c.r_support ? fmt(*c.r_support) : std::string()) + "\n";
    flagged += row.needs_refinement ? 1 : 0;
  }
  sink("sweep.csv", csv);
  std::ostringstream os;
  os << "sweep: " << rows.size() << " shots, " << flagged << " unresolved node jumps";
  return os.str();
}

json support_json(const SupportCheck& c) {
  return {{"conclusive", c.conclusive}, {"pass", c.pass},           {"R", num(c.R)},
          {"bound", num(c.bound)},      {"r_support", num(c.r_support)}, {"margin", num(c.margin)},
          {"max_u_beyond", num(c.max_u_beyond)}, {"note", c.note}};
}

std::string cmd_find_nodes(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  const BarrierProfile bar = barrier(nl, cfg.p);
  const double r_max = cfg.r_max ? *cfg.r_max
                                 : default_r_max(nl, cfg.p, cfg.N, first_seed(nl, cfg.p, cfg.N), cfg.theta_growth, bar);
  const ProblemParams pp = params_of(cfg, r_max);
  const NodeSolution sol = find_lambda_k(*cfg.k, pp, nl);
  const SupportCheck check = support_upper_check(sol, bar, std::nullopt, cfg.tol.double_zero_tol);

  json j = stamped(cfg);
  j["k"] = sol.k;
  j["lambda_k"] = num(sol.lambda_k);
  j["bracket"] = {num(sol.bracket_lo), num(sol.bracket_hi)};
  j["r_support"] = num(sol.r_support);
  j["r_max"] = num(r_max);
  j["near_Ik"] = sol.near_Ik;
  j["closest_approach"] = num(sol.closest_approach);
  j["E_support"] = num(sol.E_support);
  j["bisection_steps"] = sol.bisection_steps;
  j["simple_zeros"] = sol.trajectory->count(EventKind::SimpleZero);
  j["support_check"] = support_json(check);
  j["note"] = sol.note;
  sink("node_solution.json", dump(j));
  sink("trajectory.csv", trajectory_csv(cfg, *sol.trajectory));

  std::ostringstream os;
  os << "find-nodes: k = " << sol.k << ", lambda_k = " << fmt(sol.lambda_k) << ", r_support = " << fmt(sol.r_support)
     << (sol.near_Ik ? " (near I_k only)" : "");
  return os.str();
}

std::string cmd_certify_rotation(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  const RotationCertificate cert = rotation_constants(nl, cfg.p, cfg.N, cfg.omega);
  json j = stamped(cfg);
  j["omega"] = num(cert.omega);
  j["s0"] = num(cert.s0);
  j["r0"] = num(cert.r0);
  j["sigma0"] = num(cert.sigma0);
  j["sup_f"] = num(cert.sup_f);
  std::ostringstream os;
  os << "certify-rotation: r0 = " << fmt(cert.r0) << ", sigma0 = " << fmt(cert.sigma0);
  if (cfg.lambda) {
    const double pi_p = half_period(PExponent(cfg.p));
    const double r_max = cfg.r_max ? *cfg.r_max : cert.r0 + pi_p / cert.omega;
    IntegrateOptions io;
    io.stop_on_trap = false;
    const Trajectory traj = integrate(params_of(cfg, r_max), nl, io);
    const AngularTrace trace = track_angle(traj);
    const auto violations = check_rotation_bound(trace, cert, cfg.p);
    const double rho_min = std::pow(cert.sigma0, cfg.p);
    std::size_t in_region = 0;
    for (const AngleSample& s : trace.samples) in_region += (s.r >= cert.r0 && s.rho >= rho_min) ? 1 : 0;
    json v = json::array();
    for (const auto& x : violations) v.push_back({{"r", num(x.r)}, {"rho", num(x.rho)}, {"dtheta", num(x.dtheta)}});
    j["check"] = {{"lambda", num(*cfg.lambda)},
                  {"r_max", num(r_max)},
                  {"samples_in_region", in_region},
                  {"violations", v},
                  {"angle_warnings", trace.warnings.size()},
                  {"truncated", trace.truncated}};
    os << ", lambda = " << fmt(*cfg.lambda) << ": " << in_region << " samples in region, " << violations.size()
       << " violations";
  }
  sink("certificate.json", dump(j));
  return os.str();
}

std::string cmd_barrier(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  const BarrierOptions opts;
  const BarrierProfile bar = barrier(nl, cfg.p, opts);
  json j = stamped(cfg);
  j["A_time"] = num(bar.A_time());
  j["B_time"] = num(bar.B_time());
  j["a"] = num(bar.a());
  j["b"] = num(bar.b());
  j["panels"] = opts.panels;
  j["substitution_exponent"] = num(bar.substitution_exponent());
  sink("barrier.json", dump(j));
  std::string csv = header(cfg) + "r,u_bar,u_bar_prime\n";
  for (const auto& [r, u] : bar.nodes()) csv += fmt(r) + "," + fmt(u) + "," + fmt(bar.u_bar_prime(r)) + "\n";
  sink("barrier_profile.csv", csv);
  return "barrier: A = " + fmt(bar.A_time()) + ", B = " + fmt(bar.B_time());
}

std::string cmd_size_bounds(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  std::vector<double> lambdas = cfg.lambda_grid;
  if (cfg.lambda) lambdas.insert(lambdas.begin(), *cfg.lambda);
  json arr = json::array();
  int failures = 0;
  for (double lam : lambdas) {
    const SizeBounds sb = size_bounds(lam, cfg.theta_growth, nl, cfg.p, cfg.N);
    ProblemParams pp = params_of(cfg, resolve_r_max(cfg, nl, lam));
    pp.lambda = lam;
    const Trajectory traj = integrate(pp, nl);
    std::optional<double> r_support;
    if (traj.stop_reason() == StopReason::DoubleZero) r_support = traj.events().back().r;
    const BoundReport rep = bound_report(sb, traj, r_support);
    failures += rep.pass ? 0 : 1;
    arr.push_back({{"lambda", num(rep.lambda)},
                   {"S_lo", num(rep.S_lo)},
                   {"S_measured", rep.S_measured ? num(*rep.S_measured) : json(nullptr)},
                   {"S_hi", num(rep.S_hi)},
                   {"r_support_lo", num(rep.r_support_lo)},
                   {"r_support_measured", rep.r_support_measured ? num(*rep.r_support_measured) : json(nullptr)},
                   {"pass", rep.pass},
                   {"C", num(sb.C)},
                   {"formula", sb.formula}});
  }
  json j = stamped(cfg);
  j["theta_growth"] = num(cfg.theta_growth);
  j["reports"] = arr;
  sink("bounds.json", dump(j));
  return "size-bounds: " + std::to_string(lambdas.size()) + " lambdas, " + std::to_string(failures) + " failures";
}

std::string cmd_limits(const RunConfig& cfg, const Sink& sink) {
  const Nonlinearity nl = build_nonlinearity(cfg);
  const double r_max = cfg.r_max.value_or(1000.0);
  IntegrateOptions io;
  io.stop_on_trap = false;
  const Trajectory traj = integrate(params_of(cfg, r_max), nl, io);
  const AsymptoticReport rep = asymptotic_limit(traj, nl);
  json j = stamped(cfg);
  j["lambda"] = num(*cfg.lambda);
  j["r_max"] = num(r_max);
  j["stop_reason"] = to_string(traj.stop_reason());
  j["simple_zeros"] = traj.count(EventKind::SimpleZero);
  j["r_from"] = num(rep.r_from);
  j["r_to"] = num(rep.r_to);
  j["u_tail"] = num(rep.u_tail);
  j["E_tail"] = num(rep.E_tail);
  j["ell"] = rep.ell ? num(*rep.ell) : json(nullptr);
  j["residual_u"] = num(rep.residual_u);
  j["residual_E"] = num(rep.residual_E);
  j["note"] = rep.note;
  sink("limits.json", dump(j));
  return "limits: u_tail = " + fmt(rep.u_tail) + (rep.ell ? ", ell = " + fmt(*rep.ell) : std::string());
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"solve",   "sweep",       "find-nodes", "certify-rotation",
                                                 "barrier", "size-bounds", "limits"};
  return names;
}

void validate(const std::string& command, const RunConfig& cfg) {
  ProblemParams pp = params_of(cfg, cfg.r_max.value_or(1.0));
  pp.validate();
  if (!(cfg.theta_growth > 0.0 && cfg.theta_growth < 1.0)) throw ConfigError("theta_growth must lie in (0, 1)");
  if (!(cfg.omega > 0.0 && cfg.omega < 0.125)) throw ConfigError("omega must lie in (0, 1/8)");
  if (cfg.r_max && !(*cfg.r_max > 0.0)) throw ConfigError("r_max must be positive");
  if (cfg.lambda && !(*cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");
  for (std::size_t i = 1; i < cfg.lambda_grid.size(); ++i) {
    if (!(cfg.lambda_grid[i] > cfg.lambda_grid[i - 1])) throw ConfigError("lambda_grid must be strictly increasing");
  }
  if (!cfg.lambda_grid.empty() && !(cfg.lambda_grid.front() > 0.0)) throw ConfigError("lambda_grid must be positive");
  if ((command == "solve" || command == "limits") && !cfg.lambda) throw ConfigError(command + " needs lambda");
  if (command == "sweep" && cfg.lambda_grid.empty()) throw ConfigError("sweep needs lambda_grid");
  if (command == "find-nodes" && !cfg.k) throw ConfigError("find-nodes needs k");
  if (command == "size-bounds" && !cfg.lambda && cfg.lambda_grid.empty()) {
    throw ConfigError("size-bounds needs lambda or lambda_grid");
  }
  // Builds and validates the nonlinearity.
  (void)build_nonlinearity(cfg);
}

std::string execute(const std::string& command, const RunConfig& cfg, const Sink& sink) {
  validate(command, cfg);
  if (command == "solve") return cmd_solve(cfg, sink);
  if (command == "sweep") return cmd_sweep(cfg, sink);
  if (command == "find-nodes") return cmd_find_nodes(cfg, sink);
  if (command == "certify-rotation") return cmd_certify_rotation(cfg, sink);
  if (command == "barrier") return cmd_barrier(cfg, sink);
  if (command == "size-bounds") return cmd_size_bounds(cfg, sink);
  if (command == "limits") return cmd_limits(cfg, sink);
  throw ConfigError("unknown subcommand '" + command + "'");
}

// ---------------------------------------------------------------------------

namespace {

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& c : f) c = (c == '_') ? '-' : c;
  return "--" + f;
}

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Validation: return kValidation;
    case ErrorCategory::Numerical: return kNumerical;
    case ErrorCategory::Search: return kSearch;
  }
  return kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial p-Laplace shooting: nodal compactly supported solutions and their certificates", "plshoot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  struct Flags {
    std::string config;
    std::map<std::string, std::string> values;
    bool refine = false;
  };
  std::map<std::string, Flags> flags;
  for (const std::string& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    Flags& f = flags[name];
    sub->add_option("--config", f.config, "key = value configuration file; flags override it");
    for (const std::string& key : known_keys()) {
      if (key == "refine") continue;
      const std::string names = key == "out_dir" ? "--out,--out-dir" : flag_name(key);
      sub->add_option(names, f.values[key]);
    }
    sub->add_flag("--refine", f.refine, "insert midpoints where node counts jump by 2 or more");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  std::string command;
  for (const std::string& name : subcommands()) {
    if (app.got_subcommand(name)) command = name;
  }
  const Flags& f = flags[command];
  CLI::App* sub = app.get_subcommand(command);

  RunConfig cfg;
  const auto started = std::chrono::steady_clock::now();
  std::vector<std::string> written;
  std::filesystem::path dir;
  int code = kOk;
  std::string error;
  std::string summary;
  try {
    if (!f.config.empty()) {
      for (const auto& [k, v] : read_key_values_file(f.config)) apply(cfg, k, v);
    }
    for (const std::string& key : known_keys()) {
      if (key == "refine") continue;
      if (sub->get_option(flag_name(key))->count() > 0) apply(cfg, key, f.values.at(key));
    }
    if (f.refine) cfg.refine = true;
    if (cfg.out_dir.empty()) {
      const char* env = std::getenv("PLSHOOT_OUT_DIR");
      cfg.out_dir = (env && *env) ? env : "plshoot_out";
    }
    dir = cfg.out_dir;
    std::filesystem::create_directories(dir);
    summary = execute(command, cfg, [&](const std::string& name, const std::string& content) {
      write_atomic(dir / name, content);
      written.push_back(name);
    });
    out << summary << "\n";
  } catch (const Error& e) {
    code = exit_code_for(e.category());
    error = e.what();
  } catch (const std::exception& e) {
    code = kNumerical;
    error = e.what();
  }
  if (code != kOk) err << "plshoot " << command << ": " << error << "\n";

  if (!dir.empty()) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json m = json::object();
    m["tool"] = "plshoot";
    m["version"] = std::string(kVersion);
    m["command"] = command;
    m["config"] = canonical(cfg);
    m["config_hash"] = hex64(fnv1a64(canonical(cfg)));
    m["artifacts"] = written;
    m["status"] = code == kOk ? "ok" : "error";
    m["exit_code"] = code;
    if (code != kOk) m["error"] = error;
    m["boost_version"] = BOOST_LIB_VERSION;
    m["compiler"] = __VERSION__;
    m["wall_time_s"] = wall;
    try {
      const Nonlinearity nl = build_nonlinearity(cfg);
      json h = json::array();
      for (const auto& c : verify_hypotheses(nl, cfg.p, cfg.N, cfg.theta_growth).checks) {
        h.push_back({{"id", c.id}, {"passed", c.passed}, {"detail", c.detail}});
      }
      m["hypotheses"] = h;
    } catch (const std::exception&) {
      m["hypotheses"] = nullptr;
    }
    try {
      write_atomic(dir / "manifest.json", dump(m));
    } catch (const std::exception& e) {
      err << "plshoot: manifest not written: " << e.what() << "\n";
    }
  }
  return code;
}

}  // namespace plshoot::cli
