#include "psa/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "psa/config.hpp"
#include "psa/diagnostics.hpp"
#include "psa/errors.hpp"
#include "psa/godunov.hpp"
#include "psa/smooth.hpp"

namespace psa {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Invariant violation found after a completed run.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, ojson detail)
      : std::runtime_error(what), detail_(std::move(detail)) {}
  const ojson& detail() const { return detail_; }

 private:
  ojson detail_;
};

void dump(const ojson& j, std::string& out, int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (pretty) out += "\n" + std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ojson(k).dump();
        out += pretty ? ": " : ":";
        dump(v, out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += pretty ? ", " : ",";
        first = false;
        dump(v, out, indent, depth + 1);
      }
      out += ']';
      return;
    }
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string to_text(const ojson& j, int indent = 2) {
  std::string s;
  dump(j, s, indent, 0);
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--out", fmt::format("cannot write {}", path.string()));
  f << text;
}

ojson state_json(const State& s) { return {{"c", s.c}, {"u", s.u()}, {"L", s.L}}; }

struct Context {
  RunConfig cfg;
  fs::path out_dir;
  std::ostream& out;
};

std::vector<double> axis(const std::vector<double>& given, double end, std::size_t n) {
  if (!given.empty()) return given;
  std::vector<double> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(end * static_cast<double>(k) / static_cast<double>(n - 1));
  return v;
}

void check_slices(const RunConfig& cfg) {
  std::vector<FieldError> errors;
  for (double x : cfg.output.slices_x) {
    if (x < 0.0 || x > cfg.data.X) errors.push_back({"--slices x", fmt::format("{} outside [0, X]", x)});
  }
  for (double t : cfg.output.slices_t) {
    if (t < 0.0 || t > cfg.data.T) errors.push_back({"--slices t", fmt::format("{} outside [0, T]", t)});
  }
  if (!errors.empty()) throw ConfigError(errors);
}

std::string csv_header() { return "t,x,c,u,v\n"; }

void csv_row(std::string& s, double t, double x, double c, double u, double v) {
  s += fmt::format("{},{},{},{},{}\n", format_double(t), format_double(x), format_double(c),
                   format_double(u), format_double(v));
}

TrackingData tracking_data(const RunConfig& cfg) {
  const auto& d = cfg.data;
  const double delta = cfg.solver.delta;
  return {d.c0.discretize_tracking(0.0, d.X, delta, d.min_cells),
          d.cb.discretize_tracking(0.0, d.T, delta, d.min_cells),
          d.ub.discretize_tracking(0.0, d.T, delta, d.min_cells)};
}

ojson model_report_json(const ModelReport& r) {
  ojson criteria = ojson::array();
  for (const auto& c : r.criteria) criteria.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"model", r.model},
          {"passed", r.passed()},
          {"n_samples", r.n_samples},
          {"f2_min", r.f2_min},
          {"f2_min_at", r.f2_min_at},
          {"f2_max", r.f2_max},
          {"dh_max", r.dh_max},
          {"dh_max_at", r.dh_max_at},
          {"shock_monotone_minus", r.shock_monotone_minus},
          {"shock_monotone_plus", r.shock_monotone_plus},
          {"orientation_ok", r.orientation_ok},
          {"recommend_swap", r.recommend_swap},
          {"criteria", criteria}};
}

ojson record_json(const InteractionRecord& r) {
  return {{"index", r.index},
          {"x", r.x},
          {"t", r.t},
          {"incoming", std::string(to_string(r.incoming))},
          {"outgoing", std::string(to_string(r.outgoing))},
          {"lower_id", r.lower_id},
          {"upper_id", r.upper_id},
          {"s0", state_json(r.s0)},
          {"s1", state_json(r.s1)},
          {"s2", state_json(r.s2)},
          {"middle", state_json(r.middle)},
          {"tvc_before", r.tvc_before},
          {"tvc_after", r.tvc_after},
          {"tvl_before", r.tvl_before},
          {"tvl_after", r.tvl_after},
          {"quadratic", r.quadratic},
          {"outgoing_steps", r.outgoing_steps},
          {"contact_dropped", r.contact_dropped}};
}

int cmd_validate_model(Context& ctx) {
  const auto report = validate_model(ctx.cfg.model);
  const std::string text = to_text(model_report_json(report));
  ctx.out << text << "\n";
  if (!ctx.out_dir.empty()) write_file(ctx.out_dir / "model_report.json", text + "\n");
  return report.passed() ? kExitOk : kExitInput;
}

int cmd_riemann(Context& ctx) {
  if (!ctx.cfg.riemann) throw ConfigError("riemann", "missing");
  const auto model = ValidatedModel::check(ctx.cfg.model);
  const auto& rc = *ctx.cfg.riemann;
  const auto fan = solve_riemann(model, rc.below, rc.above);
  ojson wave;
  if (const auto* s = std::get_if<ShockWave>(&fan.lambda_wave)) {
    wave = {{"kind", "shock"}, {"speed", s->speed}};
  } else if (const auto* r = std::get_if<RarefactionWave>(&fan.lambda_wave)) {
    wave = {{"kind", "rarefaction"}, {"z_minus", r->z_minus}, {"z_plus", r->z_plus}, {"phi", r->phi}};
  } else {
    wave = {{"kind", "none"}};
  }
  const ojson j = {{"model", ctx.cfg.model.describe()},
                   {"below", state_json(fan.below)},
                   {"middle", state_json(fan.middle)},
                   {"above", state_json(fan.above)},
                   {"contact_strength", fan.contact_strength()},
                   {"lambda_wave", wave}};
  write_file(ctx.out_dir / "fan.json", to_text(j) + "\n");
  if (!rc.z.empty()) {
    std::string csv = "z,c,u\n";
    for (double z : rc.z) {
      const State s = sample_fan(model, fan, z);
      csv += fmt::format("{},{},{}\n", format_double(z), format_double(s.c), format_double(s.u()));
    }
    write_file(ctx.out_dir / "riemann.csv", csv);
  }
  ctx.out << fmt::format("riemann: middle c = {}, u = {}, wave {}\n", format_double(fan.middle.c),
                         format_double(fan.middle.u()), wave["kind"].get<std::string>());
  return kExitOk;
}

int cmd_simulate(Context& ctx, double speed_fault) {
  const auto& cfg = ctx.cfg;
  const auto model = ValidatedModel::check(cfg.model);
  const auto data = tracking_data(cfg);
  auto fs0 = init_fronts(model, data, cfg.solver.delta);
  const std::size_t initial_fronts = fs0.fronts().size();
  if (speed_fault != 1.0) fs0.inject_speed_fault(speed_fault);
  const auto traj = run(std::move(fs0), data.X());

  std::string csv = csv_header();
  const auto xs = axis(cfg.output.slices_x, data.X(), cfg.output.default_samples);
  const auto ts = axis(cfg.output.slices_t, data.T(), cfg.output.default_samples);
  for (double x : xs) {
    const Slice sl = traj.slice(x);
    for (double t : ts) {
      const State s = sl.at(t);
      csv_row(csv, t, x, s.c, s.u(), s.u() / data.ub(t));
    }
  }
  write_file(ctx.out_dir / "slices.csv", csv);

  std::string ledger;
  for (const auto& r : traj.records()) ledger += to_text(record_json(r), -1) + "\n";
  write_file(ctx.out_dir / "ledger.jsonl", ledger);

  const double tvc = tv_concatenated(data.cb, data.c0);
  const double gamma = estimate_gamma(model);
  const double Gamma = estimate_interaction_constant(model);
  const auto tri = triangular_inequality_probe(model, 10000, cfg.seed);
  const auto led = check_interaction_ledger(traj.records(), {cfg.solver.delta, tvc, Gamma, tri.holds()});
  const auto bv = bv_report(traj, axis({}, data.X(), 21), axis({}, data.T(), 101), gamma, Gamma);

  ojson violations = ojson::array();
  for (const auto& v : led.violations) violations.push_back({{"index", v.index}, {"check", v.check}, {"detail", v.detail}});
  if (!bv.c_bound_ok) violations.push_back({{"check", "bv-c"}, {"detail", "sup TV_t c exceeds TV c_I"}});
  if (!bv.lnu_bound_ok) violations.push_back({{"check", "bv-lnu"}, {"detail", "sup TV_t ln u exceeds its bound"}});

  ojson counts;
  for (auto c : {IncomingCase::RD, IncomingCase::SD, IncomingCase::RS, IncomingCase::SR, IncomingCase::SS,
                 IncomingCase::RR}) {
    counts[std::string(to_string(c))] = led.counts[static_cast<int>(c)];
  }
  const ojson summary = {
      {"model", cfg.model.describe()},
      {"delta", cfg.solver.delta},
      {"T", data.T()},
      {"X", data.X()},
      {"fronts_initial", initial_fronts},
      {"fronts_total", traj.fronts().size()},
      {"interactions", traj.records().size()},
      {"interaction_counts", counts},
      {"events", traj.events()},
      {"perturbations", traj.perturbations()},
      {"tv_c_initial", tvc},
      {"tv_ln_ub", tv_log(data.ub)},
      {"gamma_hat", gamma},
      {"Gamma_hat", Gamma},
      {"triangle", {{"holds", tri.holds()}, {"worst_slack", tri.worst_slack}, {"triples", tri.triples}}},
      {"ledger", {{"ok", led.ok()}, {"gamma_hat_measured", led.gamma_hat_measured},
                  {"worst_rs_sr_increase", led.worst_rs_sr_increase}}},
      {"bv", {{"sup_tv_t_c", bv.sup_tv_t_c}, {"sup_tv_x_c", bv.sup_tv_x_c}, {"sup_tv_t_lnu", bv.sup_tv_t_lnu},
              {"sup_tv_x_lnu", bv.sup_tv_x_lnu}, {"sup_tv_t_lnv", bv.sup_tv_t_lnv}, {"bound_lnu", bv.bound_lnu},
              {"c_bound_ok", bv.c_bound_ok}, {"lnu_bound_ok", bv.lnu_bound_ok}}},
      {"violations", violations}};
  write_file(ctx.out_dir / "summary.json", to_text(summary) + "\n");
  if (!violations.empty()) {
    throw InvariantViolation(fmt::format("simulate: {} invariant violation(s)", violations.size()), violations);
  }
  ctx.out << fmt::format("simulate: {} fronts, {} interactions, ledger ok\n", traj.fronts().size(),
                         traj.records().size());
  return kExitOk;
}

int cmd_smooth(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto model = ValidatedModel::check(cfg.model);
  const auto& d = cfg.data;
  const SmoothData data{[&](double x) { return d.c0(x); }, [&](double t) { return d.cb(t); },
                        [&](double t) { return d.ub(t); }, d.T, d.X};
  SmoothGrid grid;
  grid.nt = cfg.solver.nt;
  grid.nx = cfg.solver.nx;
  const auto sol = solve_characteristics(model, data, grid);
  std::string csv = csv_header();
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double ub = d.ub(sol.t[i]);
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      const std::size_t k = sol.index(i, j);
      csv_row(csv, sol.t[i], sol.x[j], sol.c[k], sol.v[k] * ub, sol.v[k]);
    }
  }
  write_file(ctx.out_dir / "smooth.csv", csv);
  ojson bd = nullptr;
  if (const auto& b = sol.breakdown()) {
    bd = {{"family", b->family == Breakdown::Family::Initial ? "initial" : "boundary"},
          {"t", b->t},
          {"x", b->x},
          {"b", b->b}};
  }
  const ojson rep = {{"model", cfg.model.describe()},
                     {"nt", grid.nt},
                     {"nx", grid.nx},
                     {"complete", sol.complete()},
                     {"rows_valid", sol.rows_valid()},
                     {"breakdown", bd}};
  write_file(ctx.out_dir / "breakdown.json", to_text(rep) + "\n");
  ctx.out << (sol.complete() ? std::string("smooth: no breakdown\n")
                             : fmt::format("smooth: breakdown at t = {}, x = {}\n", format_double(sol.breakdown()->t),
                                           format_double(sol.breakdown()->x)));
  return kExitOk;
}

int cmd_godunov(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto model = ValidatedModel::check(cfg.model);
  const auto data = tracking_data(cfg);
  GodunovOptions o;
  o.cfl = cfg.solver.cfl;
  o.dx = cfg.solver.dx;
  o.keep_x = cfg.output.slices_x;
  GridSolution sol;
  try {
    sol = godunov_march(model, data, cfg.solver.dt, data.X(), o);
  } catch (const CflError& e) {
    throw ConfigError("solver.dx", fmt::format("{}; largest stable dx is {}", e.what(),
                                                 format_double(e.suggested_dx())));
  }
  std::string csv = csv_header();
  for (const auto& s : sol.slices) {
    for (std::size_t j = 0; j < s.c.size(); ++j) {
      const double t = (static_cast<double>(j) + 0.5) * sol.dt;
      csv_row(csv, t, s.x, s.c[j], s.u[j], s.u[j] / data.ub(t));
    }
  }
  write_file(ctx.out_dir / "godunov.csv", csv);
  const ojson rep = {{"model", cfg.model.describe()},
                     {"dt", sol.dt},
                     {"cfl", sol.cfl},
                     {"steps", sol.steps},
                     {"dx_min", sol.dx_min},
                     {"dx_max", sol.dx_max},
                     {"conservation_defect", sol.conservation_defect},
                     {"positivity_violations", sol.positivity_violations}};
  write_file(ctx.out_dir / "godunov.json", to_text(rep) + "\n");
  if (sol.positivity_violations > 0 || sol.conservation_defect > 1e-10) {
    throw InvariantViolation("godunov: positivity or conservation violated", rep);
  }
  ctx.out << fmt::format("godunov: {} steps, {} cells\n", sol.steps, sol.cells());
  return kExitOk;
}

int cmd_experiment(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto model = ValidatedModel::check(cfg.model);
  ExperimentSetup s;
  s.c0 = cfg.data.c0;
  s.cb = cfg.data.cb;
  s.ub = OscillatingProfile{cfg.data.ub, cfg.experiment.amplitude};
  s.T = cfg.data.T;
  s.X = cfg.data.X;
  s.eps = cfg.experiment.eps;
  if (s.eps.empty()) throw ConfigError("experiment.eps", "empty (use --eps-list)");
  s.solver = cfg.experiment.solver == "front_tracking" ? ExperimentSolver::FrontTracking
                                                       : ExperimentSolver::Characteristics;
  s.nt = cfg.experiment.nt;
  s.nx = cfg.experiment.nx;
  s.delta = cfg.solver.delta;
  s.sample_xs = axis(cfg.output.slices_x, s.X, cfg.output.default_samples);
  s.sample_ts = axis(cfg.output.slices_t, s.T, cfg.output.default_samples);
  const auto rep = oscillation_experiment(model, s);

  auto run_json = [](const EpsilonResult& r) {
    ojson j = {{"eps", r.eps}, {"l1_c", r.l1_c}, {"l1_u", r.l1_u}, {"l1_v", r.l1_v}, {"failed", r.failed}};
    if (r.failed) j["failure"] = r.failure;
    return j;
  };
  ojson runs = ojson::array();
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    const auto& r = rep.runs[k];
    runs.push_back(run_json(r));
    if (r.failed) continue;
    std::string csv = csv_header();
    const std::size_t nx = s.sample_xs.size();
    for (std::size_t i = 0; i < s.sample_ts.size(); ++i) {
      for (std::size_t j = 0; j < nx; ++j) {
        const std::size_t idx = i * nx + j;
        csv_row(csv, s.sample_ts[i], s.sample_xs[j], r.sample_c[idx], r.sample_u[idx], r.sample_v[idx]);
      }
    }
    write_file(ctx.out_dir / fmt::format("oscillation_eps_{}.csv", k), csv);
  }
  const ojson j = {{"model", cfg.model.describe()},
                   {"solver", cfg.experiment.solver},
                   {"grid", {{"nt", rep.nt}, {"nx", rep.nx}, {"rule", "tensor midpoint"}}},
                   {"amplitude", cfg.experiment.amplitude},
                   {"runs", runs},
                   {"control", run_json(rep.control)},
                   {"tv_c_initial", rep.tv_c_initial},
                   {"tv_ln_ub_mean", rep.tv_ln_ub_mean},
                   {"c_decreasing", rep.c_decreasing},
                   {"u_decreasing", rep.u_decreasing},
                   {"control_zero", rep.control_zero}};
  write_file(ctx.out_dir / "experiment.json", to_text(j) + "\n");
  if (!rep.ok()) throw InvariantViolation("experiment: distances do not decrease or control is nonzero", j);
  ctx.out << fmt::format("experiment: {} eps levels, distances decrease\n", rep.runs.size());
  return kExitOk;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--config", fmt::format("cannot read {}", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solvers for the isothermal two-gas adsorption column"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", slices;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::vector<double> eps_list;
  double speed_fault = 1.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--delta", delta, "override solver.delta");
    sub->add_option("--seed", seed, "override seed");
    sub->add_option("--slices", slices, "sample positions, e.g. x=0.25,0.5;t=0,0.5,1");
  };
  auto* riemann = app.add_subcommand("riemann", "solve one Riemann problem");
  auto* simulate = app.add_subcommand("simulate", "front tracking run with interaction ledger");
  auto* smooth = app.add_subcommand("smooth", "method of characteristics");
  auto* godunov = app.add_subcommand("godunov", "Godunov finite volume march");
  auto* experiment = app.add_subcommand("experiment", "numerical experiments");
  auto* oscillation = experiment->add_subcommand("oscillation", "high-frequency inlet velocity");
  experiment->require_subcommand(1);
  auto* validate = app.add_subcommand("validate-model", "check the isotherm assumptions");
  for (auto* sub : {riemann, simulate, smooth, godunov, oscillation, validate}) common(sub);
  simulate->add_option("--inject-speed-fault", speed_fault, "test hook: scale one front speed")
      ->group("");
  oscillation->add_option("--eps-list", eps_list, "oscillation periods, decreasing")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "psa: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    Context ctx{load_config(config_path), out_dir, out};
    if (delta) {
      if (!(*delta > 0.0 && *delta <= 1.0)) throw ConfigError("solver.delta", fmt::format("{} outside (0, 1]", *delta));
      ctx.cfg.solver.delta = *delta;
    }
    if (seed) ctx.cfg.seed = *seed;
    if (!slices.empty()) apply_slices_flag(ctx.cfg.output, slices);
    check_slices(ctx.cfg);
    if (!eps_list.empty()) ctx.cfg.experiment.eps = eps_list;
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError("--out", ec.message());

    if (riemann->parsed()) return cmd_riemann(ctx);
    if (simulate->parsed()) return cmd_simulate(ctx, speed_fault);
    if (smooth->parsed()) return cmd_smooth(ctx);
    if (godunov->parsed()) return cmd_godunov(ctx);
    if (oscillation->parsed()) return cmd_experiment(ctx);
    return cmd_validate_model(ctx);
  } catch (const ConfigError& e) {
    err << "psa: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    err << "psa: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantViolation& e) {
    err << "psa: " << e.what() << "\n" << to_text(e.detail()) << "\n";
    return kExitInvariant;
  } catch (const ConsistencyError& e) {
    const ojson j = {{"check", "consistency"}, {"detail", e.what()}};
    std::error_code ec;
    if (fs::is_directory(out_dir, ec)) write_file(fs::path(out_dir) / "violation.json", to_text(j) + "\n");
    err << "psa: invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace psa
