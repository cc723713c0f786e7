#include "psa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

std::vector<double> midpoints(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = a + (b - a) * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  }
  return out;
}

double triangle_slack(const ValidatedModel& model, double c0, double c1, double c2) {
  return wave_curve_T(model, c1, c2) + wave_curve_T(model, c0, c1) - wave_curve_T(model, c0, c2);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return !v.empty();
}

}  // namespace

double total_variation(const std::vector<double>& values) {
  double tv = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) tv += std::abs(values[k] - values[k - 1]);
  return tv;
}

double tv_concatenated(const PiecewiseConstant& cb, const PiecewiseConstant& c0) {
  return cb.total_variation() + std::abs(cb(cb.start()) - c0(c0.start())) + c0.total_variation();
}

double tv_log(const PiecewiseConstant& ub) {
  return ub.map([](double u) { return std::log(u); }).total_variation();
}

double estimate_gamma(const ValidatedModel& model, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cm = static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double cp = static_cast<double>(j) / static_cast<double>(n - 1);
      best = std::max(best, std::abs(wave_curve_T(model, cm, cp)) / std::abs(cp - cm));
    }
  }
  return best;
}

TriangleProbe triangular_inequality_probe(const ValidatedModel& model, std::size_t n_triples,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  TriangleProbe p;
  p.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_triples; ++k) {
    double c[3] = {U(rng), U(rng), U(rng)};
    std::sort(c, c + 3, std::greater<>());
    const double s = triangle_slack(model, c[0], c[1], c[2]);
    if (s < p.worst_slack) {
      p.worst_slack = s;
      p.c0 = c[0];
      p.c1 = c[1];
      p.c2 = c[2];
    }
  }
  p.triples = n_triples;
  if (n_triples == 0) p.worst_slack = 0.0;
  return p;
}

double estimate_interaction_constant(const ValidatedModel& model, std::size_t n, double safety) {
  double best = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double c0 = static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t j = 0; j < i; ++j) {
      const double c1 = static_cast<double>(j) / static_cast<double>(n);
      for (std::size_t k = 0; k < j; ++k) {
        const double c2 = static_cast<double>(k) / static_cast<double>(n);
        const double r = std::abs(triangle_slack(model, c0, c1, c2)) / ((c0 - c1) * (c1 - c2));
        best = std::max(best, r);
      }
    }
  }
  return safety * 2.0 * best;
}

LedgerReport check_interaction_ledger(const std::vector<InteractionRecord>& records,
                                      const LedgerOptions& opts) {
  LedgerReport rep;
  rep.triangle_assumed = opts.triangle_holds;
  const double rs_budget = 10.0 * opts.delta * opts.tvc_initial;
  auto flag = [&](const InteractionRecord& r, const char* check, std::string detail) {
    rep.violations.push_back({r.index, check, std::move(detail)});
  };
  for (const auto& r : records) {
    ++rep.counts[static_cast<int>(r.incoming)];
    const double dtvl = r.tvl_after - r.tvl_before;
    if (r.tvc_after > r.tvc_before * (1.0 + 8.0 * kUlp)) {
      flag(r, "tvc", fmt::format("TVc {:.17g} -> {:.17g}", r.tvc_before, r.tvc_after));
    }
    const bool rs_sr = r.incoming == IncomingCase::RS || r.incoming == IncomingCase::SR;
    switch (r.incoming) {
      case IncomingCase::RD:
      case IncomingCase::SD:
        if (std::abs(dtvl) > 1e-12) flag(r, "lambda-contact", fmt::format("dTVL = {:.3e}", dtvl));
        break;
      case IncomingCase::SS: {
        const double expect = 2.0 * std::max(r.s0.L - r.middle.L, 0.0);
        if (std::abs(dtvl - expect) > 1e-12) {
          flag(r, "ss-identity", fmt::format("dTVL = {:.17g}, expected {:.17g}", dtvl, expect));
        }
        if (r.quadratic > 0.0) rep.gamma_hat_measured = std::max(rep.gamma_hat_measured, dtvl / r.quadratic);
        break;
      }
      case IncomingCase::RS:
      case IncomingCase::SR:
        rep.worst_rs_sr_increase = std::max(rep.worst_rs_sr_increase, dtvl);
        if (dtvl > rs_budget + 1e-12) {
          flag(r, "rs-sr-decay", fmt::format("dTVL = {:.3e} > budget {:.3e}", dtvl, rs_budget));
        }
        break;
      case IncomingCase::RR:
        flag(r, "rr", "rarefaction fronts of one family collided");
        break;
    }
    if (dtvl > opts.gamma_hat * r.quadratic + 1e-12) {
      flag(r, "quadratic", fmt::format("dTVL = {:.3e} > {:.3e} * {:.3e}", dtvl, opts.gamma_hat,
                                       r.quadratic));
    }
    if (opts.triangle_holds && !rs_sr && dtvl > 1e-12) {
      flag(r, "tvl-nonincrease", fmt::format("dTVL = {:.3e}", dtvl));
    }
  }
  return rep;
}

BVReport bv_report(const Trajectory& traj, const std::vector<double>& sample_xs,
                   const std::vector<double>& sample_ts, double gamma_hat, double Gamma_hat) {
  BVReport rep;
  const auto& d = traj.data();
  rep.tv_c_initial = tv_concatenated(d.cb, d.c0);
  rep.tv_ln_ub = tv_log(d.ub);
  rep.gamma_hat = gamma_hat;
  rep.Gamma_hat = Gamma_hat;
  std::vector<Slice> slices;
  slices.reserve(sample_xs.size());
  std::vector<double> times, lnv;
  std::vector<State> states;
  for (double x : sample_xs) {
    slices.push_back(traj.slice(x));
    slices.back().pieces(traj.T(), times, states);
    double tvc = 0.0, tvl = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) {
      tvc += std::abs(states[k].c - states[k - 1].c);
      tvl += std::abs(states[k].L - states[k - 1].L);
    }
    rep.sup_tv_t_c = std::max(rep.sup_tv_t_c, tvc);
    rep.sup_tv_t_lnu = std::max(rep.sup_tv_t_lnu, tvl);
    traj.log_v_pieces(x, times, lnv);
    rep.sup_tv_t_lnv = std::max(rep.sup_tv_t_lnv, total_variation(lnv));
  }
  for (double t : sample_ts) {
    std::vector<double> c, l;
    for (const auto& s : slices) {
      const State st = s.at(t);
      c.push_back(st.c);
      l.push_back(st.L);
    }
    rep.sup_tv_x_c = std::max(rep.sup_tv_x_c, total_variation(c));
    rep.sup_tv_x_lnu = std::max(rep.sup_tv_x_lnu, total_variation(l));
  }
  const double tvc = rep.tv_c_initial;
  rep.bound_lnu = rep.tv_ln_ub + 2.0 * gamma_hat * tvc + 0.5 * Gamma_hat * tvc * tvc;
  const double c_tol = 16.0 * kUlp * tvc;
  rep.c_bound_ok = rep.sup_tv_t_c <= tvc + c_tol && rep.sup_tv_x_c <= tvc + c_tol;
  rep.lnu_bound_ok = rep.sup_tv_t_lnu <= rep.bound_lnu * (1.0 + 16.0 * kUlp);
  return rep;
}

StratificationReport stratification_check(const Trajectory& traj, std::size_t nt, std::size_t nx) {
  const auto& d = traj.data();
  auto tau = [&](double t) { return d.ub.integral(d.ub.start(), t); };
  const double tau_T = tau(d.T());
  TrackingData unit{d.c0, d.cb.reparametrized(tau), PiecewiseConstant::constant(0.0, tau_T, 1.0)};
  const auto ref = run(init_fronts(traj.model(), unit, traj.delta()), traj.X());
  StratificationReport rep;
  const auto ts = midpoints(0.0, d.T(), nt);
  const auto xs = midpoints(0.0, traj.X(), nx);
  for (double x : xs) {
    const Slice a = traj.slice(x);
    const Slice b = ref.slice(x);
    for (double t : ts) {
      const State sa = a.at(t);
      const State sb = b.at(tau(t));
      const double lnv = sa.L - std::log(d.ub(t));
      rep.max_gap_lnv = std::max(rep.max_gap_lnv, std::abs(lnv - sb.L));
      rep.max_gap_c = std::max(rep.max_gap_c, std::abs(sa.c - sb.c));
      if (t <= tau_T) {
        rep.literal_gap_lnv = std::max(rep.literal_gap_lnv, std::abs(lnv - b.at(t).L));
      }
      ++rep.nodes;
    }
  }
  return rep;
}

double linf_gap_column(const Trajectory& traj, const CharacteristicSolver& smooth, double x) {
  std::vector<double> times;
  std::vector<State> states;
  traj.slice(x).pieces(traj.T(), times, states);
  const double T = traj.T();
  double worst = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double a = times[k];
    const double b = k + 1 < times.size() ? times[k + 1] : T;
    for (double t : {a, 0.5 * (a + b), b}) {
      worst = std::max(worst, std::abs(states[k].c - smooth.concentration(std::min(t, T), x)));
    }
  }
  return worst;
}

namespace {

struct FieldSampler {
  // c and u on the tensor grid (row = t index).
  std::vector<double> c, u;
};

FieldSampler sample_smooth(const CharacteristicSolver& s, const std::vector<double>& ts,
                           const std::vector<double>& xs) {
  FieldSampler f;
  for (double t : ts) {
    for (double x : xs) {
      f.c.push_back(s.concentration(t, x));
      f.u.push_back(s.velocity(t, x));
    }
  }
  return f;
}

FieldSampler sample_tracking(const Trajectory& traj, const std::vector<double>& ts,
                             const std::vector<double>& xs) {
  FieldSampler f;
  f.c.resize(ts.size() * xs.size());
  f.u.resize(ts.size() * xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const Slice s = traj.slice(xs[j]);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const State st = s.at(ts[i]);
      f.c[i * xs.size() + j] = st.c;
      f.u[i * xs.size() + j] = st.u();
    }
  }
  return f;
}

EpsilonResult distances(double eps, const FieldSampler& run, const FieldSampler& ref,
                        const std::vector<double>& ts, const std::vector<double>& xs,
                        const std::function<double(double)>& ub_eps,
                        const std::function<double(double)>& ub_mean, double cell) {
  EpsilonResult r;
  r.eps = eps;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double ue = ub_eps(ts[i]);
    const double um = ub_mean(ts[i]);
    const double ratio = ue / um;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const std::size_t k = i * xs.size() + j;
      const double v_bar = ref.u[k] / um;
      r.l1_c += std::abs(run.c[k] - ref.c[k]) * cell;
      r.l1_u += std::abs(run.u[k] - ref.u[k] * ratio) * cell;
      r.l1_v += std::abs(run.u[k] / ue - v_bar) * cell;
    }
  }
  return r;
}

void attach_samples(EpsilonResult& r, FieldSampler f, const ExperimentSetup& setup,
                    const std::function<double(double)>& ub) {
  const std::size_t nx = setup.sample_xs.size();
  r.sample_v.resize(f.u.size());
  for (std::size_t k = 0; k < f.u.size(); ++k) r.sample_v[k] = f.u[k] / ub(setup.sample_ts[k / nx]);
  r.sample_c = std::move(f.c);
  r.sample_u = std::move(f.u);
}

}  // namespace

ExperimentReport oscillation_experiment(const ValidatedModel& model, const ExperimentSetup& setup) {
  if (setup.eps.empty()) throw DomainError("experiment: empty eps list");
  for (std::size_t k = 0; k < setup.eps.size(); ++k) {
    if (!(setup.eps[k] > 0.0) || (k > 0 && !(setup.eps[k] < setup.eps[k - 1]))) {
      throw DomainError("experiment: eps list must be positive and strictly decreasing");
    }
  }
  double inf_mean = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 1000; ++k) inf_mean = std::min(inf_mean, setup.ub.mean(setup.T * k / 1000.0));
  if (!(inf_mean - std::abs(setup.ub.amplitude) > 0.0)) {
    throw DomainError("experiment: ub(t, theta) must stay positive (u_b > 0)");
  }

  ExperimentReport rep;
  rep.solver = setup.solver;
  rep.nt = setup.nt;
  rep.nx = setup.nx;
  const auto ts = midpoints(0.0, setup.T, setup.nt);
  const auto xs = midpoints(0.0, setup.X, setup.nx);
  const double cell = setup.T * setup.X / static_cast<double>(setup.nt * setup.nx);
  const double eps_min = setup.eps.back();
  OscillatingProfile control_profile{setup.ub.mean, 0.0};

  std::vector<EpsilonResult> controls;
  if (setup.solver == ExperimentSolver::Characteristics) {
    SmoothGrid g;
    g.n_b = std::max<std::size_t>(g.n_b, static_cast<std::size_t>(std::ceil(400.0 * setup.T / eps_min)));
    auto solve = [&](const std::function<double(double)>& ub) {
      return CharacteristicSolver(model, SmoothData{setup.c0, setup.cb, ub, setup.T, setup.X}, g);
    };
    const std::function<double(double)> ub_mean = [&](double t) { return setup.ub.average(t); };
    const auto ref_solver = solve(ub_mean);
    if (ref_solver.breakdown()) throw DomainError("experiment: reference run breaks down inside the domain");
    const auto ref = sample_smooth(ref_solver, ts, xs);
    rep.tv_c_initial = total_variation([&] {
      std::vector<double> v;
      for (int k = 1000; k >= 0; --k) v.push_back(setup.cb(setup.T * k / 1000.0));
      for (int k = 0; k <= 1000; ++k) v.push_back(setup.c0(setup.X * k / 1000.0));
      return v;
    }());
    for (double eps : setup.eps) {
      for (const OscillatingProfile* prof : std::initializer_list<const OscillatingProfile*>{&setup.ub, &control_profile}) {
        const auto ub_eps = prof->at_scale(eps);
        const auto s = solve(ub_eps);
        EpsilonResult r;
        if (s.breakdown()) {
          r.eps = eps;
          r.failed = true;
          r.failure = fmt::format("characteristics cross at t = {:.6g}, x = {:.6g}", s.breakdown()->t,
                                  s.breakdown()->x);
        } else {
          r = distances(eps, sample_smooth(s, ts, xs), ref, ts, xs, ub_eps, ub_mean, cell);
          attach_samples(r, sample_smooth(s, setup.sample_ts, setup.sample_xs), setup, ub_eps);
        }
        (prof == &setup.ub ? rep.runs : controls).push_back(r);
      }
    }
  } else {
    const auto n_cells = std::max(
        setup.min_cells,
        static_cast<std::size_t>(std::ceil(static_cast<double>(setup.cells_per_period) * setup.T / eps_min)));
    const auto c0 = setup.c0.discretize_tracking(0.0, setup.X, setup.delta);
    const auto cb = setup.cb.discretize_tracking(0.0, setup.T, setup.delta);
    rep.tv_c_initial = tv_concatenated(cb, c0);
    auto discretize_ub = [&](const std::function<double(double)>& f) {
      return PiecewiseConstant::cell_average(f, 0.0, setup.T, n_cells);
    };
    const auto ub_mean_pc = discretize_ub([&](double t) { return setup.ub.average(t); });
    const std::function<double(double)> ub_mean = [&](double t) { return ub_mean_pc(t); };
    const auto ref_traj = run(init_fronts(model, TrackingData{c0, cb, ub_mean_pc}, setup.delta), setup.X);
    const auto ref = sample_tracking(ref_traj, ts, xs);
    for (double eps : setup.eps) {
      for (const OscillatingProfile* prof : std::initializer_list<const OscillatingProfile*>{&setup.ub, &control_profile}) {
        const auto ub_pc = discretize_ub(prof->at_scale(eps));
        EpsilonResult r;
        try {
          const auto traj = run(init_fronts(model, TrackingData{c0, cb, ub_pc}, setup.delta), setup.X);
          r = distances(eps, sample_tracking(traj, ts, xs), ref, ts, xs,
                        [&](double t) { return ub_pc(t); }, ub_mean, cell);
          attach_samples(r, sample_tracking(traj, setup.sample_ts, setup.sample_xs), setup,
                         [&](double t) { return ub_pc(t); });
        } catch (const std::exception& e) {
          r.eps = eps;
          r.failed = true;
          r.failure = e.what();
        }
        (prof == &setup.ub ? rep.runs : controls).push_back(r);
      }
    }
  }
  rep.tv_ln_ub_mean = total_variation([&] {
    std::vector<double> v;
    for (int k = 0; k <= 1000; ++k) v.push_back(std::log(setup.ub.average(setup.T * k / 1000.0)));
    return v;
  }());
  std::vector<double> lc, lu;
  bool any_failed = false;
  for (const auto& r : rep.runs) {
    any_failed = any_failed || r.failed;
    lc.push_back(r.l1_c);
    lu.push_back(r.l1_u);
  }
  rep.c_decreasing = !any_failed && strictly_decreasing(lc);
  rep.u_decreasing = !any_failed && strictly_decreasing(lu);
  rep.control_zero = true;
  for (const auto& r : controls) {
    rep.control_zero = rep.control_zero && !r.failed && r.l1_c == 0.0 && r.l1_u == 0.0 && r.l1_v == 0.0;
  }
  rep.control = controls.back();
  return rep;
}

EntropySweep entropy_residual_sweep(const ValidatedModel& model, const TrackingData& data,
                                    const TestFunction& psi, double delta0, std::size_t levels,
                                    const std::vector<double>& xs) {
  EntropySweep sw;
  sw.xs = xs;
  double delta = delta0;
  for (std::size_t k = 0; k < levels; ++k, delta *= 0.5) {
    const auto traj = run(init_fronts(model, data, delta), data.X());
    std::vector<double> row;
    for (double x : xs) row.push_back(entropy_residual(traj, x, psi));
    sw.deltas.push_back(delta);
    sw.residuals.push_back(std::move(row));
  }
  sw.ok = !sw.residuals.empty();
  if (!sw.ok) return sw;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sw.constants.push_back(std::max(sw.residuals[0][j], 0.0) / delta0);
    for (std::size_t k = 1; k < sw.deltas.size(); ++k) {
      sw.ok = sw.ok && sw.residuals[k][j] <= sw.constants[j] * sw.deltas[k] + 1e-12;
    }
  }
  return sw;
}

}  // namespace psa
