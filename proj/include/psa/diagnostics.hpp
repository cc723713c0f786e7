#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psa/entropy.hpp"
#include "psa/fronttrack.hpp"
#include "psa/profiles.hpp"
#include "psa/smooth.hpp"

namespace psa {

double total_variation(const std::vector<double>& values);
// TV of the concatenated datum: cb reversed, the corner jump, then c0.
double tv_concatenated(const PiecewiseConstant& cb, const PiecewiseConstant& c0);
double tv_log(const PiecewiseConstant& ub);

// max |T(c+, c-)| / |c+ - c-| over an n x n grid of pairs.
double estimate_gamma(const ValidatedModel& model, std::size_t n = 200);

struct TriangleProbe {
  double worst_slack = 0.0;         // min of S(c2,c1) + S(c1,c0) - S(c2,c0)
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  std::size_t triples = 0;
  bool holds() const { return worst_slack >= -1e-12; }
};

// Random ordered triples c0 > c1 > c2 drawn with the given seed.
TriangleProbe triangular_inequality_probe(const ValidatedModel& model, std::size_t n_triples,
                                          std::uint64_t seed = 1);

// Offline Gamma-hat: safety * 2 sup |triangle residual| / (|c0 - c1| |c1 - c2|) on a triple grid.
double estimate_interaction_constant(const ValidatedModel& model, std::size_t n = 80,
                                     double safety = 1.1);

struct LedgerViolation {
  std::size_t index = 0;
  std::string check;
  std::string detail;
};

struct LedgerReport {
  std::vector<LedgerViolation> violations;
  double gamma_hat_measured = 0.0;  // max over SS of dTVL / quadratic
  std::size_t counts[6] = {0, 0, 0, 0, 0, 0};  // by IncomingCase
  double worst_rs_sr_increase = 0.0;
  bool triangle_assumed = false;
  bool ok() const { return violations.empty(); }
};

struct LedgerOptions {
  double delta = 0.0;
  double tvc_initial = 0.0;
  double gamma_hat = 0.0;         // offline constant for the quadratic bound
  bool triangle_holds = false;    // enables TVL non-increase outside RS/SR
};

LedgerReport check_interaction_ledger(const std::vector<InteractionRecord>& records,
                                      const LedgerOptions& opts);

struct BVReport {
  double tv_c_initial = 0.0;
  double tv_ln_ub = 0.0;
  double gamma_hat = 0.0;
  double Gamma_hat = 0.0;
  double sup_tv_t_c = 0.0;
  double sup_tv_x_c = 0.0;
  double sup_tv_t_lnu = 0.0;
  double sup_tv_x_lnu = 0.0;
  double sup_tv_t_lnv = 0.0;
  double bound_lnu = 0.0;
  bool c_bound_ok = false;
  bool lnu_bound_ok = false;
  bool ok() const { return c_bound_ok && lnu_bound_ok; }
};

// TV in t is exact along each sampled column; TV in x is measured on the sample grid.
BVReport bv_report(const Trajectory& traj, const std::vector<double>& sample_xs,
                   const std::vector<double>& sample_ts, double gamma_hat, double Gamma_hat);

struct StratificationReport {
  std::size_t nodes = 0;
  double max_gap_lnv = 0.0;      // original vs unit run in tau = int ub
  double max_gap_c = 0.0;
  double literal_gap_lnv = 0.0;  // same t, no reparametrisation (information only)
  bool ok(double tol = 1e-12) const { return max_gap_lnv <= tol && max_gap_c <= tol; }
};

// Compares ln v from the given run against a run with ub = 1 in the time tau = int_0^t ub.
StratificationReport stratification_check(const Trajectory& traj, std::size_t nt, std::size_t nx);

// sup over t of |c_fta - c_smooth| along column x, evaluated at the FTA breakpoints.
double linf_gap_column(const Trajectory& traj, const CharacteristicSolver& smooth, double x);

enum class ExperimentSolver { Characteristics, FrontTracking };

struct ExperimentSetup {
  Profile c0;
  Profile cb;
  OscillatingProfile ub;
  double T = 1.0;
  double X = 1.0;
  std::vector<double> eps;
  ExperimentSolver solver = ExperimentSolver::Characteristics;
  std::size_t nt = 200;           // L1 midpoint grid
  std::size_t nx = 100;
  double delta = 0.02;            // front tracking only
  std::size_t cells_per_period = 16;  // ub cell averages per oscillation (front tracking)
  std::size_t min_cells = 64;
  std::vector<double> sample_ts;  // optional output grid for each run
  std::vector<double> sample_xs;
};

struct EpsilonResult {
  double eps = 0.0;
  double l1_c = 0.0;
  double l1_u = 0.0;
  double l1_v = 0.0;
  bool failed = false;
  std::string failure;
  std::vector<double> sample_c, sample_u, sample_v;  // on sample_ts x sample_xs, row = t index
};

struct ExperimentReport {
  ExperimentSolver solver = ExperimentSolver::Characteristics;
  std::size_t nt = 0, nx = 0;
  std::vector<EpsilonResult> runs;
  EpsilonResult control;          // amplitude zero at the smallest eps
  double tv_c_initial = 0.0;
  double tv_ln_ub_mean = 0.0;
  bool c_decreasing = false;
  bool u_decreasing = false;
  bool control_zero = false;
  bool ok() const { return c_decreasing && u_decreasing && control_zero; }
};

// Domain error if the eps list is not strictly decreasing or ub is not bounded below by a positive number.
ExperimentReport oscillation_experiment(const ValidatedModel& model, const ExperimentSetup& setup);

struct EntropySweep {
  std::vector<double> deltas;
  std::vector<double> xs;
  std::vector<std::vector<double>> residuals;  // [level][abscissa]
  std::vector<double> constants;               // per abscissa: max(residual, 0) / delta at level 0
  bool ok = false;
};

// Runs front tracking for delta0, delta0/2, ... and checks residual(delta, x) <= C(x) delta.
EntropySweep entropy_residual_sweep(const ValidatedModel& model, const TrackingData& data,
                                    const TestFunction& psi, double delta0, std::size_t levels,
                                    const std::vector<double>& xs);

}  // namespace psa
