#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psa/entropy.hpp"
#include "psa/profiles.hpp"
#include "psa/riemann.hpp"

namespace psa {

// Piecewise constant data: c0 on (0, X), cb and ub on (0, T).
struct TrackingData {
  PiecewiseConstant c0;
  PiecewiseConstant cb;
  PiecewiseConstant ub;

  double T() const { return cb.end(); }
  double X() const { return c0.end(); }
};

struct Front {
  Wave wave;
  double x0 = 0.0;
  double t0 = 0.0;
  std::uint64_t id = 0;
  bool perturbed = false;
  double x_birth = 0.0;
  double x_death = std::numeric_limits<double>::infinity();

  double t_at(double x) const { return t0 + wave.speed * (x - x0); }
  bool alive_at(double x) const { return x_birth <= x && x < x_death; }
};

enum class IncomingCase { RD, SD, RS, SR, SS, RR };
enum class OutgoingCase { D, DR, DS };

std::string_view to_string(IncomingCase c);
std::string_view to_string(OutgoingCase c);

struct InteractionRecord {
  std::size_t index = 0;
  double x = 0.0;
  double t = 0.0;
  IncomingCase incoming = IncomingCase::SS;
  OutgoingCase outgoing = OutgoingCase::DS;
  std::uint64_t lower_id = 0;
  std::uint64_t upper_id = 0;
  State s0, s1, s2;  // below, between and above the incoming pair
  State middle;      // outgoing intermediate state (c0, L1*)
  double tvc_before = 0.0, tvc_after = 0.0;
  double tvl_before = 0.0, tvl_after = 0.0;
  double quadratic = 0.0;  // |c0 - c1| |c1 - c2|
  std::size_t outgoing_steps = 0;
  bool contact_dropped = false;
};

struct Event {
  enum class Kind { Collision, InitialJump, End };
  Kind kind = Kind::End;
  double x = 0.0;
  double t = 0.0;
  std::size_t lower = 0;
  std::uint64_t lower_id = 0;
  std::uint64_t upper_id = 0;
};

struct TrackOptions {
  double eta = 1e-12;            // relative speed nudge against triple points
  double contact_drop = 1e-13;   // contacts weaker than this (in L) are not created
  std::size_t max_events = 5'000'000;
};

class Trajectory;

class FrontState {
 public:
  const ValidatedModel& model() const { return model_; }
  double x() const { return x_; }
  double delta() const { return delta_; }
  double T() const { return data_.T(); }
  double X() const { return data_.X(); }
  const TrackingData& data() const { return data_; }
  const std::vector<Front>& fronts() const { return fronts_; }
  const std::vector<Front>& retired() const { return retired_; }
  State bottom() const { return bottom_; }
  const std::vector<std::pair<double, State>>& bottom_history() const { return bottom_history_; }
  const std::vector<std::pair<double, double>>& pending_jumps() const { return pending_; }
  const std::vector<InteractionRecord>& records() const { return records_; }
  std::size_t perturbations() const { return perturbations_; }
  std::size_t events() const { return events_; }

  // Test hook: scales the speed of the first lambda-front without marking it.
  void inject_speed_fault(double factor);

 private:
  FrontState(ValidatedModel model, TrackingData data, double delta, TrackOptions opts)
      : model_(std::move(model)), data_(std::move(data)), delta_(delta), opts_(opts) {}

  std::uint64_t next_id() { return next_id_++; }
  void insert_wave_fronts(std::size_t pos, const State& lower, const RiemannFan& fan, double x0,
                          double t0, bool with_contact, std::vector<Front>& out);
  void retire(std::size_t i, double x_death);
  void prune_above_T();
  void verify_front(const Front& f) const;
  void verify_chain(std::size_t i) const;
  void separate_triple_points(std::size_t first, std::size_t last);

  ValidatedModel model_;
  TrackingData data_;
  double delta_;
  TrackOptions opts_;
  double x_ = 0.0;
  std::vector<Front> fronts_;
  std::vector<Front> retired_;
  State bottom_;
  std::vector<std::pair<double, State>> bottom_history_;
  std::vector<std::pair<double, double>> pending_;  // (x, new c0 value), ascending
  std::size_t pending_next_ = 0;
  std::vector<InteractionRecord> records_;
  std::uint64_t next_id_ = 1;
  std::size_t perturbations_ = 0;
  std::size_t events_ = 0;

  friend FrontState init_fronts(const ValidatedModel&, const TrackingData&, double,
                                const TrackOptions&);
  friend Event next_event(const FrontState&);
  friend InteractionRecord resolve_interaction(FrontState&, const Event&);
  friend void resolve_initial_jump(FrontState&, const Event&);
  friend class Trajectory;
  friend Trajectory run(FrontState, double);
};

FrontState init_fronts(const ValidatedModel& model, const TrackingData& data, double delta,
                       const TrackOptions& opts = {});
Event next_event(const FrontState& fs);
InteractionRecord resolve_interaction(FrontState& fs, const Event& e);
void resolve_initial_jump(FrontState& fs, const Event& e);

// States along a vertical line x = const, ordered in t.
struct Slice {
  double x = 0.0;
  State bottom;
  std::vector<double> t;          // front positions, nondecreasing
  std::vector<const Front*> fronts;

  State at(double t) const;
  // Piecewise constant representation: states[k] on [times[k], times[k+1]).
  void pieces(double T, std::vector<double>& times, std::vector<State>& states) const;
};

class Trajectory {
 public:
  Trajectory(const FrontState& fs);

  const ValidatedModel& model() const { return model_; }
  const TrackingData& data() const { return data_; }
  double T() const { return data_.T(); }
  double X() const { return X_; }
  double delta() const { return delta_; }
  const std::vector<Front>& fronts() const { return fronts_; }
  const std::vector<InteractionRecord>& records() const { return records_; }
  std::size_t perturbations() const { return perturbations_; }
  std::size_t events() const { return events_; }

  Slice slice(double x) const;
  State sample(double t, double x) const;
  // Piecewise constant t-profile of ln v = L - ln ub at abscissa x.
  void log_v_pieces(double x, std::vector<double>& times, std::vector<double>& values) const;
  // Abscissas where the line t = const crosses a front.
  std::vector<double> crossings(double t) const;

 private:
  ValidatedModel model_;
  TrackingData data_;
  double X_;
  double delta_;
  std::vector<Front> fronts_;
  std::vector<InteractionRecord> records_;
  std::vector<std::pair<double, State>> bottom_history_;
  std::size_t perturbations_;
  std::size_t events_;
};

Trajectory run(FrontState fs, double X);

State sample_solution(const Trajectory& traj, double t, double x);

// Per-front terms [Q(c)] - s [u psi(c)] summed over the fronts crossing x.
double front_entropy_term(const ValidatedModel& model, const TestFunction& psi, const Wave& w);
double entropy_residual(const Trajectory& traj, double x, const TestFunction& psi);

}  // namespace psa
