#pragma once

#include <cmath>
#include <string_view>
#include <variant>
#include <vector>

#include "psa/thermo.hpp"

namespace psa {

// Constant state in (c, L = ln u) coordinates.
struct State {
  double c = 0.0;
  double L = 0.0;
  double u() const { return std::exp(L); }
  friend bool operator==(const State&, const State&) = default;
};

enum class WaveKind { Contact, Shock, RareStep };

std::string_view to_string(WaveKind kind);

// A jump between two states. "left" is the lower (smaller t) side, "right"
// the upper side; speed is the slope dt/dx of the jump line.
struct Wave {
  WaveKind kind = WaveKind::Contact;
  State left;
  State right;
  double speed = 0.0;
};

struct ShockWave {
  double speed;
};

struct RarefactionWave {
  double z_minus;
  double z_plus;
  double phi;
};

struct RiemannFan {
  State below;
  State middle;
  State above;
  Wave contact;
  std::variant<std::monostate, ShockWave, RarefactionWave> lambda_wave;

  bool has_shock() const { return std::holds_alternative<ShockWave>(lambda_wave); }
  bool has_rarefaction() const { return std::holds_alternative<RarefactionWave>(lambda_wave); }
  double contact_strength() const { return middle.L - below.L; }
};

// L_plus - L_minus along the lambda-wave curve through (c_minus, .).
double wave_curve_T(const ValidatedModel& model, double c_minus, double c_plus);

RiemannFan solve_riemann(const ValidatedModel& model, const State& below, const State& above);

double shock_speed(const ValidatedModel& model, const State& left, const State& right);

// ln(H G)(c) - ln(H G)(c_ref); increasing in c when f'' > 0.
double fan_phase(const ValidatedModel& model, double c_ref, double c);

State sample_fan(const ValidatedModel& model, const RiemannFan& fan, double z);

std::vector<Wave> discretize_rarefaction(const ValidatedModel& model, const State& left,
                                         const State& right, double delta);

}  // namespace psa
