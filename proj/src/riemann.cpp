#include "psa/riemann.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

std::string_view to_string(WaveKind kind) {
  switch (kind) {
    case WaveKind::Contact:
      return "contact";
    case WaveKind::Shock:
      return "shock";
    case WaveKind::RareStep:
      return "rarestep";
  }
  return "?";
}

double wave_curve_T(const ValidatedModel& model, double c_minus, double c_plus) {
  c_minus = checked_concentration(c_minus);
  c_plus = checked_concentration(c_plus);
  if (c_minus == c_plus) return 0.0;
  if (c_minus < c_plus) return -(model->g(c_plus) - model->g(c_minus));
  return shock_curve(model.model(), c_plus, c_minus);
}

double fan_phase(const ValidatedModel& model, double c_ref, double c) {
  return std::log(model->H(c) / model->H(c_ref)) + model->g(c) - model->g(c_ref);
}

double shock_speed(const ValidatedModel& model, const State& left, const State& right) {
  if (left.c == right.c) {
    throw DomainError("shock_speed needs distinct concentrations");
  }
  const double jump = right.c - left.c;
  const double alpha = std::abs(jump) < 1e-9
                           ? model->df(0.5 * (left.c + right.c)) + 1.0
                           : (model->f(right.c) - model->f(left.c)) / jump + 1.0;
  const double s_right = (alpha + model->h(right.c)) / right.u();
  const double s_left = (alpha + model->h(left.c)) / left.u();
  if (!(std::abs(s_right - s_left) <= 1e-9 * std::max(std::abs(s_right), std::abs(s_left)))) {
    throw ConsistencyError(fmt::format(
        "states ({}, {}) -> ({}, {}) are not on a shock curve: speeds {} vs {}", left.c,
        left.L, right.c, right.L, s_left, s_right));
  }
  return s_right;
}

RiemannFan solve_riemann(const ValidatedModel& model, const State& below, const State& above) {
  RiemannFan fan;
  fan.below = below;
  fan.above = above;
  fan.middle = State{below.c, above.L - wave_curve_T(model, below.c, above.c)};
  fan.contact = Wave{WaveKind::Contact, below, fan.middle, 0.0};
  if (below.c > above.c) {
    fan.lambda_wave = ShockWave{shock_speed(model, fan.middle, above)};
  } else if (below.c < above.c) {
    const double z_plus = model->H(above.c) / above.u();
    const double phi = fan_phase(model, below.c, above.c);
    fan.lambda_wave = RarefactionWave{z_plus * std::exp(-phi), z_plus, phi};
  }
  return fan;
}

State sample_fan(const ValidatedModel& model, const RiemannFan& fan, double z) {
  if (!(z > 0.0)) throw DomainError(fmt::format("fan sampled at z = {} <= 0", z));
  if (const auto* s = std::get_if<ShockWave>(&fan.lambda_wave)) {
    return z < s->speed ? fan.middle : fan.above;
  }
  if (const auto* r = std::get_if<RarefactionWave>(&fan.lambda_wave)) {
    if (z < r->z_minus) return fan.middle;
    if (z >= r->z_plus) return fan.above;
    const double c_m = fan.middle.c;
    const double target = std::log(z / r->z_minus);
    auto residual = [&](double c) {
      return std::make_pair(fan_phase(model, c_m, c) - target, model->d2f(c) / model->H(c));
    };
    std::uintmax_t iters = 100;
    const double guess = c_m + (fan.above.c - c_m) * target / r->phi;
    const double c = boost::math::tools::newton_raphson_iterate(
        residual, guess, c_m, fan.above.c, 50, iters);
    return State{c, std::log(model->H(c) / z)};
  }
  return fan.above;
}

std::vector<Wave> discretize_rarefaction(const ValidatedModel& model, const State& left,
                                         const State& right, double delta) {
  if (!(delta > 0.0)) throw DomainError("rarefaction step must be positive");
  if (!(left.c < right.c)) throw DomainError("rarefaction needs left.c < right.c");
  const double width = right.c - left.c;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(width / delta - 1e-9)));
  const double g_left = model->g(left.c);
  std::vector<Wave> steps;
  steps.reserve(n);
  State lo = left;
  for (std::size_t k = 1; k <= n; ++k) {
    State hi;
    if (k == n) {
      hi = right;
    } else {
      hi.c = left.c + width * static_cast<double>(k) / static_cast<double>(n);
      hi.L = left.L - (model->g(hi.c) - g_left);
    }
    steps.push_back(Wave{WaveKind::RareStep, lo, hi, model->H(lo.c) / lo.u()});
    lo = hi;
  }
  return steps;
}

}  // namespace psa
