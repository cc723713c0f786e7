#include "psa/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

PiecewiseConstant::PiecewiseConstant(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (values_.empty() || breaks_.size() != values_.size() + 1) {
    throw DomainError("piecewise constant needs n values and n+1 breaks");
  }
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] < breaks_[i + 1])) {
      throw DomainError(fmt::format("breaks must increase strictly (index {})", i));
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("piecewise constant value is not finite");
  }
}

PiecewiseConstant PiecewiseConstant::constant(double start, double end, double value) {
  return PiecewiseConstant({start, end}, {value});
}

PiecewiseConstant PiecewiseConstant::cell_average(const std::function<double(double)>& f,
                                                  double start, double end, std::size_t n) {
  if (n == 0) throw DomainError("cell_average needs at least one cell");
  std::vector<double> breaks(n + 1), values(n);
  const double w = (end - start) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    breaks[i] = i == n ? end : start + w * static_cast<double>(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                    f, breaks[i], breaks[i + 1], 8, 1e-13) /
                (breaks[i + 1] - breaks[i]);
  }
  return PiecewiseConstant(std::move(breaks), std::move(values));
}

std::size_t PiecewiseConstant::cell(double s) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
  if (it == breaks_.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - breaks_.begin()) - 1,
                               values_.size() - 1);
}

double PiecewiseConstant::operator()(double s) const { return values_[cell(s)]; }

double PiecewiseConstant::left_limit(double s) const {
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), s);
  if (it == breaks_.begin()) return values_.front();
  return values_[std::min<std::size_t>(static_cast<std::size_t>(it - breaks_.begin()) - 1,
                                       values_.size() - 1)];
}

std::vector<double> PiecewiseConstant::jump_points() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] != values_[i - 1]) out.push_back(breaks_[i]);
  }
  return out;
}

double PiecewiseConstant::total_variation() const {
  double tv = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) tv += std::abs(values_[i] - values_[i - 1]);
  return tv;
}

double PiecewiseConstant::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PiecewiseConstant::max() const { return *std::max_element(values_.begin(), values_.end()); }

double PiecewiseConstant::integral(double a, double b) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double lo = std::max(a, breaks_[i]);
    const double hi = std::min(b, breaks_[i + 1]);
    if (hi > lo) sum += values_[i] * (hi - lo);
  }
  return sum;
}

PiecewiseConstant PiecewiseConstant::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), f);
  return PiecewiseConstant(breaks_, std::move(v));
}

PiecewiseConstant PiecewiseConstant::reparametrized(
    const std::function<double(double)>& phi) const {
  std::vector<double> b(breaks_.size());
  std::transform(breaks_.begin(), breaks_.end(), b.begin(), phi);
  return PiecewiseConstant(std::move(b), values_);
}

Profile Profile::make_constant(double v) {
  Profile p;
  p.kind = Kind::Constant;
  p.value = v;
  return p;
}

Profile Profile::make_ramp(double from, double to, double start, double end) {
  Profile p;
  p.kind = Kind::Ramp;
  p.from = from;
  p.to = to;
  p.start = start;
  p.end = end;
  return p;
}

Profile Profile::make_step(double from, double to, double at) {
  Profile p;
  p.kind = Kind::Step;
  p.from = from;
  p.to = to;
  p.at = at;
  return p;
}

Profile Profile::make_sine(double mean, double amplitude, double period, double phase) {
  Profile p;
  p.kind = Kind::Sine;
  p.mean = mean;
  p.amplitude = amplitude;
  p.period = period;
  p.phase = phase;
  return p;
}

double Profile::operator()(double s) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Ramp:
      if (s <= start) return from;
      if (s >= end) return to;
      return from + (to - from) * (s - start) / (end - start);
    case Kind::Step:
      return s < at ? from : to;
    case Kind::Table:
      return PiecewiseConstant(breaks, values)(s);
    case Kind::Sine:
      return mean + amplitude * std::sin(2.0 * std::numbers::pi * s / period + phase);
  }
  return value;
}

bool Profile::is_piecewise_constant() const {
  return kind == Kind::Constant || kind == Kind::Step || kind == Kind::Table;
}

PiecewiseConstant Profile::discretize(double a, double b, std::size_t n_cells) const {
  switch (kind) {
    case Kind::Constant:
      return PiecewiseConstant::constant(a, b, value);
    case Kind::Step:
      if (at <= a) return PiecewiseConstant::constant(a, b, to);
      if (at >= b) return PiecewiseConstant::constant(a, b, from);
      return PiecewiseConstant({a, at, b}, {from, to});
    case Kind::Table: {
      if (breaks.front() > a || breaks.back() < b) {
        throw DomainError(fmt::format("table covers [{}, {}], needed [{}, {}]", breaks.front(),
                                      breaks.back(), a, b));
      }
      std::vector<double> bk{a}, vals;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (breaks[i + 1] <= a || breaks[i] >= b) continue;
        if (breaks[i] > a) bk.push_back(breaks[i]);
        vals.push_back(values[i]);
      }
      bk.push_back(b);
      return PiecewiseConstant(std::move(bk), std::move(vals));
    }
    default:
      return PiecewiseConstant::cell_average([this](double s) { return (*this)(s); }, a, b,
                                             n_cells);
  }
}

PiecewiseConstant Profile::discretize_tracking(double a, double b, double delta,
                                               std::size_t min_cells) const {
  if (kind == Kind::Ramp) return discretize_levels(a, b, delta);
  if (is_piecewise_constant()) return discretize(a, b, 1);
  const auto n = static_cast<std::size_t>(std::ceil(4.0 * (b - a) / delta));
  return discretize(a, b, std::max(n, min_cells));
}

PiecewiseConstant Profile::discretize_levels(double a, double b, double delta) const {
  if (kind != Kind::Ramp) {
    if (is_piecewise_constant()) return discretize(a, b, 1);
    throw DomainError("level discretization needs a ramp or a step-like profile");
  }
  const double lo = std::max(a, start);
  const double hi = std::min(b, end);
  if (!(hi > lo) || from == to) return discretize(a, b, 1);
  const double v_lo = (*this)(lo);
  const double v_hi = (*this)(hi);
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::abs(v_hi - v_lo) / delta - 1e-9)));
  std::vector<double> bk{a}, vals{v_lo};
  for (std::size_t k = 1; k <= n; ++k) {
    // Switch level where the ramp crosses the midpoint between levels.
    const double frac = (static_cast<double>(k) - 0.5) / static_cast<double>(n);
    const double s = lo + (hi - lo) * frac;
    if (s > bk.back() && s < b) {
      bk.push_back(s);
      vals.push_back(k == n ? v_hi
                            : v_lo + (v_hi - v_lo) * static_cast<double>(k) /
                                         static_cast<double>(n));
    }
  }
  bk.push_back(b);
  return PiecewiseConstant(std::move(bk), std::move(vals));
}

double OscillatingProfile::operator()(double t, double theta) const {
  return mean(t) + amplitude * std::sin(2.0 * std::numbers::pi * theta);
}

std::function<double(double)> OscillatingProfile::at_scale(double eps) const {
  return [p = *this, eps](double t) { return p(t, t / eps); };
}

}  // namespace psa
