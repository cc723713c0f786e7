#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace psa {

// Right-continuous step function: values[i] on [breaks[i], breaks[i+1]).
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(std::vector<double> breaks, std::vector<double> values);

  static PiecewiseConstant constant(double start, double end, double value);
  // Exact mean of f over each of n uniform cells.
  static PiecewiseConstant cell_average(const std::function<double(double)>& f, double start,
                                        double end, std::size_t n);

  double operator()(double s) const;
  double left_limit(double s) const;
  double start() const { return breaks_.front(); }
  double end() const { return breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

  // Interior break points where the value actually changes.
  std::vector<double> jump_points() const;
  double total_variation() const;
  double min() const;
  double max() const;
  double integral(double a, double b) const;

  PiecewiseConstant map(const std::function<double(double)>& f) const;
  // Same values on new break positions s -> phi(s); phi must be increasing.
  PiecewiseConstant reparametrized(const std::function<double(double)>& phi) const;

 private:
  std::size_t cell(double s) const;
  std::vector<double> breaks_;
  std::vector<double> values_;
};

// Named analytic profile of one variable.
struct Profile {
  enum class Kind { Constant, Ramp, Step, Table, Sine };
  Kind kind = Kind::Constant;
  double value = 0.0;                // constant
  double from = 0.0, to = 0.0;       // ramp and step values
  double start = 0.0, end = 1.0;     // ramp support
  double at = 0.0;                   // step position
  std::vector<double> breaks;        // table
  std::vector<double> values;        // table
  double mean = 0.0, amplitude = 0.0, period = 1.0, phase = 0.0;  // sine

  static Profile make_constant(double v);
  static Profile make_ramp(double from, double to, double start, double end);
  static Profile make_step(double from, double to, double at);
  static Profile make_sine(double mean, double amplitude, double period, double phase = 0.0);

  double operator()(double s) const;
  bool is_piecewise_constant() const;
  // Exact for step-like kinds, cell averages on n_cells otherwise.
  PiecewiseConstant discretize(double a, double b, std::size_t n_cells) const;
  // Jumps of c never exceed delta: ramps are cut into level steps of height <= delta.
  PiecewiseConstant discretize_levels(double a, double b, double delta) const;
  // Levels for ramps, exact for step-like kinds, otherwise cell averages on cells of width <= (b - a) / min_cells
  // and <= delta / 4.
  PiecewiseConstant discretize_tracking(double a, double b, double delta, std::size_t min_cells = 16) const;
};

// u_b(t, theta) = mean(t) + amplitude * sin(2 pi theta), 1-periodic in theta.
struct OscillatingProfile {
  Profile mean;
  double amplitude = 0.0;

  double operator()(double t, double theta) const;
  double average(double t) const { return mean(t); }
  std::function<double(double)> at_scale(double eps) const;
};

}  // namespace psa
