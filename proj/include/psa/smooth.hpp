#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "psa/entropy.hpp"
#include "psa/thermo.hpp"

namespace psa {

struct SmoothData {
  std::function<double(double)> c0;  // on [0, X]
  std::function<double(double)> cb;  // on [0, T]
  std::function<double(double)> ub;  // on [0, T], positive
  double T = 1.0;
  double X = 1.0;
};

struct SmoothGrid {
  std::size_t nt = 100;        // output nodes t_i = i T / nt
  std::size_t nx = 100;        // output nodes x_j = j X / nx
  std::size_t n_b = 1 << 15;   // trapezoid cells for b(t)
  std::size_t n_probe = 1 << 14;  // characteristic pairs probed for crossings
};

struct Breakdown {
  enum class Family { Initial, Boundary };
  Family family = Family::Initial;
  double t = 0.0;
  double x = 0.0;
  double b = 0.0;  // value of b(t) at the crossing
};

// Characteristics of  c_t + w(t) (F(c))_x = 0  with  w = ub G(cb).
class CharacteristicSolver {
 public:
  CharacteristicSolver(ValidatedModel model, SmoothData data, const SmoothGrid& grid);

  const ValidatedModel& model() const { return model_; }
  const SmoothData& data() const { return data_; }
  const std::optional<Breakdown>& breakdown() const { return breakdown_; }

  // b(t) = int_0^t ub G(cb), by cumulative trapezoid.
  double b(double t) const;
  double b_inverse(double b) const;
  // Abscissa of the corner characteristic at time t.
  double gamma(double t) const;
  bool valid(double t) const { return !breakdown_ || t < breakdown_->t; }
  // NaN past the breakdown time.
  double concentration(double t, double x) const;
  double velocity(double t, double x) const;

 private:
  void detect_breakdown(std::size_t n_probe);

  ValidatedModel model_;
  SmoothData data_;
  std::vector<double> tb_;
  std::vector<double> bb_;
  double dF_corner_ = 0.0;
  std::optional<Breakdown> breakdown_;
};

struct SmoothSolution {
  std::shared_ptr<const CharacteristicSolver> solver;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> c;          // row-major, c[i * x.size() + j]; NaN past breakdown
  std::vector<double> v;          // u / ub
  std::vector<std::int8_t> side;  // +1 above the corner characteristic (initial feet), -1 below

  std::size_t index(std::size_t i, std::size_t j) const { return i * x.size() + j; }
  const std::optional<Breakdown>& breakdown() const { return solver->breakdown(); }
  bool complete() const { return !breakdown().has_value(); }
  std::size_t rows_valid() const;
};

// Domain error if c0(0) != cb(0) or ub is not positive on the b-grid.
SmoothSolution solve_characteristics(const ValidatedModel& model, const SmoothData& data,
                                     const SmoothGrid& grid);

struct VelocityField {
  std::vector<double> t, x;
  std::vector<double> u;
  std::vector<double> v;
};

VelocityField reconstruct_velocity(const SmoothSolution& sol,
                                   const std::function<double(double)>& ub,
                                   const std::function<double(double)>& cb);

// Max residual of  (u psi(c))_x + Q(c)_t = 0  over psi_list and of  (u G(c))_x = 0,
// by centered differences on stencils lying on one side of the corner characteristic.
double entropy_equalities_check(const SmoothSolution& sol, const std::vector<TestFunction>& psi_list);

}  // namespace psa
