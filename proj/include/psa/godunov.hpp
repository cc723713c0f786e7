#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "psa/fronttrack.hpp"
#include "psa/riemann.hpp"

namespace psa {

struct GodunovOptions {
  double cfl = 0.9;
  double dx = 0.0;               // fixed step; 0 picks the CFL step each slice
  std::vector<double> keep_x;    // slices to store (hit exactly); empty keeps all
};

struct GridSlice {
  double x = 0.0;
  std::vector<double> u;
  std::vector<double> c;
};

struct GridSolution {
  double T = 0.0;
  double X = 0.0;
  double dt = 0.0;
  double cfl = 0.0;
  std::size_t steps = 0;
  double dx_min = 0.0;
  double dx_max = 0.0;
  double conservation_defect = 0.0;     // max per-slice relative defect
  std::size_t positivity_violations = 0;
  std::vector<GridSlice> slices;

  std::size_t cells() const { return slices.empty() ? 0 : slices.front().c.size(); }
  // Cell value on the stored slice closest to x.
  State sample(double t, double x) const;
};

// Finite volumes in t, marching in x; interface flux Phi at the z = 0+ state of the exact fan.
GridSolution godunov_march(const ValidatedModel& model, const TrackingData& data, double dt, double X,
                           const GodunovOptions& opts = {});

using Sampler = std::function<State(double t, double x)>;

struct L1Distance {
  double c = 0.0;
  double u = 0.0;
};

// Composite midpoint rule on n cells of [0, T] at abscissa x.
L1Distance l1_slice_distance(const Sampler& a, const Sampler& b, double x, double T, std::size_t n);

}  // namespace psa
