#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psa/profiles.hpp"
#include "psa/riemann.hpp"
#include "psa/thermo.hpp"

namespace psa {

struct DataConfig {
  double T = 1.0;
  double X = 1.0;
  Profile c0 = Profile::make_constant(0.5);
  Profile cb = Profile::make_constant(0.5);
  Profile ub = Profile::make_constant(1.0);
  std::size_t min_cells = 16;  // resolution for non step-like profiles
};

struct SolverConfig {
  double delta = 0.05;
  double dt = 0.01;
  double cfl = 0.9;
  double dx = 0.0;       // 0: adaptive
  std::size_t nt = 100;  // smooth solver grid
  std::size_t nx = 100;
};

struct OutputConfig {
  std::vector<double> slices_x;
  std::vector<double> slices_t;
  std::size_t default_samples = 11;  // per axis when no slices are given
};

struct RiemannConfig {
  State below;
  State above;
  std::vector<double> z;
};

struct ExperimentConfig {
  std::vector<double> eps;
  double amplitude = 0.5;
  std::string solver = "characteristics";  // or "front_tracking"
  std::size_t nt = 200;
  std::size_t nx = 100;
};

struct RunConfig {
  IsothermModel model = IsothermModel(LinearIsotherm{});
  DataConfig data;
  SolverConfig solver;
  OutputConfig output;
  std::optional<RiemannConfig> riemann;
  ExperimentConfig experiment;
  std::uint64_t seed = 1;
};

// Throws ConfigError listing every offending field. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);

// "x=0.1,0.5;t=0,1" into output.slices_x / slices_t.
void apply_slices_flag(OutputConfig& out, const std::string& flag);

}  // namespace psa
