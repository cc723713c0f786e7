#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psa/thermo.hpp"

namespace psa {

struct TestFunction {
  std::string name;
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  std::vector<double> kinks;

  static TestFunction square();
  static TestFunction positive_part(double level);
  static TestFunction constant(double value);
  static TestFunction identity(double sign);
};

// Entropy flux Q with Q' = h' psi + H psi', Q(0) = 0.
double entropy_flux(const ValidatedModel& model, const TestFunction& psi, double c);

}  // namespace psa
