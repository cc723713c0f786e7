#include "psa/entropy.hpp"

#include <algorithm>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace psa {

TestFunction TestFunction::square() {
  return {"c^2", [](double c) { return c * c; }, [](double c) { return 2.0 * c; }, {}};
}

TestFunction TestFunction::positive_part(double level) {
  return {fmt::format("(c-{})+", level),
          [level](double c) { return std::max(c - level, 0.0); },
          [level](double c) { return c > level ? 1.0 : 0.0; },
          {level}};
}

TestFunction TestFunction::constant(double value) {
  return {fmt::format("{}", value), [value](double) { return value; },
          [](double) { return 0.0; }, {}};
}

TestFunction TestFunction::identity(double sign) {
  return {fmt::format("{}c", sign), [sign](double c) { return sign * c; },
          [sign](double) { return sign; }, {}};
}

double entropy_flux(const ValidatedModel& model, const TestFunction& psi, double c) {
  c = checked_concentration(c);
  auto integrand = [&](double s) {
    return model->dh(s) * psi.psi(s) + model->H(s) * psi.dpsi(s);
  };
  double total = 0.0;
  double a = 0.0;
  std::vector<double> cuts;
  for (double k : psi.kinks) {
    if (k > 0.0 && k < c) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(c);
  for (double b : cuts) {
    if (b > a) {
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 10,
                                                                             1e-14);
    }
    a = b;
  }
  return total;
}

}  // namespace psa
