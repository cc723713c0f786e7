#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own quadrature or interpolation.

#include <cmath>
#include <functional>

namespace oracle {

inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Richardson-extrapolated central difference, O(h^4).
inline double richardson_diff(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (4.0 * central_diff(f, x, h / 2) - central_diff(f, x, h)) / 3.0;
}

inline double second_diff(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Linear(0, 1): h = 1 - c, H = 1 + c, f = c^2 - c, g = ln(1 + c), F = c / (1 + c).
namespace lin01 {
inline double h(double c) { return 1.0 - c; }
inline double H(double c) { return 1.0 + c; }
inline double f(double c) { return c * c - c; }
inline double g(double c) { return std::log1p(c); }
inline double G(double c) { return 1.0 + c; }
inline double F(double c) { return c / (1.0 + c); }
// L+ - L- across a shock from c_minus down to c_plus.
inline double S(double c_plus, double c_minus) { return std::log((1.0 + c_minus) / (1.0 + c_plus)); }
}  // namespace lin01

// Binary Langmuir written out from the isotherm values only.
struct Langmuir {
  double Q1, K1, Q2, K2;
  double q1(double c) const { return Q1 * K1 * c / (1.0 + K1 * c + K2 * (1.0 - c)); }
  double q2(double c) const { return Q2 * K2 * (1.0 - c) / (1.0 + K1 * c + K2 * (1.0 - c)); }
  double h(double c) const { return q1(c) + q2(c); }
  double f(double c) const { return q1(c) - c * h(c); }
};

}  // namespace oracle
