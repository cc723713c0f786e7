#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace psa {

// q1 = K1 c, q2 = K2 (1 - c).
struct LinearIsotherm {
  double k1 = 0.0;
  double k2 = 1.0;
};

// q_i = Q_i K_i c_i / (1 + K1 c1 + K2 c2) with c1 = c, c2 = 1 - c.
struct BinaryLangmuir {
  double q1 = 1.0;
  double k1 = 1.0;
  double q2 = 1.0;
  double k2 = 1.0;
};

// Isotherm of a single active gas as a function of its own concentration.
struct ConcaveIsotherm {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

ConcaveIsotherm langmuir_isotherm(double capacity, double affinity);

// One gas is inert (no adsorption). By default gas 2 is the active one.
struct InertPlusConcave {
  ConcaveIsotherm active;
  bool active_is_gas1 = false;
};

struct IsothermValues {
  double q1, dq1, d2q1;
  double q2, dq2, d2q2;
};

struct ThermoPoint {
  double c;
  double q1, q2;
  double h, dh;
  double f, df, d2f;
  double H;
  double g, G, F;
};

namespace detail {
struct PrimitiveTable;
}

class IsothermModel {
 public:
  using Params = std::variant<LinearIsotherm, BinaryLangmuir, InertPlusConcave>;

  explicit IsothermModel(Params params);

  const Params& params() const { return params_; }
  std::string describe() const;

  // Gas labels exchanged: c -> 1 - c, q1 <-> q2. Flips the sign of f''.
  IsothermModel relabeled() const;

  // Copy whose g and F come from the quadrature table even when a closed
  // form exists. Used to cross-check the table.
  IsothermModel with_quadrature() const;
  bool uses_quadrature() const { return table_ != nullptr; }

  IsothermValues isotherms(double c) const;
  ThermoPoint eval(double c) const;

  double h(double c) const;
  double dh(double c) const;
  double f(double c) const;
  double df(double c) const;
  double d2f(double c) const;
  double H(double c) const;
  double dH(double c) const;
  double g(double c) const;
  double dg(double c) const;
  double G(double c) const;
  double F(double c) const;
  double dF(double c) const;
  double d2F(double c) const;

 private:
  Params params_;
  std::shared_ptr<const detail::PrimitiveTable> table_;
};

// Clamp roundoff excursions of size <= 1e-12 back into [0,1]; throw beyond.
double checked_concentration(double c);

ThermoPoint eval_thermo(const IsothermModel& model, double c);

// dt/dx slope of the genuinely nonlinear field.
double lambda_speed(const ThermoPoint& tp, double u);

// Shock branch of the lambda-wave curve: L_plus - L_minus for c_minus > c_plus.
double shock_curve(const IsothermModel& model, double c_plus, double c_minus);

struct CriterionResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct ModelReport {
  std::string model;
  std::size_t n_samples = 0;
  double f2_min = 0.0;
  double f2_min_at = 0.0;
  double f2_max = 0.0;
  double dh_max = 0.0;
  double dh_max_at = 0.0;
  bool shock_monotone_minus = true;
  bool shock_monotone_plus = true;
  bool orientation_ok = true;
  bool recommend_swap = false;
  std::vector<CriterionResult> criteria;

  bool passed() const;
};

ModelReport validate_model(const IsothermModel& model, std::size_t n_samples = 101);

// A model that passed validate_model. The solvers only accept this type.
class ValidatedModel {
 public:
  static ValidatedModel check(const IsothermModel& model, std::size_t n_samples = 101);

  const IsothermModel& model() const { return model_; }
  const ModelReport& report() const { return report_; }
  const IsothermModel* operator->() const { return &model_; }

 private:
  ValidatedModel(IsothermModel model, ModelReport report)
      : model_(std::move(model)), report_(std::move(report)) {}
  IsothermModel model_;
  ModelReport report_;
};

}  // namespace psa
