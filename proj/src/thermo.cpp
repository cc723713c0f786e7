#include "psa/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

namespace detail {

// g and F tabulated on a uniform grid, cubic Hermite in between.
struct PrimitiveTable {
  std::size_t n = 0;
  double step = 0.0;
  std::vector<double> g, dg, F, dF;

  static double hermite(const std::vector<double>& y, const std::vector<double>& m,
                        std::size_t k, double t, double step) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * step * m[k] +
           (-2 * t3 + 3 * t2) * y[k + 1] + (t3 - t2) * step * m[k + 1];
  }

  double interpolate(const std::vector<double>& y, const std::vector<double>& m,
                     double c) const {
    const double s = c / step;
    std::size_t k = static_cast<std::size_t>(s);
    if (k >= n) k = n - 1;
    const double t = s - static_cast<double>(k);
    if (t == 0.0) return y[k];
    return hermite(y, m, k, t, step);
  }
};

namespace {

// Fritsch-Carlson safeguard. With exact slopes on a fine grid of a monotone
// function it never triggers, but the interpolant stays monotone regardless.
void limit_slopes(const std::vector<double>& y, std::vector<double>& m, double step) {
  for (std::size_t k = 0; k + 1 < y.size(); ++k) {
    const double secant = (y[k + 1] - y[k]) / step;
    if (secant == 0.0) {
      m[k] = 0.0;
      m[k + 1] = 0.0;
      continue;
    }
    const double a = m[k] / secant;
    const double b = m[k + 1] / secant;
    const double r = a * a + b * b;
    if (a < 0.0) m[k] = 0.0;
    if (b < 0.0) m[k + 1] = 0.0;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m[k] = tau * a * secant;
      m[k + 1] = tau * b * secant;
    }
  }
}

std::shared_ptr<const PrimitiveTable> build_table(const IsothermModel& model,
                                                  std::size_t intervals) {
  using boost::math::quadrature::gauss;
  auto table = std::make_shared<PrimitiveTable>();
  table->n = intervals;
  table->step = 1.0 / static_cast<double>(intervals);
  const std::size_t nodes = intervals + 1;
  table->g.assign(nodes, 0.0);
  table->dg.assign(nodes, 0.0);
  table->F.assign(nodes, 0.0);
  table->dF.assign(nodes, 0.0);

  auto node = [&](std::size_t k) {
    return k == intervals ? 1.0 : static_cast<double>(k) * table->step;
  };
  auto dg = [&](double c) { return -model.dh(c) / model.H(c); };

  for (std::size_t k = 0; k < intervals; ++k) {
    table->g[k + 1] = table->g[k] + gauss<double, 15>::integrate(dg, node(k), node(k + 1));
  }
  for (std::size_t k = 0; k < intervals; ++k) {
    const double a = node(k);
    const double ga = table->g[k];
    auto dF = [&](double c) {
      const double g_local = ga + gauss<double, 15>::integrate(dg, a, c);
      return std::exp(-g_local) / model.H(c);
    };
    table->F[k + 1] = table->F[k] + gauss<double, 15>::integrate(dF, a, node(k + 1));
  }
  for (std::size_t k = 0; k < nodes; ++k) {
    const double c = node(k);
    table->dg[k] = dg(c);
    table->dF[k] = std::exp(-table->g[k]) / model.H(c);
  }
  limit_slopes(table->g, table->dg, table->step);
  limit_slopes(table->F, table->dF, table->step);
  return table;
}

}  // namespace
}  // namespace detail

ConcaveIsotherm langmuir_isotherm(double capacity, double affinity) {
  ConcaveIsotherm iso;
  iso.name = fmt::format("langmuir(Q={}, K={})", capacity, affinity);
  const double qk = capacity * affinity;
  iso.value = [qk, affinity](double c) { return qk * c / (1.0 + affinity * c); };
  iso.d1 = [qk, affinity](double c) {
    const double d = 1.0 + affinity * c;
    return qk / (d * d);
  };
  iso.d2 = [qk, affinity](double c) {
    const double d = 1.0 + affinity * c;
    return -2.0 * qk * affinity / (d * d * d);
  };
  return iso;
}

double checked_concentration(double c) {
  constexpr double slack = 1e-12;
  if (!(c >= -slack && c <= 1.0 + slack)) {
    throw DomainError(fmt::format("concentration {} outside [0,1]", c));
  }
  return std::clamp(c, 0.0, 1.0);
}

IsothermModel::IsothermModel(Params params) : params_(std::move(params)) {
  if (std::holds_alternative<InertPlusConcave>(params_)) {
    const auto& iso = std::get<InertPlusConcave>(params_).active;
    if (!iso.value || !iso.d1 || !iso.d2) {
      throw DomainError("inert_concave model needs value, d1 and d2");
    }
  }
  if (!std::holds_alternative<LinearIsotherm>(params_)) table_ = detail::build_table(*this, 2048);
}

IsothermModel IsothermModel::with_quadrature() const {
  IsothermModel copy = *this;
  copy.table_.reset();
  copy.table_ = detail::build_table(copy, 2048);
  return copy;
}

std::string IsothermModel::describe() const {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearIsotherm>) {
          return fmt::format("linear(K1={}, K2={})", p.k1, p.k2);
        } else if constexpr (std::is_same_v<P, BinaryLangmuir>) {
          return fmt::format("binary_langmuir(Q1={}, K1={}, Q2={}, K2={})", p.q1, p.k1,
                             p.q2, p.k2);
        } else {
          return fmt::format("inert_concave(active gas {}: {})", p.active_is_gas1 ? 1 : 2,
                             p.active.name);
        }
      },
      params_);
}

IsothermModel IsothermModel::relabeled() const {
  return std::visit(
      [](const auto& p) -> IsothermModel {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearIsotherm>) {
          return IsothermModel(LinearIsotherm{p.k2, p.k1});
        } else if constexpr (std::is_same_v<P, BinaryLangmuir>) {
          return IsothermModel(BinaryLangmuir{p.q2, p.k2, p.q1, p.k1});
        } else {
          return IsothermModel(InertPlusConcave{p.active, !p.active_is_gas1});
        }
      },
      params_);
}

IsothermValues IsothermModel::isotherms(double c) const {
  c = checked_concentration(c);
  return std::visit(
      [c](const auto& p) -> IsothermValues {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearIsotherm>) {
          return {p.k1 * c, p.k1, 0.0, p.k2 * (1.0 - c), -p.k2, 0.0};
        } else if constexpr (std::is_same_v<P, BinaryLangmuir>) {
          const double d = 1.0 + p.k1 * c + p.k2 * (1.0 - c);
          const double dd = p.k1 - p.k2;
          const double a1 = p.q1 * p.k1;
          const double a2 = p.q2 * p.k2;
          return {a1 * c / d,
                  a1 * (1.0 + p.k2) / (d * d),
                  -2.0 * a1 * (1.0 + p.k2) * dd / (d * d * d),
                  a2 * (1.0 - c) / d,
                  -a2 * (1.0 + p.k1) / (d * d),
                  2.0 * a2 * (1.0 + p.k1) * dd / (d * d * d)};
        } else {
          const auto& q = p.active;
          if (p.active_is_gas1) return {q.value(c), q.d1(c), q.d2(c), 0.0, 0.0, 0.0};
          const double c2 = 1.0 - c;
          return {0.0, 0.0, 0.0, q.value(c2), -q.d1(c2), q.d2(c2)};
        }
      },
      params_);
}

double IsothermModel::h(double c) const {
  const auto q = isotherms(c);
  return q.q1 + q.q2;
}

double IsothermModel::dh(double c) const {
  const auto q = isotherms(c);
  return q.dq1 + q.dq2;
}

double IsothermModel::f(double c) const {
  const auto q = isotherms(c);
  return q.q1 - c * (q.q1 + q.q2);
}

double IsothermModel::df(double c) const {
  const auto q = isotherms(c);
  return q.dq1 - (q.q1 + q.q2) - c * (q.dq1 + q.dq2);
}

double IsothermModel::d2f(double c) const {
  const auto q = isotherms(c);
  return q.d2q1 - 2.0 * (q.dq1 + q.dq2) - c * (q.d2q1 + q.d2q2);
}

double IsothermModel::H(double c) const {
  const auto q = isotherms(c);
  return 1.0 + q.dq1 - c * (q.dq1 + q.dq2);
}

double IsothermModel::dH(double c) const {
  const auto q = isotherms(c);
  return q.d2q1 - (q.dq1 + q.dq2) - c * (q.d2q1 + q.d2q2);
}

double IsothermModel::dg(double c) const { return -dh(c) / H(c); }

double IsothermModel::g(double c) const {
  c = checked_concentration(c);
  if (table_) return table_->interpolate(table_->g, table_->dg, c);
  const auto& p = std::get<LinearIsotherm>(params_);
  const double h0 = 1.0 + p.k1;
  return std::log(H(c) / h0);
}

double IsothermModel::G(double c) const { return std::exp(g(c)); }

double IsothermModel::F(double c) const {
  c = checked_concentration(c);
  if (table_) return table_->interpolate(table_->F, table_->dF, c);
  const auto& p = std::get<LinearIsotherm>(params_);
  const double h0 = 1.0 + p.k1;
  if (p.k2 == p.k1) return c / h0;
  return h0 * (1.0 / h0 - 1.0 / H(c)) / (p.k2 - p.k1);
}

double IsothermModel::dF(double c) const { return 1.0 / (H(c) * G(c)); }

double IsothermModel::d2F(double c) const {
  const double hg = H(c) * G(c);
  return -G(c) * d2f(c) / (hg * hg);
}

ThermoPoint IsothermModel::eval(double c) const {
  c = checked_concentration(c);
  const auto q = isotherms(c);
  ThermoPoint tp{};
  tp.c = c;
  tp.q1 = q.q1;
  tp.q2 = q.q2;
  tp.h = q.q1 + q.q2;
  tp.dh = q.dq1 + q.dq2;
  tp.f = q.q1 - c * tp.h;
  tp.df = q.dq1 - tp.h - c * tp.dh;
  tp.d2f = q.d2q1 - 2.0 * tp.dh - c * (q.d2q1 + q.d2q2);
  tp.H = 1.0 + q.dq1 - c * tp.dh;
  tp.g = g(c);
  tp.G = std::exp(tp.g);
  tp.F = F(c);
  return tp;
}

ThermoPoint eval_thermo(const IsothermModel& model, double c) { return model.eval(c); }

double lambda_speed(const ThermoPoint& tp, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw DomainError(fmt::format("velocity {} is not positive", u));
  }
  return tp.H / u;
}

double shock_curve(const IsothermModel& model, double c_plus, double c_minus) {
  c_plus = checked_concentration(c_plus);
  c_minus = checked_concentration(c_minus);
  if (c_plus == c_minus) return 0.0;
  const double jump = c_plus - c_minus;
  double alpha;
  if (std::abs(jump) < 1e-9) {
    alpha = model.df(0.5 * (c_plus + c_minus)) + 1.0;
  } else {
    alpha = (model.f(c_plus) - model.f(c_minus)) / jump + 1.0;
  }
  const double num = alpha + model.h(c_plus);
  const double den = alpha + model.h(c_minus);
  if (!(num > 0.0) || !(den > 0.0)) {
    throw ConsistencyError(fmt::format(
        "shock curve positivity lost: alpha+h = {}, {} for c+ = {}, c- = {}", num, den,
        c_plus, c_minus));
  }
  return std::log(num / den);
}

bool ModelReport::passed() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& r) { return r.passed; });
}

namespace {

void add(ModelReport& r, std::string name, bool ok, std::string detail) {
  r.criteria.push_back({std::move(name), ok, std::move(detail)});
}

void family_criteria(const IsothermModel& model, ModelReport& r, std::size_t n) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearIsotherm>) {
          add(r, "K1 >= 0 and K2 >= 0", p.k1 >= 0.0 && p.k2 >= 0.0,
              fmt::format("K1={}, K2={}", p.k1, p.k2));
          add(r, "K1 < K2", p.k1 < p.k2, fmt::format("K1={}, K2={}", p.k1, p.k2));
        } else if constexpr (std::is_same_v<P, BinaryLangmuir>) {
          add(r, "Q1, K1, Q2, K2 > 0", p.q1 > 0 && p.k1 > 0 && p.q2 > 0 && p.k2 > 0,
              model.describe());
          add(r, "K1 >= K2", p.k1 >= p.k2, fmt::format("K1={}, K2={}", p.k1, p.k2));
          add(r, "Q1 K1 < Q2 K2", p.q1 * p.k1 < p.q2 * p.k2,
              fmt::format("Q1 K1={}, Q2 K2={}", p.q1 * p.k1, p.q2 * p.k2));
        } else {
          double worst = -std::numeric_limits<double>::infinity();
          double worst_at = 0.0;
          double min_slope = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < n; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(n - 1);
            const double d2 = p.active.d2(s);
            if (d2 > worst) {
              worst = d2;
              worst_at = s;
            }
            min_slope = std::min(min_slope, p.active.d1(s));
          }
          add(r, "active isotherm concave", worst <= 0.0,
              fmt::format("max q'' = {} at {}", worst, worst_at));
          add(r, "active isotherm nondecreasing", min_slope >= 0.0,
              fmt::format("min q' = {}", min_slope));
        }
      },
      model.params());
}

}  // namespace

ModelReport validate_model(const IsothermModel& model, std::size_t n_samples) {
  if (n_samples < 2) throw DomainError("validate_model needs at least 2 samples");
  ModelReport r;
  r.model = model.describe();
  r.n_samples = n_samples;
  const std::size_t n = n_samples;
  auto grid = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n - 1); };

  r.f2_min = std::numeric_limits<double>::infinity();
  r.f2_max = -std::numeric_limits<double>::infinity();
  r.dh_max = -std::numeric_limits<double>::infinity();
  double dq1_min = std::numeric_limits<double>::infinity();
  double dq2_max = -std::numeric_limits<double>::infinity();
  double dq1_min_at = 0.0, dq2_max_at = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = grid(i);
    const auto tp = model.eval(c);
    const auto q = model.isotherms(c);
    if (tp.d2f < r.f2_min) {
      r.f2_min = tp.d2f;
      r.f2_min_at = c;
    }
    r.f2_max = std::max(r.f2_max, tp.d2f);
    if (tp.dh > r.dh_max) {
      r.dh_max = tp.dh;
      r.dh_max_at = c;
    }
    if (q.dq1 < dq1_min) {
      dq1_min = q.dq1;
      dq1_min_at = c;
    }
    if (q.dq2 > dq2_max) {
      dq2_max = q.dq2;
      dq2_max_at = c;
    }
  }
  add(r, "q1' >= 0", dq1_min >= 0.0, fmt::format("min {} at c={}", dq1_min, dq1_min_at));
  add(r, "q2' <= 0", dq2_max <= 0.0, fmt::format("max {} at c={}", dq2_max, dq2_max_at));
  family_criteria(model, r, n);
  r.orientation_ok = r.f2_min > 0.0;
  add(r, "f'' > 0", r.orientation_ok, fmt::format("min {} at c={}", r.f2_min, r.f2_min_at));
  add(r, "h' <= 0", r.dh_max <= 0.0, fmt::format("max {} at c={}", r.dh_max, r.dh_max_at));

  // Monotonicity of the shock branch in each argument, by central differences.
  if (r.orientation_ok) {
    constexpr double e = 1e-6;
    constexpr double tol = -1e-7;
    std::string bad_minus, bad_plus;
    const std::size_t m = std::min<std::size_t>(n, 101);
    auto sgrid = [m](std::size_t i) {
      return static_cast<double>(i) / static_cast<double>(m - 1);
    };
    for (std::size_t i = 0; i < m && (r.shock_monotone_minus || r.shock_monotone_plus); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double cm = std::clamp(sgrid(i), e, 1.0 - e);
        const double cp = std::clamp(sgrid(j), e, 1.0 - e);
        if (cm - cp <= 2.0 * e) continue;
        const double ds_minus =
            (shock_curve(model, cp, cm + e) - shock_curve(model, cp, cm - e)) / (2 * e);
        const double ds_plus =
            (shock_curve(model, cp + e, cm) - shock_curve(model, cp - e, cm)) / (2 * e);
        if (ds_minus < tol && r.shock_monotone_minus) {
          r.shock_monotone_minus = false;
          bad_minus = fmt::format("dS/dc- = {} at (c+={}, c-={})", ds_minus, cp, cm);
        }
        if (ds_plus > -tol && r.shock_monotone_plus) {
          r.shock_monotone_plus = false;
          bad_plus = fmt::format("dS/dc+ = {} at (c+={}, c-={})", ds_plus, cp, cm);
        }
      }
    }
    add(r, "dS/dc- >= 0", r.shock_monotone_minus, bad_minus);
    add(r, "dS/dc+ <= 0", r.shock_monotone_plus, bad_plus);
  } else {
    r.shock_monotone_minus = false;
    r.shock_monotone_plus = false;
    add(r, "shock curve monotone", false, "not checked: f'' > 0 fails");
  }

  if (r.f2_max < 0.0) {
    r.recommend_swap = validate_model(model.relabeled(), n_samples).passed();
  }
  return r;
}

ValidatedModel ValidatedModel::check(const IsothermModel& model, std::size_t n_samples) {
  ModelReport report = validate_model(model, n_samples);
  if (!report.passed()) {
    std::ostringstream msg;
    msg << "model " << report.model << " fails validation:";
    for (const auto& c : report.criteria) {
      if (!c.passed) msg << " [" << c.name << ": " << c.detail << "]";
    }
    if (report.recommend_swap) msg << " (relabeling the gases would pass)";
    throw DomainError(msg.str());
  }
  return ValidatedModel(model, std::move(report));
}

}  // namespace psa
