#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "psa/errors.hpp"
#include "psa/fronttrack.hpp"
#include "psa/profiles.hpp"
#include "psa/smooth.hpp"

using namespace psa;

namespace {

const ValidatedModel& lin01() {
  static const auto m = ValidatedModel::check(IsothermModel(LinearIsotherm{0.0, 1.0}));
  return m;
}

const ValidatedModel& langmuir() {
  static const auto m = ValidatedModel::check(IsothermModel(BinaryLangmuir{1.0, 2.0, 3.0, 1.0}));
  return m;
}

std::function<double(double)> constant(double v) {
  return [v](double) { return v; };
}

template <class Fn>
double bisect(Fn f, double a, double b) {
  double fa = f(a);
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("constant data gives a constant concentration for any ub") {
  SmoothData d{constant(0.35), constant(0.35),
               [](double t) { return 1.0 + 0.5 * std::sin(2 * M_PI * t / 0.1); }, 1.0, 1.0};
  const auto sol = solve_characteristics(langmuir(), d, {20, 20});
  CHECK(sol.complete());
  for (double c : sol.c) CHECK(c == 0.35);
  for (double v : sol.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  const auto vel = reconstruct_velocity(sol, d.ub, d.cb);
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      CHECK(vel.u[sol.index(i, j)] == doctest::Approx(d.ub(sol.t[i])).epsilon(1e-15));
    }
  }
  CHECK(entropy_equalities_check(sol, {TestFunction::square()}) == 0.0);
}

TEST_CASE("velocity reconstruction from the invariant u G(c)") {
  // cb falls from 0.5 to 0.2 slowly; far from the boundary c stays 0.5.
  SmoothData d{constant(0.5), Profile::make_ramp(0.5, 0.2, 0.0, 1.0), constant(2.0), 1.0, 3.0};
  const auto sol = solve_characteristics(lin01(), d, {10, 10});
  REQUIRE(sol.complete());
  const auto vel = reconstruct_velocity(sol, d.ub, d.cb);
  const std::size_t k = sol.index(10, 10);
  CHECK(sol.c[k] == 0.5);
  CHECK(vel.u[k] == doctest::Approx(2.0 * 1.2 / 1.5).epsilon(1e-13));
  CHECK(sol.solver->velocity(1.0, 3.0) == doctest::Approx(1.6).epsilon(1e-13));
}

TEST_CASE("v equals one on the boundary x = 0") {
  SmoothData d{Profile::make_ramp(0.7, 0.3, 0.0, 1.0), [](double t) { return 0.7 + 0.2 * t * t; },
               [](double t) { return 1.0 + 0.3 * std::cos(5 * t); }, 1.0, 1.0};
  const auto sol = solve_characteristics(langmuir(), d, {25, 25});
  REQUIRE(sol.complete());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    CHECK(sol.v[sol.index(i, 0)] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("increasing initial ramp breaks down at the predicted crossing") {
  // c0 = 0.2 + 2 x: crossing first at b = (1.2)^3 / 4, from the corner characteristic.
  const double sigma = 2.0;
  SmoothData d{[&](double x) { return 0.2 + sigma * x; }, constant(0.2), constant(1.0), 1.0, 0.4};
  const auto sol = solve_characteristics(lin01(), d, {40, 40});
  REQUIRE(sol.breakdown().has_value());
  const auto& bd = *sol.breakdown();
  CHECK(bd.family == Breakdown::Family::Initial);
  const double b_star = std::pow(1.2, 3) / (2.0 * sigma);
  CHECK(bd.b == doctest::Approx(b_star).epsilon(1e-3));
  CHECK(bd.t == doctest::Approx(b_star / 1.2).epsilon(1e-3));
  CHECK(bd.x == doctest::Approx(b_star / 1.44).epsilon(1e-3));
  // Rows past the breakdown are refused.
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const bool expect_valid = sol.t[i] < bd.t;
    CHECK(!std::isnan(sol.c[sol.index(i, 5)]) == expect_valid);
  }
  CHECK(std::isnan(sol.solver->concentration(0.9, 0.1)));
}

TEST_CASE("decreasing boundary ramp focuses at one point") {
  // cb falls at rate 3 on [0, 0.2]: all its characteristics meet at x = 1/6, b = 1.62/3.
  SmoothData d{constant(0.8), Profile::make_ramp(0.8, 0.2, 0.0, 0.2), constant(1.0), 1.0, 1.0};
  const auto sol = solve_characteristics(lin01(), d, {20, 20});
  REQUIRE(sol.breakdown().has_value());
  const auto& bd = *sol.breakdown();
  CHECK(bd.family == Breakdown::Family::Boundary);
  CHECK(bd.b == doctest::Approx(0.54).epsilon(1e-3));
  CHECK(bd.t == doctest::Approx(0.4).epsilon(1e-3));
  CHECK(bd.x == doctest::Approx(1.0 / 6.0).epsilon(1e-3));
}

TEST_CASE("increasing boundary data matches an independent characteristic oracle") {
  auto cb = [](double t) { return 0.2 + 0.6 * t * t; };
  auto B = [](double t) { return 1.2 * t + 0.2 * t * t * t; };  // int (1 + cb)
  SmoothData d{constant(0.2), cb, constant(1.0), 1.0, 1.0};
  const auto sol = solve_characteristics(lin01(), d, {16, 16});
  REQUIRE(sol.complete());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double t = sol.t[i];
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      const double x = sol.x[j];
      double c_ref;
      if (x >= B(t) / 1.44) {
        c_ref = 0.2;
      } else {
        const double tau = bisect(
            [&](double s) { return (B(t) - B(s)) / std::pow(1.0 + cb(s), 2) - x; }, 0.0, t);
        c_ref = cb(tau);
      }
      CHECK(sol.c[sol.index(i, j)] == doctest::Approx(c_ref).epsilon(1e-7));
    }
  }
}

TEST_CASE("decreasing initial data matches an independent characteristic oracle") {
  auto c0 = [](double x) { return 0.8 - 0.5 * x; };
  SmoothData d{c0, constant(0.8), constant(1.0), 1.0, 1.0};
  const auto sol = solve_characteristics(lin01(), d, {16, 16});
  REQUIRE(sol.complete());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double b = 1.8 * sol.t[i];
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      const double x = sol.x[j];
      const double c_ref = x >= b / (1.8 * 1.8)
                               ? c0(bisect([&](double xi) { return xi + b / std::pow(1 + c0(xi), 2) - x; },
                                           0.0, x))
                               : 0.8;
      CHECK(sol.c[sol.index(i, j)] == doctest::Approx(c_ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("smooth field agrees with front tracking within O(delta)") {
  const auto cb_profile = Profile::make_ramp(0.2, 0.8, 0.0, 1.0);
  SmoothData d{constant(0.2), cb_profile, constant(1.0), 1.0, 1.0};
  const auto sol = solve_characteristics(lin01(), d, {20, 20});
  REQUIRE(sol.complete());
  for (double delta : {0.04, 0.02}) {
    TrackingData td{PiecewiseConstant::constant(0, 1, 0.2), cb_profile.discretize_levels(0, 1, delta),
                    PiecewiseConstant::constant(0, 1, 1.0)};
    const auto traj = run(init_fronts(lin01(), td, delta), 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
      for (std::size_t j = 0; j < sol.x.size(); ++j) {
        worst = std::max(worst, std::abs(traj.sample(sol.t[i], sol.x[j]).c - sol.c[sol.index(i, j)]));
      }
    }
    CHECK(worst <= 1.5 * delta);
  }
}

TEST_CASE("entropy equalities hold to second order") {
  SmoothData d{constant(0.2), [](double t) { return 0.2 + 0.6 * t * t; },
               [](double t) { return 1.0 + 0.3 * t; }, 1.0, 1.0};
  const std::vector<TestFunction> psis{TestFunction::square(), TestFunction::constant(1.0),
                                       TestFunction::constant(-1.0), TestFunction::identity(1.0),
                                       TestFunction::identity(-1.0)};
  const double r1 = entropy_equalities_check(solve_characteristics(langmuir(), d, {80, 80}), psis);
  const double r2 = entropy_equalities_check(solve_characteristics(langmuir(), d, {160, 160}), psis);
  CHECK(r1 > 0.0);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("u G(c) does not depend on x") {
  SmoothData d{Profile::make_ramp(0.6, 0.3, 0.0, 1.0), [](double t) { return 0.6 + 0.3 * t; },
               [](double t) { return 1.5 + std::sin(7 * t); }, 1.0, 1.0};
  const auto sol = solve_characteristics(langmuir(), d, {30, 30});
  REQUIRE(sol.complete());
  const auto vel = reconstruct_velocity(sol, d.ub, d.cb);
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double W0 = vel.u[sol.index(i, 0)] * langmuir()->G(sol.c[sol.index(i, 0)]);
    for (std::size_t j = 1; j < sol.x.size(); ++j) {
      const std::size_t k = sol.index(i, j);
      CHECK(vel.u[k] * langmuir()->G(sol.c[k]) == doctest::Approx(W0).epsilon(1e-14));
    }
  }
}

TEST_CASE("concentration stays within the data range") {
  SmoothData d{[](double x) { return 0.5 - 0.4 * x + 0.1 * std::sin(3 * x) * x; },
               [](double t) { return 0.5 + 0.3 * std::sin(M_PI * t / 2); }, constant(1.0), 1.0, 1.0};
  const auto sol = solve_characteristics(langmuir(), d, {30, 30});
  for (double c : sol.c) {
    if (std::isnan(c)) continue;
    CHECK(c >= 0.1 - 1e-12);
    CHECK(c <= 0.8 + 1e-12);
  }
}

TEST_CASE("c depends on ub only through its running integral") {
  // Constant cb: b(t) = G(cb) int ub, so the oscillating run is the unit run at time int ub.
  auto ub = [](double t) { return 1.0 + 0.5 * std::sin(2 * M_PI * t / 0.1); };
  auto Ub = [](double t) { return t + 0.5 * 0.1 / (2 * M_PI) * (1 - std::cos(2 * M_PI * t / 0.1)); };
  auto c0 = [](double x) { return 0.6 - 0.3 * x; };
  SmoothGrid g{10, 10};
  const auto a = solve_characteristics(lin01(), {c0, constant(0.6), ub, 1.0, 1.0}, g);
  const auto unit = std::make_shared<CharacteristicSolver>(
      lin01(), SmoothData{c0, constant(0.6), constant(1.0), 2.0, 1.0}, g);
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    for (std::size_t j = 0; j < a.x.size(); ++j) {
      CHECK(a.c[a.index(i, j)] ==
            doctest::Approx(unit->concentration(Ub(a.t[i]), a.x[j])).epsilon(1e-9));
    }
  }
}

TEST_CASE("smooth solver input errors") {
  CHECK_THROWS_AS(solve_characteristics(lin01(), {constant(0.3), constant(0.4), constant(1.0), 1, 1}, {}),
                  DomainError);
  CHECK_THROWS_AS(
      solve_characteristics(lin01(), {constant(0.3), constant(0.3), constant(-1.0), 1, 1}, {}),
      DomainError);
  CHECK_THROWS_AS(solve_characteristics(lin01(), {constant(0.3), constant(0.3), constant(1.0), 1, 1},
                                        {0, 10}),
                  DomainError);
}
