#include <doctest.h>

#include <cmath>
#include <random>

#include "psa/errors.hpp"
#include "psa/godunov.hpp"

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

PiecewiseConstant pc(std::vector<double> b, std::vector<double> v) {
  return PiecewiseConstant(std::move(b), std::move(v));
}

TrackingData shock_scenario() {
  return {PiecewiseConstant::constant(0, 1, 0.8), PiecewiseConstant::constant(0, 1, 0.2),
          PiecewiseConstant::constant(0, 1, 1.0)};
}

}  // namespace

TEST_CASE("constant state is preserved exactly") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.3), PiecewiseConstant::constant(0, 1, 0.3),
                 PiecewiseConstant::constant(0, 1, 1.7)};
  const auto sol = godunov_march(langmuir(), d, 0.05, 1.0);
  CHECK(sol.steps > 0);
  for (const auto& s : sol.slices) {
    for (std::size_t j = 0; j < s.c.size(); ++j) {
      CHECK(s.c[j] == doctest::Approx(0.3).epsilon(1e-15));
      CHECK(s.u[j] == doctest::Approx(1.7).epsilon(1e-15));
    }
  }
}

TEST_CASE("grid-aligned contact stays put") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.4), PiecewiseConstant::constant(0, 1, 0.4),
                 pc({0, 0.5, 1}, {1.0, 2.5})};
  const auto sol = godunov_march(lin01(), d, 0.1, 1.0);
  REQUIRE(sol.cells() == 10);
  for (const auto& s : sol.slices) {
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(s.c[j] == doctest::Approx(0.4).epsilon(1e-15));
      CHECK(s.u[j] == doctest::Approx(j < 5 ? 1.0 : 2.5).epsilon(1e-14));
    }
  }
}

TEST_CASE("shock scenario converges to the front tracking solution") {
  const auto d = shock_scenario();
  const auto traj = run(init_fronts(lin01(), d, 0.05), 1.0);
  const Sampler fta = [&](double t, double x) { return traj.sample(t, x); };
  std::vector<double> gaps;
  for (double dt : {1.0 / 100, 1.0 / 200, 1.0 / 400}) {
    GodunovOptions o;
    o.keep_x = {0.5};
    const auto sol = godunov_march(lin01(), d, dt, 1.0, o);
    CHECK(sol.positivity_violations == 0);
    const Sampler g = [&](double t, double x) { return sol.sample(t, x); };
    gaps.push_back(l1_slice_distance(fta, g, 0.5, 1.0, 20000).c);
  }
  CHECK(gaps[0] > gaps[1]);
  CHECK(gaps[1] > gaps[2]);
  CHECK(gaps[2] < 0.02);
}

TEST_CASE("discrete conservation and positivity on random data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    std::vector<double> tb{0}, cv, uv;
    for (int i = 1; i < 6; ++i) tb.push_back(i / 6.0);
    tb.push_back(1.0);
    for (std::size_t i = 0; i + 1 < tb.size(); ++i) {
      cv.push_back(U(rng));
      uv.push_back(0.5 + 1.5 * U(rng));
    }
    TrackingData d{pc({0, 0.4, 1}, {U(rng), U(rng)}), pc(tb, cv), pc(tb, uv)};
    const auto sol = godunov_march(langmuir(), d, 1.0 / 120, 1.0);
    CHECK(sol.conservation_defect <= 1e-12);
    CHECK(sol.positivity_violations == 0);
  }
}

TEST_CASE("fixed dx violating the CFL bound is rejected with a suggestion") {
  GodunovOptions o;
  o.dx = 0.5;
  try {
    godunov_march(lin01(), shock_scenario(), 0.01, 1.0, o);
    FAIL("expected a CFL error");
  } catch (const CflError& e) {
    // The corner fan has middle state c = 0.8, u = 2/3, so max lambda = 1.8 / (2/3) = 2.7.
    CHECK(e.suggested_dx() == doctest::Approx(0.9 * 0.01 / 2.7));
  }
  CHECK_THROWS_AS(godunov_march(lin01(), shock_scenario(), 0.01, 1.0, {1.5}), DomainError);
}

TEST_CASE("l1 slice distance") {
  const Sampler a = [](double t, double) { return State{0.3 + 0.1 * t, std::log(1.0 + t)}; };
  const Sampler b = [](double t, double) { return State{0.3 + 0.1 * t, std::log(1.25 + t)}; };
  const auto same = l1_slice_distance(a, a, 0.2, 2.0, 100);
  CHECK(same.c == 0.0);
  CHECK(same.u == 0.0);
  const auto ab = l1_slice_distance(a, b, 0.2, 2.0, 100);
  const auto ba = l1_slice_distance(b, a, 0.2, 2.0, 100);
  CHECK(ab.u == doctest::Approx(2.0 * 0.25).epsilon(1e-12));
  CHECK(ab.c == 0.0);
  CHECK(ab.u == ba.u);
}

TEST_CASE("sampling uses the stored slices") {
  GodunovOptions o;
  o.keep_x = {0.25, 0.75};
  const auto sol = godunov_march(lin01(), shock_scenario(), 0.05, 1.0, o);
  REQUIRE(sol.slices.size() == 3);
  CHECK(sol.slices[0].x == 0.25);
  CHECK(sol.slices[1].x == 0.75);
  CHECK(sol.slices[2].x == 1.0);
  CHECK(sol.sample(0.99, 0.3).c == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(sol.sample(0.05, 0.3).c == doctest::Approx(0.8).epsilon(1e-6));
  CHECK_THROWS_AS(sol.sample(1.5, 0.5), DomainError);
}
