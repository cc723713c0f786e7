#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "psa/errors.hpp"
#include "psa/fronttrack.hpp"

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

TrackingData constant_data(double c, double T, double X) {
  return {PiecewiseConstant::constant(0, X, c), PiecewiseConstant::constant(0, T, c),
          PiecewiseConstant::constant(0, T, 1.0)};
}

// Random piecewise data with at most n_jumps jumps in total.
TrackingData random_tracking_data(std::mt19937_64& rng, int n_jumps, double T, double X) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto make = [&](double end, int n, double lo, double hi) {
    std::vector<double> b{0.0}, v;
    std::set<double> cuts;
    while (static_cast<int>(cuts.size()) < n) cuts.insert(std::round(U(rng) * 1e6) / 1e6 * end);
    for (double c : cuts) {
      if (c > 0.0 && c < end) b.push_back(c);
    }
    b.push_back(end);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) v.push_back(lo + (hi - lo) * U(rng));
    return PiecewiseConstant(b, v);
  };
  const int n_c0 = n_jumps / 4;
  const int n_cb = n_jumps / 2;
  const int n_ub = n_jumps - n_c0 - n_cb;
  return {make(X, n_c0, 0.0, 1.0), make(T, n_cb, 0.0, 1.0), make(T, n_ub, 0.5, 2.0)};
}

}  // namespace

TEST_CASE("constant data produces no fronts") {
  auto fs = init_fronts(lin01(), constant_data(0.4, 2.0, 1.0), 0.1);
  CHECK(fs.fronts().empty());
  const auto traj = run(fs, 1.0);
  CHECK(traj.records().empty());
  CHECK(traj.sample(1.3, 0.7).c == 0.4);
  CHECK(traj.sample(1.3, 0.7).u() == doctest::Approx(1.0));
}

TEST_CASE("constant concentration with piecewise u_b gives contacts only") {
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.35), PiecewiseConstant::constant(0, 3, 0.35),
                 pc({0, 0.5, 1.0, 1.7, 3}, {1.0, 2.5, 0.7, 1.3})};
  auto fs = init_fronts(lin01(), d, 0.05);
  REQUIRE(fs.fronts().size() == 3);
  for (const auto& f : fs.fronts()) CHECK(f.wave.kind == WaveKind::Contact);
  const auto traj = run(fs, 2.0);
  CHECK(traj.records().empty());
  for (double x = 0.0; x <= 2.0; x += 0.05) {
    for (double t = 0.0; t <= 3.0; t += 0.05) {
      const State s = traj.sample(t, x);
      CHECK(s.c == 0.35);
      CHECK(s.u() == doctest::Approx(d.ub(t)).epsilon(1e-14));
    }
  }
}

TEST_CASE("single contact from one u_b jump") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.6), PiecewiseConstant::constant(0, 2, 0.6),
                 pc({0, 1.0, 2}, {1.0, 3.0})};
  const auto fs = init_fronts(lin01(), d, 0.1);
  REQUIRE(fs.fronts().size() == 1);
  CHECK(fs.fronts()[0].wave.speed == 0.0);
  CHECK(fs.fronts()[0].wave.right.L - fs.fronts()[0].wave.left.L ==
        doctest::Approx(std::log(3.0)));
}

TEST_CASE("downward boundary jump makes a contact and a shock of speed 1.8") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.8), pc({0, 1.0, 3}, {0.8, 0.2}),
                 PiecewiseConstant::constant(0, 3, 1.0)};
  const auto fs = init_fronts(lin01(), d, 0.1);
  REQUIRE(fs.fronts().size() == 2);
  const Front& contact = fs.fronts()[0];
  const Front& shock = fs.fronts()[1];
  CHECK(contact.wave.kind == WaveKind::Contact);
  CHECK(contact.wave.right.L - contact.wave.left.L == doctest::Approx(-std::log(1.5)));
  CHECK(shock.wave.kind == WaveKind::Shock);
  CHECK(shock.wave.speed == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(shock.t0 == 1.0);
  CHECK(shock.x0 == 0.0);
  CHECK(shock.wave.left.u() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("single shock travels straight to X") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.8), pc({0, 0.5, 4}, {0.8, 0.2}),
                 PiecewiseConstant::constant(0, 4, 1.0)};
  const auto traj = run(init_fronts(lin01(), d, 0.1), 1.0);
  CHECK(traj.records().empty());
  std::size_t shocks = 0;
  for (const auto& f : traj.fronts()) {
    if (f.wave.kind == WaveKind::Shock) {
      ++shocks;
      CHECK(f.x_birth == 0.0);
      CHECK(std::isinf(f.x_death));
    }
  }
  CHECK(shocks == 1);
  // Below the shock line t = 0.5 + 1.8 x the lower state holds.
  const State below = traj.sample(0.5 + 1.8 * 0.5 - 0.1, 0.5);
  CHECK(below.c == 0.8);
  CHECK(below.u() == doctest::Approx(2.0 / 3.0));
  const State above = traj.sample(0.5 + 1.8 * 0.5 + 0.1, 0.5);
  CHECK(above.c == 0.2);
  CHECK(above.u() == doctest::Approx(1.0));
  // On the line: upper side.
  CHECK(traj.sample(0.5 + 1.8 * 0.25, 0.25).c == 0.2);
}

TEST_CASE("next_event finds the shock-contact collision") {
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.8), pc({0, 1.0, 3}, {0.8, 0.2}),
                 pc({0, 2.0, 3}, {1.0, 2.0})};
  auto fs = init_fronts(lin01(), d, 0.1);
  const Event e = next_event(fs);
  CHECK(e.kind == Event::Kind::Collision);
  CHECK(e.x == doctest::Approx(1.0 / 1.8).epsilon(1e-14));
  CHECK(e.t == doctest::Approx(2.0).epsilon(1e-14));
  const auto rec = resolve_interaction(fs, e);
  CHECK(rec.incoming == IncomingCase::SD);
  CHECK(rec.outgoing == OutgoingCase::DS);
  CHECK(rec.tvc_after == rec.tvc_before);
  CHECK(rec.tvl_after == doctest::Approx(rec.tvl_before).epsilon(1e-12));
}

TEST_CASE("parallel contacts never collide") {
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.5), PiecewiseConstant::constant(0, 3, 0.5),
                 pc({0, 1.0, 2.0, 3}, {1.0, 2.0, 1.5})};
  const auto fs = init_fronts(lin01(), d, 0.1);
  const Event e = next_event(fs);
  CHECK(e.kind == Event::Kind::End);
  CHECK(e.x == 2.0);
}

TEST_CASE("steps of one rarefaction fan do not collide") {
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.1), pc({0, 0.5, 3}, {0.1, 0.9}),
                 PiecewiseConstant::constant(0, 3, 1.0)};
  const auto traj = run(init_fronts(langmuir(), d, 0.05), 2.0);
  for (const auto& r : traj.records()) CHECK(r.incoming != IncomingCase::RR);
}

TEST_CASE("two shocks merge with the telescoping L budget of the linear model") {
  // u_b chosen so both boundary Riemann problems have zero-strength contacts.
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.9), pc({0, 1.0, 1.2, 4}, {0.9, 0.5, 0.1}),
                 pc({0, 1.0, 1.2, 4}, {1.0, 1.9 / 1.5, 1.9 / 1.1})};
  auto fs = init_fronts(lin01(), d, 0.1);
  REQUIRE(fs.fronts().size() == 2);
  const Event e = next_event(fs);
  REQUIRE(e.kind == Event::Kind::Collision);
  const auto rec = resolve_interaction(fs, e);
  CHECK(rec.incoming == IncomingCase::SS);
  CHECK(rec.outgoing == OutgoingCase::DS);
  CHECK(rec.tvl_before == doctest::Approx(std::log(1.9 / 1.1)).epsilon(1e-13));
  CHECK(std::abs(rec.tvl_after - rec.tvl_before) < 1e-13);
  CHECK(rec.tvc_after == doctest::Approx(rec.tvc_before));
  CHECK(fs.fronts().size() == 1);
  CHECK(fs.fronts()[0].wave.left.c == 0.9);
  CHECK(fs.fronts()[0].wave.right.c == 0.1);
}

TEST_CASE("a later upward boundary jump yields exactly one shock-rarefaction interaction") {
  TrackingData d{PiecewiseConstant::constant(0, 3, 0.8), pc({0, 1.0, 1.5, 4}, {0.8, 0.2, 0.6}),
                 PiecewiseConstant::constant(0, 4, 1.0)};
  const auto traj = run(init_fronts(lin01(), d, 1.0), 3.0);
  int lambda_lambda = 0;
  for (const auto& r : traj.records()) {
    if (r.incoming == IncomingCase::SS || r.incoming == IncomingCase::SR ||
        r.incoming == IncomingCase::RS) {
      ++lambda_lambda;
      CHECK(r.incoming == IncomingCase::SR);
      CHECK(r.outgoing == OutgoingCase::DS);
    }
  }
  CHECK(lambda_lambda == 1);
}

TEST_CASE("initial-line jump emits a lambda-front from t = 0") {
  TrackingData d{pc({0, 0.5, 2}, {0.5, 0.3}), PiecewiseConstant::constant(0, 3, 0.5),
                 PiecewiseConstant::constant(0, 3, 1.0)};
  auto fs = init_fronts(lin01(), d, 0.05);
  CHECK(fs.fronts().empty());
  REQUIRE(fs.pending_jumps().size() == 1);
  const Event e = next_event(fs);
  CHECK(e.kind == Event::Kind::InitialJump);
  CHECK(e.x == 0.5);
  resolve_initial_jump(fs, e);
  // Decrease of c along t = 0 is a rarefaction: steps of width <= delta.
  CHECK(fs.fronts().size() == 4);
  CHECK(fs.bottom().c == 0.3);
  CHECK(fs.bottom().L == doctest::Approx(0.0 - wave_curve_T(lin01(), 0.3, 0.5)));
  const auto traj = run(init_fronts(lin01(), d, 0.05), 2.0);
  CHECK(traj.sample(1e-3, 1.0).c == 0.3);
  CHECK(traj.sample(2.9, 0.6).c == 0.5);
}

TEST_CASE("corner wave uses the initial concentration below") {
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.8), PiecewiseConstant::constant(0, 3, 0.2),
                 PiecewiseConstant::constant(0, 3, 1.0)};
  const auto fs = init_fronts(lin01(), d, 0.05);
  REQUIRE(fs.fronts().size() == 1);
  CHECK(fs.fronts()[0].wave.kind == WaveKind::Shock);
  CHECK(fs.fronts()[0].wave.speed == doctest::Approx(1.8));
  CHECK(fs.bottom().c == 0.8);
  CHECK(fs.bottom().u() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("non-positive u_b is rejected") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.5), PiecewiseConstant::constant(0, 1, 0.5),
                 pc({0, 0.5, 1}, {1.0, 0.0})};
  CHECK_THROWS_AS(init_fronts(lin01(), d, 0.1), DomainError);
}

TEST_CASE("sampling outside the domain is an error") {
  const auto traj = run(init_fronts(lin01(), constant_data(0.4, 2.0, 1.0), 0.1), 1.0);
  CHECK_THROWS_AS(traj.sample(2.5, 0.5), DomainError);
  CHECK_THROWS_AS(traj.sample(1.0, 1.5), DomainError);
  CHECK_THROWS_AS(traj.sample(-0.1, 0.5), DomainError);
}

TEST_CASE("injected speed fault is detected") {
  TrackingData d{PiecewiseConstant::constant(0, 2, 0.8), pc({0, 1.0, 3}, {0.8, 0.2}),
                 pc({0, 2.0, 3}, {1.0, 2.0})};
  auto fs = init_fronts(lin01(), d, 0.1);
  fs.inject_speed_fault(1.01);
  CHECK_THROWS_AS(run(fs, 2.0), ConsistencyError);
}

TEST_CASE("event limit guard") {
  std::mt19937_64 rng(5);
  const auto d = random_tracking_data(rng, 30, 2.0, 2.0);
  TrackOptions opts;
  opts.max_events = 3;
  CHECK_THROWS_AS(run(init_fronts(langmuir(), d, 0.05, opts), 2.0), ConsistencyError);
}

TEST_CASE("randomized runs satisfy the per-interaction invariants") {
  std::mt19937_64 rng(2024);
  std::map<IncomingCase, int> seen;
  for (int k = 0; k < 60; ++k) {
    const auto d = random_tracking_data(rng, 24, 2.0, 2.0);
    const double delta = 0.1;
    const auto traj = run(init_fronts(langmuir(), d, delta), 2.0);
    for (const auto& r : traj.records()) {
      ++seen[r.incoming];
      CHECK(r.tvc_after <= r.tvc_before * (1.0 + 8 * std::numeric_limits<double>::epsilon()));
      if (r.incoming == IncomingCase::RD || r.incoming == IncomingCase::SD) {
        CHECK(std::abs(r.tvl_after - r.tvl_before) <= 1e-12);
      }
      if (r.incoming == IncomingCase::SS) {
        const double excess = 2.0 * std::max(r.s0.L - r.middle.L, 0.0);
        CHECK(std::abs((r.tvl_after - r.tvl_before) - excess) <= 1e-12);
      }
    }
  }
  CHECK(seen[IncomingCase::RD] > 0);
  CHECK(seen[IncomingCase::SD] > 0);
  CHECK(seen[IncomingCase::SS] > 0);
  CHECK(seen[IncomingCase::RS] + seen[IncomingCase::SR] > 0);
}

TEST_CASE("sampled fields are piecewise constant with values taken from front states") {
  std::mt19937_64 rng(99);
  const auto d = random_tracking_data(rng, 16, 2.0, 1.5);
  const auto traj = run(init_fronts(langmuir(), d, 0.1), 1.5);
  for (double x = 0.0; x <= 1.5; x += 0.1) {
    const Slice s = traj.slice(x);
    std::set<std::pair<double, double>> states{{s.bottom.c, s.bottom.L}};
    for (const Front* f : s.fronts) states.insert({f->wave.right.c, f->wave.right.L});
    for (std::size_t k = 0; k + 1 < s.fronts.size(); ++k) {
      CHECK(s.t[k] <= s.t[k + 1]);
    }
    for (double t = 0.0; t <= 2.0; t += 0.01) {
      const State st = s.at(t);
      CHECK(states.count({st.c, st.L}) == 1);
    }
  }
}

TEST_CASE("identical inputs give identical trajectories") {
  std::mt19937_64 r1(17), r2(17);
  const auto a = run(init_fronts(langmuir(), random_tracking_data(r1, 20, 2.0, 2.0), 0.1), 2.0);
  const auto b = run(init_fronts(langmuir(), random_tracking_data(r2, 20, 2.0, 2.0), 0.1), 2.0);
  REQUIRE(a.records().size() == b.records().size());
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    CHECK(a.records()[i].x == b.records()[i].x);
    CHECK(a.records()[i].tvl_after == b.records()[i].tvl_after);
  }
}

TEST_CASE("entropy flux derivative") {
  for (const auto& psi : {TestFunction::square(), TestFunction::positive_part(0.5)}) {
    for (double c : {0.1, 0.3, 0.7, 0.9}) {
      const double fd =
          oracle::central_diff([&](double s) { return entropy_flux(langmuir(), psi, s); }, c);
      CHECK(fd == doctest::Approx(langmuir()->dh(c) * psi.psi(c) + langmuir()->H(c) * psi.dpsi(c))
                      .epsilon(1e-7));
    }
  }
  // psi = 1 gives Q = h - h(0); psi = c gives Q = I(c) - I(0) = c + q1(c) - q1(0).
  const auto one = TestFunction::constant(1.0);
  const auto id = TestFunction::identity(1.0);
  for (double c : {0.2, 0.6}) {
    CHECK(entropy_flux(langmuir(), one, c) ==
          doctest::Approx(langmuir()->h(c) - langmuir()->h(0.0)).epsilon(1e-12));
    CHECK(entropy_flux(langmuir(), id, c) ==
          doctest::Approx(c + langmuir()->isotherms(c).q1 - langmuir()->isotherms(0.0).q1)
              .epsilon(1e-12));
  }
}

TEST_CASE("entropy terms: contacts vanish, admissible shocks dissipate") {
  const auto psi = TestFunction::square();
  const Wave contact{WaveKind::Contact, {0.4, 0.0}, {0.4, 0.7}, 0.0};
  CHECK(front_entropy_term(lin01(), psi, contact) == 0.0);
  const auto fan = solve_riemann(lin01(), {0.8, std::log(2.0 / 3.0)}, {0.2, 0.0});
  const Wave shock{WaveKind::Shock, fan.middle, fan.above, std::get<ShockWave>(fan.lambda_wave).speed};
  CHECK(front_entropy_term(lin01(), psi, shock) < 0.0);
  // Conservation of the system itself: psi = +-1 and +-c give zero jumps on exact shocks.
  for (const auto& p : {TestFunction::constant(1.0), TestFunction::identity(1.0)}) {
    CHECK(std::abs(front_entropy_term(lin01(), p, shock)) < 1e-14);
  }
  for (double cm = 0.2; cm <= 1.0; cm += 0.2) {
    for (double cp = 0.0; cp < cm - 0.01; cp += 0.2) {
      const State l{cm, 0.1};
      const State r{cp, 0.1 + wave_curve_T(langmuir(), cm, cp)};
      const Wave w{WaveKind::Shock, l, r, shock_speed(langmuir(), l, r)};
      CHECK(front_entropy_term(langmuir(), psi, w) <= 1e-15);
      CHECK(front_entropy_term(langmuir(), TestFunction::positive_part(0.5), w) <= 1e-15);
    }
  }
}

TEST_CASE("rarefaction fan residual is first order in delta") {
  TrackingData d{PiecewiseConstant::constant(0, 1, 0.2), pc({0, 0.5, 3}, {0.2, 0.8}),
                 pc({0, 0.5, 3}, {1.0, 1.2 / 1.8})};
  auto residual = [&](double delta) {
    const auto traj = run(init_fronts(lin01(), d, delta), 0.5);
    return entropy_residual(traj, 0.5, TestFunction::square());
  };
  const double r1 = residual(0.1);
  const double r2 = residual(0.05);
  CHECK(r1 > 0.0);
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.1));
}
