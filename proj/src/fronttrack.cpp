#include "psa/fronttrack.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

std::string_view to_string(IncomingCase c) {
  switch (c) {
    case IncomingCase::RD:
      return "RD";
    case IncomingCase::SD:
      return "SD";
    case IncomingCase::RS:
      return "RS";
    case IncomingCase::SR:
      return "SR";
    case IncomingCase::SS:
      return "SS";
    case IncomingCase::RR:
      return "RR";
  }
  return "?";
}

std::string_view to_string(OutgoingCase c) {
  switch (c) {
    case OutgoingCase::D:
      return "D";
    case OutgoingCase::DR:
      return "DR";
    case OutgoingCase::DS:
      return "DS";
  }
  return "?";
}

namespace {

constexpr double kTieTolerance = 1e-14;

bool earlier(const Event& a, const Event& b) {
  if (std::abs(a.x - b.x) > kTieTolerance) return a.x < b.x;
  if (a.kind == Event::Kind::End || b.kind == Event::Kind::End) {
    return b.kind == Event::Kind::End && a.kind != Event::Kind::End;
  }
  if (a.t != b.t) return a.t < b.t;
  if (a.lower_id != b.lower_id) return a.lower_id < b.lower_id;
  return a.upper_id < b.upper_id;
}

// Abscissa where lower front lo catches up with upper front hi, seen from x.
bool collision(const Front& lo, const Front& hi, double x, double& xs, double& ts) {
  const double closing = lo.wave.speed - hi.wave.speed;
  if (!(closing > 0.0)) return false;
  const double gap = std::max(0.0, hi.t_at(x) - lo.t_at(x));
  xs = x + gap / closing;
  // A contact keeps its exact t so that it stays on the boundary jump it came from.
  ts = hi.wave.speed == 0.0 ? hi.t0 : lo.t_at(xs);
  return std::isfinite(xs);
}

IncomingCase classify(WaveKind lower, WaveKind upper) {
  using K = WaveKind;
  if (lower == K::RareStep && upper == K::Contact) return IncomingCase::RD;
  if (lower == K::Shock && upper == K::Contact) return IncomingCase::SD;
  if (lower == K::RareStep && upper == K::Shock) return IncomingCase::RS;
  if (lower == K::Shock && upper == K::RareStep) return IncomingCase::SR;
  if (lower == K::Shock && upper == K::Shock) return IncomingCase::SS;
  if (lower == K::RareStep && upper == K::RareStep) return IncomingCase::RR;
  throw ConsistencyError(fmt::format("a {} front cannot overtake a {} front", to_string(lower),
                                     to_string(upper)));
}

}  // namespace

void FrontState::inject_speed_fault(double factor) {
  for (auto& f : fronts_) {
    if (f.wave.kind != WaveKind::Contact) {
      f.wave.speed *= factor;
      return;
    }
  }
}

void FrontState::insert_wave_fronts(std::size_t pos, const State& lower, const RiemannFan& fan,
                                    double x0, double t0, bool with_contact,
                                    std::vector<Front>& out) {
  out.clear();
  auto make = [&](const Wave& w) {
    Front f;
    f.wave = w;
    f.x0 = x0;
    f.t0 = t0;
    f.x_birth = x0;
    f.id = next_id();
    out.push_back(f);
  };
  State lam_lower = fan.middle;
  if (with_contact) {
    const double strength = fan.middle.L - lower.L;
    const bool has_lambda = !std::holds_alternative<std::monostate>(fan.lambda_wave);
    const bool drop = strength == 0.0 || (has_lambda && std::abs(strength) <= opts_.contact_drop);
    if (drop) {
      lam_lower = lower;
    } else {
      make(Wave{WaveKind::Contact, lower, fan.middle, 0.0});
    }
  }
  if (fan.has_shock()) {
    make(Wave{WaveKind::Shock, lam_lower, fan.above, shock_speed(model_, lam_lower, fan.above)});
  } else if (fan.has_rarefaction()) {
    for (const auto& w : discretize_rarefaction(model_, lam_lower, fan.above, delta_)) make(w);
  }
  fronts_.insert(fronts_.begin() + static_cast<std::ptrdiff_t>(pos), out.begin(), out.end());
}

void FrontState::retire(std::size_t i, double x_death) {
  Front f = fronts_[i];
  f.x_death = std::max(f.x_birth, x_death);
  retired_.push_back(f);
  fronts_.erase(fronts_.begin() + static_cast<std::ptrdiff_t>(i));
}

void FrontState::prune_above_T() {
  const double T = data_.T();
  while (!fronts_.empty() && fronts_.back().t_at(x_) > T) {
    const Front& f = fronts_.back();
    const double x_exit = f.wave.speed > 0.0 ? f.x0 + (T - f.t0) / f.wave.speed : x_;
    retire(fronts_.size() - 1, std::min(x_, x_exit));
  }
}

void FrontState::verify_front(const Front& f) const {
  const Wave& w = f.wave;
  const double tol = f.perturbed ? 4.0 * opts_.eta : 1e-12;
  switch (w.kind) {
    case WaveKind::Contact:
      if (w.speed != 0.0 || w.left.c != w.right.c) {
        throw ConsistencyError(fmt::format("front {}: malformed contact", f.id));
      }
      return;
    case WaveKind::Shock: {
      if (!(w.left.c > w.right.c)) {
        throw ConsistencyError(fmt::format("front {}: shock violates c- > c+", f.id));
      }
      const double s = shock_speed(model_, w.left, w.right);
      if (!(std::abs(w.speed - s) <= tol * s)) {
        throw ConsistencyError(fmt::format(
            "front {}: shock speed {} differs from the Rankine-Hugoniot speed {}", f.id,
            w.speed, s));
      }
      return;
    }
    case WaveKind::RareStep: {
      if (!(w.left.c < w.right.c)) {
        throw ConsistencyError(fmt::format("front {}: rarefaction step violates c- < c+", f.id));
      }
      const double s = model_->H(w.left.c) / w.left.u();
      if (!(std::abs(w.speed - s) <= tol * s)) {
        throw ConsistencyError(fmt::format(
            "front {}: rarefaction step speed {} differs from lambda = {}", f.id, w.speed, s));
      }
      return;
    }
  }
}

void FrontState::verify_chain(std::size_t i) const {
  if (i == 0 && !(fronts_[0].wave.left == bottom_)) {
    throw ConsistencyError(fmt::format("chain broken below front {}: bottom state differs",
                                       fronts_[0].id));
  }
  if (i + 1 < fronts_.size() && !(fronts_[i].wave.right == fronts_[i + 1].wave.left)) {
    throw ConsistencyError(fmt::format("chain broken between fronts {} and {}", fronts_[i].id,
                                       fronts_[i + 1].id));
  }
}

void FrontState::separate_triple_points(std::size_t first, std::size_t last) {
  auto coincide = [](double xa, double ta, double xb, double tb) {
    return std::abs(xa - xb) <= 1e-12 * std::max(1.0, std::abs(xa)) &&
           std::abs(ta - tb) <= 1e-12 * std::max(1.0, std::abs(ta));
  };
  auto nudge = [&](Front& f) {
    f.wave.speed *= 1.0 + opts_.eta;
    f.perturbed = true;
    ++perturbations_;
  };
  if (first >= last) return;
  // Fresh top front against the point where its upper neighbours meet.
  const std::size_t top = last - 1;
  if (fronts_[top].wave.kind != WaveKind::Contact && top + 2 < fronts_.size()) {
    double x1, t1, x2, t2;
    if (collision(fronts_[top], fronts_[top + 1], x_, x1, t1) &&
        collision(fronts_[top + 1], fronts_[top + 2], x_, x2, t2) && coincide(x1, t1, x2, t2)) {
      nudge(fronts_[top]);
    }
  }
  if (fronts_[first].wave.kind != WaveKind::Contact && first >= 2) {
    double x1, t1, x2, t2;
    if (collision(fronts_[first - 1], fronts_[first], x_, x1, t1) &&
        collision(fronts_[first - 2], fronts_[first - 1], x_, x2, t2) &&
        coincide(x1, t1, x2, t2)) {
      nudge(fronts_[first]);
    }
  }
}

FrontState init_fronts(const ValidatedModel& model, const TrackingData& data, double delta,
                       const TrackOptions& opts) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(data.ub.min() > 0.0)) throw DomainError("boundary velocity u_b must be positive");
  if (data.c0.start() != 0.0 || data.cb.start() != 0.0 || data.ub.start() != 0.0) {
    throw DomainError("data must start at 0");
  }
  if (data.ub.end() != data.cb.end()) throw DomainError("c_b and u_b must share [0, T]");
  for (const auto* p : {&data.c0, &data.cb}) {
    for (double v : p->values()) checked_concentration(v);
  }

  FrontState fs(model, data, delta, opts);
  std::vector<Front> block;

  // Corner: a single lambda-wave, no contact along t = 0.
  const State top{data.cb.values().front(), std::log(data.ub.values().front())};
  const double c00 = data.c0.values().front();
  const RiemannFan corner = solve_riemann(model, State{c00, top.L}, top);
  fs.bottom_ = corner.middle;
  fs.insert_wave_fronts(0, corner.middle, corner, 0.0, 0.0, false, block);

  std::vector<double> times = data.cb.jump_points();
  const auto ub_jumps = data.ub.jump_points();
  times.insert(times.end(), ub_jumps.begin(), ub_jumps.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double ta : times) {
    const State below{data.cb.left_limit(ta), std::log(data.ub.left_limit(ta))};
    const State above{data.cb(ta), std::log(data.ub(ta))};
    const RiemannFan fan = solve_riemann(model, below, above);
    fs.insert_wave_fronts(fs.fronts_.size(), below, fan, 0.0, ta, true, block);
  }

  for (double xj : data.c0.jump_points()) fs.pending_.emplace_back(xj, data.c0(xj));
  fs.bottom_history_.emplace_back(0.0, fs.bottom_);
  return fs;
}

Event next_event(const FrontState& fs) {
  Event best;
  best.kind = Event::Kind::End;
  best.x = fs.X();
  best.t = 0.0;
  const double x = fs.x_;
  const double T = fs.T();
  if (fs.pending_next_ < fs.pending_.size()) {
    Event e;
    e.kind = Event::Kind::InitialJump;
    e.x = fs.pending_[fs.pending_next_].first;
    e.t = 0.0;
    if (earlier(e, best)) best = e;
  }
  const auto& fr = fs.fronts_;
  for (std::size_t i = 0; i + 1 < fr.size(); ++i) {
    double xs, ts;
    if (!collision(fr[i], fr[i + 1], x, xs, ts)) continue;
    if (ts > T || xs >= fs.X()) continue;
    Event e;
    e.kind = Event::Kind::Collision;
    e.x = xs;
    e.t = ts;
    e.lower = i;
    e.lower_id = fr[i].id;
    e.upper_id = fr[i + 1].id;
    if (earlier(e, best)) best = e;
  }
  return best;
}

InteractionRecord resolve_interaction(FrontState& fs, const Event& e) {
  const std::size_t i = e.lower;
  if (e.kind != Event::Kind::Collision || i + 1 >= fs.fronts_.size() ||
      fs.fronts_[i].id != e.lower_id || fs.fronts_[i + 1].id != e.upper_id) {
    throw ConsistencyError("stale collision event");
  }
  fs.x_ = std::max(fs.x_, e.x);
  fs.verify_chain(i);
  fs.verify_chain(i + 1);
  const Front lo = fs.fronts_[i];
  const Front hi = fs.fronts_[i + 1];
  fs.verify_front(lo);
  fs.verify_front(hi);

  InteractionRecord rec;
  rec.index = fs.records_.size();
  rec.x = e.x;
  rec.t = e.t;
  rec.incoming = classify(lo.wave.kind, hi.wave.kind);
  rec.lower_id = lo.id;
  rec.upper_id = hi.id;
  rec.s0 = lo.wave.left;
  rec.s1 = lo.wave.right;
  rec.s2 = hi.wave.right;

  const RiemannFan fan = solve_riemann(fs.model_, rec.s0, rec.s2);
  fs.retire(i + 1, e.x);
  fs.retire(i, e.x);
  std::vector<Front> block;
  fs.insert_wave_fronts(i, rec.s0, fan, e.x, e.t, true, block);
  fs.separate_triple_points(i, i + block.size());

  rec.middle = fan.middle;
  rec.contact_dropped = block.empty() || block.front().wave.kind != WaveKind::Contact;
  rec.outgoing = fan.has_shock()         ? OutgoingCase::DS
                 : fan.has_rarefaction() ? OutgoingCase::DR
                                         : OutgoingCase::D;
  rec.outgoing_steps = block.size() - (rec.contact_dropped ? 0 : 1);
  const double c0 = rec.s0.c, c1 = rec.s1.c, c2 = rec.s2.c;
  rec.tvc_before = std::abs(c1 - c0) + std::abs(c2 - c1);
  rec.tvc_after = std::abs(c2 - c0);
  rec.tvl_before = std::abs(rec.s1.L - rec.s0.L) + std::abs(rec.s2.L - rec.s1.L);
  rec.tvl_after = std::abs(fan.middle.L - rec.s0.L) + std::abs(rec.s2.L - fan.middle.L);
  rec.quadratic = std::abs(c0 - c1) * std::abs(c1 - c2);

  ++fs.events_;
  fs.records_.push_back(rec);
  fs.prune_above_T();
  return rec;
}

void resolve_initial_jump(FrontState& fs, const Event& e) {
  if (e.kind != Event::Kind::InitialJump || fs.pending_next_ >= fs.pending_.size()) {
    throw ConsistencyError("stale boundary event");
  }
  const auto [xj, c_new] = fs.pending_[fs.pending_next_++];
  fs.x_ = std::max(fs.x_, xj);
  if (!fs.fronts_.empty()) fs.verify_chain(0);
  const RiemannFan fan = solve_riemann(fs.model_, State{c_new, fs.bottom_.L}, fs.bottom_);
  std::vector<Front> block;
  fs.insert_wave_fronts(0, fan.middle, fan, xj, 0.0, false, block);
  fs.bottom_ = fan.middle;
  fs.bottom_history_.emplace_back(xj, fs.bottom_);
  fs.separate_triple_points(0, block.size());
  ++fs.events_;
  fs.prune_above_T();
}

Trajectory run(FrontState fs, double X) {
  if (!(X > 0.0) || X > fs.X()) {
    throw DomainError(fmt::format("run length {} outside (0, {}]", X, fs.X()));
  }
  fs.prune_above_T();
  while (true) {
    const Event e = next_event(fs);
    if (e.kind == Event::Kind::End || e.x >= X) break;
    if (fs.events_ >= fs.opts_.max_events) {
      throw ConsistencyError(
          fmt::format("event limit {} reached at x = {}", fs.opts_.max_events, fs.x_));
    }
    if (e.kind == Event::Kind::Collision) {
      resolve_interaction(fs, e);
    } else {
      resolve_initial_jump(fs, e);
    }
  }
  fs.x_ = X;
  fs.prune_above_T();
  for (std::size_t i = 0; i < fs.fronts_.size(); ++i) {
    fs.verify_chain(i);
    fs.verify_front(fs.fronts_[i]);
  }
  Trajectory traj(fs);
  return traj;
}

Trajectory::Trajectory(const FrontState& fs)
    : model_(fs.model_),
      data_(fs.data_),
      X_(fs.x_),
      delta_(fs.delta_),
      fronts_(fs.retired_),
      records_(fs.records_),
      bottom_history_(fs.bottom_history_),
      perturbations_(fs.perturbations_),
      events_(fs.events_) {
  fronts_.insert(fronts_.end(), fs.fronts_.begin(), fs.fronts_.end());
  std::sort(fronts_.begin(), fronts_.end(),
            [](const Front& a, const Front& b) { return a.id < b.id; });
}

Slice Trajectory::slice(double x) const {
  Slice s;
  s.x = x;
  const double T = data_.T();
  struct Item {
    double t;
    const Front* f;
  };
  std::vector<Item> items;
  for (const auto& f : fronts_) {
    const bool alive = f.alive_at(x) || (x == X_ && f.x_birth <= x && f.x_death >= x);
    if (!alive) continue;
    const double t = f.t_at(x);
    if (t < 0.0 || t > T) continue;
    items.push_back({t, &f});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.f->wave.speed != b.f->wave.speed) return a.f->wave.speed < b.f->wave.speed;
    return a.f->id < b.f->id;
  });
  s.t.reserve(items.size());
  s.fronts.reserve(items.size());
  for (const auto& it : items) {
    s.t.push_back(it.t);
    s.fronts.push_back(it.f);
  }
  s.bottom = bottom_history_.front().second;
  for (const auto& [xb, st] : bottom_history_) {
    if (xb <= x) s.bottom = st;
  }
  return s;
}

State Slice::at(double tq) const {
  auto it = std::upper_bound(t.begin(), t.end(), tq);
  if (it == t.begin()) return bottom;
  return fronts[static_cast<std::size_t>(it - t.begin()) - 1]->wave.right;
}

void Slice::pieces(double T, std::vector<double>& times, std::vector<State>& states) const {
  times.assign(1, 0.0);
  states.assign(1, bottom);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] > T) break;
    if (t[k] == times.back()) {
      states.back() = fronts[k]->wave.right;
    } else {
      times.push_back(t[k]);
      states.push_back(fronts[k]->wave.right);
    }
  }
}

State Trajectory::sample(double t, double x) const {
  if (!(t >= 0.0 && t <= T() && x >= 0.0 && x <= X_)) {
    throw DomainError(fmt::format("sample point (t={}, x={}) outside the domain", t, x));
  }
  return slice(x).at(t);
}

void Trajectory::log_v_pieces(double x, std::vector<double>& times,
                              std::vector<double>& values) const {
  const Slice s = slice(x);
  std::vector<double> pt;
  std::vector<State> ps;
  s.pieces(T(), pt, ps);
  std::vector<double> all = pt;
  for (double tb : data_.ub.jump_points()) all.push_back(tb);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  times.clear();
  values.clear();
  std::size_t k = 0;
  for (double tq : all) {
    while (k + 1 < pt.size() && pt[k + 1] <= tq) ++k;
    times.push_back(tq);
    values.push_back(ps[k].L - std::log(data_.ub(tq)));
  }
}

std::vector<double> Trajectory::crossings(double t) const {
  std::vector<double> xs;
  for (const auto& f : fronts_) {
    if (!(f.wave.speed > 0.0)) continue;
    const double xc = f.x0 + (t - f.t0) / f.wave.speed;
    if (xc >= f.x_birth && xc < std::min(f.x_death, X_) && xc >= 0.0) xs.push_back(xc);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

State sample_solution(const Trajectory& traj, double t, double x) { return traj.sample(t, x); }

double front_entropy_term(const ValidatedModel& model, const TestFunction& psi, const Wave& w) {
  if (w.kind == WaveKind::Contact) return 0.0;
  const double dq = entropy_flux(model, psi, w.right.c) - entropy_flux(model, psi, w.left.c);
  const double de = w.right.u() * psi.psi(w.right.c) - w.left.u() * psi.psi(w.left.c);
  return dq - w.speed * de;
}

double entropy_residual(const Trajectory& traj, double x, const TestFunction& psi) {
  const Slice s = traj.slice(x);
  double sum = 0.0;
  for (const Front* f : s.fronts) sum += front_entropy_term(traj.model(), psi, f->wave);
  return sum;
}

}  // namespace psa
