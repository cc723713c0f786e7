#include "psa/godunov.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

namespace {

// Exact integral of p * q over [a, b] for step functions.
double product_integral(const PiecewiseConstant& p, const PiecewiseConstant& q, double a, double b) {
  std::vector<double> cuts{a, b};
  for (double s : p.breaks()) {
    if (s > a && s < b) cuts.push_back(s);
  }
  for (double s : q.breaks()) {
    if (s > a && s < b) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double w = cuts[k + 1] - cuts[k];
    if (w <= 0.0) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    sum += p(mid) * q(mid) * w;
  }
  return sum;
}

struct Flux {
  double h = 0.0;
  double I = 0.0;
};

Flux phi(const ValidatedModel& model, double c) {
  const double cc = std::clamp(c, 0.0, 1.0);
  return {model->h(cc), cc + model->isotherms(cc).q1};
}

// Mean of Phi(c0) over [a, b].
Flux mean_phi(const ValidatedModel& model, const PiecewiseConstant& c0, double a, double b) {
  std::vector<double> cuts{a, b};
  for (double s : c0.breaks()) {
    if (s > a && s < b) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());
  Flux sum;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double w = cuts[k + 1] - cuts[k];
    const Flux f = phi(model, c0(std::min(0.5 * (cuts[k] + cuts[k + 1]), c0.end())));
    sum.h += f.h * w;
    sum.I += f.I * w;
  }
  sum.h /= (b - a);
  sum.I /= (b - a);
  return sum;
}

}  // namespace

State GridSolution::sample(double t, double x) const {
  if (slices.empty()) throw DomainError("godunov: empty solution");
  if (t < 0.0 || t > T || x < 0.0 || x > X) {
    throw DomainError(fmt::format("godunov: ({}, {}) outside the domain", t, x));
  }
  auto it = std::lower_bound(slices.begin(), slices.end(), x,
                             [](const GridSlice& s, double v) { return s.x < v; });
  if (it == slices.end()) {
    --it;
  } else if (it != slices.begin() && x - std::prev(it)->x < it->x - x) {
    --it;
  }
  const std::size_t n = it->c.size();
  const std::size_t j = std::min(static_cast<std::size_t>(t / dt), n - 1);
  return {std::clamp(it->c[j], 0.0, 1.0), std::log(it->u[j])};
}

GridSolution godunov_march(const ValidatedModel& model, const TrackingData& data, double dt, double X,
                           const GodunovOptions& opts) {
  if (!(opts.cfl > 0.0 && opts.cfl <= 1.0)) throw DomainError("godunov: cfl must lie in (0, 1]");
  if (!(dt > 0.0)) throw DomainError("godunov: dt must be positive");
  if (!(X > 0.0) || X > data.X() + 1e-12) throw DomainError("godunov: X outside the data range");
  const double T = data.T();
  const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  GridSolution sol;
  sol.T = T;
  sol.X = X;
  sol.dt = T / static_cast<double>(n);
  sol.cfl = opts.cfl;
  sol.dx_min = std::numeric_limits<double>::infinity();
  const double h = sol.dt;

  std::vector<double> u(n), m(n), c(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = h * static_cast<double>(j);
    const double b = j + 1 == n ? T : a + h;
    u[j] = data.ub.integral(a, b) / (b - a);
    if (!(u[j] > 0.0)) throw DomainError("godunov: ub must be positive");
    m[j] = product_integral(data.ub, data.cb, a, b) / (b - a);
    c[j] = m[j] / u[j];
  }

  std::vector<double> keep = opts.keep_x;
  std::sort(keep.begin(), keep.end());
  std::size_t keep_next = 0;
  auto store = [&](double x) {
    sol.slices.push_back({x, u, c});
  };
  const bool keep_all = keep.empty();
  auto maybe_store = [&](double x) {
    if (keep_all) {
      store(x);
      return;
    }
    while (keep_next < keep.size() && keep[keep_next] <= x + 1e-12) {
      if (std::abs(keep[keep_next] - x) <= 1e-12 &&
          (sol.slices.empty() || sol.slices.back().x != keep[keep_next])) {
        store(keep[keep_next]);
      }
      ++keep_next;
    }
  };
  maybe_store(0.0);

  std::vector<Flux> iface(n + 1);
  std::vector<double> cz(n);
  double x = 0.0;
  while (x < X - 1e-14) {
    // Fastest characteristic among the cells and the middle states of the interface fans.
    auto lambda = [&](const State& s) { return model->H(s.c) / s.u(); };
    double lam_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const State above{std::clamp(c[j], 0.0, 1.0), std::log(u[j])};
      lam_max = std::max(lam_max, lambda(above));
      cz[j] = above.c;
      if (j > 0 && c[j - 1] != c[j]) {
        const State below{std::clamp(c[j - 1], 0.0, 1.0), std::log(u[j - 1])};
        const State mid = solve_riemann(model, below, above).middle;
        cz[j] = mid.c;
        lam_max = std::max(lam_max, lambda(mid));
      }
    }
    auto bottom_lambda = [&](double a, double b) {
      const State above{std::clamp(c[0], 0.0, 1.0), std::log(u[0])};
      double lam = 0.0;
      for (double v : {data.c0(std::min(a, data.c0.end())), data.c0.left_limit(std::min(b, data.c0.end()))}) {
        lam = std::max(lam, lambda(solve_riemann(model, {std::clamp(v, 0.0, 1.0), 0.0}, above).middle));
      }
      for (double s : data.c0.breaks()) {
        if (s > a && s < b) {
          lam = std::max(lam, lambda(solve_riemann(model, {std::clamp(data.c0(s), 0.0, 1.0), 0.0}, above).middle));
        }
      }
      return lam;
    };
    const double dx_cells = opts.cfl * h / lam_max;
    lam_max = std::max(lam_max, bottom_lambda(x, std::min(x + (opts.dx > 0.0 ? opts.dx : dx_cells), X)));
    const double dx_cfl = opts.cfl * h / lam_max;
    double dx = dx_cfl;
    if (opts.dx > 0.0) {
      if (opts.dx * lam_max > opts.cfl * h * (1.0 + 1e-12)) {
        throw CflError(fmt::format("godunov: dx = {} violates CFL at x = {} (max lambda {})", opts.dx,
                                   x, lam_max),
                       dx_cfl);
      }
      dx = opts.dx;
    }
    dx = std::min(dx, X - x);
    double snap = -1.0;
    if (keep_next < keep.size() && keep[keep_next] > x && keep[keep_next] - x <= dx) {
      dx = keep[keep_next] - x;
      snap = keep[keep_next];
    }

    iface[0] = mean_phi(model, data.c0, x, x + dx);
    for (std::size_t j = 1; j < n; ++j) iface[j] = phi(model, cz[j]);
    iface[n] = phi(model, c[n - 1]);

    double s0u = 0.0, s0m = 0.0, s1u = 0.0, s1m = 0.0;
    const double r = dx / h;
    for (std::size_t j = 0; j < n; ++j) {
      s0u += u[j] * h;
      s0m += m[j] * h;
      u[j] -= r * (iface[j + 1].h - iface[j].h);
      m[j] -= r * (iface[j + 1].I - iface[j].I);
      s1u += u[j] * h;
      s1m += m[j] * h;
      if (!(u[j] > 0.0)) {
        throw ConsistencyError(fmt::format("godunov: non-positive u at x = {}, cell {}", x + dx, j));
      }
      c[j] = m[j] / u[j];
      if (c[j] < -1e-12 || c[j] > 1.0 + 1e-12) ++sol.positivity_violations;
    }
    const double du = s1u - s0u + dx * (iface[n].h - iface[0].h);
    const double dm = s1m - s0m + dx * (iface[n].I - iface[0].I);
    sol.conservation_defect =
        std::max({sol.conservation_defect, std::abs(du) / std::max(s0u, 1e-300),
                  std::abs(dm) / std::max(std::abs(s0m) + dx * std::abs(iface[0].I), 1e-300)});
    x += dx;
    if (snap >= 0.0) x = snap;
    if (X - x < 1e-14) x = X;
    ++sol.steps;
    sol.dx_min = std::min(sol.dx_min, dx);
    sol.dx_max = std::max(sol.dx_max, dx);
    maybe_store(x);
  }
  if (sol.slices.empty() || sol.slices.back().x != x) store(x);
  return sol;
}

L1Distance l1_slice_distance(const Sampler& a, const Sampler& b, double x, double T, std::size_t n) {
  L1Distance d;
  const double w = T / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * w;
    const State sa = a(t, x);
    const State sb = b(t, x);
    d.c += std::abs(sa.c - sb.c) * w;
    d.u += std::abs(sa.u() - sb.u()) * w;
  }
  return d;
}

}  // namespace psa
