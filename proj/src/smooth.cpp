#include "psa/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "psa/errors.hpp"

namespace psa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Root of a monotone f on [a, b] with f(a) and f(b) of opposite signs (or zero).
template <class Fn>
double monotone_root(Fn f, double a, double b) {
  const double fa = f(a);
  if (fa == 0.0) return a;
  const double fb = f(b);
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) return std::abs(fa) < std::abs(fb) ? a : b;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                   boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

CharacteristicSolver::CharacteristicSolver(ValidatedModel model, SmoothData data,
                                           const SmoothGrid& grid)
    : model_(std::move(model)), data_(std::move(data)) {
  if (!(data_.T > 0.0) || !(data_.X > 0.0)) throw DomainError("smooth: T and X must be positive");
  if (grid.n_b < 1 || grid.n_probe < 2) throw DomainError("smooth: grid resolutions must be positive");
  const double c00 = checked_concentration(data_.c0(0.0));
  const double cb0 = checked_concentration(data_.cb(0.0));
  if (std::abs(c00 - cb0) > 1e-12) {
    throw DomainError(fmt::format("smooth: incompatible corner data c0(0) = {} != cb(0) = {}", c00, cb0));
  }
  const std::size_t n = grid.n_b;
  tb_.resize(n + 1);
  bb_.resize(n + 1);
  auto w = [&](double t) {
    const double u = data_.ub(t);
    if (!(u > 0.0)) throw DomainError(fmt::format("smooth: ub({}) = {} is not positive", t, u));
    return u * model_->G(checked_concentration(data_.cb(t)));
  };
  double w_prev = w(0.0);
  tb_[0] = 0.0;
  bb_[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    tb_[k] = data_.T * static_cast<double>(k) / static_cast<double>(n);
    const double w_k = w(tb_[k]);
    bb_[k] = bb_[k - 1] + 0.5 * (w_prev + w_k) * (tb_[k] - tb_[k - 1]);
    w_prev = w_k;
  }
  dF_corner_ = model_->dF(c00);
  detect_breakdown(grid.n_probe);
}

double CharacteristicSolver::b(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= data_.T) return bb_.back();
  const auto it = std::upper_bound(tb_.begin(), tb_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - tb_.begin()) - 1;
  const double s = (t - tb_[k]) / (tb_[k + 1] - tb_[k]);
  return bb_[k] + s * (bb_[k + 1] - bb_[k]);
}

double CharacteristicSolver::b_inverse(double b) const {
  if (b <= 0.0) return 0.0;
  if (b >= bb_.back()) return data_.T;
  const auto it = std::upper_bound(bb_.begin(), bb_.end(), b);
  const std::size_t k = static_cast<std::size_t>(it - bb_.begin()) - 1;
  const double s = (b - bb_[k]) / (bb_[k + 1] - bb_[k]);
  return tb_[k] + s * (tb_[k + 1] - tb_[k]);
}

double CharacteristicSolver::gamma(double t) const { return dF_corner_ * b(t); }

void CharacteristicSolver::detect_breakdown(std::size_t n_probe) {
  const double b_end = bb_.back();
  auto consider = [&](Breakdown::Family fam, double b_star, double x_star) {
    if (!(b_star <= b_end) || !(x_star <= data_.X) || x_star < 0.0) return;
    const double t_star = b_inverse(b_star);
    if (!breakdown_ || t_star < breakdown_->t) breakdown_ = Breakdown{fam, t_star, x_star, b_star};
  };
  // Initial family: xi + F'(c0(xi)) b; neighbours cross when F' decreases in xi.
  double xi_prev = 0.0;
  double dF_prev = dF_corner_;
  for (std::size_t k = 1; k <= n_probe; ++k) {
    const double xi = data_.X * static_cast<double>(k) / static_cast<double>(n_probe);
    const double dF = model_->dF(checked_concentration(data_.c0(xi)));
    if (dF < dF_prev) {
      const double b_star = (xi - xi_prev) / (dF_prev - dF);
      consider(Breakdown::Family::Initial, b_star, xi_prev + dF_prev * b_star);
    }
    xi_prev = xi;
    dF_prev = dF;
  }
  // Boundary family: F'(cb(tau)) (b - b(tau)); later characteristics catch up when F' increases.
  double b_prev = 0.0;
  dF_prev = dF_corner_;
  for (std::size_t k = 1; k <= n_probe; ++k) {
    const double tau = data_.T * static_cast<double>(k) / static_cast<double>(n_probe);
    const double bk = b(tau);
    const double dF = model_->dF(checked_concentration(data_.cb(tau)));
    if (dF > dF_prev) {
      const double b_star = (dF * bk - dF_prev * b_prev) / (dF - dF_prev);
      if (b_star >= bk) consider(Breakdown::Family::Boundary, b_star, dF * (b_star - bk));
    }
    b_prev = bk;
    dF_prev = dF;
  }
}

double CharacteristicSolver::concentration(double t, double x) const {
  if (t < 0.0 || t > data_.T || x < 0.0 || x > data_.X) {
    throw DomainError(fmt::format("smooth: ({}, {}) outside the domain", t, x));
  }
  if (!valid(t)) return kNaN;
  const double bt = b(t);
  const double xg = dF_corner_ * bt;
  if (x >= xg) {
    auto phi = [&](double xi) { return xi + model_->dF(checked_concentration(data_.c0(xi))) * bt - x; };
    return checked_concentration(data_.c0(monotone_root(phi, 0.0, x)));
  }
  auto psi = [&](double tau) {
    return model_->dF(checked_concentration(data_.cb(tau))) * (bt - b(tau)) - x;
  };
  return checked_concentration(data_.cb(monotone_root(psi, 0.0, t)));
}

double CharacteristicSolver::velocity(double t, double x) const {
  const double c = concentration(t, x);
  if (std::isnan(c)) return kNaN;
  return data_.ub(t) * model_->G(checked_concentration(data_.cb(t))) / model_->G(c);
}

std::size_t SmoothSolution::rows_valid() const {
  std::size_t n = 0;
  for (double ti : t) {
    if (solver->valid(ti)) ++n;
  }
  return n;
}

SmoothSolution solve_characteristics(const ValidatedModel& model, const SmoothData& data,
                                     const SmoothGrid& grid) {
  if (grid.nt < 1 || grid.nx < 1) throw DomainError("smooth: grid resolutions must be positive");
  SmoothSolution sol;
  sol.solver = std::make_shared<const CharacteristicSolver>(model, data, grid);
  const auto& cs = *sol.solver;
  for (std::size_t i = 0; i <= grid.nt; ++i) {
    sol.t.push_back(data.T * static_cast<double>(i) / static_cast<double>(grid.nt));
  }
  for (std::size_t j = 0; j <= grid.nx; ++j) {
    sol.x.push_back(data.X * static_cast<double>(j) / static_cast<double>(grid.nx));
  }
  const std::size_t n = sol.t.size() * sol.x.size();
  sol.c.assign(n, kNaN);
  sol.v.assign(n, kNaN);
  sol.side.assign(n, 0);
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double ti = sol.t[i];
    const double xg = cs.gamma(ti);
    const double Gb = model->G(checked_concentration(data.cb(ti)));
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      const std::size_t k = sol.index(i, j);
      sol.side[k] = sol.x[j] >= xg ? 1 : -1;
      if (!cs.valid(ti)) continue;
      const double c = cs.concentration(ti, sol.x[j]);
      sol.c[k] = c;
      sol.v[k] = Gb / model->G(c);
    }
  }
  return sol;
}

VelocityField reconstruct_velocity(const SmoothSolution& sol,
                                   const std::function<double(double)>& ub,
                                   const std::function<double(double)>& cb) {
  const auto& model = sol.solver->model();
  VelocityField out{sol.t, sol.x, {}, {}};
  out.u.assign(sol.c.size(), kNaN);
  out.v.assign(sol.c.size(), kNaN);
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double Gb = model->G(checked_concentration(cb(sol.t[i])));
    const double u_b = ub(sol.t[i]);
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
      const std::size_t k = sol.index(i, j);
      if (std::isnan(sol.c[k])) continue;
      out.v[k] = Gb / model->G(sol.c[k]);
      out.u[k] = u_b * out.v[k];
    }
  }
  return out;
}

double entropy_equalities_check(const SmoothSolution& sol, const std::vector<TestFunction>& psi_list) {
  const auto& model = sol.solver->model();
  const auto& ub = sol.solver->data().ub;
  const std::size_t nt = sol.t.size();
  const std::size_t nx = sol.x.size();
  if (nt < 3 || nx < 3) return 0.0;
  std::vector<double> u(sol.c.size(), kNaN);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t k = sol.index(i, j);
      u[k] = ub(sol.t[i]) * sol.v[k];
    }
  }
  auto usable = [&](std::size_t i, std::size_t j) {
    const std::size_t k = sol.index(i, j);
    const std::int8_t s = sol.side[k];
    for (std::size_t q : {sol.index(i - 1, j), sol.index(i + 1, j), sol.index(i, j - 1),
                          sol.index(i, j + 1), k}) {
      if (sol.side[q] != s || std::isnan(sol.c[q])) return false;
    }
    return true;
  };
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < nt; ++i) {
    const double ht = sol.t[i + 1] - sol.t[i - 1];
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      if (!usable(i, j)) continue;
      const double hx = sol.x[j + 1] - sol.x[j - 1];
      const std::size_t e = sol.index(i, j + 1), w = sol.index(i, j - 1);
      const std::size_t n = sol.index(i + 1, j), s = sol.index(i - 1, j);
      const double r_inv = (u[e] * model->G(sol.c[e]) - u[w] * model->G(sol.c[w])) / hx;
      worst = std::max(worst, std::abs(r_inv));
      for (const auto& psi : psi_list) {
        const double flux_x = (u[e] * psi.psi(sol.c[e]) - u[w] * psi.psi(sol.c[w])) / hx;
        const double flux_t =
            (entropy_flux(model, psi, sol.c[n]) - entropy_flux(model, psi, sol.c[s])) / ht;
        worst = std::max(worst, std::abs(flux_x + flux_t));
      }
    }
  }
  return worst;
}

}  // namespace psa
