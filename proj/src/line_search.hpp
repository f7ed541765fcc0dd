#pragma once

// Strong-Wolfe line search (bracketing phase followed by zoom), operating on
// the objective *difference* psi(eta) = phi(eta) - phi(0) so callers can
// evaluate it without cancellation near the optimum.

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcglasso::detail {

struct LineSample {
  double psi;   // phi(eta) - phi(0); +inf outside the domain
  double dpsi;  // phi'(eta)
};

struct LineSearchOptions {
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_steps = 20;
  double eta_min = 1e-14;
};

struct LineSearchResult {
  double eta = 0.0;
  double psi = 0.0;
  bool wolfe = false;  // both strong Wolfe conditions hold
  bool ok = false;     // at least sufficient decrease holds
  int evaluations = 0;
};

template <class Eval>
LineSearchResult strong_wolfe(Eval&& eval, double dpsi0, double eta_init, const LineSearchOptions& opt) {
  LineSearchResult best;
  best.psi = 0.0;
  if (!(dpsi0 < 0.0)) return best;

  auto armijo = [&](double eta, double psi) { return psi <= opt.c1 * eta * dpsi0; };
  auto curvature = [&](double dpsi) { return std::fabs(dpsi) <= -opt.c2 * dpsi0; };
  auto remember = [&](double eta, double psi) {
    if (armijo(eta, psi) && psi < best.psi) {
      best.eta = eta;
      best.psi = psi;
      best.ok = true;
    }
  };
  int evals = 0;
  auto sample = [&](double eta) {
    ++evals;
    LineSample s = eval(eta);
    if (!std::isfinite(s.psi)) s.psi = std::numeric_limits<double>::infinity();
    return s;
  };
  auto done = [&](double eta, double psi) {
    LineSearchResult r{eta, psi, true, true, evals};
    return r;
  };

  auto zoom = [&](double lo, double psi_lo, double dpsi_lo, double hi, double psi_hi) -> LineSearchResult {
    for (int k = 0; k < opt.max_steps; ++k) {
      const double width = hi - lo;
      if (std::fabs(width) < opt.eta_min) break;
      double eta = 0.5 * (lo + hi);
      if (std::isfinite(psi_hi)) {
        // Minimiser of the quadratic through (lo, psi_lo, dpsi_lo) and (hi, psi_hi).
        const double denom = 2.0 * (psi_hi - psi_lo - dpsi_lo * width);
        if (denom > 0.0) {
          const double t = lo - dpsi_lo * width * width / denom;
          const double a = std::min(lo, hi) + 0.1 * std::fabs(width);
          const double b = std::max(lo, hi) - 0.1 * std::fabs(width);
          if (std::isfinite(t)) eta = std::clamp(t, a, b);
        }
      }
      const LineSample s = sample(eta);
      remember(eta, s.psi);
      if (!armijo(eta, s.psi) || s.psi >= psi_lo) {
        hi = eta;
        psi_hi = s.psi;
      } else {
        if (curvature(s.dpsi)) return done(eta, s.psi);
        if (s.dpsi * (hi - lo) >= 0.0) {
          hi = lo;
          psi_hi = psi_lo;
        }
        lo = eta;
        psi_lo = s.psi;
        dpsi_lo = s.dpsi;
      }
    }
    best.evaluations = evals;
    return best;
  };

  // Domain guard: shrink until the trial point is feasible.
  double eta = eta_init;
  LineSample s = sample(eta);
  while (!std::isfinite(s.psi) && eta > opt.eta_min && evals < 4 * opt.max_steps) {
    eta *= 0.5;
    s = sample(eta);
  }
  if (!std::isfinite(s.psi)) {
    best.evaluations = evals;
    return best;
  }

  double eta_prev = 0.0, psi_prev = 0.0, dpsi_prev = dpsi0;
  for (int i = 1; i <= opt.max_steps; ++i) {
    remember(eta, s.psi);
    if (!armijo(eta, s.psi) || (i > 1 && s.psi >= psi_prev)) return zoom(eta_prev, psi_prev, dpsi_prev, eta, s.psi);
    if (curvature(s.dpsi)) return done(eta, s.psi);
    if (s.dpsi >= 0.0) return zoom(eta, s.psi, s.dpsi, eta_prev, psi_prev);
    eta_prev = eta;
    psi_prev = s.psi;
    dpsi_prev = s.dpsi;
    eta *= 2.0;
    s = sample(eta);
  }
  best.evaluations = evals;
  return best;
}

}  // namespace pcglasso::detail
