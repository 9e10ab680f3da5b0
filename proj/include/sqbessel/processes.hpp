#pragma once

// Squared Bessel and CIR transitions.
//
//   dY = delta dt + 2 sqrt(Y) dB,          Y_{u+h} | Y_u ~ h chi2_delta(Y_u / h)
//   dX = (a + b X) dt + c sqrt(X) dW,      X_t = e^{bt} Y_{C(t)}, delta = 4a/c^2
//
// One CIR step of length h: lambda = X eta(h), X' = chi2_delta(lambda) e^{bh} / eta(h).

#include <algorithm>
#include <cmath>
#include <vector>

#include "sqbessel/errors.hpp"
#include "sqbessel/rng.hpp"
#include "sqbessel/sampler.hpp"

namespace sqbessel {

struct BesselParams {
  double delta = 1.0;
  double y0 = 0.0;

  void validate() const {
    if (!(delta > 0.0)) throw DomainError("BesselParams: delta must be positive");
    if (!(y0 >= 0.0)) throw DomainError("BesselParams: y0 must be nonnegative");
  }
};

struct CirParams {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double x0 = 0.0;

  double delta() const { return 4.0 * a / (c * c); }

  void validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("CirParams: a must be >= 0");
    if (!std::isfinite(b)) throw DomainError("CirParams: b must be finite");
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("CirParams: c must be > 0");
    if (!(x0 >= 0.0) || !std::isfinite(x0)) throw DomainError("CirParams: x0 must be >= 0");
  }
};

struct TimeGrid {
  std::vector<double> times;

  void validate() const {
    if (times.empty() || times.front() != 0.0)
      throw DomainError("TimeGrid: must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1])) throw DomainError("TimeGrid: times must increase strictly");
  }

  static TimeGrid uniform(double T, int steps) {
    if (!(T > 0.0) || steps < 1) throw DomainError("TimeGrid::uniform: need T > 0, steps >= 1");
    TimeGrid g;
    g.times.resize(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) g.times[i] = T * i / steps;
    g.times.back() = T;
    return g;
  }
};

// C(t) = c^2 (1 - e^{-bt}) / (4b), c^2 t / 4 at b = 0.
inline double time_change(const CirParams& p, double t) {
  if (!(t >= 0.0)) throw DomainError("time_change: t must be >= 0");
  const double c2 = p.c * p.c;
  if (p.b == 0.0) return 0.25 * c2 * t;
  return -c2 * std::expm1(-p.b * t) / (4.0 * p.b);
}

// eta(h) = 4b / (c^2 (1 - e^{-bh})), the reciprocal of the Bessel time
// increment seen from X; 4 / (c^2 h) at b = 0. Positive for every b.
inline double eta(const CirParams& p, double h) {
  if (!(h > 0.0)) throw DomainError("eta: step must be positive");
  const double c2 = p.c * p.c;
  if (p.b == 0.0) return 4.0 / (c2 * h);
  return -4.0 * p.b / (c2 * std::expm1(-p.b * h));
}

// e^{bh} / eta(h) = c^2 (e^{bh} - 1) / (4b)
inline double cir_step_scale(const CirParams& p, double h) {
  const double c2 = p.c * p.c;
  if (p.b == 0.0) return 0.25 * c2 * h;
  return c2 * std::expm1(p.b * h) / (4.0 * p.b);
}

inline double bessel_step(const BesselParams& at_un, double u_n, double u_next,
                          ChiSquareSampler& sampler, RngStream& rng) {
  at_un.validate();
  const double h = u_next - u_n;
  if (!(h > 0.0)) throw DomainError("bessel_step: step must be positive");
  return h * sampler.sample_noncentral({at_un.delta, at_un.y0 / h}, rng);
}

// One exact CIR step from x over a step of length h.
inline double cir_step_exact(const CirParams& p, double x, double h, ChiSquareSampler& sampler,
                             RngStream& rng) {
  const double e = eta(p, h);
  return sampler.sample_noncentral({p.delta(), x * e}, rng) * cir_step_scale(p, h);
}

enum class ExactRoute { TimeChange, DirectTransition };

inline double cir_terminal_exact(const CirParams& p, double T, ChiSquareSampler& sampler,
                                 RngStream& rng, ExactRoute route = ExactRoute::DirectTransition) {
  p.validate();
  if (!(T > 0.0)) throw DomainError("cir_terminal_exact: T must be positive");
  if (route == ExactRoute::DirectTransition) return cir_step_exact(p, p.x0, T, sampler, rng);
  // Y_{C(0)} = X_0, one Bessel step over [0, C(T)], then scale by e^{bT}
  const double y = bessel_step({p.delta(), p.x0}, 0.0, time_change(p, T), sampler, rng);
  return std::exp(p.b * T) * y;
}

// Values at every grid time, starting with x0.
inline std::vector<double> cir_path_exact(const CirParams& p, const TimeGrid& grid,
                                          ChiSquareSampler& sampler, RngStream& rng) {
  p.validate();
  grid.validate();
  std::vector<double> out(grid.times.size());
  out[0] = p.x0;
  for (std::size_t i = 1; i < out.size(); ++i)
    out[i] = cir_step_exact(p, out[i - 1], grid.times[i] - grid.times[i - 1], sampler, rng);
  return out;
}

// Full truncation Euler state; value() is the floored output.
struct FteState {
  double x = 0.0;

  double value() const { return std::max(x, 0.0); }

  void step(const CirParams& p, double h, double sqrt_h, double z) {
    const double xp = std::max(x, 0.0);
    x += (p.a + p.b * xp) * h + p.c * std::sqrt(xp) * sqrt_h * z;
  }
};

// Number of Euler substeps covering an interval of length len with steps <= h.
inline int fte_substeps(double len, double h) {
  if (!(h > 0.0)) throw DomainError("FTE step must be positive");
  return std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
}

inline std::vector<double> cir_path_fte(const CirParams& p, const TimeGrid& grid, double h,
                                        RngStream& rng) {
  p.validate();
  grid.validate();
  std::vector<double> out(grid.times.size());
  FteState s{p.x0};
  out[0] = s.value();
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double len = grid.times[i] - grid.times[i - 1];
    const int n = fte_substeps(len, h);
    const double dt = len / n, sdt = std::sqrt(dt);
    for (int k = 0; k < n; ++k) s.step(p, dt, sdt, sample_standard_normal(rng));
    out[i] = s.value();
  }
  return out;
}

}  // namespace sqbessel
