#pragma once

// Exact and Monte Carlo prices for the put, Asian put and basket put on CIR
// assets, and the moment diagnostic for the non-central sampler. Prices are
// plain expectations (no discounting).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sqbessel/errors.hpp"
#include "sqbessel/processes.hpp"
#include "sqbessel/quadrature.hpp"
#include "sqbessel/rng.hpp"
#include "sqbessel/sampler.hpp"
#include "sqbessel/specfun.hpp"

namespace sqbessel {

inline constexpr std::uint64_t kDefaultSeed = 20240531;

enum class OptionKind { Put, AsianPut, BasketPut };
enum class SchemeKind { Exact, FTE };
enum class Coupling { CommonU, Independent };

struct Scheme {
  SchemeKind kind = SchemeKind::Exact;
  double h = 0.0;  // FTE step; ignored by Exact

  static Scheme exact() { return {SchemeKind::Exact, 0.0}; }
  static Scheme fte(double h) { return {SchemeKind::FTE, h}; }
};

struct OptionSpec {
  OptionKind kind = OptionKind::Put;
  double strike = 0.0;
  double maturity = 0.0;
  int fixings = 1;
  std::vector<double> weights;  // BasketPut
  std::vector<CirParams> assets;

  void validate() const {
    if (!(strike > 0.0)) throw DomainError("OptionSpec: strike must be positive");
    if (!(maturity > 0.0)) throw DomainError("OptionSpec: maturity must be positive");
    if (fixings < 1) throw DomainError("OptionSpec: fixings must be >= 1");
    if (assets.empty()) throw DomainError("OptionSpec: no assets");
    for (const auto& a : assets) a.validate();
    if (kind == OptionKind::BasketPut) {
      if (weights.size() != assets.size())
        throw DomainError("OptionSpec: one weight per basket asset");
      double s = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("OptionSpec: weights must be nonnegative");
        s += w;
      }
      if (std::fabs(s - 1.0) > 1e-12) throw DomainError("OptionSpec: weights must sum to 1");
    } else if (assets.size() != 1) {
      throw DomainError("OptionSpec: put and Asian put take exactly one asset");
    }
  }
};

struct McResult {
  double price = 0.0;
  double std_error = 0.0;  // standard deviation of the mean estimator
  std::uint64_t n_paths = 0;
  double elapsed = 0.0;  // seconds
};

struct McConfig {
  std::uint64_t n_paths = 1000000;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t block_size = 16384;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline double relative_error(double reference, double estimate) {
  if (reference == 0.0) throw DomainError("relative_error: zero reference");
  return std::fabs(reference - estimate) / std::fabs(reference);
}

// ---- block driver -----------------------------------------------------------

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct BlockSums {
  std::uint64_t count = 0;
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

// Runs n paths in fixed blocks; block b uses stream (seed, b). fn(sampler,
// rng, out) fills out[0..dim). Results are per block, in block order, so the
// outcome does not depend on the thread count.
template <class Fn>
std::vector<BlockSums> run_blocks(const McConfig& cfg, std::size_t dim,
                                  std::shared_ptr<const PatchSet> patches, Fn&& fn) {
  if (cfg.n_paths < 1) throw DomainError("n_paths must be >= 1");
  if (cfg.block_size < 1) throw DomainError("block_size must be >= 1");
  const std::uint64_t nb = (cfg.n_paths + cfg.block_size - 1) / cfg.block_size;
  std::vector<BlockSums> blocks(nb);
  unsigned nt = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::uint64_t>(nt, nb));

  auto worker = [&](unsigned t) {
    std::unique_ptr<ChiSquareSampler> sampler;
    if (patches) sampler = std::make_unique<ChiSquareSampler>(patches);
    std::vector<double> out(dim);
    std::vector<CompensatedSum> s(dim), s2(dim);
    for (std::uint64_t b = t; b < nb; b += nt) {
      const std::uint64_t first = b * cfg.block_size;
      const std::uint64_t n = std::min(cfg.block_size, cfg.n_paths - first);
      RngStream rng(cfg.seed, b);
      std::fill(s.begin(), s.end(), CompensatedSum{});
      std::fill(s2.begin(), s2.end(), CompensatedSum{});
      for (std::uint64_t i = 0; i < n; ++i) {
        fn(sampler.get(), rng, std::span<double>(out));
        for (std::size_t k = 0; k < dim; ++k) {
          s[k].add(out[k]);
          s2[k].add(out[k] * out[k]);
        }
      }
      auto& blk = blocks[b];
      blk.count = n;
      blk.sum.resize(dim);
      blk.sum_sq.resize(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        blk.sum[k] = s[k].value();
        blk.sum_sq[k] = s2[k].value();
      }
    }
  };

  if (nt <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (unsigned t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          worker(t);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return blocks;
}

inline McResult summarize(const std::vector<BlockSums>& blocks, std::size_t k = 0) {
  CompensatedSum s, s2;
  std::uint64_t n = 0;
  for (const auto& b : blocks) {
    s.add(b.sum[k]);
    s2.add(b.sum_sq[k]);
    n += b.count;
  }
  McResult r;
  r.n_paths = n;
  r.price = s.value() / static_cast<double>(n);
  if (n > 1) {
    const double var = std::max(
        0.0, (s2.value() - static_cast<double>(n) * r.price * r.price) / static_cast<double>(n - 1));
    r.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return r;
}

// ---- exact put --------------------------------------------------------------

struct ExactPutForms {
  double density_form = 0.0;
  double cdf_form = 0.0;
};

// Both forms of E[max(K - X_T, 0)]. With s = eta(T) e^{-bT} the payoff
// integral becomes one over z = x s, and z = K s t^{2/delta} removes the
// z^{delta/2 - 1} singularity of the density at 0.
inline ExactPutForms put_price_exact_forms(const CirParams& p, double K, double T,
                                           double tol = 1e-12) {
  p.validate();
  if (!(K > 0.0) || !(T > 0.0)) throw DomainError("put_price_exact: need K > 0, T > 0");
  const double delta = p.delta();
  const double s = eta(p, T) / std::exp(p.b * T);
  const NoncentralParams nc{delta, p.x0 * eta(p, T)};
  const double zK = K * s;
  const double pw = 2.0 / delta;

  auto z_of = [&](double t) { return zK * std::pow(t, pw); };
  auto density = [&](double t) {
    const double z = z_of(t);
    if (!(z > 0.0)) return 0.0;
    // (K - z/s) f(z) dz/dt, dz/dt = pw z / t
    return (K - z / s) * noncentral_chi2_pdf(nc, z) * pw * z / t;
  };
  auto cdf = [&](double t) {
    const double z = z_of(t);
    if (!(z > 0.0)) return 0.0;
    return noncentral_chi2_cdf(nc, z) * pw * z / t / s;
  };
  const auto a = gauss_kronrod(density, 0.0, 1.0, tol);
  const auto b = gauss_kronrod(cdf, 0.0, 1.0, tol);
  if (!a.converged) throw ConvergenceError("put density integral did not converge", a.error);
  if (!b.converged) throw ConvergenceError("put CDF integral did not converge", b.error);
  return {a.value, b.value};
}

inline double put_price_exact(const CirParams& p, double K, double T) {
  const auto f = put_price_exact_forms(p, K, T);
  if (std::fabs(f.density_form - f.cdf_form) > 1e-8)
    throw ConvergenceError("put_price_exact: density and CDF forms disagree",
                           std::fabs(f.density_form - f.cdf_form));
  return f.density_form;
}

// ---- Monte Carlo pricers ----------------------------------------------------

namespace detail {

struct AssetStep {
  double delta, eta, scale;
};

inline AssetStep asset_step(const CirParams& p, double h) {
  return {p.delta(), eta(p, h), cir_step_scale(p, h)};
}

inline void require_sampler(const ChiSquareSampler* s) {
  if (s == nullptr) throw DomainError("exact scheme needs a coefficient patch set");
}

}  // namespace detail

inline McResult price_mc(const OptionSpec& spec, const McConfig& cfg, Scheme scheme,
                         std::shared_ptr<const PatchSet> patches,
                         Coupling coupling = Coupling::CommonU) {
  spec.validate();
  if (scheme.kind == SchemeKind::FTE && !(scheme.h > 0.0))
    throw DomainError("FTE scheme needs h > 0");
  if (scheme.kind == SchemeKind::Exact) {
    if (!patches) throw DomainError("exact scheme needs a coefficient patch set");
    for (const auto& a : spec.assets) patches->find(a.delta());
  }
  const auto t0 = std::chrono::steady_clock::now();
  const double K = spec.strike, T = spec.maturity;
  std::vector<BlockSums> blocks;

  if (spec.kind == OptionKind::Put || spec.kind == OptionKind::AsianPut) {
    const CirParams p = spec.assets[0];
    const int M = spec.kind == OptionKind::Put ? 1 : spec.fixings;
    const double dt = T / M;
    if (scheme.kind == SchemeKind::Exact) {
      const auto st = detail::asset_step(p, dt);
      blocks = run_blocks(cfg, 1, patches, [&](ChiSquareSampler* smp, RngStream& rng,
                                               std::span<double> out) {
        double x = p.x0, sum = 0.0;
        for (int m = 0; m < M; ++m) {
          x = smp->sample_noncentral({st.delta, x * st.eta}, rng) * st.scale;
          sum += x;
        }
        out[0] = std::max(K - sum / M, 0.0);
      });
    } else {
      const int n = fte_substeps(dt, scheme.h);
      const double h = dt / n, sh = std::sqrt(h);
      blocks = run_blocks(cfg, 1, nullptr, [&](ChiSquareSampler*, RngStream& rng,
                                               std::span<double> out) {
        FteState s{p.x0};
        double sum = 0.0;
        for (int m = 0; m < M; ++m) {
          for (int k = 0; k < n; ++k) s.step(p, h, sh, sample_standard_normal(rng));
          sum += s.value();
        }
        out[0] = std::max(K - sum / M, 0.0);
      });
    }
  } else {
    const std::size_t d = spec.assets.size();
    if (scheme.kind == SchemeKind::Exact) {
      std::vector<detail::AssetStep> st(d);
      std::vector<std::size_t> same_as(d);  // first asset with the same delta
      for (std::size_t i = 0; i < d; ++i) {
        st[i] = detail::asset_step(spec.assets[i], T);
        same_as[i] = i;
        for (std::size_t j = 0; j < i; ++j)
          if (st[j].delta == st[i].delta) {
            same_as[i] = j;
            break;
          }
      }
      blocks = run_blocks(cfg, 1, patches, [&, coupling](ChiSquareSampler* smp, RngStream& rng,
                                                         std::span<double> out) {
        double central[64];
        std::vector<double> central_big;
        double* cen = central;
        if (d > 64) {
          central_big.resize(d);
          cen = central_big.data();
        }
        double basket = 0.0;
        if (coupling == Coupling::CommonU) {
          const double u = rng.uniform();
          for (std::size_t i = 0; i < d; ++i)
            cen[i] = same_as[i] == i ? smp->inverse(st[i].delta, u) : cen[same_as[i]];
          for (std::size_t i = 0; i < d; ++i) {
            const double lambda = spec.assets[i].x0 * st[i].eta;
            basket += spec.weights[i] * (cen[i] + sample_noncentral_excess(lambda, rng)) *
                      st[i].scale;
          }
        } else {
          for (std::size_t i = 0; i < d; ++i) {
            const double lambda = spec.assets[i].x0 * st[i].eta;
            basket += spec.weights[i] * smp->sample_noncentral({st[i].delta, lambda}, rng) *
                      st[i].scale;
          }
        }
        out[0] = std::max(K - basket, 0.0);
      });
    } else {
      // one Brownian motion drives every asset
      const int n = fte_substeps(T, scheme.h);
      const double h = T / n, sh = std::sqrt(h);
      blocks = run_blocks(cfg, 1, nullptr, [&](ChiSquareSampler*, RngStream& rng,
                                               std::span<double> out) {
        std::vector<FteState> s(d);
        for (std::size_t i = 0; i < d; ++i) s[i].x = spec.assets[i].x0;
        for (int k = 0; k < n; ++k) {
          const double z = sample_standard_normal(rng);
          for (std::size_t i = 0; i < d; ++i) s[i].step(spec.assets[i], h, sh, z);
        }
        double basket = 0.0;
        for (std::size_t i = 0; i < d; ++i) basket += spec.weights[i] * s[i].value();
        out[0] = std::max(K - basket, 0.0);
      });
    }
  }
  McResult r = summarize(blocks);
  r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline McResult price_put_mc(const CirParams& asset, double K, double T, const McConfig& cfg,
                             Scheme scheme, std::shared_ptr<const PatchSet> patches) {
  OptionSpec s{OptionKind::Put, K, T, 1, {}, {asset}};
  return price_mc(s, cfg, scheme, std::move(patches));
}

inline McResult price_asian_mc(const CirParams& asset, double K, double T, int fixings,
                               const McConfig& cfg, Scheme scheme,
                               std::shared_ptr<const PatchSet> patches) {
  OptionSpec s{OptionKind::AsianPut, K, T, fixings, {}, {asset}};
  return price_mc(s, cfg, scheme, std::move(patches));
}

inline McResult price_basket_mc(const OptionSpec& spec, const McConfig& cfg, Scheme scheme,
                                std::shared_ptr<const PatchSet> patches,
                                Coupling coupling = Coupling::CommonU) {
  if (spec.kind != OptionKind::BasketPut) throw DomainError("price_basket_mc: not a basket");
  return price_mc(spec, cfg, scheme, std::move(patches), coupling);
}

// ---- paper parameter sets ---------------------------------------------------

// a = 0.045, b = -0.5, c = 1, X0 = 0.09 (delta = 0.18)
inline CirParams paper_put_asset() { return {0.045, -0.5, 1.0, 0.09}; }

// The four five-asset baskets: T = 10, K = 0.09, X0 = 0.09, equal weights.
inline OptionSpec paper_basket_case(int which) {
  OptionSpec s;
  s.kind = OptionKind::BasketPut;
  s.strike = 0.09;
  s.maturity = 10.0;
  s.weights.assign(5, 0.2);
  const double cs[5] = {0.8, 0.9, 1.0, 1.1, 1.2};
  const double bs[5] = {-0.4, -0.45, -0.5, -0.55, -0.6};
  const double as[5] = {0.0288, 0.0365, 0.0450, 0.0545, 0.0648};
  for (int i = 0; i < 5; ++i) {
    CirParams p;
    p.x0 = 0.09;
    switch (which) {
      case 1:  // delta = 0.18 throughout
        p.b = -0.5;
        p.c = cs[i];
        p.a = 0.18 * p.c * p.c / 4.0;
        break;
      case 2:
        p.b = bs[i];
        p.c = cs[i];
        p.a = 0.18 * p.c * p.c / 4.0;
        break;
      case 3:
        p.b = -0.5;
        p.c = 1.0;
        p.a = as[i];
        break;
      case 4:
        p.b = -0.5;
        p.c = cs[i];
        p.a = 0.045;
        break;
      default: throw DomainError("basket case must be 1..4");
    }
    s.assets.push_back(p);
  }
  return s;
}

// ---- moment diagnostic ------------------------------------------------------

struct MomentRow {
  int k = 0;
  double analytic = 0.0;
  double sample = 0.0;
  double rel_error = 0.0;
  double jackknife_se = std::numeric_limits<double>::quiet_NaN();  // of rel_error; needs 2+ blocks
};

// Sample raw moments of sample_noncentral against the analytic ones, with a
// delete-a-block jackknife standard error for each relative error.
inline std::vector<MomentRow> moment_report(const NoncentralParams& params,
                                            std::uint64_t n_samples, int k_max,
                                            std::shared_ptr<const PatchSet> patches,
                                            std::uint64_t seed = kDefaultSeed,
                                            std::uint64_t block_size = 10000) {
  params.validate();
  if (n_samples < 1000) throw DomainError("moment_report: need at least 1000 samples");
  if (k_max < 1) throw DomainError("moment_report: k_max must be >= 1");
  const auto exact = noncentral_chi2_moments(params, k_max);
  McConfig cfg;
  cfg.n_paths = n_samples;
  cfg.seed = seed;
  cfg.block_size = block_size;
  const auto km = static_cast<std::size_t>(k_max);
  const auto blocks = run_blocks(cfg, km, std::move(patches),
                                 [&](ChiSquareSampler* smp, RngStream& rng, std::span<double> o) {
                                   const double x = smp->sample_noncentral(params, rng);
                                   double p = 1.0;
                                   for (std::size_t k = 0; k < km; ++k) o[k] = (p *= x);
                                 });
  std::vector<MomentRow> rows(km);
  const double G = static_cast<double>(blocks.size());
  for (std::size_t k = 0; k < km; ++k) {
    CompensatedSum tot;
    std::uint64_t n = 0;
    for (const auto& b : blocks) {
      tot.add(b.sum[k]);
      n += b.count;
    }
    const double S = tot.value();
    auto& r = rows[k];
    r.k = static_cast<int>(k) + 1;
    r.analytic = exact[k];
    r.sample = S / static_cast<double>(n);
    r.rel_error = relative_error(r.analytic, r.sample);
    if (blocks.size() > 1) {
      std::vector<double> loo(blocks.size());
      double mean = 0.0;
      for (std::size_t g = 0; g < blocks.size(); ++g) {
        loo[g] = (S - blocks[g].sum[k]) / static_cast<double>(n - blocks[g].count);
        mean += loo[g];
      }
      mean /= G;
      double ss = 0.0;
      for (double v : loo) ss += (v - mean) * (v - mean);
      r.jackknife_se = std::sqrt((G - 1.0) / G * ss) / std::fabs(r.analytic);
    }
  }
  return rows;
}

}  // namespace sqbessel
