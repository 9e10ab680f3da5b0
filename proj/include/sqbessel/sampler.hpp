#pragma once

// Central chi-square draws by Chebyshev inversion and non-central draws by
// the Poisson decomposition chi2_delta(lambda) = chi2_delta + chi2_{2N}.

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "sqbessel/chebyshev.hpp"
#include "sqbessel/errors.hpp"
#include "sqbessel/rng.hpp"
#include "sqbessel/specfun.hpp"

namespace sqbessel {

inline double sample_standard_normal(RngStream& rng) { return normal_quantile(rng.uniform()); }

inline std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0)) throw DomainError("sample_poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // sequential search on the CDF
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double s = p;
    std::uint64_t k = 0;
    while (u > s) {
      ++k;
      p *= mean / static_cast<double>(k);
      s += p;
      if (p == 0.0 && s < u) break;  // u lost in the rounding of s near 1
    }
    return k;
  }
  // PTRS, transformed rejection with squeeze (Hormann 1993)
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double U = rng.uniform() - 0.5;
    const double V = rng.uniform();
    const double us = 0.5 - std::fabs(U);
    const double k = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

// -2 sum_{i<n} ln U_i, a chi-square with 2n degrees of freedom.
inline double sample_chi2_even(std::uint64_t n, RngStream& rng) {
  double s = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) s -= std::log(rng.uniform());
  return 2.0 * s;
}

// chi2_delta(lambda) - chi2_delta: the Poisson part, with the lambda > 10
// branch run as a loop.
inline double sample_noncentral_excess(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0)) throw DomainError("non-centrality must be >= 0");
  while (lambda > 10.0) {
    const std::uint64_t nbar = sample_poisson(5.0, rng);
    if (nbar != 0) {
      const double part = sample_chi2_even(nbar - 1, rng);
      const double v1 = sample_standard_normal(rng);
      const double v2 = sample_standard_normal(rng) + std::sqrt(lambda - 10.0);
      return part + v1 * v1 + v2 * v2;
    }
    lambda -= 10.0;
  }
  return sample_chi2_even(sample_poisson(0.5 * lambda, rng), rng);
}

// Inverse-CDF sampler over a shared, immutable patch set. Holds a small LRU
// cache of per-delta contexts, so one instance per thread.
class ChiSquareSampler {
 public:
  static constexpr std::size_t kCacheSize = 64;

  explicit ChiSquareSampler(std::shared_ptr<const PatchSet> patches)
      : patches_(std::move(patches)) {
    if (!patches_) throw DomainError("ChiSquareSampler: null patch set");
    patches_->validate();
    cache_.reserve(kCacheSize);  // entries never move
  }
  ChiSquareSampler(const ChiSquareSampler& o) : ChiSquareSampler(o.patches_) {}
  ChiSquareSampler& operator=(const ChiSquareSampler&) = delete;
  ChiSquareSampler(ChiSquareSampler&&) = default;

  const PatchSet& patches() const { return *patches_; }
  std::shared_ptr<const PatchSet> patch_ptr() const { return patches_; }

  const PerDeltaContext& context(double delta) {
    const auto key = std::bit_cast<std::uint64_t>(delta);
    if (last_ != nullptr && last_key_ == key) return last_->ctx;
    ++tick_;
    for (auto& e : cache_) {
      if (e.key == key) {
        e.used = tick_;
        last_ = &e;
        last_key_ = key;
        return e.ctx;
      }
    }
    Entry* slot = nullptr;
    if (cache_.size() < kCacheSize) {
      cache_.push_back({});
      slot = &cache_.back();
    } else {
      slot = &cache_[0];
      for (auto& e : cache_)
        if (e.used < slot->used) slot = &e;
    }
    slot->key = key;
    slot->used = tick_;
    slot->ctx = make_context(patches_->find(delta), delta);
    last_ = slot;
    last_key_ = key;
    return slot->ctx;
  }

  std::size_t cached_contexts() const { return cache_.size(); }

  // F_delta^{-1}(u) from the patches. u above the tail cap is clamped to it;
  // between the end of the tail patch and the cap the reference inverse is used.
  double inverse(double delta, double u) {
    const PerDeltaContext& ctx = context(delta);
    const double cap = ctx.group->spec().tail_u_cap;
    if (!(u > 0.0)) throw DomainError("inverse: u must be > 0");
    if (u > cap) u = cap;
    if (u > ctx.u_top) return chi2_isf_reference(delta, 1.0 - u);
    const RegionId r = classify(ctx, u);
    const double x = pullback(ctx, r, u);
    return std::max(clenshaw1d(ctx.reduced[static_cast<int>(r)], x), 0.0);
  }

  double sample_central(double delta, RngStream& rng) { return inverse(delta, rng.uniform()); }

  // The central part is drawn first, then the Poisson part.
  double sample_noncentral(const NoncentralParams& p, RngStream& rng) {
    p.validate();
    const double z = sample_central(p.delta, rng);
    return z + sample_noncentral_excess(p.lambda, rng);
  }

 private:
  struct Entry {
    std::uint64_t key = 0;
    std::uint64_t used = 0;
    PerDeltaContext ctx;
  };

  std::shared_ptr<const PatchSet> patches_;
  std::vector<Entry> cache_;
  Entry* last_ = nullptr;
  std::uint64_t last_key_ = 0;
  std::uint64_t tick_ = 0;
};

inline double central_chi2_inverse(ChiSquareSampler& s, double delta, double u) {
  return s.inverse(delta, u);
}

inline double sample_central(ChiSquareSampler& s, double delta, RngStream& rng) {
  return s.sample_central(delta, rng);
}

inline double sample_noncentral(ChiSquareSampler& s, const NoncentralParams& p, RngStream& rng) {
  return s.sample_noncentral(p, rng);
}

}  // namespace sqbessel
