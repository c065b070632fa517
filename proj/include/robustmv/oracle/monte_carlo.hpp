#pragma once

// Self-normalized importance estimate of E[m* V] with m* = exp(theta V)/E[exp(theta V)].

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "robustmv/robust.hpp"

namespace robustmv::oracle {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64: the i-th output of stream k is a pure function
/// of (seed, k, i), so chunks can be generated independently and in any order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct MCConfig {
  std::int64_t n_samples = 1000000;
  std::uint64_t seed = 20240101;
  bool antithetic = false;
};

struct MCEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double max_weight_share = 0.0;
};

inline constexpr std::int64_t kChunkSize = 1 << 16;

/// Weighted mean sum w V / sum w over draws X ~ N(mu, Sigma), with jackknife
/// standard error. Chunks are reduced in index order so the result is
/// bit-identical for a given seed however the chunks are produced.
inline MCEstimate mc_worst_case_value(const MarketModel& model, double theta,
                                      const Portfolio& a, const MCConfig& cfg,
                                      Variant variant = Variant::general) {
  if (cfg.n_samples < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  }
  const double g = risk_aversion(model, variant);
  if (!(theta * g * a.variance < 1.0)) {
    throw Error(ErrorCode::DomainViolation,
                "theta is outside the integrability domain of the tilt");
  }
  const auto n = model.size();
  const VectorXd& w = a.weights;
  const double am = w.dot(model.mu());
  // a'X = a'mu + (L'a)'z, so only the scalar projection is needed per draw.
  const VectorXd la = model.cholesky().matrixL().transpose() * w;

  const std::int64_t total = cfg.n_samples;
  std::vector<double> values(static_cast<std::size_t>(total));
  std::vector<double> draw(static_cast<std::size_t>(n));
  const std::int64_t chunks = (total + kChunkSize - 1) / kChunkSize;
  for (std::int64_t c = 0; c < chunks; ++c) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(c));
    std::normal_distribution<double> normal;
    const std::int64_t begin = c * kChunkSize;
    const std::int64_t end = std::min(total, begin + kChunkSize);
    double proj = 0.0;
    for (std::int64_t i = begin; i < end; ++i) {
      const bool mirror = cfg.antithetic && ((i - begin) % 2 == 1);
      if (mirror) {
        proj = -proj;
      } else {
        for (Eigen::Index j = 0; j < n; ++j) draw[j] = normal(rng);
        proj = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) proj += la[j] * draw[j];
      }
      const double dev = proj;  // a'(X - mu)
      double v = 0.5 * g * dev * dev;
      if (variant == Variant::general) v -= am + dev;
      if (variant == Variant::fixed_mean) v -= am;
      values[static_cast<std::size_t>(i)] = v;
    }
  }

  double top = -INFINITY;
  for (double v : values) top = std::max(top, theta * v);
  double sw = 0.0, swv = 0.0, wmax = 0.0;
  std::vector<double> weights(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double wi = std::exp(theta * values[i] - top);
    weights[i] = wi;
    sw += wi;
    swv += wi * values[i];
    wmax = std::max(wmax, wi);
  }
  MCEstimate out;
  out.max_weight_share = wmax / sw;
  if (out.max_weight_share > 0.999) {
    throw Error(ErrorCode::DegenerateWeights,
                "one draw carries " + std::to_string(out.max_weight_share) +
                    " of the total weight");
  }
  out.estimate = swv / sw;
  // leave-one-out ratios in closed form
  const double count = static_cast<double>(values.size());
  double mean_loo = 0.0;
  std::vector<double> loo(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    loo[i] = (swv - weights[i] * values[i]) / (sw - weights[i]);
    mean_loo += loo[i];
  }
  mean_loo /= count;
  double ss = 0.0;
  for (double r : loo) ss += (r - mean_loo) * (r - mean_loo);
  out.std_error = std::sqrt((count - 1.0) / count * ss);
  return out;
}

/// Plain sample mean of exp(theta V); compares against exp(log_mgf).
inline MCEstimate mc_mgf(const MarketModel& model, double theta,
                         const Portfolio& a, const MCConfig& cfg,
                         Variant variant = Variant::general) {
  const auto n = model.size();
  const double g = risk_aversion(model, variant);
  const double am = a.weights.dot(model.mu());
  const VectorXd la = model.cholesky().matrixL().transpose() * a.weights;
  double sum = 0.0, sum2 = 0.0;
  const std::int64_t chunks = (cfg.n_samples + kChunkSize - 1) / kChunkSize;
  for (std::int64_t c = 0; c < chunks; ++c) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(c));
    std::normal_distribution<double> normal;
    const std::int64_t end = std::min(cfg.n_samples, (c + 1) * kChunkSize);
    for (std::int64_t i = c * kChunkSize; i < end; ++i) {
      double dev = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) dev += la[j] * normal(rng);
      double v = 0.5 * g * dev * dev;
      if (variant == Variant::general) v -= am + dev;
      if (variant == Variant::fixed_mean) v -= am;
      const double e = std::exp(theta * v);
      sum += e;
      sum2 += e * e;
    }
  }
  const double count = static_cast<double>(cfg.n_samples);
  MCEstimate out;
  out.estimate = sum / count;
  out.std_error = std::sqrt(std::max(0.0, sum2 / count - out.estimate * out.estimate) / count);
  return out;
}

}  // namespace robustmv::oracle
