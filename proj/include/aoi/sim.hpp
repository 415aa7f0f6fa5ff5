#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoi/cost.hpp"
#include "aoi/model.hpp"
#include "aoi/policy.hpp"

namespace aoi {

/// Monte Carlo settings.  warmup < 0 selects the default
/// 10 * d * max(1/(1-p), d) slots, which exceeds the mixing scale of every
/// policy chain on the supported parameter range.
struct SimConfig {
  std::int64_t horizon = 1'000'000;
  int replications = 20;
  std::uint64_t seed = 1;
  std::int64_t warmup = -1;
};

struct SimResult {
  std::string policy_name;
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> per_replication;
};

/// Reproducibility contract.  Stream seeds are derived from (seed, k) with
/// splitmix64 (state = seed + k * 0x9E3779B97F4A7C15, one output step);
/// replication r uses k = 2r for the channel stream and k = 2r+1 for policy
/// coin flips.  Each stream feeds a std::mt19937_64, and uniforms are
/// produced as (x >> 11) * 2^-53.  Identical (seed, config) therefore gives
/// bit-identical results, and all policies see the same Channel-1 sample
/// path within a replication (common random numbers).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k);

std::int64_t default_warmup(const ChannelParams& params);

/// What to simulate: a deterministic stationary policy, or the fair-coin
/// channel chooser (which consumes its own RNG stream).
struct PolicySpec {
  std::string name;
  PolicyFn fn;
  bool random = false;
};

PolicySpec age_optimal_spec(const ChannelParams& params);
PolicySpec mmwave_only_spec();
PolicySpec sub6ghz_only_spec();
PolicySpec random_choice_spec();

/// Simulates the untruncated system: per slot the Channel-1 state evolves
/// exogenously, the policy picks a channel whenever Channel 2 is free, and
/// the age drops to 1 on a Channel-1 success, to d on a Channel-2 delivery,
/// and grows by 1 otherwise.  The mean is the per-replication average of
/// cost(age) over the post-warmup slots.
SimResult simulate(const PolicySpec& spec, const ChannelParams& params,
                   const CostFunction& cost, const SimConfig& config);

/// The four standard contenders under common random numbers:
/// Age-optimal, mmWave-only (always Channel 1), sub-6GHz-only (always
/// Channel 2), and Random.  age_optimal supplies the first policy; passing
/// nullptr uses the exact solver's optimal policy (linear cost).
std::vector<SimResult> compare_policies(const ChannelParams& params,
                                        const CostFunction& cost,
                                        const SimConfig& config,
                                        const PolicyFn* age_optimal = nullptr);

}  // namespace aoi
