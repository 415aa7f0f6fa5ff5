#include "aoi/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "aoi/solver.hpp"

namespace aoi {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k) {
  // splitmix64 output step on state seed + k*golden.
  std::uint64_t z = seed + k * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::int64_t default_warmup(const ChannelParams& params) {
  const double scale = std::max(1.0 / (1.0 - params.p),
                                static_cast<double>(params.d));
  // Round to the nearest slot: 1/(1-p) often lands a few ulps under an
  // integer and truncation would shift every measurement window by one.
  return std::llround(10.0 * params.d * scale);
}

namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double run_replication(const PolicySpec& spec, const ChannelParams& params,
                       const CostFunction& cost, std::int64_t horizon,
                       std::int64_t warmup, std::uint64_t seed, int rep) {
  const double p = params.p, q = params.q;
  const int d = params.d;
  std::mt19937_64 chan(stream_seed(seed, 2 * static_cast<std::uint64_t>(rep)));
  std::mt19937_64 aux(stream_seed(seed, 2 * static_cast<std::uint64_t>(rep) + 1));

  // Start the exogenous channel from its stationary law.
  const double on_stat = (1.0 - p) / (2.0 - p - q);
  int l1 = uniform01(chan) < on_stat ? 1 : 0;
  std::int64_t delta = 1;
  int l2 = 0;

  double acc = 0.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (t >= warmup) acc += cost.at(delta);

    Action u = Action::None;
    if (l2 == 0) {
      if (spec.random) {
        u = uniform01(aux) < 0.5 ? Action::Ch1 : Action::Ch2;
      } else {
        u = spec.fn(SystemState{delta, l1, 0});
        if (u == Action::None) {
          throw std::domain_error("policy idled while Channel 2 was free");
        }
      }
    }

    // The channel evolves once per slot, independent of the action, so every
    // policy sees the same ON/OFF path under a shared stream.
    const double on = (l1 == 1) ? q : (1.0 - p);
    const int c = uniform01(chan) < on ? 1 : 0;

    switch (u) {
      case Action::Ch1:
        if (c == 1) {
          delta = 1;
        } else {
          delta += 1;
        }
        l2 = 0;
        break;
      case Action::Ch2:
        delta += 1;
        l2 = d - 1;
        break;
      case Action::None:
        if (l2 == 1) {
          delta = d;  // delivery of the update sampled d slots ago
          l2 = 0;
        } else {
          delta += 1;
          l2 -= 1;
        }
        break;
    }
    l1 = c;
  }
  return acc / static_cast<double>(horizon - warmup);
}

}  // namespace

SimResult simulate(const PolicySpec& spec, const ChannelParams& params,
                   const CostFunction& cost, const SimConfig& config) {
  const std::int64_t warmup =
      config.warmup >= 0 ? config.warmup : default_warmup(params);
  if (config.replications < 1) {
    throw std::invalid_argument("replications must be >= 1");
  }
  if (!(config.horizon > warmup)) {
    throw std::invalid_argument("horizon must exceed the warmup period");
  }

  SimResult res;
  res.policy_name = spec.name;
  res.per_replication.reserve(config.replications);
  for (int r = 0; r < config.replications; ++r) {
    res.per_replication.push_back(run_replication(
        spec, params, cost, config.horizon, warmup, config.seed, r));
  }
  double sum = 0.0;
  for (double v : res.per_replication) sum += v;
  res.mean = sum / config.replications;
  if (config.replications > 1) {
    double ss = 0.0;
    for (double v : res.per_replication) {
      ss += (v - res.mean) * (v - res.mean);
    }
    res.std_error = std::sqrt(ss / (config.replications - 1)) /
                    std::sqrt(static_cast<double>(config.replications));
  }
  return res;
}

PolicySpec age_optimal_spec(const ChannelParams& params) {
  return {"Age-optimal", solve(params).policy.fn(), false};
}

PolicySpec mmwave_only_spec() { return {"mmWave-only", always_ch1_policy(), false}; }

PolicySpec sub6ghz_only_spec() {
  return {"sub-6GHz-only", always_ch2_policy(), false};
}

PolicySpec random_choice_spec() { return {"Random", nullptr, true}; }

std::vector<SimResult> compare_policies(const ChannelParams& params,
                                        const CostFunction& cost,
                                        const SimConfig& config,
                                        const PolicyFn* age_optimal) {
  PolicySpec best = age_optimal ? PolicySpec{"Age-optimal", *age_optimal, false}
                                : age_optimal_spec(params);
  std::vector<SimResult> out;
  out.push_back(simulate(best, params, cost, config));
  out.push_back(simulate(mmwave_only_spec(), params, cost, config));
  out.push_back(simulate(sub6ghz_only_spec(), params, cost, config));
  out.push_back(simulate(random_choice_spec(), params, cost, config));
  return out;
}

}  // namespace aoi
