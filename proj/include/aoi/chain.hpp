#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aoi/cost.hpp"
#include "aoi/model.hpp"
#include "aoi/policy.hpp"

namespace aoi {

/// Sparse policy-induced Markov chain over reachable states.
struct MarkovChain {
  std::vector<SystemState> states;  ///< sorted; row i belongs to states[i]
  /// rows[i] = outgoing transitions of states[i] as (state index, probability).
  std::vector<std::vector<std::pair<int, double>>> rows;
  bool truncated = false;  ///< true if some age was clamped at the cap
  std::int64_t age_cap = 0;
};

/// Stationary distribution and its average age.
struct ChainSolution {
  std::vector<SystemState> states;
  std::vector<double> pi;
  double average_age = 0.0;
  double average_cost = 0.0;  ///< filled with the linear cost by default
};

/// Builds the chain induced by a stationary policy, exploring from the three
/// post-delivery states (1,1,0), (d,0,0), (d,1,0) until closed under
/// transitions.  Ages clamp at age_cap (flagged in the result); for policies
/// whose recurrent ages are unbounded this is the intended truncation.
MarkovChain build_chain(const PolicyFn& policy, const ChannelParams& params,
                        std::int64_t age_cap);

/// ThresholdPolicy overload: when the rule at l1 = 0 eventually plays Ch2
/// (so the recurrent ages are provably bounded), verifies the cap is large
/// enough to contain the recurrent class and throws std::invalid_argument
/// otherwise.  Unbounded-age policies fall back to plain truncation.
MarkovChain build_chain(const ThresholdPolicy& policy,
                        const ChannelParams& params, std::int64_t age_cap);

/// Solves pi = pi P with sum(pi) = 1.  Small chains use a dense linear solve
/// (one balance equation replaced by the normalization); larger chains use
/// damped power iteration on the lazy chain (I+P)/2, which shares the same
/// stationary distribution but is aperiodic.  Throws std::runtime_error if
/// the residual check fails (multiple recurrent classes / nonconvergence).
ChainSolution stationary_distribution(const MarkovChain& chain);

double average_age(const ChainSolution& solution);
double average_cost(const ChainSolution& solution, const CostFunction& cost);

}  // namespace aoi
