#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/cost.hpp"
#include "aoi/model.hpp"
#include "aoi/policy.hpp"

namespace aoi {

/// Thrown when an iterative solver exhausts its sweep budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Converged value / relative-value iteration output on the truncated state
/// space delta in [1, age_cap], l1 in {0,1}, l2 in [0, d-1].  Ages clamp at
/// the cap (delta+1 -> min(delta+1, age_cap)).
struct ValueSolution {
  bool average = false;  ///< true: average-cost (gain/bias); false: discounted
  double alpha = 0.0;    ///< discount factor when !average
  int d = 0;
  std::int64_t age_cap = 0;
  bool unrestricted = false;  ///< idling allowed while Channel 2 is free
  double gain = 0.0;          ///< average cost per slot (average mode only)
  long iterations = 0;
  double residual = 0.0;  ///< final sup-difference (discounted) or span

  std::vector<double> J;       ///< value (discounted) or bias, anchored at (1,1,0)
  std::vector<double> Q;       ///< state-action values; NaN where inadmissible
  std::vector<Action> policy;  ///< greedy action; None wherever l2 > 0

  std::size_t idx(std::int64_t delta, int l1, int l2) const {
    return (static_cast<std::size_t>(delta) * 2 + l1) * d + l2;
  }
  double Jat(std::int64_t delta, int l1, int l2) const {
    return J[idx(delta, l1, l2)];
  }
  double Qat(std::int64_t delta, int l1, int l2, Action u) const {
    return Q[idx(delta, l1, l2) * 3 + static_cast<int>(u)];
  }
  Action policy_at(std::int64_t delta, int l1, int l2) const {
    return policy[idx(delta, l1, l2)];
  }
};

struct IterationOptions {
  long max_iters = 1'000'000;
  bool unrestricted = false;  ///< allow None at l2 = 0 (idle while free)
};

/// Discounted value iteration: J_{n+1}(s) = min_u [cost(delta) + alpha E J_n],
/// stopping when the sup-norm successive difference drops below
/// tol*(1-alpha).  Throws ConvergenceError past the sweep budget.
ValueSolution value_iteration_discounted(const ChannelParams& params,
                                         double alpha,
                                         const CostFunction& cost,
                                         std::int64_t age_cap, double tol,
                                         const IterationOptions& opts = {});

/// Average-cost relative value iteration with damping factor 1/2 and the
/// bias anchored at (1,1,0); stops when the span of (TJ - J) drops below tol
/// and reports gain = (max+min)/2 of that difference.  When fixed_policy is
/// given the minimization is replaced by that policy's action (policy
/// evaluation).
ValueSolution relative_value_iteration(const ChannelParams& params,
                                       const CostFunction& cost,
                                       std::int64_t age_cap, double tol,
                                       const IterationOptions& opts = {},
                                       const PolicyFn* fixed_policy = nullptr);

/// Shape of the greedy policy restricted to one Channel-1 state.
struct RowStructure {
  int switches = 0;      ///< action changes across the scanned age range
  bool monotone = true;  ///< at most one action change
  bool constant = true;
  Action constant_action = Action::Ch1;  ///< valid when constant
  /// Direction compatibility with the expected region rule; a constant row is
  /// compatible with either direction.
  bool compatible = true;
  /// First age taking the expected at/above-threshold action (Ch2 for a
  /// non-decreasing rule, Ch1 for a non-increasing one); kNoSwitch if never.
  std::int64_t lambda = kNoSwitch;
};

/// Monotone-threshold check of a converged greedy policy at l2 = 0, ages
/// scanned up to 95% of the cap.  Directions are compared against the region
/// rule map (B1: both non-increasing; B2: non-decreasing/non-increasing;
/// B3: both non-decreasing; B4: non-increasing/non-decreasing).  For
/// discounted solutions the discounted region drives the expectation; both
/// labels are reported.
struct StructureReport {
  RowStructure row0, row1;
  Region region_static;
  Region region_used;  ///< discounted label for discounted solutions
  bool directions_match = false;
  std::int64_t scan_hi = 0;
};

StructureReport check_threshold_structure(const ValueSolution& solution,
                                          const ChannelParams& params);

/// Q-increment diagnostics on a converged discounted solution with linear
/// cost.  L(delta,l1,u) = Q(delta,l1,0,u) - Q(delta-1,l1,0,u) and
/// m = sum_{i<d} alpha^i.  The Ch2 increment equals m exactly; the Ch1
/// increment sits below m on B1(alpha)/B4(alpha) and above it on
/// B2(alpha)/B3(alpha) (for l1 = 1 only beyond a finite crossover age).
struct SupermodReport {
  double m = 0.0;
  Region region_alpha;
  std::int64_t scan_hi = 0;
  double max_abs_dev_ch2 = 0.0;  ///< max |L(delta,l1,2) - m|
  long violations_l1_0 = 0;      ///< ages where sign(L(delta,0,1)-m) is wrong
  double worst_margin_l1_0 = 0.0;
  /// Smallest age from which sign(L(delta,1,1)-m) stays correct through the
  /// scan range; kNoSwitch when it never settles.
  std::int64_t crossover_l1_1 = kNoSwitch;
  /// max over delta of L(delta,1,1) - L(delta,0,1).
  double max_row1_minus_row0 = 0.0;
};

SupermodReport check_supermodularity(const ValueSolution& solution,
                                     const ChannelParams& params,
                                     double alpha);

/// On a solution computed with idling allowed (unrestricted action set):
/// max over l2 = 0 states of min(Q(s,Ch1), Q(s,Ch2)) - Q(s,None).
/// A positive value means idling was strictly better somewhere, i.e. the
/// zero-wait restriction would have been lossy.
double max_idle_advantage(const ValueSolution& solution);

/// Wraps the converged greedy table as a stationary policy; ages beyond the
/// cap reuse the action at the cap.
PolicyFn greedy_policy_fn(const ValueSolution& solution);

}  // namespace aoi
