#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "aoi/model.hpp"

namespace aoi {

/// Any stationary policy: must return Ch1 or Ch2 when l2 == 0 and None
/// otherwise.
using PolicyFn = std::function<Action(const SystemState&)>;

/// Monotone direction of a threshold rule in the age.
/// NonDecreasing: Ch1 below the threshold, Ch2 at and above it.
/// NonIncreasing: Ch2 below the threshold, Ch1 at and above it.
enum class Direction { NonDecreasing, NonIncreasing };

const char* direction_name(Direction dir);

/// Threshold sentinel meaning "the switch never happens": the below-threshold
/// action applies at every age.  Printed as "inf".
inline constexpr std::int64_t kNoSwitch =
    std::numeric_limits<std::int64_t>::max();

/// An integer set of admissible thresholds, either a finite range {lo..hi}
/// or an upward-unbounded tail {lo, lo+1, ...}.  The canonical member is lo.
struct LambdaSet {
  std::int64_t lo = 1;
  std::int64_t hi = 1;
  bool unbounded = false;

  static LambdaSet single(std::int64_t v) { return {v, v, false}; }
  static LambdaSet range(std::int64_t lo, std::int64_t hi) {
    return {lo, hi, false};
  }
  static LambdaSet tail(std::int64_t lo) { return {lo, lo, true}; }

  bool contains(std::int64_t v) const {
    return v >= lo && (unbounded || v <= hi);
  }
  /// Deterministic text form: "{a}", "{a..b}", "{a..inf}", or "{inf}".
  std::string str() const;
};

/// Age-threshold scheduling rule, one direction/threshold pair per observed
/// Channel-1 state.  Only decides at states with l2 == 0; elsewhere the
/// action is None (Channel 2 busy).
struct ThresholdPolicy {
  Direction dir0 = Direction::NonIncreasing;  ///< rule at (delta, 0, 0)
  std::int64_t lambda0 = 1;
  Direction dir1 = Direction::NonIncreasing;  ///< rule at (delta, 1, 0)
  std::int64_t lambda1 = 1;
  /// All thresholds for the l1 = 1 rule that induce the same long-run
  /// behaviour; lambda1 is its smallest member.
  LambdaSet lambda1_set = LambdaSet::single(1);

  Action action(const SystemState& s) const;
  PolicyFn fn() const;
};

/// Action of a single threshold rule at age delta.
Action threshold_action(Direction dir, std::int64_t lambda,
                        std::int64_t delta);

PolicyFn always_ch1_policy();
PolicyFn always_ch2_policy();

}  // namespace aoi
