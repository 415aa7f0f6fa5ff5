#pragma once

// Shared helpers for the test binaries: explicit policy constructions used
// as independent oracles for the closed-form solver.

#include <aoi/chain.hpp>
#include <aoi/model.hpp>
#include <aoi/policy.hpp>

#include <cstdint>

namespace aoi_test {

using namespace aoi;

// The chain family behind f_i(s)/g_i(s), written out action by action
// rather than via ThresholdPolicy, so the two constructions stay
// independent.  Row l1=0 switches from Ch1 to Ch2 at age s; the recurrent
// l1=1 states (ages 1 and d) play per family:
//   i=1, i=2: Ch1 at both;  i=3: Ch1 at age 1, Ch2 at age d;  i=4: Ch2 at both.
inline PolicyFn family_policy(int i, std::int64_t s, int d) {
  return [i, s, d](const SystemState& st) {
    if (st.l2 > 0) return Action::None;
    if (st.l1 == 0) return st.delta < s ? Action::Ch1 : Action::Ch2;
    switch (i) {
      case 1:
      case 2:
        return Action::Ch1;
      case 3:
        return st.delta < d ? Action::Ch1 : Action::Ch2;
      default:
        return Action::Ch2;
    }
  };
}

// Average age of the family-(i, s) chain, multiplying out the f/g ratio.
inline double family_chain_age(int i, std::int64_t s,
                               const ChannelParams& params,
                               std::int64_t age_cap = 0) {
  if (age_cap == 0) age_cap = 4 * (s + 2 * params.d) + 64;
  auto chain = build_chain(family_policy(i, s, params.d), params, age_cap);
  return average_age(stationary_distribution(chain));
}

// Single-switch chains behind the two constant candidates.
inline PolicyFn f0_policy(int d) {
  // Slow channel everywhere except one fast-channel try at (d, ON, free).
  return [d](const SystemState& st) {
    if (st.l2 > 0) return Action::None;
    return (st.l1 == 1 && st.delta == d) ? Action::Ch1 : Action::Ch2;
  };
}

inline PolicyFn f0p_policy() {
  // Fast channel while it was last seen OFF, slow channel otherwise.
  return [](const SystemState& st) {
    if (st.l2 > 0) return Action::None;
    return st.l1 == 0 ? Action::Ch1 : Action::Ch2;
  };
}

}  // namespace aoi_test
