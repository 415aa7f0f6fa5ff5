#include "aoi/policy.hpp"

namespace aoi {

const char* direction_name(Direction dir) {
  return dir == Direction::NonDecreasing ? "nondecreasing" : "nonincreasing";
}

std::string LambdaSet::str() const {
  auto num = [](std::int64_t v) {
    return v == kNoSwitch ? std::string("inf") : std::to_string(v);
  };
  if (unbounded) return "{" + num(lo) + "..inf}";
  if (lo == hi) return "{" + num(lo) + "}";
  return "{" + num(lo) + ".." + num(hi) + "}";
}

Action threshold_action(Direction dir, std::int64_t lambda,
                        std::int64_t delta) {
  const bool below = delta < lambda;
  if (dir == Direction::NonDecreasing) return below ? Action::Ch1 : Action::Ch2;
  return below ? Action::Ch2 : Action::Ch1;
}

Action ThresholdPolicy::action(const SystemState& s) const {
  if (s.l2 > 0) return Action::None;
  return s.l1 == 0 ? threshold_action(dir0, lambda0, s.delta)
                   : threshold_action(dir1, lambda1, s.delta);
}

PolicyFn ThresholdPolicy::fn() const {
  return [pol = *this](const SystemState& s) { return pol.action(s); };
}

PolicyFn always_ch1_policy() {
  return [](const SystemState& s) {
    return s.l2 == 0 ? Action::Ch1 : Action::None;
  };
}

PolicyFn always_ch2_policy() {
  return [](const SystemState& s) {
    return s.l2 == 0 ? Action::Ch2 : Action::None;
  };
}

}  // namespace aoi
