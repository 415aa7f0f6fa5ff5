#include "aoi/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {

ChannelParams make_params(double p, double q, int d) {
  if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument(
        "channel probabilities must satisfy 0 < p < 1 and 0 < q < 1 (got p=" +
        std::to_string(p) + ", q=" + std::to_string(q) + ")");
  }
  if (d < 2) {
    throw std::invalid_argument("Channel-2 service time d must be >= 2 (got " +
                                std::to_string(d) + ")");
  }
  return ChannelParams{p, q, d};
}

const char* action_name(Action u) {
  switch (u) {
    case Action::Ch1: return "Ch1";
    case Action::Ch2: return "Ch2";
    case Action::None: return "None";
  }
  return "?";
}

const char* region_name(Region r) {
  switch (r) {
    case Region::B1: return "B1";
    case Region::B2: return "B2";
    case Region::B3: return "B3";
    case Region::B4: return "B4";
  }
  return "?";
}

MatrixPowers matrix_powers(const ChannelParams& params, int k) {
  if (k < 0) throw std::invalid_argument("matrix power k must be >= 0");
  const double p = params.p, q = params.q;
  // Row vectors [on, off] propagated through P = [[q,1-q],[1-p,p]].
  double a = 0.0, b = 1.0;    // start OFF
  double ap = 1.0, bp = 0.0;  // start ON
  for (int i = 0; i < k; ++i) {
    const double na = a * q + b * (1.0 - p);
    const double nb = a * (1.0 - q) + b * p;
    const double nap = ap * q + bp * (1.0 - p);
    const double nbp = ap * (1.0 - q) + bp * p;
    a = na; b = nb; ap = nap; bp = nbp;
  }
  return MatrixPowers{k, a, b, ap, bp};
}

namespace {

Region pick_region(double F, double G, double H) {
  if (F <= 0.0) return (H <= 0.0) ? Region::B1 : Region::B4;
  return (G <= 0.0) ? Region::B2 : Region::B3;
}

}  // namespace

RegionInfo classify_region(const ChannelParams& params) {
  const double p = params.p, q = params.q;
  const double d = static_cast<double>(params.d);
  const double F = 1.0 / (1.0 - p) - d;
  const double G = 1.0 - d * q;
  const double H = (1.0 - q) / (1.0 - p) - d + 1.0;
  const double closest =
      std::min(std::fabs(F), std::min(std::fabs(G), std::fabs(H)));
  return RegionInfo{pick_region(F, G, H), F, G, H, closest < 1e-9};
}

RegionInfo classify_region_discounted(const ChannelParams& params,
                                      double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("discount factor alpha must lie in (0,1)");
  }
  const double p = params.p, q = params.q;
  const double d = static_cast<double>(params.d);
  // m = sum_{i=0}^{d-1} alpha^i, evaluated in closed form.
  const double m = (1.0 - std::pow(alpha, d)) / (1.0 - alpha);
  const double F = 1.0 / (1.0 - alpha * p) - m;
  const double G = 1.0 + alpha * (1.0 - q) * m - m;
  const double H = 1.0 + alpha * (1.0 - q) / (1.0 - alpha * p) - m;
  const double closest =
      std::min(std::fabs(F), std::min(std::fabs(G), std::fabs(H)));
  return RegionInfo{pick_region(F, G, H), F, G, H, closest < 1e-9};
}

std::vector<Outcome> transition(const SystemState& s, Action u,
                                const ChannelParams& params,
                                std::int64_t age_cap,
                                bool allow_idle_when_free) {
  const double p = params.p, q = params.q;
  const int d = params.d;
  if (age_cap < d + 1) {
    throw std::invalid_argument("age_cap must be >= d+1");
  }
  if (s.delta < 1 || (s.l1 != 0 && s.l1 != 1) || s.l2 < 0 || s.l2 >= d) {
    throw std::invalid_argument("state outside bounds");
  }
  if (s.l2 > 0 && u != Action::None) {
    throw std::domain_error("Channel 2 is busy: only None is admissible");
  }
  if (s.l2 == 0 && u == Action::None && !allow_idle_when_free) {
    throw std::domain_error(
        "idling while both channels are free is not admissible");
  }

  const std::int64_t up = std::min(s.delta + 1, age_cap);
  // Channel-1 marginal for the coming slot, conditioned on l1.
  const double on = (s.l1 == 1) ? q : (1.0 - p);

  std::vector<Outcome> out;
  out.reserve(2);
  switch (u) {
    case Action::Ch1:
      // Transmission succeeds iff Channel 1 is ON this slot.
      out.push_back({SystemState{1, 1, 0}, on});
      out.push_back({SystemState{up, 0, 0}, 1.0 - on});
      break;
    case Action::Ch2:
      out.push_back({SystemState{up, 1, d - 1}, on});
      out.push_back({SystemState{up, 0, d - 1}, 1.0 - on});
      break;
    case Action::None:
      if (s.l2 == 1) {
        // Channel-2 delivery: the update sampled d slots ago arrives.
        out.push_back({SystemState{d, 1, 0}, on});
        out.push_back({SystemState{d, 0, 0}, 1.0 - on});
      } else {
        const int nl2 = (s.l2 == 0) ? 0 : s.l2 - 1;
        out.push_back({SystemState{up, 1, nl2}, on});
        out.push_back({SystemState{up, 0, nl2}, 1.0 - on});
      }
      break;
  }
  return out;
}

}  // namespace aoi
