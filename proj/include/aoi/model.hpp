#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

// Core system model: a source sends status updates over two channels.
// Channel 1 is a fast, unreliable Gilbert-Elliot ON/OFF channel with one-slot
// service and one-slot-delayed state feedback; Channel 2 is a slow, reliable
// channel with a deterministic d-slot service time.  The controller observes
// (age, previous Channel-1 state, Channel-2 remaining time) and picks a
// channel whenever Channel 2 is free.

namespace aoi {

/// Problem instance: Channel-1 OFF/ON self-transition probabilities and the
/// Channel-2 service time in slots.
struct ChannelParams {
  double p;  ///< OFF self-transition probability of Channel 1, in (0,1)
  double q;  ///< ON self-transition probability of Channel 1, in (0,1)
  int d;     ///< Channel-2 transmission time in slots, >= 2
};

/// Validates and returns the parameter triple; throws std::invalid_argument
/// if 0<p<1, 0<q<1, d>=2 does not hold.
ChannelParams make_params(double p, double q, int d);

/// State of the controlled Markov chain.
struct SystemState {
  std::int64_t delta;  ///< age of information, >= 1
  int l1;              ///< Channel-1 state in the previous slot: 0 OFF, 1 ON
  int l2;              ///< Channel-2 remaining busy time, in [0, d-1]

  friend auto operator<=>(const SystemState&, const SystemState&) = default;
};

enum class Action { Ch1, Ch2, None };

const char* action_name(Action u);

/// Rows of the k-step Channel-1 transition matrix P^k, where
/// P = [[q, 1-q], [1-p, p]] over states (ON, OFF).
/// [a_k, b_k]  = [0,1] P^k : distribution after k steps starting OFF.
/// [ap_k, bp_k] = [1,0] P^k : distribution after k steps starting ON.
struct MatrixPowers {
  int k;
  double a;   ///< P(ON after k | start OFF)
  double b;   ///< P(OFF after k | start OFF)
  double ap;  ///< P(ON after k | start ON)
  double bp;  ///< P(OFF after k | start ON)
};

/// Computes the k-step rows by iterated multiplication (exact for k=0,1).
MatrixPowers matrix_powers(const ChannelParams& params, int k);

/// Parameter regions that determine the shape of the optimal policy.
enum class Region { B1, B2, B3, B4 };

const char* region_name(Region r);

/// Region classification along with the three boundary functions:
///   F = 1/(1-p) - d, G = 1 - d*q, H = (1-q)/(1-p) - d + 1.
/// Membership: B1 = {F<=0, H<=0}, B2 = {F>0, G<=0}, B3 = {F>0, G>0},
/// B4 = {F<=0, H>0}.  Ties resolved exactly by the <= / > signs above.
struct RegionInfo {
  Region region;
  double F;
  double G;
  double H;
  bool near_boundary;  ///< diagnostic: min(|F|,|G|,|H|) < 1e-9
};

RegionInfo classify_region(const ChannelParams& params);

/// Discounted-problem analogue of classify_region, with
///   F(alpha) = 1/(1-alpha*p) - m,
///   G(alpha) = 1 + alpha*(1-q)*m - m,
///   H(alpha) = 1 + alpha*(1-q)/(1-alpha*p) - m,
/// where m = (1-alpha^d)/(1-alpha).  Geometric sums are evaluated in closed
/// form so the alpha->1 limit is well conditioned.
RegionInfo classify_region_discounted(const ChannelParams& params, double alpha);

/// One branch of the next-state distribution.
struct Outcome {
  SystemState next;
  double prob;
};

/// Exact one-step transition kernel.  Ages are clamped at age_cap
/// (delta+1 -> min(delta+1, age_cap)); age_cap must be >= d+1.
///
/// Admissibility: None requires l2 > 0 under the zero-wait policy class used
/// by all solvers.  Passing allow_idle_when_free = true additionally accepts
/// None at l2 = 0 (the age then simply increases), which exists only to test
/// that idling is never beneficial.
///
/// Throws std::invalid_argument for out-of-bounds states and
/// std::domain_error for inadmissible actions.
std::vector<Outcome> transition(const SystemState& s, Action u,
                                const ChannelParams& params,
                                std::int64_t age_cap,
                                bool allow_idle_when_free = false);

}  // namespace aoi
