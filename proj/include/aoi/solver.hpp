#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/policy.hpp"

namespace aoi {

/// Thrown when a bisection bracket does not enclose a sign change.
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form candidate values for constant policies and the two
/// single-switch chains that appear in the optimum:
///   always_ch1    — always transmit on Channel 1,
///   always_ch2    — always transmit on Channel 2, equals (3d-1)/2,
///   f0_over_g0    — Channel 2 whenever it is free except at (d,1,0),
///   f0p_over_g0p  — Channel 1 at l1=0, Channel 2 at l1=1.
/// Each equals the exact average age of the corresponding stationary chain.
struct CandidateConstants {
  double always_ch1;
  double always_ch2;
  double f0_over_g0;
  double f0p_over_g0p;
};

CandidateConstants candidate_constants(const ChannelParams& params);

/// Evaluation context for one of the four threshold-chain families.  Family i
/// fixes the behaviour at the recurrent l1 = 1 states and leaves the l1 = 0
/// switch point s free:
///   i=1: switch at s > d, Ch1 at both (1,1,0) and (d,1,0)
///   i=2: switch at s <= d, Ch1 at both (1,1,0) and (d,1,0)
///   i=3: switch at s > d, Ch1 at (1,1,0), Ch2 at (d,1,0)
///   i=4: switch at s > d, Ch2 at both (1,1,0) and (d,1,0)
/// f(s)/g(s) is the exact average age of the induced chain; the domain N(i)
/// is {s > d} for i in {1,3,4} and {1..d} for i = 2.
class CandidateFG {
 public:
  CandidateFG(int i, const ChannelParams& params);

  int family() const { return i_; }
  bool in_domain(std::int64_t s) const;

  /// (f_i(s), g_i(s)); throws std::domain_error when s is outside N(i).
  std::pair<double, double> eval(std::int64_t s) const;

  /// Closed-form evaluation without the domain guard.  The expressions are
  /// algebraically valid for any s >= 2 (s >= 1 for i != 2), which the
  /// finite-difference constant extraction relies on.
  std::pair<double, double> eval_raw(std::int64_t s) const;

 private:
  int i_;
  ChannelParams params_;
  MatrixPowers pd_;  // rows of P^d
};

std::pair<double, double> fg_eval(int i, std::int64_t s,
                                  const ChannelParams& params);

/// Constants of the finite-difference identities
///   (f_i(s+1) - f_i(s)) / p^(s-1) = (1 - d(1-p)) s + l_i,
///   (g_i(s+1) - g_i(s)) / p^(s-1) = o_i,
/// recovered numerically from the closed forms and cross-checked at three
/// separate s values.  Requires 1 - d(1-p) > 0 (regions B2/B3); throws
/// std::domain_error otherwise and std::runtime_error if the identity does
/// not hold to 1e-8 (which would signal a transcription bug in f_i/g_i).
std::pair<double, double> lo_eval(int i, const ChannelParams& params);

/// Minimizer of f_i(s) - beta*g_i(s) over N(i):
///   i in {1,3,4}: max(ceil(-k_i/(1-d(1-p))), d+1)
///   i = 2:        clamp(ceil(-k_2/(1-d(1-p))), 1, d)
/// with k_i = l_i - beta*o_i.  The raw ceil saturates at 1e7 to keep the
/// result finite when 1-d(1-p) is at round-off scale.
std::int64_t s_threshold(int i, double beta, const ChannelParams& params);

/// h_i(beta) = min over N(i) of f_i(s) - beta*g_i(s); continuous, concave and
/// strictly decreasing with h_i(0) > 0.
double h_eval(int i, double beta, const ChannelParams& params);

/// Root of h_i on the bracket [0, 3d] by bisection; equals
/// min over N(i) of f_i(s)/g_i(s).  Throws BracketError when the bracket
/// endpoints do not straddle the root.
double bisect_beta(int i, const ChannelParams& params, double eps = 1e-9);

/// Optimal policy and optimal average age.
struct SolveResult {
  Region region;
  double delta_opt;
  ThresholdPolicy policy;
  /// Region-applicable candidates in fixed order
  /// (beta1..beta4, f0/g0, f0'/g0', always_ch1, always_ch2).
  std::vector<std::pair<std::string, double>> candidates;
  /// Every candidate attaining the minimum (1e-9 tie window), fixed order.
  std::vector<std::string> argmin_candidates;
};

/// Region-dispatched exact solution:
///   B1: always Ch1.
///   B2: min{beta1, beta2, f0/g0, (3d-1)/2}, switch rule non-decreasing at
///       l1=0 and non-increasing at l1=1.
///   B3: min{beta1..beta4, (3d-1)/2}, both rules non-decreasing.
///   B4: min{always_ch1, f0'/g0'}, always Ch1 at l1=0.
SolveResult solve(const ChannelParams& params, double eps = 1e-9);

/// Specialization for an i.i.d. Channel 1 (p + q = 1): always Ch1 when
/// 1-p >= 1/d, otherwise a single non-decreasing threshold shared by both
/// channel states.  Throws std::invalid_argument when |p+q-1| > 1e-12.
SolveResult solve_iid(const ChannelParams& params, double eps = 1e-9);

}  // namespace aoi
