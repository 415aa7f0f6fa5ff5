#include "aoi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace aoi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Sweep {
  const ChannelParams& params;
  std::int64_t cap;
  int d;
  const std::vector<double>& cost;  // cost[delta]
  double disc;                      // alpha (discounted) or 1 (average)
  bool unrestricted;
  const PolicyFn* fixed_policy;

  // One synchronous Bellman sweep: out = T(in).
  void apply(const std::vector<double>& J, std::vector<double>& out) const {
    const double p = params.p, q = params.q;
    const auto at = [&](std::int64_t delta, int l1, int l2) {
      return J[(static_cast<std::size_t>(delta) * 2 + l1) * d + l2];
    };
    for (std::int64_t delta = 1; delta <= cap; ++delta) {
      const std::int64_t up = std::min(delta + 1, cap);
      const double c = cost[delta];
      for (int l1 = 0; l1 < 2; ++l1) {
        const double on = (l1 == 1) ? q : (1.0 - p);
        const std::size_t base = (static_cast<std::size_t>(delta) * 2 + l1) *
                                 static_cast<std::size_t>(d);
        // l2 = 0: choose a channel (or idle when unrestricted).
        {
          const double q1 = c + disc * (on * at(1, 1, 0) + (1.0 - on) * at(up, 0, 0));
          const double q2 =
              c + disc * (on * at(up, 1, d - 1) + (1.0 - on) * at(up, 0, d - 1));
          double v;
          if (fixed_policy) {
            const Action u = (*fixed_policy)(SystemState{delta, l1, 0});
            v = (u == Action::Ch1) ? q1 : q2;
          } else {
            v = std::min(q1, q2);
            if (unrestricted) {
              const double qn =
                  c + disc * (on * at(up, 1, 0) + (1.0 - on) * at(up, 0, 0));
              v = std::min(v, qn);
            }
          }
          out[base] = v;
        }
        // l2 = 1: delivery next slot, age resets to d.
        out[base + 1] =
            c + disc * (on * at(d, 1, 0) + (1.0 - on) * at(d, 0, 0));
        // l2 >= 2: Channel 2 still busy.
        for (int l2 = 2; l2 < d; ++l2) {
          out[base + l2] = c + disc * (on * at(up, 1, l2 - 1) +
                                       (1.0 - on) * at(up, 0, l2 - 1));
        }
      }
    }
  }
};

std::vector<double> tabulate_cost(const CostFunction& cost, std::int64_t cap) {
  std::vector<double> c(cap + 1, 0.0);
  for (std::int64_t delta = 1; delta <= cap; ++delta) c[delta] = cost.at(delta);
  return c;
}

// Final Q table and greedy policy from the converged J.
void extract(ValueSolution& sol, const Sweep& sweep,
             const std::vector<double>& J) {
  const int d = sol.d;
  const std::int64_t cap = sol.age_cap;
  const double p = sweep.params.p, q = sweep.params.q;
  const double disc = sweep.disc;
  const auto at = [&](std::int64_t delta, int l1, int l2) {
    return J[(static_cast<std::size_t>(delta) * 2 + l1) * d + l2];
  };
  sol.Q.assign(J.size() * 3, kNaN);
  sol.policy.assign(J.size(), Action::None);
  for (std::int64_t delta = 1; delta <= cap; ++delta) {
    const std::int64_t up = std::min(delta + 1, cap);
    const double c = sweep.cost[delta];
    for (int l1 = 0; l1 < 2; ++l1) {
      const double on = (l1 == 1) ? q : (1.0 - p);
      for (int l2 = 0; l2 < d; ++l2) {
        const std::size_t si = sol.idx(delta, l1, l2);
        if (l2 == 0) {
          const double q1 =
              c + disc * (on * at(1, 1, 0) + (1.0 - on) * at(up, 0, 0));
          const double q2 = c + disc * (on * at(up, 1, d - 1) +
                                        (1.0 - on) * at(up, 0, d - 1));
          sol.Q[si * 3 + static_cast<int>(Action::Ch1)] = q1;
          sol.Q[si * 3 + static_cast<int>(Action::Ch2)] = q2;
          if (sol.unrestricted) {
            sol.Q[si * 3 + static_cast<int>(Action::None)] =
                c + disc * (on * at(up, 1, 0) + (1.0 - on) * at(up, 0, 0));
          }
          sol.policy[si] = (q1 <= q2) ? Action::Ch1 : Action::Ch2;
        } else if (l2 == 1) {
          sol.Q[si * 3 + static_cast<int>(Action::None)] =
              c + disc * (on * at(d, 1, 0) + (1.0 - on) * at(d, 0, 0));
        } else {
          sol.Q[si * 3 + static_cast<int>(Action::None)] =
              c + disc * (on * at(up, 1, l2 - 1) + (1.0 - on) * at(up, 0, l2 - 1));
        }
      }
    }
  }
}

}  // namespace

ValueSolution value_iteration_discounted(const ChannelParams& params,
                                         double alpha,
                                         const CostFunction& cost,
                                         std::int64_t age_cap, double tol,
                                         const IterationOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (age_cap < params.d + 1) {
    throw std::invalid_argument("age_cap must be >= d+1");
  }

  ValueSolution sol;
  sol.average = false;
  sol.alpha = alpha;
  sol.d = params.d;
  sol.age_cap = age_cap;
  sol.unrestricted = opts.unrestricted;

  const std::vector<double> ctab = tabulate_cost(cost, age_cap);
  const std::size_t n = static_cast<std::size_t>(age_cap + 1) * 2 * params.d;
  std::vector<double> J(n, 0.0), TJ(n, 0.0);
  const Sweep sweep{params, age_cap, params.d, ctab, alpha,
                    opts.unrestricted, nullptr};

  const double stop = tol * (1.0 - alpha);
  double diff = 0.0;
  long it = 0;
  for (; it < opts.max_iters; ++it) {
    sweep.apply(J, TJ);
    diff = 0.0;
    for (std::int64_t delta = 1; delta <= age_cap; ++delta) {
      const std::size_t b = sol.idx(delta, 0, 0);
      for (std::size_t k = b; k < b + 2 * static_cast<std::size_t>(params.d); ++k) {
        diff = std::max(diff, std::fabs(TJ[k] - J[k]));
      }
    }
    J.swap(TJ);
    if (diff < stop) break;
  }
  if (diff >= stop) {
    throw ConvergenceError("discounted value iteration did not reach tol*(1-alpha) within " +
                           std::to_string(opts.max_iters) + " sweeps");
  }
  sol.iterations = it + 1;
  sol.residual = diff;
  sol.J = std::move(J);
  extract(sol, sweep, sol.J);
  return sol;
}

ValueSolution relative_value_iteration(const ChannelParams& params,
                                       const CostFunction& cost,
                                       std::int64_t age_cap, double tol,
                                       const IterationOptions& opts,
                                       const PolicyFn* fixed_policy) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (age_cap < params.d + 1) {
    throw std::invalid_argument("age_cap must be >= d+1");
  }

  ValueSolution sol;
  sol.average = true;
  sol.alpha = 1.0;
  sol.d = params.d;
  sol.age_cap = age_cap;
  sol.unrestricted = opts.unrestricted;

  const std::vector<double> ctab = tabulate_cost(cost, age_cap);
  const std::size_t n = static_cast<std::size_t>(age_cap + 1) * 2 * params.d;
  std::vector<double> J(n, 0.0), TJ(n, 0.0);
  const Sweep sweep{params, age_cap, params.d, ctab, 1.0,
                    opts.unrestricted, fixed_policy};

  const std::size_t ref = sol.idx(1, 1, 0);
  const double tau = 0.5;  // damping keeps cyclic chains from oscillating
  double span = 0.0, lo = 0.0, hi = 0.0;
  long it = 0;
  bool converged = false;
  for (; it < opts.max_iters; ++it) {
    sweep.apply(J, TJ);
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::int64_t delta = 1; delta <= age_cap; ++delta) {
      const std::size_t b = sol.idx(delta, 0, 0);
      for (std::size_t k = b; k < b + 2 * static_cast<std::size_t>(params.d); ++k) {
        const double dv = TJ[k] - J[k];
        lo = std::min(lo, dv);
        hi = std::max(hi, dv);
      }
    }
    span = hi - lo;
    if (span < tol) {
      converged = true;
      break;
    }
    const double anchor = TJ[ref];
    for (std::int64_t delta = 1; delta <= age_cap; ++delta) {
      const std::size_t b = sol.idx(delta, 0, 0);
      for (std::size_t k = b; k < b + 2 * static_cast<std::size_t>(params.d); ++k) {
        J[k] = (1.0 - tau) * J[k] + tau * (TJ[k] - anchor);
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("relative value iteration span " +
                           std::to_string(span) + " did not reach tol within " +
                           std::to_string(opts.max_iters) + " sweeps");
  }
  sol.iterations = it + 1;
  sol.residual = span;
  sol.gain = 0.5 * (hi + lo);

  // Anchor the bias at the reference state.
  const double j0 = J[ref];
  for (double& v : J) v -= j0;
  sol.J = std::move(J);
  extract(sol, sweep, sol.J);
  return sol;
}

namespace {

RowStructure scan_row(const ValueSolution& sol, int l1, Direction expected,
                      std::int64_t hi) {
  RowStructure row;
  Action prev = sol.policy_at(1, l1, 0);
  row.constant_action = prev;
  const Action above =
      (expected == Direction::NonDecreasing) ? Action::Ch2 : Action::Ch1;
  if (prev == above) row.lambda = 1;
  for (std::int64_t delta = 2; delta <= hi; ++delta) {
    const Action u = sol.policy_at(delta, l1, 0);
    if (u != prev) {
      ++row.switches;
      if (u == above && row.lambda == kNoSwitch) row.lambda = delta;
      prev = u;
    }
  }
  row.monotone = row.switches <= 1;
  row.constant = row.switches == 0;
  if (row.constant) {
    row.compatible = true;
  } else if (row.switches == 1) {
    // A single switch is compatible iff it lands on the expected side.
    row.compatible = (prev == above);
  } else {
    row.compatible = false;
  }
  return row;
}

}  // namespace

StructureReport check_threshold_structure(const ValueSolution& solution,
                                          const ChannelParams& params) {
  StructureReport rep;
  rep.region_static = classify_region(params).region;
  rep.region_used =
      solution.average
          ? rep.region_static
          : classify_region_discounted(params, solution.alpha).region;
  rep.scan_hi = std::max<std::int64_t>(
      1, (solution.age_cap * 95) / 100);

  Direction dir0, dir1;
  switch (rep.region_used) {
    case Region::B1: dir0 = Direction::NonIncreasing; dir1 = Direction::NonIncreasing; break;
    case Region::B2: dir0 = Direction::NonDecreasing; dir1 = Direction::NonIncreasing; break;
    case Region::B3: dir0 = Direction::NonDecreasing; dir1 = Direction::NonDecreasing; break;
    case Region::B4: default: dir0 = Direction::NonIncreasing; dir1 = Direction::NonDecreasing; break;
  }
  rep.row0 = scan_row(solution, 0, dir0, rep.scan_hi);
  rep.row1 = scan_row(solution, 1, dir1, rep.scan_hi);
  rep.directions_match = rep.row0.compatible && rep.row1.compatible;
  return rep;
}

SupermodReport check_supermodularity(const ValueSolution& solution,
                                     const ChannelParams& params,
                                     double alpha) {
  if (solution.average) {
    throw std::invalid_argument(
        "supermodularity diagnostics need a discounted solution");
  }
  SupermodReport rep;
  rep.m = (1.0 - std::pow(alpha, params.d)) / (1.0 - alpha);
  rep.region_alpha = classify_region_discounted(params, alpha).region;
  rep.scan_hi = std::max<std::int64_t>(2, (solution.age_cap * 95) / 100);

  const bool above =
      rep.region_alpha == Region::B2 || rep.region_alpha == Region::B3;

  double worst0 = std::numeric_limits<double>::infinity();
  std::int64_t settled_from = kNoSwitch;
  for (std::int64_t delta = 2; delta <= rep.scan_hi; ++delta) {
    for (int l1 = 0; l1 < 2; ++l1) {
      const double L2 = solution.Qat(delta, l1, 0, Action::Ch2) -
                        solution.Qat(delta - 1, l1, 0, Action::Ch2);
      rep.max_abs_dev_ch2 = std::max(rep.max_abs_dev_ch2, std::fabs(L2 - rep.m));
      const double L1 = solution.Qat(delta, l1, 0, Action::Ch1) -
                        solution.Qat(delta - 1, l1, 0, Action::Ch1);
      const double margin = above ? (L1 - rep.m) : (rep.m - L1);
      if (l1 == 0) {
        worst0 = std::min(worst0, margin);
        if (margin < 0.0) ++rep.violations_l1_0;
      } else {
        if (margin >= 0.0) {
          if (settled_from == kNoSwitch) settled_from = delta;
        } else {
          settled_from = kNoSwitch;
        }
      }
      if (l1 == 1) {
        const double L1row0 = solution.Qat(delta, 0, 0, Action::Ch1) -
                              solution.Qat(delta - 1, 0, 0, Action::Ch1);
        rep.max_row1_minus_row0 =
            std::max(rep.max_row1_minus_row0, L1 - L1row0);
      }
    }
  }
  rep.worst_margin_l1_0 = worst0;
  rep.crossover_l1_1 = settled_from;
  return rep;
}

double max_idle_advantage(const ValueSolution& solution) {
  if (!solution.unrestricted) {
    throw std::invalid_argument(
        "idle-advantage check needs a solution computed with idling allowed");
  }
  double worst = -std::numeric_limits<double>::infinity();
  const std::int64_t hi =
      std::max<std::int64_t>(1, (solution.age_cap * 95) / 100);
  for (std::int64_t delta = 1; delta <= hi; ++delta) {
    for (int l1 = 0; l1 < 2; ++l1) {
      const double active = std::min(solution.Qat(delta, l1, 0, Action::Ch1),
                                     solution.Qat(delta, l1, 0, Action::Ch2));
      const double idle = solution.Qat(delta, l1, 0, Action::None);
      worst = std::max(worst, active - idle);
    }
  }
  return worst;
}

PolicyFn greedy_policy_fn(const ValueSolution& solution) {
  auto table = std::make_shared<std::vector<Action>>(solution.policy);
  const std::int64_t cap = solution.age_cap;
  const int d = solution.d;
  return [table, cap, d](const SystemState& s) {
    if (s.l2 > 0) return Action::None;
    const std::int64_t delta = std::min(s.delta, cap);
    return (*table)[(static_cast<std::size_t>(delta) * 2 + s.l1) * d];
  };
}

}  // namespace aoi
