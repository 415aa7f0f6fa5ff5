#include "aoi/chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace aoi {

namespace {

MarkovChain explore(const PolicyFn& policy, const ChannelParams& params,
                    std::int64_t age_cap) {
  if (age_cap < params.d + 1) {
    throw std::invalid_argument("age_cap must be >= d+1");
  }
  std::map<SystemState, std::vector<Outcome>> trans;
  std::vector<SystemState> frontier = {SystemState{1, 1, 0},
                                       SystemState{params.d, 0, 0},
                                       SystemState{params.d, 1, 0}};
  bool truncated = false;
  while (!frontier.empty()) {
    const SystemState s = frontier.back();
    frontier.pop_back();
    if (trans.count(s)) continue;
    const Action u = s.l2 == 0 ? policy(s) : Action::None;
    auto outs = transition(s, u, params, age_cap);
    if (s.delta == age_cap) truncated = true;
    for (const auto& o : outs) {
      if (!trans.count(o.next)) frontier.push_back(o.next);
    }
    trans.emplace(s, std::move(outs));
  }

  MarkovChain chain;
  chain.age_cap = age_cap;
  chain.truncated = truncated;
  chain.states.reserve(trans.size());
  for (const auto& [s, _] : trans) chain.states.push_back(s);
  std::map<SystemState, int> index;
  for (int i = 0; i < static_cast<int>(chain.states.size()); ++i) {
    index[chain.states[i]] = i;
  }
  chain.rows.resize(chain.states.size());
  for (const auto& [s, outs] : trans) {
    auto& row = chain.rows[index[s]];
    for (const auto& o : outs) row.emplace_back(index[o.next], o.prob);
  }
  return chain;
}

// Dense solve of pi P = pi, sum(pi) = 1: assemble (P^T - I), replace the last
// balance equation with the normalization row.
std::vector<double> solve_dense(const MarkovChain& chain) {
  const int n = static_cast<int>(chain.states.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, pr] : chain.rows[i]) A(j, i) += pr;
    A(i, i) -= 1.0;
  }
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = A.partialPivLu().solve(b);
  return {x.data(), x.data() + n};
}

// Damped power iteration on the lazy chain (I+P)/2; same stationary
// distribution, but aperiodic so the iteration converges for cyclic policies.
std::vector<double> solve_power(const MarkovChain& chain) {
  const int n = static_cast<int>(chain.states.size());
  std::vector<double> pi(n, 1.0 / n), next(n);
  for (long iter = 0; iter < 2'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double mass = pi[i];
      next[i] += 0.5 * mass;
      for (const auto& [j, pr] : chain.rows[i]) next[j] += 0.5 * mass * pr;
    }
    double total = 0.0;
    for (double v : next) total += v;
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] /= total;
      diff = std::max(diff, std::fabs(next[i] - pi[i]));
    }
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

}  // namespace

MarkovChain build_chain(const PolicyFn& policy, const ChannelParams& params,
                        std::int64_t age_cap) {
  return explore(policy, params, age_cap);
}

MarkovChain build_chain(const ThresholdPolicy& policy,
                        const ChannelParams& params, std::int64_t age_cap) {
  // When the l1 = 0 rule eventually plays Ch2, recurrent ages are bounded:
  // the age climbs to the switch point, Channel 2 takes d slots, and delivery
  // resets the age to d.  Demand a cap with headroom; otherwise the clamp
  // would silently distort the stationary distribution.
  const bool bounded =
      (policy.dir0 == Direction::NonDecreasing && policy.lambda0 != kNoSwitch) ||
      (policy.dir0 == Direction::NonIncreasing && policy.lambda0 == kNoSwitch);
  if (bounded) {
    const std::int64_t lam =
        policy.dir0 == Direction::NonDecreasing ? policy.lambda0 : 1;
    const std::int64_t needed =
        std::max<std::int64_t>(lam, params.d) + 2 * params.d + 2;
    if (age_cap < needed) {
      throw std::invalid_argument(
          "age_cap too small to contain the recurrent class of the policy");
    }
  }
  return explore(policy.fn(), params, age_cap);
}

ChainSolution stationary_distribution(const MarkovChain& chain) {
  const int n = static_cast<int>(chain.states.size());
  if (n == 0) throw std::invalid_argument("empty chain");
  std::vector<double> pi =
      n <= 1200 ? solve_dense(chain) : solve_power(chain);

  // Clip tiny negative round-off and renormalize.
  double total = 0.0;
  for (double& v : pi) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
    total += v;
  }
  if (!(total > 0.0)) {
    throw std::runtime_error("stationary solve produced a degenerate vector");
  }
  for (double& v : pi) v /= total;

  // Residual check: a failed balance signals multiple recurrent classes or a
  // nonconverged iteration; reject rather than return a wrong answer.
  std::vector<double> piP(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, pr] : chain.rows[i]) piP[j] += pi[i] * pr;
  }
  double resid = 0.0;
  bool nonneg = true;
  for (int i = 0; i < n; ++i) {
    resid = std::max(resid, std::fabs(piP[i] - pi[i]));
    nonneg = nonneg && pi[i] >= 0.0;
  }
  if (resid > 1e-9 || !nonneg) {
    throw std::runtime_error(
        "stationary distribution residual too large (" + std::to_string(resid) +
        "); chain may have multiple recurrent classes");
  }

  ChainSolution sol;
  sol.states = chain.states;
  sol.pi = std::move(pi);
  double age = 0.0;
  for (int i = 0; i < n; ++i) {
    age += sol.pi[i] * static_cast<double>(sol.states[i].delta);
  }
  sol.average_age = age;
  sol.average_cost = age;  // linear cost
  return sol;
}

double average_age(const ChainSolution& solution) {
  return solution.average_age;
}

double average_cost(const ChainSolution& solution, const CostFunction& cost) {
  double acc = 0.0;
  for (std::size_t i = 0; i < solution.states.size(); ++i) {
    acc += solution.pi[i] * cost.at(solution.states[i].delta);
  }
  return acc;
}

}  // namespace aoi
