// Acceptance gate: nine end-to-end checks tying the exact solver, the
// numeric dynamic-programming oracles, the chain analyzer, and the Monte
// Carlo simulator together.  Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails.

#include <aoi/chain.hpp>
#include <aoi/cost.hpp>
#include <aoi/mdp.hpp>
#include <aoi/model.hpp>
#include <aoi/policy.hpp>
#include <aoi/sim.hpp>
#include <aoi/solver.hpp>
#include <aoi/version.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "support.hpp"

namespace {

using namespace aoi;

int g_failures = 0;

void report(int n, const char* name, bool pass, const std::string& detail) {
  std::printf("[%d] %-46s %s (%s)\n", n, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared parameter grid: 20 interior triples per region across
// d in {2,3,5,10,20}.  Margins are built into the recipes so no point sits
// near a region boundary; check_grid() asserts that.
// ---------------------------------------------------------------------------

struct GridPoint {
  ChannelParams params;
  Region region;
};

// k in {0..3} indexes a margin variant within the region.
GridPoint recipe(Region r, int d, int k) {
  const double c[] = {0.3, 0.5, 0.7, 0.9};    // d*(1-p) for B2/B3
  const double g2[] = {1.3, 1.6, 2.2, 3.0};   // d*q for B2 (G < 0)
  const double g3[] = {0.2, 0.4, 0.6, 0.8};   // d*q for B3 (G > 0)
  const double t[] = {0.2, 0.35, 0.5, 0.65};  // -F for B4
  double p, q;
  switch (r) {
    case Region::B1:
      p = (k + 1) / 6.0 * (1.0 - 1.0 / d);
      q = std::max(0.3, 1.0 - 0.7 * (d - 1) * (1.0 - p));
      break;
    case Region::B2:
      p = 1.0 - c[k] / d;
      q = std::min(0.95, g2[k] / d);
      break;
    case Region::B3:
      p = 1.0 - c[k] / d;
      q = g3[k] / d;
      break;
    default:
      p = 1.0 - 1.0 / (d - t[k]);
      q = 0.5 * (1.0 - t[k]) / (d - t[k]);
      break;
  }
  return {make_params(p, q, d), r};
}

constexpr Region kRegions[] = {Region::B1, Region::B2, Region::B3,
                               Region::B4};

std::vector<GridPoint> acceptance_grid() {
  std::vector<GridPoint> pts;
  for (int d : {2, 3, 5, 10, 20})
    for (int k = 0; k < 4; ++k)
      for (Region r : kRegions) pts.push_back(recipe(r, d, k));
  return pts;
}

// Margin of the two boundary functions that decide the point's region.
double region_margin(const GridPoint& pt) {
  const auto info = classify_region(pt.params);
  switch (pt.region) {
    case Region::B1: return std::min(-info.F, -info.H);
    case Region::B2: return std::min(info.F, -info.G);
    case Region::B3: return std::min(info.F, info.G);
    default: return std::min(-info.F, info.H);
  }
}

bool check_grid(const std::vector<GridPoint>& grid) {
  for (const auto& pt : grid) {
    if (classify_region(pt.params).region != pt.region) return false;
    if (!(region_margin(pt) > 0.05)) return false;
  }
  return true;
}

// One point per (region, d <= dmax) — the margin-k variant of each recipe.
std::vector<GridPoint> region_points(int dmax, int k) {
  std::vector<GridPoint> picked;
  for (int d : {2, 3, 5, 10, 20})
    if (d <= dmax)
      for (Region r : kRegions) picked.push_back(recipe(r, d, k));
  return picked;
}

ChannelParams b2_params(int d) { return make_params(1.0 - 0.5 / d, 1.5 / d, d); }
ChannelParams b3_params(int d) { return make_params(1.0 - 0.5 / d, 0.5 / d, d); }

// ---------------------------------------------------------------------------
// [1] + [4]: one pass over the shared grid computes both the gain agreement
// and the threshold-structure agreement of the numeric solver.
// ---------------------------------------------------------------------------

void check_gain_and_structure(const std::vector<GridPoint>& grid) {
  const auto cost = parse_cost("linear");
  const std::int64_t cap = 2000;

  double max_rel = 0.0;
  int structural_ok = 0;
  int l0_checked = 0, l0_ok = 0, l1_checked = 0, l1_ok = 0;

  for (const auto& pt : grid) {
    const auto res = solve(pt.params);
    const auto sol = relative_value_iteration(pt.params, cost, cap, 1e-7);

    max_rel = std::max(max_rel,
                       std::abs(res.delta_opt - sol.gain) / sol.gain);

    const auto sr = check_threshold_structure(sol, pt.params);
    if (sr.row0.monotone && sr.row1.monotone && sr.directions_match)
      ++structural_ok;

    if (res.argmin_candidates.size() == 1) {
      const auto& pol = res.policy;
      const std::string& winner = res.argmin_candidates.front();
      if (sr.row0.lambda != kNoSwitch && pol.lambda0 != kNoSwitch &&
          pol.lambda0 < sr.scan_hi - 2) {
        ++l0_checked;
        // When the winner plays the slow channel at every no-feedback age,
        // the recurrent ages of that row never drop below d, so any switch
        // age in [1, d] induces the identical chain and the numeric solver
        // may break the tie anywhere in that window.
        const bool slow_row0 = winner == "always_ch2" || winner == "f0/g0";
        const bool l0_match =
            slow_row0 ? (sr.row0.lambda >= 1 && sr.row0.lambda <= pt.params.d)
                      : (sr.row0.lambda == pol.lambda0);
        if (l0_match) ++l0_ok;
      }
      ++l1_checked;
      if (pol.lambda1_set.contains(sr.row1.lambda)) ++l1_ok;
    }
  }

  const int n = static_cast<int>(grid.size());
  report(1, "closed form vs relative value iteration", max_rel < 1e-3,
         std::to_string(n) + " triples, cap 2000, max rel err " +
             fmt(max_rel));
  const bool structure_pass =
      structural_ok >= (19 * n + 19) / 20 &&  // ceil(0.95 n)
      l0_ok == l0_checked && l1_ok == l1_checked;
  report(4, "threshold structure of numeric policies", structure_pass,
         std::to_string(structural_ok) + "/" + std::to_string(n) +
             " monotone with expected directions; switch ages " +
             std::to_string(l0_ok) + "/" + std::to_string(l0_checked) +
             ", ON-row sets " + std::to_string(l1_ok) + "/" +
             std::to_string(l1_checked));
}

// ---------------------------------------------------------------------------
// [2] closed-form f_i/g_i ratios and constant candidates vs exact stationary
// chain averages.
// ---------------------------------------------------------------------------

void check_chain_oracle() {
  double worst = 0.0;
  long evals = 0;

  for (int d : {2, 3, 5, 10}) {
    for (const auto& params : {b2_params(d), b3_params(d)}) {
      for (int i = 1; i <= 4; ++i) {
        const std::int64_t lo = (i == 2) ? 1 : d + 1;
        const std::int64_t hi = (i == 2) ? d : 3 * d;
        for (std::int64_t s = lo; s <= hi; ++s) {
          const auto [f, g] = fg_eval(i, s, params);
          const double chain = aoi_test::family_chain_age(i, s, params);
          worst = std::max(worst, std::abs(f / g - chain));
          ++evals;
        }
      }
    }
  }

  // Constant candidates across all four regions.
  std::vector<ChannelParams> triples;
  for (int d : {2, 3, 5, 10}) {
    triples.push_back(b2_params(d));
    triples.push_back(b3_params(d));
    triples.push_back(make_params(0.4, 0.6, d));              // B1 side
    triples.push_back(make_params(1.0 - 1.0 / (d - 0.25),    // B4 side
                                  0.25 / d, d));
  }
  for (const auto& params : triples) {
    const auto cc = candidate_constants(params);
    const int d = params.d;
    const std::int64_t tail_cap =
        64 + static_cast<std::int64_t>(std::ceil(40.0 / (1.0 - params.p)));

    auto chain_age = [&](const PolicyFn& policy, std::int64_t cap) {
      return average_age(stationary_distribution(
          build_chain(policy, params, cap)));
    };
    worst = std::max(worst, std::abs(cc.always_ch1 -
                                     chain_age(always_ch1_policy(), tail_cap)));
    worst = std::max(worst, std::abs(cc.always_ch2 -
                                     chain_age(always_ch2_policy(), 4 * d + 64)));
    worst = std::max(worst, std::abs(cc.always_ch2 - (3.0 * d - 1) / 2));
    worst = std::max(worst, std::abs(cc.f0_over_g0 -
                                     chain_age(aoi_test::f0_policy(d), 4 * d + 64)));
    worst = std::max(worst, std::abs(cc.f0p_over_g0p -
                                     chain_age(aoi_test::f0p_policy(), tail_cap)));
    evals += 5;
  }

  report(2, "closed form vs stationary chain averages", worst < 1e-9,
         std::to_string(evals) + " evaluations, worst abs err " + fmt(worst));
}

// ---------------------------------------------------------------------------
// [3] bisection root equals the brute-force candidate minimum; objective
// h is decreasing and concave along the bracket.
// ---------------------------------------------------------------------------

void check_bisection() {
  double worst = 0.0;
  bool shape_ok = true;

  for (int d : {2, 3, 5, 10}) {
    for (const auto& params : {b2_params(d), b3_params(d)}) {
      for (int i = 1; i <= 4; ++i) {
        double brute = std::numeric_limits<double>::infinity();
        const std::int64_t lo = (i == 2) ? 1 : d + 1;
        const std::int64_t hi = (i == 2) ? d : 50 * d;
        for (std::int64_t s = lo; s <= hi; ++s) {
          const auto [f, g] = fg_eval(i, s, params);
          brute = std::min(brute, f / g);
        }
        const double beta = bisect_beta(i, params, 1e-9);
        worst = std::max(worst, std::abs(beta - brute));

        // Sampled shape of h on [0, 3d]: strictly decreasing, concave.
        const int m = 25;
        std::vector<double> h(m);
        for (int j = 0; j < m; ++j)
          h[j] = h_eval(i, 3.0 * d * j / (m - 1), params);
        for (int j = 0; j + 1 < m; ++j)
          if (!(h[j + 1] < h[j])) shape_ok = false;
        for (int j = 1; j + 1 < m; ++j)
          if (!(h[j] >= 0.5 * (h[j - 1] + h[j + 1]) - 1e-9)) shape_ok = false;
        if (!(h[0] > 0.0)) shape_ok = false;
      }
    }
  }

  report(3, "bisection vs brute-force candidate minima",
         worst < 1e-7 && shape_ok,
         "worst gap " + fmt(worst) +
             (shape_ok ? ", objective decreasing+concave"
                       : ", objective shape violated"));
}

// ---------------------------------------------------------------------------
// [5] discounted Q-increments: the slow-channel increment equals
// m = sum_{i<d} alpha^i exactly; the fast-channel increment at l1 = 0 sits on
// the side of m dictated by the (discounted) region.
// ---------------------------------------------------------------------------

void check_q_increments() {
  const double alpha = 0.999;
  const auto cost = parse_cost("linear");
  double worst_dev = 0.0;
  long violations = 0;
  int runs = 0;

  for (const auto& pt : region_points(5, 1)) {
    const auto sol =
        value_iteration_discounted(pt.params, alpha, cost, 500, 1e-6);
    const auto rep = check_supermodularity(sol, pt.params, alpha);
    if (rep.region_alpha != pt.region) ++violations;  // recipe must carry over
    worst_dev = std::max(worst_dev, rep.max_abs_dev_ch2);
    violations += rep.violations_l1_0;
    ++runs;
  }

  report(5, "discounted Q-increment signs",
         worst_dev < 1e-6 && violations == 0,
         std::to_string(runs) + " runs, slow-channel increment dev " +
             fmt(worst_dev) + ", sign violations " +
             std::to_string(violations));
}

// ---------------------------------------------------------------------------
// [6] i.i.d. specialization: exact fast-channel optimum below the critical
// failure probability; finite, steeply growing switch ages just above it.
// ---------------------------------------------------------------------------

void check_iid() {
  bool ok = true;
  std::string note;

  // Exact branch: 1-p >= 1/d keeps the fast channel exclusively.
  for (int d : {2, 5, 10, 20, 50}) {
    for (double p : {0.3, 1.0 - 1.02 / d}) {
      const auto res = solve_iid(make_params(p, 1.0 - p, d));
      const double expect = 1.0 / (1.0 - p);
      if (res.argmin_candidates != std::vector<std::string>{"always_ch1"} ||
          std::abs(res.delta_opt - expect) > 1e-12 * expect) {
        ok = false;
        note = "exact branch failed at p=" + fmt(p) + " d=" + std::to_string(d);
      }
    }
  }

  // Threshold branch: switch age finite above the critical p, blowing up as
  // p approaches it from above and shrinking monotonically beyond.
  std::int64_t steepest = 0;
  for (int d : {10, 20, 50}) {
    const double pstar = 1.0 - 1.0 / d;
    const auto below = solve_iid(make_params(pstar - 0.1 / d,
                                             1.0 - (pstar - 0.1 / d), d));
    if (below.argmin_candidates != std::vector<std::string>{"always_ch1"}) {
      ok = false;
      note = "no divergence below critical p at d=" + std::to_string(d);
    }

    std::int64_t prev = std::numeric_limits<std::int64_t>::max();
    bool first = true;
    for (double cstep : {0.05, 0.1, 0.2, 0.5}) {
      const double p = pstar + cstep / d;
      const auto res = solve_iid(make_params(p, 1.0 - p, d));
      const auto& pol = res.policy;
      const bool finite = pol.lambda0 != kNoSwitch;
      const bool shared = finite && pol.lambda0 == pol.lambda1 &&
                          pol.dir0 == Direction::NonDecreasing &&
                          pol.dir1 == Direction::NonDecreasing;
      if (!finite || !shared || pol.lambda0 > prev) {
        ok = false;
        note = "threshold shape failed at d=" + std::to_string(d) +
               " p=" + fmt(p);
      }
      if (first && pol.lambda0 < 4 * d) {
        ok = false;
        note = "switch age too small near critical p at d=" +
               std::to_string(d);
      }
      if (first) steepest = std::max(steepest, pol.lambda0);
      first = false;
      prev = pol.lambda0;
    }
  }

  if (ok)
    note = "fast-channel branch exact; switch age up to " +
           std::to_string(steepest) + " near critical p, monotone beyond";
  report(6, "iid specialization and threshold divergence", ok, note);
}

// ---------------------------------------------------------------------------
// [7] simulator agrees with the chain analyzer on the optimal policy; the
// deterministic slow-channel policy reproduces its cycle average exactly.
// ---------------------------------------------------------------------------

void check_simulator() {
  const auto cost = parse_cost("linear");
  bool ok = true;
  double worst_sigmas = 0.0;

  for (const auto& pt : region_points(5, 1)) {
    if (pt.params.d != 5) continue;  // one replication-heavy run per region
    const auto res = solve(pt.params);
    const std::int64_t cap =
        64 + static_cast<std::int64_t>(std::ceil(200.0 / (1.0 - pt.params.p)));
    const double chain = average_age(stationary_distribution(
        build_chain(res.policy, pt.params, cap)));

    const PolicySpec spec{"optimal", res.policy.fn(), false};
    const auto sim =
        simulate(spec, pt.params, cost, {1'000'000, 20, 2026, -1});
    if (sim.std_error > 0.0) {
      const double sigmas = std::abs(sim.mean - chain) / sim.std_error;
      worst_sigmas = std::max(worst_sigmas, sigmas);
      if (!(sigmas <= 3.0)) ok = false;
    } else {
      // A policy whose chain is a deterministic cycle simulates with zero
      // variance; the sample mean must then match the cycle average directly.
      if (!(std::abs(sim.mean - chain) < 1e-9)) ok = false;
    }
  }

  bool exact_ok = true;
  for (int d : {5, 20}) {
    const auto params = make_params(0.9, 0.3, d);
    const auto sim = simulate(sub6ghz_only_spec(), params, cost,
                              {1'000'000, 3, 7, 1000});
    if (sim.mean != (3.0 * d - 1) / 2 || sim.std_error != 0.0)
      exact_ok = false;
  }

  report(7, "simulator vs chain analyzer", ok && exact_ok,
         "optimal-policy gap <= " + fmt(worst_sigmas) +
             " std errs; slow-channel cycle average exact: " +
             (exact_ok ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// [8] comparison sweeps: under linear cost (d = 20, p calibrated per q so the
// two single-channel baselines tie) the optimal policy is below every
// baseline; under the exponential penalty every baseline costs more than
// twice the optimum.
// ---------------------------------------------------------------------------

double calibrate_p(double q, int d, double target) {
  double lo = 0.02, hi = 0.999;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = candidate_constants(make_params(mid, q, d)).always_ch1;
    (v < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_comparisons() {
  const int d = 20;
  bool linear_ok = true;
  double worst_gap = std::numeric_limits<double>::infinity();

  const auto linear = parse_cost("linear");
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double p = calibrate_p(q, d, (3.0 * d - 1) / 2);
    const auto params = make_params(p, q, d);
    const auto rows =
        compare_policies(params, linear, {300'000, 10, 31, -1}, nullptr);
    const auto& opt = rows.front();
    for (std::size_t j = 1; j < rows.size(); ++j) {
      const double slack = 3.0 * (opt.std_error + rows[j].std_error);
      if (!(opt.mean <= rows[j].mean + slack)) linear_ok = false;
      worst_gap = std::min(worst_gap, rows[j].mean - opt.mean);
    }
  }

  // Exponential penalty: eta is chosen so the per-slot penalty grows
  // slightly faster than the fast channel's failure runs decay, making the
  // fast-channel-only baseline's stationary cost infinite.  A finite-horizon
  // simulation cannot witness that, so each baseline is scored by the
  // sharpest available instrument:
  //   * fast-channel-only: exact policy evaluation on truncated chains at
  //     two caps -- both values must exceed twice the optimal gain and the
  //     larger cap must cost strictly more (the divergence signature);
  //   * slow-channel-only: its deterministic cycle average in closed form;
  //   * random: Monte Carlo with a three-standard-error lower bound.
  // The simulated optimal row itself must reproduce the iterated gain.
  const double p = 0.9;
  const double eta = 1.0 / (p - 0.003);
  const auto exp_cost = parse_cost("exp:" + std::to_string(eta));
  const std::int64_t cap =
      static_cast<std::int64_t>(std::log(1e6) / std::log(eta));

  double ch2_exact = 0.0;
  for (int k = d; k < 2 * d; ++k) ch2_exact += std::pow(eta, k) / d;

  bool exp_ok = true;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto params = make_params(p, q, d);
    const auto sol = relative_value_iteration(params, exp_cost, cap, 1e-6);
    const double gain = sol.gain;
    const PolicyFn optimal = greedy_policy_fn(sol);
    const auto rows =
        compare_policies(params, exp_cost, {1'000'000, 10, 47, -1}, &optimal);

    const auto& opt = rows.front();
    if (!(std::abs(opt.mean - gain) <=
          std::max(3.0 * opt.std_error, 1e-3 * gain)))
      exp_ok = false;

    min_ratio = std::min(min_ratio, ch2_exact / gain);
    if (!(ch2_exact > 2.0 * gain)) exp_ok = false;

    const auto& rnd = rows.back();
    min_ratio = std::min(min_ratio, (rnd.mean - 3.0 * rnd.std_error) / gain);
    if (!(rnd.mean - 3.0 * rnd.std_error > 2.0 * gain)) exp_ok = false;

    double prev_cost = 0.0;
    for (std::int64_t chain_cap : {500, 1000}) {
      const auto truncated = stationary_distribution(
          build_chain(always_ch1_policy(), params, chain_cap));
      const double trunc_cost = average_cost(truncated, exp_cost);
      min_ratio = std::min(min_ratio, trunc_cost / gain);
      if (!(trunc_cost > 2.0 * gain && trunc_cost > prev_cost)) exp_ok = false;
      prev_cost = trunc_cost;
    }
  }

  report(8, "optimal dominates baselines (linear and exp)",
         linear_ok && exp_ok,
         "linear: min baseline-optimal gap " + fmt(worst_gap) +
             "; exp penalty: min baseline/optimal ratio " + fmt(min_ratio));
}

// ---------------------------------------------------------------------------
// [9] with idling allowed while both channels are free, it is never the
// strictly best action on converged tables.
// ---------------------------------------------------------------------------

void check_no_idling() {
  const auto cost = parse_cost("linear");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& pt : region_points(5, 2)) {
    const auto sol = relative_value_iteration(pt.params, cost, 800, 1e-8,
                                              {.unrestricted = true});
    worst = std::max(worst, max_idle_advantage(sol));
  }
  report(9, "idling is never strictly optimal", worst <= 1e-7,
         "max idle advantage " + fmt(worst));
}

}  // namespace

int main() {
  std::printf("acceptance suite, artifact version %s\n", aoi::kVersion);

  const auto grid = acceptance_grid();
  if (!check_grid(grid)) {
    std::printf("grid construction failed: off-region or near-boundary "
                "point\n");
    return 1;
  }
  std::printf("shared grid: %zu triples, 20 per region, margins > 0.05\n\n",
              grid.size());

  check_gain_and_structure(grid);   // [1] and [4]
  check_chain_oracle();             // [2]
  check_bisection();                // [3]
  check_q_increments();             // [5]
  check_iid();                      // [6]
  check_simulator();                // [7]
  check_comparisons();              // [8]
  check_no_idling();                // [9]

  std::printf("\n%s\n", g_failures == 0 ? "ACCEPTANCE: all 9 checks passed"
                                        : "ACCEPTANCE: FAILURES PRESENT");
  return g_failures == 0 ? 0 : 1;
}
