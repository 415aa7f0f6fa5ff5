// Command-line front end: region classification, exact solving, numeric
// cross-checks, Monte Carlo comparisons, and figure-style sweeps, all
// emitted as deterministic CSV (LF endings, 17-significant-digit floats,
// full parameter echo in '#' header comments).
//
// Exit codes: 0 success; 1 cross-check tolerance failure; 2 invalid
// parameters or usage; 3 bisection bracket failure; 4 nonconvergence or
// numeric failure.  Failures print "error,<code>,<message>" to stderr.

#include <CLI11.hpp>

#include <aoi/chain.hpp>
#include <aoi/mdp.hpp>
#include <aoi/model.hpp>
#include <aoi/sim.hpp>
#include <aoi/solver.hpp>
#include <aoi/version.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBracket = 3;
constexpr int kExitNoConverge = 4;

struct CliError : std::runtime_error {
  int code;
  CliError(int code, const std::string& msg)
      : std::runtime_error(msg), code(code) {}
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_lambda(std::int64_t lambda) {
  return lambda == aoi::kNoSwitch ? "inf" : std::to_string(lambda);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Everything one invocation needs, assembled from flags before any work
// happens; identical RunSpecs produce byte-identical CSV.
struct RunSpec {
  std::string command;
  std::vector<aoi::ChannelParams> grid;  // one or more (p,q,d) triples
  std::string grid_file;

  double alpha = 0.0;  // 0 = undiscounted classification
  double eps = 1e-9;
  double tol = 1e-9;
  std::int64_t age_cap = 2000;

  std::string cost_text = "linear";
  std::string policy_name = "age-optimal";
  std::uint64_t seed = 1;
  std::int64_t horizon = 1'000'000;
  int replications = 20;
  std::int64_t warmup = -1;

  std::vector<int> sweep_d;       // sweep-threshold
  std::vector<double> sweep_p;    // sweep-threshold
  std::string p_grid_text;        // lo:hi:count shorthand
  std::vector<double> sweep_q;    // sweep-age

  std::string out_path;  // empty = stdout
};

std::vector<aoi::ChannelParams> read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitInvalid, "cannot open grid file " + path);
  std::vector<aoi::ChannelParams> grid;
  std::string line;
  while (std::getline(in, line)) {
    // Allow comments, blank lines, and either comma- or space-separated.
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream row(line);
    double p, q;
    int d;
    if (!(row >> p)) continue;  // nothing but whitespace
    if (!(row >> q >> d))
      throw CliError(kExitInvalid, "malformed grid line: " + line);
    grid.push_back(aoi::make_params(p, q, d));
  }
  if (grid.empty())
    throw CliError(kExitInvalid, "grid file " + path + " holds no points");
  return grid;
}

std::vector<double> parse_linear_grid(const std::string& text) {
  // "lo:hi:count" with count >= 2, endpoints included.
  double lo, hi;
  long count;
  char c1, c2;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
      count < 2) {
    throw CliError(kExitInvalid, "expected lo:hi:count; got " + text);
  }
  std::vector<double> v;
  v.reserve(count);
  for (long i = 0; i < count; ++i)
    v.push_back(lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(count - 1));
  return v;
}

// ---------------------------------------------------------------------------
// CSV assembly

class Csv {
 public:
  explicit Csv(const RunSpec& spec) {
    line("# artifact: aoi-scheduler " + std::string(aoi::kVersion));
    line("# command: " + spec.command);
  }
  void meta(const std::string& key, const std::string& value) {
    line("# " + key + ": " + value);
  }
  void header(const std::string& columns) { line(columns); }
  void line(const std::string& text) {
    body_ += text;
    body_ += '\n';
  }
  void write(const std::string& out_path) const {
    if (out_path.empty()) {
      std::cout << body_;
      return;
    }
    std::ofstream out(out_path, std::ios::binary);  // keep LF endings as-is
    if (!out) throw CliError(kExitInvalid, "cannot write " + out_path);
    out << body_;
  }

 private:
  std::string body_;
};

void echo_grid(Csv& csv, const RunSpec& spec) {
  if (!spec.grid_file.empty()) csv.meta("grid-file", spec.grid_file);
  std::vector<std::string> points;
  for (const auto& params : spec.grid)
    points.push_back(fmt(params.p) + "," + fmt(params.q) + "," +
                     std::to_string(params.d));
  csv.meta("grid-points", join(points, ';'));
}

void echo_sim(Csv& csv, const RunSpec& spec) {
  csv.meta("cost", spec.cost_text);
  csv.meta("seed", std::to_string(spec.seed));
  csv.meta("horizon", std::to_string(spec.horizon));
  csv.meta("replications", std::to_string(spec.replications));
  csv.meta("warmup", spec.warmup < 0 ? std::string("default")
                                     : std::to_string(spec.warmup));
}

// ---------------------------------------------------------------------------
// Reference policies for simulation commands

// For exponential penalties the reference policy comes from the numeric
// average-cost solver; the state space is capped where the penalty reaches
// ~1e6 so the absolute stopping rule stays above floating-point noise.
aoi::PolicyFn reference_policy(const aoi::ChannelParams& params,
                               const RunSpec& spec,
                               const aoi::CostFunction& cost) {
  if (cost.name == "linear") return aoi::solve(params, spec.eps).policy.fn();
  const double eta = cost.at(2) / cost.at(1);
  std::int64_t cap = spec.age_cap;
  if (eta > 1.0) {
    cap = std::min<std::int64_t>(
        cap, static_cast<std::int64_t>(std::log(1e6) / std::log(eta)));
  }
  cap = std::max<std::int64_t>(cap, params.d + 2);
  auto sol = aoi::relative_value_iteration(params, cost, cap,
                                           std::max(spec.tol, 1e-6));
  return aoi::greedy_policy_fn(sol);
}

aoi::SimConfig sim_config(const RunSpec& spec) {
  aoi::SimConfig config;
  config.horizon = spec.horizon;
  config.replications = spec.replications;
  config.seed = spec.seed;
  config.warmup = spec.warmup;
  return config;
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int run_classify(const RunSpec& spec) {
  Csv csv(spec);
  echo_grid(csv, spec);
  csv.meta("alpha", spec.alpha > 0 ? fmt(spec.alpha) : "none");
  csv.header("p,q,d,F,G,H,region");
  for (const auto& params : spec.grid) {
    const aoi::RegionInfo info =
        spec.alpha > 0 ? aoi::classify_region_discounted(params, spec.alpha)
                       : aoi::classify_region(params);
    csv.line(fmt(params.p) + "," + fmt(params.q) + "," +
             std::to_string(params.d) + "," + fmt(info.F) + "," + fmt(info.G) +
             "," + fmt(info.H) + "," + aoi::region_name(info.region));
  }
  csv.write(spec.out_path);
  return kExitOk;
}

int run_solve(const RunSpec& spec) {
  Csv csv(spec);
  echo_grid(csv, spec);
  csv.meta("eps", fmt(spec.eps));
  csv.header(
      "p,q,d,region,delta_opt,dir0,lambda0,dir1,lambda1,lambda1_set,"
      "argmin_candidates");
  for (const auto& params : spec.grid) {
    const auto r = aoi::solve(params, spec.eps);
    csv.line(fmt(params.p) + "," + fmt(params.q) + "," +
             std::to_string(params.d) + "," + aoi::region_name(r.region) +
             "," + fmt(r.delta_opt) + "," +
             aoi::direction_name(r.policy.dir0) + "," +
             fmt_lambda(r.policy.lambda0) + "," +
             aoi::direction_name(r.policy.dir1) + "," +
             fmt_lambda(r.policy.lambda1) + "," + r.policy.lambda1_set.str() +
             "," + join(r.argmin_candidates, ';'));
  }
  csv.write(spec.out_path);
  return kExitOk;
}

int run_oracle_check(const RunSpec& spec) {
  Csv csv(spec);
  echo_grid(csv, spec);
  csv.meta("age-cap", std::to_string(spec.age_cap));
  csv.meta("tol", fmt(spec.tol));
  csv.meta("eps", fmt(spec.eps));
  csv.header("p,q,d,region,delta_opt,rvi_gain,rel_err");
  double max_rel = 0.0;
  for (const auto& params : spec.grid) {
    const auto exact = aoi::solve(params, spec.eps);
    const auto numeric = aoi::relative_value_iteration(
        params, aoi::linear_cost(), spec.age_cap, spec.tol);
    const double rel =
        std::abs(exact.delta_opt - numeric.gain) / numeric.gain;
    max_rel = std::max(max_rel, rel);
    csv.line(fmt(params.p) + "," + fmt(params.q) + "," +
             std::to_string(params.d) + "," + aoi::region_name(exact.region) +
             "," + fmt(exact.delta_opt) + "," + fmt(numeric.gain) + "," +
             fmt(rel));
  }
  csv.meta("max-rel-err", fmt(max_rel));
  csv.write(spec.out_path);
  if (!(max_rel < 1e-3)) {
    throw CliError(kExitCheckFailed,
                   "closed form vs numeric gain max relative error " +
                       fmt(max_rel) + " exceeds 1e-3");
  }
  return kExitOk;
}

int run_simulate(const RunSpec& spec) {
  const auto& params = spec.grid.front();
  const auto cost = aoi::parse_cost(spec.cost_text);

  aoi::PolicySpec policy;
  if (spec.policy_name == "age-optimal") {
    policy = {"Age-optimal", reference_policy(params, spec, cost), false};
  } else if (spec.policy_name == "ch1") {
    policy = aoi::mmwave_only_spec();
  } else if (spec.policy_name == "ch2") {
    policy = aoi::sub6ghz_only_spec();
  } else if (spec.policy_name == "random") {
    policy = aoi::random_choice_spec();
  } else {
    throw CliError(kExitInvalid, "unknown policy " + spec.policy_name);
  }

  Csv csv(spec);
  echo_grid(csv, spec);
  csv.meta("policy", spec.policy_name);
  echo_sim(csv, spec);
  csv.header("policy,mean,std_err,horizon,seed");
  const auto r = aoi::simulate(policy, params, cost, sim_config(spec));
  csv.line(r.policy_name + "," + fmt(r.mean) + "," + fmt(r.std_error) + "," +
           std::to_string(spec.horizon) + "," + std::to_string(spec.seed));
  csv.write(spec.out_path);
  return kExitOk;
}

int run_compare(const RunSpec& spec) {
  const auto& params = spec.grid.front();
  const auto cost = aoi::parse_cost(spec.cost_text);
  const aoi::PolicyFn optimal = reference_policy(params, spec, cost);

  Csv csv(spec);
  echo_grid(csv, spec);
  echo_sim(csv, spec);
  csv.header("policy,mean,std_err,horizon,seed");
  for (const auto& r :
       aoi::compare_policies(params, cost, sim_config(spec), &optimal)) {
    csv.line(r.policy_name + "," + fmt(r.mean) + "," + fmt(r.std_error) +
             "," + std::to_string(spec.horizon) + "," +
             std::to_string(spec.seed));
  }
  csv.write(spec.out_path);
  return kExitOk;
}

int run_sweep_threshold(const RunSpec& spec) {
  std::vector<double> ps = spec.sweep_p;
  if (!spec.p_grid_text.empty()) {
    auto gen = parse_linear_grid(spec.p_grid_text);
    ps.insert(ps.end(), gen.begin(), gen.end());
  }
  if (ps.empty() || spec.sweep_d.empty()) {
    throw CliError(kExitInvalid,
                   "sweep-threshold needs --d and --p (or --p-grid)");
  }

  Csv csv(spec);
  {
    std::vector<std::string> ds, pp;
    for (int d : spec.sweep_d) ds.push_back(std::to_string(d));
    for (double p : ps) pp.push_back(fmt(p));
    csv.meta("grid-d", join(ds, ';'));
    csv.meta("grid-p", join(pp, ';'));
  }
  csv.meta("channel", "iid (q = 1-p)");
  csv.meta("eps", fmt(spec.eps));
  csv.header("d,p,threshold,divergent");
  for (int d : spec.sweep_d) {
    for (double p : ps) {
      const auto params = aoi::make_params(p, 1.0 - p, d);
      const auto r = aoi::solve_iid(params, spec.eps);
      const std::string& winner = r.argmin_candidates.front();
      std::string threshold;
      int divergent;
      if (winner == "beta1") {
        threshold = std::to_string(r.policy.lambda0);
        divergent = 0;
      } else {
        // Constant policies have no interior switch: always-Ch1 never
        // leaves the fast channel (threshold unbounded) and always-Ch2
        // never uses it at all.
        threshold = (winner == "always_ch1") ? "inf" : "1";
        divergent = 1;
      }
      csv.line(std::to_string(d) + "," + fmt(p) + "," + threshold + "," +
               std::to_string(divergent));
    }
  }
  csv.write(spec.out_path);
  return kExitOk;
}

int run_sweep_age(const RunSpec& spec) {
  if (spec.sweep_q.empty())
    throw CliError(kExitInvalid, "sweep-age needs --q with at least one value");
  const auto& base = spec.grid.front();
  const auto cost = aoi::parse_cost(spec.cost_text);

  Csv csv(spec);
  csv.meta("p", fmt(base.p));
  csv.meta("d", std::to_string(base.d));
  {
    std::vector<std::string> qs;
    for (double q : spec.sweep_q) qs.push_back(fmt(q));
    csv.meta("grid-q", join(qs, ';'));
  }
  echo_sim(csv, spec);
  csv.header("q,policy,mean,std_err,horizon,seed");
  for (double q : spec.sweep_q) {
    const auto params = aoi::make_params(base.p, q, base.d);
    const aoi::PolicyFn optimal = reference_policy(params, spec, cost);
    for (const auto& r :
         aoi::compare_policies(params, cost, sim_config(spec), &optimal)) {
      csv.line(fmt(q) + "," + r.policy_name + "," + fmt(r.mean) + "," +
               fmt(r.std_error) + "," + std::to_string(spec.horizon) + "," +
               std::to_string(spec.seed));
    }
  }
  csv.write(spec.out_path);
  return kExitOk;
}

int run(const RunSpec& spec) {
  if (spec.command == "classify") return run_classify(spec);
  if (spec.command == "solve") return run_solve(spec);
  if (spec.command == "oracle-check") return run_oracle_check(spec);
  if (spec.command == "simulate") return run_simulate(spec);
  if (spec.command == "compare") return run_compare(spec);
  if (spec.command == "sweep-threshold") return run_sweep_threshold(spec);
  if (spec.command == "sweep-age") return run_sweep_age(spec);
  throw CliError(kExitInvalid, "unknown command " + spec.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling toolkit"};
  app.require_subcommand(1);

  RunSpec spec;
  double p = -1, q = -1;
  int d = 0;

  auto add_point = [&](CLI::App* cmd, bool allow_grid) {
    cmd->add_option("--p", p, "Channel-1 OFF self-transition probability");
    cmd->add_option("--q", q, "Channel-1 ON self-transition probability");
    cmd->add_option("--d", d, "Channel-2 service time in slots");
    if (allow_grid)
      cmd->add_option("--grid-file", spec.grid_file,
                      "file of p,q,d triples (one per line)");
    cmd->add_option("--out", spec.out_path, "output CSV path (default stdout)");
  };
  auto add_sim = [&](CLI::App* cmd) {
    cmd->add_option("--cost", spec.cost_text, "linear or exp:<eta>");
    cmd->add_option("--seed", spec.seed, "master RNG seed");
    cmd->add_option("--horizon", spec.horizon, "slots per replication");
    cmd->add_option("--replications", spec.replications, "replication count");
    cmd->add_option("--warmup", spec.warmup,
                    "warmup slots (-1 = mixing-based default)");
    cmd->add_option("--age-cap", spec.age_cap,
                    "age cap for numeric reference policies");
    cmd->add_option("--tol", spec.tol, "numeric solver tolerance");
    cmd->add_option("--eps", spec.eps, "bisection tolerance");
  };

  auto* classify = app.add_subcommand("classify", "region classification");
  add_point(classify, true);
  classify->add_option("--alpha", spec.alpha,
                       "discount factor (0 = undiscounted)");

  auto* solve = app.add_subcommand("solve", "closed-form optimal policy");
  add_point(solve, true);
  solve->add_option("--eps", spec.eps, "bisection tolerance");

  auto* oracle = app.add_subcommand(
      "oracle-check", "closed form vs numeric average-cost solver");
  add_point(oracle, true);
  oracle->add_option("--age-cap", spec.age_cap, "truncation age cap");
  oracle->add_option("--tol", spec.tol, "numeric solver tolerance");
  oracle->add_option("--eps", spec.eps, "bisection tolerance");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo, one policy");
  add_point(simulate, false);
  simulate->add_option("--policy", spec.policy_name,
                       "age-optimal | ch1 | ch2 | random");
  add_sim(simulate);

  auto* compare =
      app.add_subcommand("compare", "Monte Carlo, all four contenders");
  add_point(compare, false);
  add_sim(compare);

  auto* sweep_thr = app.add_subcommand(
      "sweep-threshold", "optimal switch age across an i.i.d. p grid");
  sweep_thr->add_option("--d", spec.sweep_d, "service times to sweep");
  sweep_thr->add_option("--p", spec.sweep_p, "explicit p values");
  sweep_thr->add_option("--p-grid", spec.p_grid_text, "lo:hi:count p grid");
  sweep_thr->add_option("--eps", spec.eps, "bisection tolerance");
  sweep_thr->add_option("--out", spec.out_path, "output CSV path");

  auto* sweep_age = app.add_subcommand(
      "sweep-age", "policy comparison across a q grid at fixed p, d");
  sweep_age->add_option("--p", p, "Channel-1 OFF self-transition probability");
  sweep_age->add_option("--d", d, "Channel-2 service time in slots");
  sweep_age->add_option("--q", spec.sweep_q, "q values to sweep");
  add_sim(sweep_age);
  sweep_age->add_option("--out", spec.out_path, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error," << kExitInvalid << "," << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    spec.command = cmd->get_name();

    const bool needs_point = spec.command != "sweep-threshold";
    if (needs_point) {
      if (!spec.grid_file.empty()) {
        if (p >= 0 || q >= 0 || d != 0) {
          throw CliError(kExitInvalid,
                         "give either --grid-file or --p/--q/--d, not both");
        }
        spec.grid = read_grid_file(spec.grid_file);
      } else if (spec.command == "sweep-age") {
        if (p < 0 || d == 0)
          throw CliError(kExitInvalid, "sweep-age needs --p and --d");
        // q is validated per grid point; 0.5 placeholder keeps make_params
        // happy for the base triple.
        spec.grid = {aoi::make_params(p, 0.5, d)};
      } else {
        if (p < 0 || q < 0 || d == 0)
          throw CliError(kExitInvalid, "need --p, --q and --d");
        spec.grid = {aoi::make_params(p, q, d)};
      }
    }

    return run(spec);
  } catch (const CliError& e) {
    std::cerr << "error," << e.code << "," << e.what() << "\n";
    return e.code;
  } catch (const aoi::BracketError& e) {
    std::cerr << "error," << kExitBracket << "," << e.what() << "\n";
    return kExitBracket;
  } catch (const aoi::ConvergenceError& e) {
    std::cerr << "error," << kExitNoConverge << "," << e.what() << "\n";
    return kExitNoConverge;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error," << kExitInvalid << "," << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error," << kExitInvalid << "," << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error," << kExitNoConverge << "," << e.what() << "\n";
    return kExitNoConverge;
  }
}
