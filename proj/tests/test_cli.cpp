#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end tests of the installed command-line binary (path injected by
// the build system).

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const std::string& tag) {
  const std::string out_path = "cli_" + tag + ".out";
  const std::string err_path = "cli_" + tag + ".err";
  const std::string cmd =
      std::string(AOI_CLI_PATH) + " " + args + " > " + out_path + " 2> " +
      err_path;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// First non-comment line = column header; the rest are data rows.
std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  for (auto& l : lines_of(text))
    if (!l.empty() && l[0] != '#') rows.push_back(l);
  return rows;
}

}  // namespace

TEST_CASE("classify emits the documented row byte for byte") {
  auto r = run_cli("classify --p 0.5 --q 0.5 --d 10", "classify");
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "p,q,d,F,G,H,region");
  CHECK(rows[1] == "0.5,0.5,10,-8,-4,-8,B1");
}

TEST_CASE("header carries the artifact version and parameter echo") {
  auto r = run_cli("classify --p 0.5 --q 0.5 --d 10", "header");
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0].find("# artifact: aoi-scheduler") == 0);
  CHECK(lines[1] == "# command: classify");
  bool has_grid = false;
  for (auto& l : lines)
    if (l.find("# grid-points: 0.5,0.5,10") == 0) has_grid = true;
  CHECK(has_grid);
}

TEST_CASE("identical invocations give byte-identical output") {
  const std::string args = "solve --p 0.95 --q 0.05 --d 10";
  auto a = run_cli(args, "rep_a");
  auto b = run_cli(args, "rep_b");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());

  const std::string sim_args =
      "compare --p 0.9 --q 0.3 --d 5 --horizon 20000 --replications 3 "
      "--seed 11";
  auto c = run_cli(sim_args, "rep_c");
  auto d = run_cli(sim_args, "rep_d");
  CHECK(c.exit_code == 0);
  CHECK(c.out == d.out);
}

TEST_CASE("solve schema and region content") {
  auto r = run_cli("solve --p 0.95 --q 0.05 --d 10", "solve");
  REQUIRE(r.exit_code == 0);
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] ==
        "p,q,d,region,delta_opt,dir0,lambda0,dir1,lambda1,lambda1_set,"
        "argmin_candidates");
  // Stable fields of the known optimum: region, directions, thresholds.
  CHECK(rows[1].find(",B3,") != std::string::npos);
  CHECK(rows[1].find(",nondecreasing,12,nondecreasing,11,{11..inf},beta1") !=
        std::string::npos);
}

TEST_CASE("invalid parameters exit with code 2 and a machine-readable line") {
  auto r = run_cli("solve --p 1.5 --q 0.5 --d 10", "badp");
  CHECK(r.exit_code == 2);
  CHECK(r.err.rfind("error,2,", 0) == 0);

  auto missing = run_cli("solve --q 0.5 --d 10", "missing");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.rfind("error,2,", 0) == 0);

  auto badflag = run_cli("solve --p 0.5 --q 0.5 --d 10 --bogus 1", "flag");
  CHECK(badflag.exit_code == 2);
  CHECK(badflag.err.rfind("error,2,", 0) == 0);

  auto badsub = run_cli("frobnicate", "sub");
  CHECK(badsub.exit_code == 2);
}

TEST_CASE("oracle-check passes on a small grid and reports the max error") {
  const std::string grid = "cli_grid.csv";
  {
    std::ofstream g(grid);
    g << "# p,q,d\n";
    g << "0.5,0.5,10\n";
    g << "0.95,0.05,10\n";
    g << "0.5 0.2 2\n";  // whitespace separation also accepted
  }
  auto r = run_cli("oracle-check --grid-file " + grid + " --age-cap 1000",
                   "oracle");
  std::remove(grid.c_str());
  REQUIRE(r.exit_code == 0);
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 4);  // header + 3 points
  CHECK(rows[0] == "p,q,d,region,delta_opt,rvi_gain,rel_err");
  bool has_max = false;
  for (auto& l : lines_of(r.out))
    if (l.rfind("# max-rel-err: ", 0) == 0) has_max = true;
  CHECK(has_max);
}

TEST_CASE("--out writes the same bytes as stdout, LF-terminated") {
  const std::string path = "cli_outfile.csv";
  auto to_stdout = run_cli("classify --p 0.7 --q 0.3 --d 4", "of_a");
  auto to_file =
      run_cli("classify --p 0.7 --q 0.3 --d 4 --out " + path, "of_b");
  CHECK(to_file.exit_code == 0);
  CHECK(to_file.out.empty());
  const std::string written = slurp(path);
  std::remove(path.c_str());
  CHECK(written == to_stdout.out);
  CHECK(written.find('\r') == std::string::npos);
  CHECK(!written.empty());
  CHECK(written.back() == '\n');
}

TEST_CASE("sweep-threshold marks constant policies as divergent") {
  auto r = run_cli(
      "sweep-threshold --d 10 --p 0.85 0.905 0.92 0.95 0.99", "sweep");
  REQUIRE(r.exit_code == 0);
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "d,p,threshold,divergent");
  // Below the critical failure probability the fast channel is kept forever.
  CHECK(rows[1].find(",inf,1") != std::string::npos);
  // Above it the switch age is finite and shrinks as p grows.
  CHECK(rows[2].find(",96,0") != std::string::npos);
  CHECK(rows[3].find(",28,0") != std::string::npos);
  CHECK(rows[4].find(",12,0") != std::string::npos);
  // Far above, the fast channel is abandoned altogether.
  CHECK(rows[5].find(",1,1") != std::string::npos);
}

TEST_CASE("simulate on the slow channel is the exact cycle average") {
  auto r = run_cli(
      "simulate --p 0.8 --q 0.3 --d 10 --policy ch2 --horizon 100000 "
      "--warmup 100 --replications 2 --seed 9",
      "simch2");
  REQUIRE(r.exit_code == 0);
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "policy,mean,std_err,horizon,seed");
  CHECK(rows[1] == "sub-6GHz-only,14.5,0,100000,9");
}

TEST_CASE("grid files fan out into one row per point") {
  const std::string grid = "cli_grid2.csv";
  {
    std::ofstream g(grid);
    g << "0.5,0.5,10\n0.95,0.05,10\n";
  }
  auto r = run_cli("classify --grid-file " + grid, "grid");
  std::remove(grid.c_str());
  REQUIRE(r.exit_code == 0);
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].substr(0, 11) == "0.5,0.5,10,");
  CHECK(rows[2].find(",B3") != std::string::npos);
}

TEST_CASE("sweep-age emits all four policies per grid point") {
  auto r = run_cli(
      "sweep-age --p 0.9 --d 4 --q 0.2 0.8 --horizon 20000 --replications 2 "
      "--seed 17",
      "sweepage");
  REQUIRE(r.exit_code == 0);
  auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 9);  // header + 2 q values x 4 policies
  CHECK(rows[0] == "q,policy,mean,std_err,horizon,seed");
  CHECK(rows[1].rfind("0.2", 0) == 0);
  CHECK(rows[1].find("Age-optimal") != std::string::npos);
  CHECK(rows[5].rfind("0.8", 0) == 0);
  // Deterministic policy order within each grid point.
  CHECK(rows[2].find("mmWave-only") != std::string::npos);
  CHECK(rows[3].find("sub-6GHz-only") != std::string::npos);
  CHECK(rows[4].find("Random") != std::string::npos);
}
