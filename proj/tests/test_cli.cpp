// Exercises the installed CLI binary end to end. The binary path arrives in
// the QBOOT_CLI environment variable (set by ctest).

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* p = std::getenv("QBOOT_CLI");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "qboot_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd =
      cli_path() + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("help lists every documented flag") {
  const auto r = run_cli("--help-all");
  CHECK(r.exit_code == 0);
  for (const char* flag :
       {"simulate", "clt", "bahadur", "boot-consistency", "inconsistency", "zrho", "lrvar",
        "--config", "--n-grid", "--replicates", "--resamples", "--seed", "--p", "--process",
        "--phi", "--weights", "--marginal", "--rho", "--m", "--mean", "--sd", "--schedule",
        "--l", "--c", "--gamma", "--out", "--format", "--threads", "--count", "--inner-count",
        "--sigma-lr", "--fixed-stream", "--n", "--oracle-n"}) {
    INFO(std::string(flag));
    CHECK(r.out.find(flag) != std::string::npos);
  }
}

TEST_CASE("simulate is deterministic and keeps stdout clean") {
  const auto a = run_cli("simulate --phi 0.5 --n 100 --seed 1");
  const auto b = run_cli("simulate --phi 0.5 --n 100 --seed 1");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# process=") == 0);
  CHECK(a.out.find("seed=1") != std::string::npos);
  CHECK(a.err.find("[simulate]") != std::string::npos);
  const auto c = run_cli("simulate --phi 0.5 --n 100 --seed 2");
  CHECK(a.out != c.out);
}

TEST_CASE("small clt run emits a csv report") {
  const auto r = run_cli(
      "clt --rho 1 --phi 0 --n-grid 64,128 --replicates 50 --seed 7 "
      "--oracle-n 512 --oracle-replicates 200 --limit-count 1000");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("experiment,n,metric,value,stderr,seed", 0) == 0);
  CHECK(r.out.find("clt,64,ks_to_limit,") != std::string::npos);
  CHECK(r.out.find("clt,128,ks_to_limit,") != std::string::npos);
  CHECK(r.err.find("n=64") != std::string::npos);
}

TEST_CASE("invalid flag values exit with code 2 and name the invariant") {
  CHECK(run_cli("clt --rho -1 --n-grid 64 --replicates 10").exit_code == 2);
  const auto phi = run_cli("clt --phi 1.5 --n-grid 64 --replicates 10");
  CHECK(phi.exit_code == 2);
  CHECK(phi.err.find("|phi|") != std::string::npos);
  const auto ell = run_cli(
      "boot-consistency --schedule fixed --l 500 --n-grid 64,128 --replicates 10 --resamples 10");
  CHECK(ell.exit_code == 2);
  CHECK(ell.err.find("1 <= l <= n") != std::string::npos);
  CHECK(run_cli("clt --p 1.5 --n-grid 64 --replicates 10").exit_code == 2);
  CHECK(run_cli("clt --no-such-flag").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("reports are identical across runs and thread counts") {
  const std::string base =
      "boot-consistency --phi 0.5 --n-grid 64 --replicates 20 --resamples 25 --seed 11 ";
  const auto t1 = run_cli(base + "--threads 1");
  const auto t2 = run_cli(base + "--threads 2");
  CHECK(t1.exit_code == 0);
  CHECK(t1.out == t2.out);
}

TEST_CASE("json report embeds a config that reproduces the run") {
  const fs::path dir = fs::temp_directory_path() / "qboot_cli_test";
  fs::create_directories(dir);
  const fs::path report = dir / "zrho_report.json";
  const std::string args =
      "zrho --rho 2 --m 0.5 --count 40 --inner-count 200 --sigma-lr 1 --seed 3 --format json";
  const auto a = run_cli(args + " --out " + report.string());
  CHECK(a.exit_code == 0);

  auto parsed = nlohmann::json::parse(slurp(report));
  CHECK(parsed.contains("config"));
  CHECK(parsed.at("config").at("experiment") == "zrho");

  // Re-run from the report file itself; rows must match exactly.
  const auto b = run_cli("zrho --config " + report.string() +
                         " --sigma-lr 1 --format json");
  CHECK(b.exit_code == 0);
  auto rerun = nlohmann::json::parse(b.out);
  CHECK(parsed.at("rows").dump() == rerun.at("rows").dump());
  CHECK(parsed.at("config_hash") == rerun.at("config_hash"));
}

TEST_CASE("flags override config-file values") {
  const fs::path dir = fs::temp_directory_path() / "qboot_cli_test";
  fs::create_directories(dir);
  const fs::path cfg = dir / "override.json";
  {
    std::ofstream out(cfg);
    out << R"({"n_grid":[64],"replicates":30,"seed":100,)"
        << R"("process":{"kind":"iid","marginal":{"kind":"power_local","rho":2.0,"m":0.5}},)"
        << R"("plan":{"schedule":{"kind":"power","c":1.0,"gamma":0.5},"resamples":10,"seed":0}})";
  }
  const std::string common = " --count 30 --inner-count 100 --sigma-lr 1 ";
  const auto from_file = run_cli("zrho --config " + cfg.string() + common);
  const auto overridden = run_cli("zrho --config " + cfg.string() + common + "--seed 999");
  CHECK(from_file.exit_code == 0);
  CHECK(overridden.exit_code == 0);
  CHECK(from_file.out.find(",100\n") != std::string::npos);
  CHECK(overridden.out.find(",999\n") != std::string::npos);
  CHECK(from_file.out != overridden.out);

  const auto bad = run_cli("zrho --config " + cfg.string() + common + "--rho 0");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("lrvar subcommand reports sigma2") {
  const auto r = run_cli("lrvar --phi 0.5 --oracle-n 1024 --oracle-replicates 300 --seed 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("lrvar_sigma2") != std::string::npos);
  CHECK(r.out.find("lrvar_degenerate_flag,0") != std::string::npos);
}
