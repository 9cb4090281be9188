/// @file test_cli.cpp
/// @brief End-to-end checks of the command-line tool via subprocesses.
///
/// Drives the installed binary (path in NSMEM_CLI_BIN, exported by the test
/// harness) through its user-facing contract: strict config validation with
/// the offending key named, a populated output directory, byte-identical
/// reruns up to the wall-clock stamp, environment-variable overrides, and
/// argument validation.  Each case runs in a fresh scratch directory.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <unistd.h>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof buf, p)) r.output.append(buf, got);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scratch_dir() {
  char tmpl[] = "/tmp/nsmem_cli_XXXXXX";
  char* d = mkdtemp(tmpl);
  REQUIRE(d != nullptr);
  return std::string(d);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  REQUIRE(os.good());
  os << text;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool exists(const std::string& path) {
  struct stat st{};
  return ::stat(path.c_str(), &st) == 0;
}

/// manifest comparison ignores the wall-clock stamp, the one fluid field
std::string drop_wall_clock(const std::string& text) {
  std::istringstream is(text);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line))
    if (line.find("wall_clock_seconds") == std::string::npos) os << line << '\n';
  return os.str();
}

const char* cli() { return std::getenv("NSMEM_CLI_BIN"); }

const std::string kSmallConfig = R"({
  "noise": {"epsilon": 0.5, "seed": 3},
  "integration": {"t_end": 0.2}
})";

}  // namespace

// ============================================================================
// Config validation
// ============================================================================

TEST_CASE("cli: unknown config keys abort with the key named") {
  const char* bin = cli();
  if (!bin) return;  // harness exports the path; nothing to do standalone
  const std::string dir = scratch_dir();
  write_file(dir + "/bad.json", R"({"grid": {"M": 12}})");
  RunResult r = run(std::string(bin) + " simulate --config " + dir +
                    "/bad.json --out " + dir + "/out");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("grid.M") != std::string::npos);

  write_file(dir + "/bad2.json", R"({"grdi": {}})");
  RunResult r2 = run(std::string(bin) + " simulate --config " + dir +
                     "/bad2.json --out " + dir + "/out");
  CHECK(r2.exit_code != 0);
  CHECK(r2.output.find("grdi") != std::string::npos);

  write_file(dir + "/bad3.json", R"({"schema_version": 2})");
  RunResult r3 = run(std::string(bin) + " simulate --config " + dir +
                     "/bad3.json --out " + dir + "/out");
  CHECK(r3.exit_code != 0);
}

TEST_CASE("cli: ill-typed values are rejected") {
  const char* bin = cli();
  if (!bin) return;
  const std::string dir = scratch_dir();
  write_file(dir + "/bad.json", R"({"grid": {"N": "many"}})");
  RunResult r = run(std::string(bin) + " simulate --config " + dir +
                    "/bad.json --out " + dir + "/out");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("grid.N") != std::string::npos);
}

// ============================================================================
// Simulation outputs
// ============================================================================

TEST_CASE("cli: simulate populates the output directory") {
  const char* bin = cli();
  if (!bin) return;
  const std::string dir = scratch_dir();
  write_file(dir + "/cfg.json", kSmallConfig);
  RunResult r = run(std::string(bin) + " simulate --config " + dir +
                    "/cfg.json --out " + dir + "/run");
  CHECK(r.exit_code == 0);
  CHECK(exists(dir + "/run/trajectory.csv"));
  CHECK(exists(dir + "/run/state_final.ckpt"));
  CHECK(exists(dir + "/run/manifest.json"));
  const std::string csv = slurp(dir + "/run/trajectory.csv");
  CHECK(csv.rfind("t,v_H,v_V,eta_M,psi_H,z,beta1,diss_residual,res_scale\n",
                  0) == 0);
  const std::string manifest = slurp(dir + "/run/manifest.json");
  CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
  CHECK(manifest.find("wall_clock_seconds") != std::string::npos);
}

TEST_CASE("cli: reruns are byte-identical up to the wall clock") {
  const char* bin = cli();
  if (!bin) return;
  const std::string dir = scratch_dir();
  write_file(dir + "/cfg.json", kSmallConfig);
  RunResult r1 = run(std::string(bin) + " simulate --config " + dir +
                     "/cfg.json --out " + dir + "/a");
  RunResult r2 = run(std::string(bin) + " simulate --config " + dir +
                     "/cfg.json --out " + dir + "/b");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir + "/a/trajectory.csv") == slurp(dir + "/b/trajectory.csv"));
  CHECK(slurp(dir + "/a/state_final.ckpt") ==
        slurp(dir + "/b/state_final.ckpt"));
  CHECK(drop_wall_clock(slurp(dir + "/a/manifest.json")) ==
        drop_wall_clock(slurp(dir + "/b/manifest.json")));
}

TEST_CASE("cli: the seed override environment variable changes the draw") {
  const char* bin = cli();
  if (!bin) return;
  const std::string dir = scratch_dir();
  write_file(dir + "/cfg.json", kSmallConfig);
  RunResult r1 = run(std::string(bin) + " simulate --config " + dir +
                     "/cfg.json --out " + dir + "/a");
  RunResult r2 = run("env NSMEM_SEED=9001 " + std::string(bin) +
                     " simulate --config " + dir + "/cfg.json --out " + dir +
                     "/b");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir + "/a/trajectory.csv") != slurp(dir + "/b/trajectory.csv"));
  // the manifest records the effective seed
  const std::string manifest = slurp(dir + "/b/manifest.json");
  CHECK(manifest.find("9001") != std::string::npos);

  // flag beats environment
  RunResult r3 = run("env NSMEM_SEED=9001 " + std::string(bin) +
                     " simulate --config " + dir + "/cfg.json --seed 3 --out " +
                     dir + "/c");
  REQUIRE(r3.exit_code == 0);
  CHECK(slurp(dir + "/c/trajectory.csv") == slurp(dir + "/a/trajectory.csv"));
}

// ============================================================================
// Other subcommands and argument validation
// ============================================================================

TEST_CASE("cli: split writes the decomposition table") {
  const char* bin = cli();
  if (!bin) return;
  const std::string dir = scratch_dir();
  write_file(dir + "/cfg.json", kSmallConfig);
  RunResult r = run(std::string(bin) + " split --config " + dir +
                    "/cfg.json --out " + dir + "/run");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir + "/run/split.csv");
  CHECK(csv.rfind("t,psi2_full,psi2_lin,psi2_nonlin,direct_err\n", 0) == 0);
}

TEST_CASE("cli: verify rejects an unknown level") {
  const char* bin = cli();
  if (!bin) return;
  const std::string dir = scratch_dir();
  RunResult r = run(std::string(bin) + " verify --level bogus --out " + dir +
                    "/v");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("level") != std::string::npos);
}

TEST_CASE("cli: missing subcommand or config file fail cleanly") {
  const char* bin = cli();
  if (!bin) return;
  RunResult none = run(std::string(bin));
  CHECK(none.exit_code != 0);
  const std::string dir = scratch_dir();
  RunResult gone = run(std::string(bin) + " simulate --config " + dir +
                       "/absent.json --out " + dir + "/x");
  CHECK(gone.exit_code != 0);
}
