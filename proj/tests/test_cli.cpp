#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

// Drives the installed-style binary end to end through a shell.  The path is
// injected by the build so the test never guesses at layout.

namespace fs = std::filesystem;

namespace {

const std::string cli = WCHAIN_CLI_PATH;

fs::path work_dir() {
  const fs::path d = fs::temp_directory_path() / "wchain_cli_test";
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      cli + " " + args + " > /dev/null 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// drops the timestamp line, the only part allowed to differ between reruns
std::string strip_generated(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.rfind("# generated:", 0) == 0) continue;
    if (line.find("\"generated\":") != std::string::npos) continue;
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string fieldv;
    while (std::getline(ls, fieldv, ',')) row.push_back(fieldv);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("verify command passes on defaults") {
  const fs::path out = work_dir() / "verify.csv";
  const int rc = run_cli("verify --sites 6 --boson-cutoff 4 --out " +
                         out.string());
  CHECK(rc == 0);
  const std::string text = slurp(out);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
  CHECK(text.find("coupling residual") != std::string::npos);
}

TEST_CASE("reruns are byte-identical and headers round-trip as configs") {
  const fs::path a = work_dir() / "sweep_a.csv";
  const std::string flags =
      "sweep --sites 4 --boson-cutoff 2 --grid-start 0.95 --grid-end 0.98"
      " --grid-steps 3 --threads 1 --out " + a.string();
  REQUIRE(run_cli(flags) == 0);
  const std::string first = slurp(a);
  REQUIRE(run_cli(flags) == 0);
  CHECK(strip_generated(slurp(a)) == strip_generated(first));

  // first line is "# {resolved config}"; feed it back as --config with no
  // other flags and the run must reproduce itself
  std::istringstream in(first);
  std::string header;
  REQUIRE(std::getline(in, header));
  REQUIRE(header.rfind("# ", 0) == 0);
  const fs::path cfg = work_dir() / "roundtrip.json";
  {
    std::ofstream f(cfg, std::ios::trunc);
    f << header.substr(2) << "\n";
  }
  const auto parsed = nlohmann::json::parse(header.substr(2));
  CHECK(parsed.at("command") == "sweep");
  CHECK(parsed.at("sites") == 4);

  REQUIRE(run_cli("--config " + cfg.string()) == 0);
  CHECK(strip_generated(slurp(a)) == strip_generated(first));
}

TEST_CASE("explicit flags take precedence over the config file") {
  const fs::path cfg = work_dir() / "override.json";
  {
    std::ofstream f(cfg, std::ios::trunc);
    f << R"({"command":"circuit","phidc-over-pi":0.5,"format":"csv"})" << "\n";
  }
  const fs::path out = work_dir() / "circuit_override.csv";
  REQUIRE(run_cli("--config " + cfg.string() + " --phidc-over-pi 0.0 --out " +
                  out.string()) == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 2);  // column header + one record
  CHECK(rows[1][0] == "0");   // phi_dc_over_pi came from the flag
}

TEST_CASE("rotating-frame preparation reaches unit fidelity at 25 ns") {
  const fs::path out = work_dir() / "prepare_rwa.csv";
  const int rc = run_cli(
      "prepare --betap-mhz 10 --shape rwa --sites 4 --boson-cutoff 2"
      " --tmax-ns 26 --dt-ps 5 --out " + out.string());
  REQUIRE(rc == 0);
  const std::string text = slurp(out);
  CHECK(text.find("# tau_prep_ns = 25") != std::string::npos);

  const auto rows = csv_rows(text);
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"t_ns", "fidelity",
                                            "vacuum_population",
                                            "norm_drift"});
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] != "25") continue;
    found = true;
    CHECK(std::abs(std::stod(rows[i][1]) - 1.0) <= 1e-9);
    CHECK(std::stod(rows[i][3]) < 1e-9);
  }
  CHECK(found);
}

TEST_CASE("json output is well formed and carries the mapping record") {
  const fs::path out = work_dir() / "circuit.json";
  REQUIRE(run_cli("circuit --format json --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("config").at("command") == "circuit");
  const auto& cols = j.at("columns");
  const auto& row = j.at("rows").at(0);
  REQUIRE(cols.size() == row.size());
  double tau = -1.0;
  double g = -1.0;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "tau_prep_ns") tau = row[i].get<double>();
    if (cols[i] == "g") g = row[i].get<double>();
  }
  CHECK(tau == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(g == doctest::Approx(0.661295).epsilon(1e-5));
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("bogus") == 2);
  CHECK(run_cli("spectrum --no-such-flag 1") == 2);
  CHECK(run_cli("spectrum --lambda 0.3 --phidc-over-pi 0.9") == 2);
  CHECK(run_cli("prepare --shape triangle") == 2);
  CHECK(run_cli("sweep --format yaml") == 2);
  const fs::path cfg = work_dir() / "bad_key.json";
  {
    std::ofstream f(cfg, std::ios::trunc);
    f << R"({"command":"circuit","no-such-key":1})" << "\n";
  }
  CHECK(run_cli("--config " + cfg.string()) == 2);
}

TEST_CASE("numeric failures exit with status 1") {
  // grid entirely below the crossing: no sign change to bracket
  CHECK(run_cli("critical --sites 4 --boson-cutoff 2 --grid-start 0.1"
                " --grid-end 0.3 --grid-steps 3 --threads 1") == 1);
  // flux window closes at phi = pi, the mapped hopping vanishes
  CHECK(run_cli("spectrum --phidc-over-pi 1.0 --sites 4 --boson-cutoff 2") ==
        1);
  // unreachable coupling target
  CHECK(run_cli("spectrum --lambda 1e-9 --sites 4 --boson-cutoff 2") == 1);
}

TEST_CASE("critical command localizes the crossing on a small ring") {
  const fs::path out = work_dir() / "critical.csv";
  const int rc = run_cli(
      "critical --sites 4 --boson-cutoff 3 --grid-start 0.9 --grid-end 0.99"
      " --grid-steps 4 --threads 1 --out " + out.string());
  REQUIRE(rc == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "lambda_c");
  const double lambda_c = std::stod(rows[1][0]);
  const double phi = std::stod(rows[1][1]);
  // small-ring, low-cutoff crossing lands near the large-system value
  CHECK(lambda_c > 0.5);
  CHECK(lambda_c < 1.1);
  CHECK(phi > 0.9);
  CHECK(phi < 0.99);
}
