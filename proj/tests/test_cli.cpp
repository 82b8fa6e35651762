#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "bsl/io.hpp"
#include "bsl/manifest.hpp"

using namespace bsl;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "bsl_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(BSL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

struct Fixture {
  Fixture() { fs::create_directories(kDir); }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "table output and manifest") {
  const std::string out = (kDir / "t1.csv").string();
  REQUIRE(run("table --rule bayesian --d 3 --noise 0.3 --rounds 0 --out " + quote(out)) == 0);
  const auto rows = csv_rows(read_file(out));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"rule", "d", "noise", "round", "error_prob", "unreliable"});
  CHECK(std::stod(rows[1][4]) == doctest::Approx(0.3).epsilon(1e-15));

  const RunManifest m = RunManifest::from_json(read_json_file(out + ".manifest.json"));
  REQUIRE(m.outputs.size() == 1);
  CHECK(m.outputs[0].sha256 == sha256_hex(read_file(out)));
  CHECK(m.config["d"] == 3);

  // rerun from the manifest alone
  fs::remove(out);
  std::string cmd;
  for (std::size_t i = 1; i < m.argv.size(); ++i) cmd += quote(m.argv[i]) + " ";
  REQUIRE(run(cmd) == 0);
  CHECK(sha256_hex(read_file(out)) == m.outputs[0].sha256);
}

TEST_CASE_FIXTURE(Fixture, "unreliable entries are flagged") {
  const std::string out = (kDir / "t2.csv").string();
  REQUIRE(run("table --rule bayesian --d 5 --noise 0.15 --rounds 4 --out " + quote(out)) == 0);
  const auto rows = csv_rows(read_file(out));
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK((rows[i][5] == "1") == (std::stod(rows[i][4]) < 1e-13));
  const RunManifest m = RunManifest::from_json(read_json_file(out + ".manifest.json"));
  CHECK(m.instability.size() == 1);
}

TEST_CASE_FIXTURE(Fixture, "curve columns are consistent") {
  const std::string out = (kDir / "c.csv").string();
  REQUIRE(run("curve --d 3 --d 7 --noise 0.3 --rounds 3 --out " + quote(out)) == 0);
  const auto rows = csv_rows(read_file(out));
  CHECK(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double p = std::stod(rows[i][4]);
    CHECK(std::abs(std::stod(rows[i][5]) - std::log(-std::log(p))) < 1e-9);
  }
  CHECK(rows[8][1] == "7");
  CHECK(std::abs(std::stod(rows[8][4]) - 4.4e-6) / 4.4e-6 < 0.1);
}

TEST_CASE_FIXTURE(Fixture, "bounds") {
  const std::string out = (kDir / "b.csv").string();
  REQUIRE(run("bounds --variant undirected --d 5 --delta0 0.15 --rounds 4 --out " + quote(out)) == 0);
  const auto rows = csv_rows(read_file(out));
  CHECK(rows[0] == std::vector<std::string>{"variant", "d", "delta0", "t", "value"});
  CHECK(std::stod(rows[2][4]) == doctest::Approx(0.109519).epsilon(1e-5));
}

TEST_CASE_FIXTURE(Fixture, "simulate is digest stable") {
  const std::string graph = std::string(BSL_DATA_DIR) + "/tree_d5_depth5.json";
  std::string digest[2];
  for (int k = 0; k < 2; ++k) {
    const std::string out = (kDir / ("sim" + std::to_string(k))).string();
    REQUIRE(run("simulate --graph " + quote(graph) +
                " --focus 0 --rounds 2 --samples 100000 --seed 1 --out " + quote(out)) == 0);
    digest[k] = sha256_hex(read_file(out + ".csv"));
    const Json result = read_json_file(out + ".json");
    CHECK(result["seed"] == 1);
    CHECK(result["rule"] == "bayesian");
  }
  CHECK(digest[0] == digest[1]);
}

TEST_CASE("exit codes") {
  CHECK(run("table --noise 1.5") == 2);
  CHECK(run("table --no-such-flag") == 2);
  CHECK(run("bounds --variant sideways") == 2);
  CHECK(run("simulate --generator regular:3:2 --graph x.json") == 2);
  CHECK(run("table --rule bayesian --d 9 --rounds 4") == 3);
  CHECK(run("verify --max-nodes 5 --max-t 2 --invariant-t 2") == 0);
}
