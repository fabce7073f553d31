#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "seqprod/cli.hpp"
#include "seqprod/io.hpp"

using namespace seqprod;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"seqprod"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) { return std::string(SEQPROD_FIXTURE_DIR) + "/" + name; }

Json certificate_of(const std::string& name) {
  const Run r = cli({"certify", fixture(name), "--json"});
  REQUIRE(r.code == kExitPass);
  return Json::parse(r.out)["certificate"];
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}).code == kExitPass);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"verify"}).code == kExitUsage);
  CHECK(cli({"verify", "nothing"}).code == kExitUsage);
  CHECK(cli({"verify", "effects", "--seed", "abc"}).code == kExitUsage);
  CHECK(cli({"verify", "effects", "--samples", "0"}).code == kExitUsage);
  CHECK(cli({"verify", "effects", "--dims", "2,,3"}).code == kExitUsage);
  CHECK(cli({"verify", "effects", "--dims", "9"}).code == kExitUsage);
  CHECK(cli({"verify", "effects", "--tol", "nonsense=1e-3"}).code == kExitUsage);
  CHECK(cli({"verify", "effects", "--tol", "unital"}).code == kExitUsage);
  const Run unknown = cli({"counterexample", "ax3-nothing"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("ax3-nothing") != std::string::npos);
}

TEST_CASE("verify a suite") {
  const Run r = cli({"verify", "effects", "--dims", "3", "--samples", "20"});
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("PASS effects/unit_laws [3]") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("JSON reports are versioned and deterministic") {
  const Run a = cli({"verify", "linalg", "--seed", "0x2a", "--samples", "10", "--dims", "2;2,1", "--json"});
  const Run b = cli({"verify", "linalg", "--seed", "42", "--samples", "10", "--dims", "2;2,1", "--json"});
  REQUIRE(a.code == kExitPass);
  CHECK(a.out == b.out);
  const Json j = Json::parse(a.out);
  CHECK(j["schema"] == 1);
  CHECK(j["command"] == "verify");
  CHECK(j["config"]["seed"] == 42);
  CHECK(j["passed"] == true);

  const Run c = cli({"verify", "linalg", "--seed", "43", "--samples", "10", "--dims", "2;2,1", "--json"});
  CHECK(c.out != a.out);
}

TEST_CASE("SEQPROD_SEED supplies the default seed") {
  ::setenv("SEQPROD_SEED", "77", 1);
  const Run env = cli({"verify", "linalg", "--samples", "5", "--dims", "2", "--json"});
  ::unsetenv("SEQPROD_SEED");
  const Run flag = cli({"verify", "linalg", "--samples", "5", "--dims", "2", "--json", "--seed", "77"});
  CHECK(env.out == flag.out);
  CHECK(Json::parse(env.out)["config"]["seed"] == 77);
  CHECK(Json::parse(cli({"verify", "linalg", "--samples", "5", "--dims", "2", "--json"}).out)["config"]["seed"] == 1504);
}

TEST_CASE("--out writes the report") {
  const auto path = std::filesystem::temp_directory_path() / "seqprod_cli_report.json";
  std::filesystem::remove(path);
  const Run r = cli({"verify", "effects", "--samples", "5", "--dims", "2", "--out", path.string()});
  CHECK(r.code == kExitPass);
  const Json j = load_json(path);
  CHECK(j["schema"] == 1);
  CHECK(j["suite"] == "effects");
  std::filesystem::remove(path);
}

TEST_CASE("tolerance overrides are recorded") {
  const Run r = cli({"verify", "effects", "--samples", "5", "--dims", "2", "--json", "--tol", "unital=1e-7"});
  CHECK(r.code == kExitPass);
  CHECK(Json::parse(r.out)["config"]["tolerance_overrides"]["unital"] == 1e-7);
}

TEST_CASE("counterexample ax2-sign") {
  const Run r = cli({"counterexample", "ax2-sign", "--samples", "40", "--json"});
  CHECK(r.code == kExitPass);
  const Json j = Json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["witness_reproduced"] == true);
  CHECK(j["witness"]["gap"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const Run human = cli({"counterexample", "ax2-sign", "--samples", "40"});
  CHECK(human.out.find("\"gap\"") != std::string::npos);
}

TEST_CASE("counterexample ax4-phase") {
  const Run r = cli({"counterexample", "ax4-phase", "--samples", "40", "--json"});
  CHECK(r.code == kExitPass);
  const Json j = Json::parse(r.out);
  const Json golden = load_json(fixture("ax4_phase_witness.json"));
  CHECK(j["witness"]["lambda"] == golden["lambda"]);
  CHECK(j["witness"]["margin_p_star_e2_below_1_minus_e1"].get<double>() ==
        doctest::Approx(golden["violated_margin"].get<double>()).epsilon(1e-9));
}

TEST_CASE("counterexample ax1-pqp") {
  // Red by design: pqp also breaks Ax.2, so the expected pattern does not hold.
  const Run r = cli({"counterexample", "ax1-pqp", "--samples", "40", "--json"});
  const Json j = Json::parse(r.out);
  CHECK(j["witness_reproduced"] == true);
  CHECK(j["witness"]["gap"].get<double>() == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
  CHECK(r.code == kExitPass);
}

TEST_CASE("verify all") {
  // Red by design for the same reason as counterexample ax1-pqp.
  const Run r = cli({"verify", "all", "--seed", "7", "--samples", "30"});
  INFO(r.out);
  CHECK(r.code == kExitPass);
  for (const char* suite : {"linalg/", "effects/", "processes/", "universal/", "axioms/"})
    CHECK(r.out.find(suite) != std::string::npos);
}

TEST_CASE("certify") {
  const Json id = certificate_of("identity_channel.json");
  for (const auto& [k, v] : id.items()) {
    INFO(k);
    CHECK(v == true);
  }

  const Json t = certificate_of("transpose_map.json");
  CHECK(t["positive"] == true);
  CHECK(t["2-positive"] == false);
  CHECK(t["completely-positive"] == false);
  CHECK(t["unital"] == true);

  const Json c = certificate_of("compression_p.json");
  CHECK(c["completely-positive"] == true);
  CHECK(c["contractive"] == true);
  CHECK(c["unital"] == false);
  CHECK(c["multiplicative"] == false);

  CHECK(cli({"certify", fixture("not_a_map.json")}).code == kExitUsage);
  CHECK(cli({"certify", fixture("missing.json")}).code == kExitUsage);
}
