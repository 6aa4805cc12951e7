// End-to-end checks of the command line contract (exit codes, JSON shape).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

#include "mapfluct/model_io.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(MAPFLUCT_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = std::string("/tmp/") + name;
  std::ofstream f(path);
  f << text;
  return path;
}

}  // namespace

TEST_CASE("cumulant subcommand") {
  auto r = run_cli("cumulant --model MODEL-A --alpha 0 1");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(std::abs(out["evaluations"][0]["kappa"].get<double>()) < 1e-12);
  CHECK(out["evaluations"][1]["kappa"].get<double>() ==
        doctest::Approx((std::sqrt(17.0) - 1.0) / 2.0));
}

TEST_CASE("cumulant via a model file") {
  std::string path = write_temp("cli_model_a.json", mapfluct::model_to_json(mapfluct::builtin("MODEL-A")));
  auto r = run_cli("cumulant --model " + path + " --alpha 0 --q 1.0");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out["phi"][0]["phi"].get<double>() == doctest::Approx(0.7728655578).epsilon(1e-6));
}

TEST_CASE("unknown JSON field exits 2 with the field path") {
  std::string path = write_temp("cli_bad_field.json",
                                R"({"n_states":1,"Q":[[0]],"states":[{"drift":0,"sigma2":1}],
                                    "trans_jumps":[{"family":"degenerate","params":{"c":0}}],
                                    "spectrally_negative":true,"extra_field":1})");
  auto r = run_cli("cumulant --model " + path + " --alpha 0");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("extra_field") != std::string::npos);
}

TEST_CASE("validation failure exits 2") {
  std::string path = write_temp("cli_bad_rows.json",
                                R"({"n_states":2,"Q":[[-1,2],[2,-2]],
                                    "states":[{"drift":1,"sigma2":2},{"drift":-1,"sigma2":2}],
                                    "trans_jumps":[{"family":"degenerate","params":{"c":0}},
                                                   {"family":"degenerate","params":{"c":0}}],
                                    "spectrally_negative":true})");
  auto r = run_cli("cumulant --model " + path + " --alpha 0");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("RowSumViolation") != std::string::npos);
}

TEST_CASE("alpha outside the jump-law domain exits 3") {
  auto r = run_cli("cumulant --model MODEL-D --alpha 2.5");
  CHECK(r.exit_code == 3);
}

TEST_CASE("whfactor prints the resolvent at alpha=xi=0") {
  auto r = run_cli("whfactor --model MODEL-A --q 1 --alpha 0 --xi 0 --side sup --cond at_eq");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.out);
  CHECK(out["factor"][0][0].get<double>() == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(out["factor"][0][1].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(out["factor"][1][0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(out["factor"][1][1].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("whfactor csv output") {
  auto r = run_cli("whfactor --model MODEL-A --q 1 --side sup --csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0.75,0.25") != std::string::npos);
}

TEST_CASE("inf factor domain violation exits 3") {
  auto r = run_cli("whfactor --model MODEL-A --q 1 --alpha 5 --side inf");
  CHECK(r.exit_code == 3);
}

TEST_CASE("verify structure suite passes on MODEL-A") {
  auto r = run_cli("verify --suite structure --model MODEL-A");
  CHECK(r.exit_code == 0);
  json out = json::parse(r.out);
  for (const auto& suite : out) CHECK(suite["pass"].get<bool>());
}
