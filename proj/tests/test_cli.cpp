#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dqm/config.hpp"
#include "dqm/report.hpp"
#include "dqm/verify.hpp"

using namespace dqm;

#ifndef DQM_CLI_PATH
#define DQM_CLI_PATH ""
#endif

TEST_CASE("config parsing") {
  FamilyConfig cfg = parse_family_config_text(
      "# a finite q-lattice\n"
      "family = qR\n"
      "param.b = 0.002\n"
      "param.c = 0.8\n"
      "param.d = 0.5\n"
      "N = 8\n"
      "q = 0.6\n");
  CHECK(cfg.id == FamilyId::qR);
  CHECK(cfg.params.get("b") == doctest::Approx(0.002));
  CHECK(cfg.params.N.value() == 8);
  CHECK(cfg.params.q_base.value() == doctest::Approx(0.6));
  CHECK_NOTHROW(Family::make(cfg.id, cfg.params));

  CHECK_THROWS_AS(parse_family_config_text("param.b=1\n"), parameter_error);   // no family
  CHECK_THROWS_AS(parse_family_config_text("family=XX\n"), parameter_error);   // unknown id
  CHECK_THROWS_AS(parse_family_config_text("family=M\nbogus=1\n"), parameter_error);
}

TEST_CASE("report schema is stable") {
  Report rep;
  rep.suite = "demo";
  rep.seed = 42;
  rep.add("demo.check", "a residual", 1e-12, 1e-9);
  ordered_json j = rep.to_json();
  CHECK(j["schema_version"] == 1);
  const char* keys[] = {"schema_version", "suite", "meta", "seed", "wall_time_ms", "all_pass", "checks"};
  size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i) CHECK(it.key() == keys[i]);
  CHECK(j["checks"][0]["check_id"] == "demo.check");
  CHECK(j["checks"][0]["pass"] == true);
  CHECK(j["all_pass"] == true);
  rep.add("demo.fail", "too big", 1.0, 1e-9);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("identical seed gives byte-identical reports after normalizing wall time") {
  VerifyOptions o;
  o.seed = 11;
  auto render = [&]() {
    Report r = suite_duality(o);
    r.wall_ms = 0.0;
    return r.to_json().dump(2);
  };
  CHECK(render() == render());
  VerifyOptions o2;
  o2.seed = 12;
  Report r2 = suite_duality(o2);
  r2.wall_ms = 0.0;
  CHECK(render() != r2.to_json().dump(2));
}

TEST_CASE("seeded parameter draws are reproducible") {
  Rng a(5), b(5);
  ParameterVector p1 = draw_params(FamilyId::qR, 8, a);
  ParameterVector p2 = draw_params(FamilyId::qR, 8, b);
  CHECK(p1.get("b") == p2.get("b"));
  CHECK(p1.get("c") == p2.get("c"));
}

TEST_CASE("command-line entry points" * doctest::skip(std::string(DQM_CLI_PATH).empty())) {
  std::string cli = DQM_CLI_PATH;
  auto run = [&](const std::string& args) {
    std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(run("families") == 0);
  CHECK(run("crum --family R --N 6 --seed 3 --delete 2") == 1);   // invalid deletion set
  CHECK(run("crum --family R --N 6 --seed 3 --delete 1,2") == 0);
  CHECK(run("verify --suite negative --seed 7") == 0);
  CHECK(run("spectrum --family qR --N 8 --seed 7") == 0);
  CHECK(run("bogus-subcommand") == 2);
  CHECK(run("spectrum --family nosuch") == 2);
  // deterministic report files
  CHECK(run("verify --suite duality --seed 9 --out /tmp/dqm_cli_a.json") == 0);
  CHECK(run("verify --suite duality --seed 9 --out /tmp/dqm_cli_b.json") == 0);
  auto slurp_normalized = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    std::string line;
    while (std::getline(in, line))
      if (line.find("wall_time_ms") == std::string::npos) ss << line << "\n";
    return ss.str();
  };
  CHECK(slurp_normalized("/tmp/dqm_cli_a.json") == slurp_normalized("/tmp/dqm_cli_b.json"));
}
