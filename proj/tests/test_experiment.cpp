#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "oppbandit/experiment.hpp"

using namespace oppbandit;

namespace {

std::string write_temp_spec(const std::string& body) {
  static int counter = 0;
  std::string path = "spec_under_test_" + std::to_string(counter++) + ".txt";
  std::ofstream out(path);
  out << body;
  return path;
}

} // namespace

TEST_CASE("spec files parse keys, lists and comments") {
  const std::string path = write_temp_spec(
      "# demo experiment\n"
      "command = bounds\n"
      "p01 = 0.1, 0.2 , 0.3\n"
      "p11 = 0.8\n"
      "n = 3, 4\n"
      "t = 500   # horizon\n"
      "seed = 7\n"
      "format = json\n"
      "jobs = 2\n");
  const ExperimentSpec spec = parse_spec_file(path);
  CHECK(spec.command == "bounds");
  CHECK(spec.p01s == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(spec.p11s == std::vector<double>{0.8});
  CHECK(spec.ns == std::vector<int>{3, 4});
  CHECK(spec.horizon == 500);
  CHECK(spec.seed == 7);
  CHECK(spec.format == "json");
  CHECK(spec.jobs == 2);
  std::remove(path.c_str());

  ExperimentSpec other;
  CHECK_THROWS_AS(apply_spec_line(other, "mystery", "1"), UsageError);
  CHECK_THROWS_AS(apply_spec_line(other, "p01", "abc"), UsageError);
  CHECK_THROWS_AS(parse_spec_file("missing_file.txt"), UsageError);

  const std::string bad = write_temp_spec("just a line\n");
  CHECK_THROWS_AS(parse_spec_file(bad), UsageError);
  std::remove(bad.c_str());
}

TEST_CASE("spec validation") {
  ExperimentSpec spec;
  spec.command = "simulate";
  CHECK_NOTHROW(validate_spec(spec));
  spec.command = "explode";
  CHECK_THROWS_AS(validate_spec(spec), UsageError);
  spec.command = "simulate";
  spec.format = "xml";
  CHECK_THROWS_AS(validate_spec(spec), UsageError);
  spec.format = "csv";
  spec.policy = "psychic";
  CHECK_THROWS_AS(validate_spec(spec), UsageError);
  spec.policy = "structural";
  spec.p11s.clear();
  CHECK_THROWS_AS(validate_spec(spec), UsageError);
}

TEST_CASE("number formatting uses 12 significant digits") {
  CHECK(format_number(0.65) == "0.65");
  CHECK(format_number(5.0 / 7.0) == "0.714285714286");
  CHECK(format_number(1.0) == "1");
}

TEST_CASE("bounds table: schema and values") {
  ExperimentSpec spec;
  spec.command = "bounds";
  spec.p01s = {0.2};
  spec.p11s = {0.8};
  spec.ns = {4};
  const Table table = run_experiment(spec);
  CHECK(table.exit_code == 0);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.columns ==
        std::vector<std::string>{"p01", "p11", "N", "U_lower", "U_exact",
                                 "U_upper", "rel_gap"});
  const std::string csv = render_csv(table);
  CHECK(csv.find("0.714285714286") != std::string::npos); // 5/7 upper bound
  CHECK(csv.back() == '\n');
}

TEST_CASE("grid rows come back in deterministic order, jobs independent") {
  ExperimentSpec spec;
  spec.command = "sweep";
  spec.p01s = {0.2, 0.4};
  spec.p11s = {0.6, 0.8};
  spec.ns = {2, 3};
  spec.horizon = 20000;
  spec.seed = 5;
  const Table t1 = run_experiment(spec);
  CHECK(t1.rows.size() == 8);
  const std::string csv1 = render_csv(t1);
  spec.jobs = 4;
  const std::string csv4 = render_csv(run_experiment(spec));
  CHECK(csv1 == csv4);

  // First row corresponds to the first grid cell.
  CHECK(std::get<double>(t1.rows[0][0]) == 0.2);
  CHECK(std::get<double>(t1.rows[0][1]) == 0.6);
  CHECK(std::get<long long>(t1.rows[0][2]) == 2);
}

TEST_CASE("verify-optimality: clean grid, counterexample, and cap errors") {
  ExperimentSpec spec;
  spec.command = "verify-optimality";
  spec.p01s = {0.2, 0.5};
  spec.p11s = {0.4, 0.8};
  spec.ns = {2};
  spec.horizon = 6;
  const Table clean = run_experiment(spec);
  CHECK(clean.exit_code == 0);
  for (const auto& row : clean.rows) {
    CHECK(std::get<double>(row[6]) <= 1e-9);
    CHECK(std::get<bool>(row[7]));
    CHECK(std::get<std::string>(row[8]) == "ok");
  }

  // Strong negative correlation with four channels: known myopic loss.
  spec.p01s = {0.99};
  spec.p11s = {0.01};
  spec.ns = {4};
  spec.horizon = 10;
  const Table ce = run_experiment(spec);
  CHECK(ce.exit_code == 3);
  CHECK(std::get<double>(ce.rows[0][6]) > 1e-9);

  // Nine channels exceed the enumerator's range: per-row error, exit 2.
  spec.p01s = {0.2};
  spec.p11s = {0.8};
  spec.ns = {9};
  spec.horizon = 3;
  const Table capped = run_experiment(spec);
  CHECK(capped.exit_code == 2);
  REQUIRE(capped.rows.size() == 1);
  CHECK(std::get<std::string>(capped.rows[0].back()).rfind("error", 0) == 0);
}

TEST_CASE("simulate table rows") {
  ExperimentSpec spec;
  spec.command = "simulate";
  spec.p01s = {0.2};
  spec.p11s = {0.8};
  spec.ns = {2};
  spec.horizon = 50000;
  spec.seed = 12;
  const Table table = run_experiment(spec);
  REQUIRE(table.rows.size() == 1);
  const auto& row = table.rows[0];
  CHECK(std::get<std::string>(row[4]) == "structural");
  const double u_hat = std::get<double>(row[5]);
  CHECK(u_hat > 0.55);
  CHECK(u_hat < 0.75);
  CHECK(std::get<double>(row[7]) > 1.0); // mean period length

  // Rerun gives identical bytes.
  CHECK(render_csv(run_experiment(spec)) == render_csv(table));
}

TEST_CASE("rate table") {
  ExperimentSpec spec;
  spec.command = "rate";
  spec.p01s = {0.2};
  spec.p11s = {0.6};
  spec.ns = {6, 7, 8, 9, 10};
  const Table table = run_experiment(spec);
  CHECK(table.columns ==
        std::vector<std::string>{"p01", "p11", "N", "gap", "ratio"});
  REQUIRE(table.rows.size() == 5);
  double first = std::get<double>(table.rows[0][4]);
  for (const auto& row : table.rows) {
    const double ratio = std::get<double>(row[4]);
    CHECK(std::abs(ratio - first) / first <= 0.02);
  }
}

TEST_CASE("csv header lines are frozen per command") {
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"simulate", "p01,p11,N,T,policy,U_hat,stderr,L_bar_hat"},
      {"sweep", "p01,p11,N,T,policy,U_hat,stderr,L_bar_hat,U_exact,U_lower,U_upper"},
      {"analyze",
       "p01,p11,N,U_exact,U_closed,U_lower,U_upper,omega_bar,omega_bar_prime,"
       "C,D,E,F,G,H,p01_2,p11_2,p10_2"},
      {"verify-optimality", "p01,p11,N,T,V_opt,V_myopic,gap,lemma2_holds,status"},
      {"bounds", "p01,p11,N,U_lower,U_exact,U_upper,rel_gap"},
      {"rate", "p01,p11,N,gap,ratio"}};
  for (const auto& [command, header] : expected) {
    ExperimentSpec spec;
    spec.command = command;
    spec.p01s = {0.3};
    spec.p11s = {0.6};
    spec.ns = {2};
    spec.horizon = 2000;
    const std::string csv = render_csv(run_experiment(spec));
    CHECK(csv.substr(0, csv.find('\n')) == header);
  }
}

TEST_CASE("json rendering carries nulls for missing cells") {
  ExperimentSpec spec;
  spec.command = "analyze";
  spec.p01s = {0.3};
  spec.p11s = {0.7};
  spec.ns = {3};
  const Table table = run_experiment(spec);
  const std::string json = render_json(table);
  CHECK(json.find("\"U_closed\": null") != std::string::npos);
  CHECK(json.find("\"U_exact\":") != std::string::npos);
}
