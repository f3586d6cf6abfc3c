#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "renorm/errors.hpp"
#include "renorm/experiments.hpp"

using namespace renorm;

TEST_CASE("config accessors parse and fall back") {
  ExperimentConfig config;
  config.options["name"] = "blaschke";
  config.options["depth"] = "14";
  config.options["tol"] = "2.5e-3";
  CHECK(config.get("name", "arnold") == "blaschke");
  CHECK(config.get("missing", "arnold") == "arnold");
  CHECK(config.get_int("depth", 13) == 14);
  CHECK(config.get_int("missing", 13) == 13);
  CHECK(config.get_real("tol", 1.0) == doctest::Approx(2.5e-3).epsilon(1e-15));
  CHECK(config.get_real("missing", 1.0) == 1.0);

  config.options["bad"] = "abc";
  CHECK_THROWS_AS(static_cast<void>(config.get_int("bad", 0)), ValidationError);
  CHECK_THROWS_AS(static_cast<void>(config.get_real("bad", 0.0)), ValidationError);
}

TEST_CASE("ranges accept pairs and bare upper ends") {
  ExperimentConfig config;
  CHECK(config.get_range("levels", 3, 12) == std::pair<int, int>(3, 12));
  config.options["levels"] = "8";
  CHECK(config.get_range("levels", 3, 12) == std::pair<int, int>(3, 8));
  config.options["levels"] = "4..9";
  CHECK(config.get_range("levels", 3, 12) == std::pair<int, int>(4, 9));
  config.options["levels"] = "9..4";
  CHECK_THROWS_AS(static_cast<void>(config.get_range("levels", 3, 12)),
                  ValidationError);
  config.options["levels"] = "x..y";
  CHECK_THROWS_AS(static_cast<void>(config.get_range("levels", 3, 12)),
                  ValidationError);
}

TEST_CASE("key=value text parses with comments and overrides") {
  std::map<std::string, std::string> options;
  load_key_values(
      "# comment\n"
      "family = blaschke\n"
      "\n"
      "depth=13\n"
      "domain=rect:-1,2,-1,1\n"
      "depth = 16\n",
      options);
  CHECK(options.at("family") == "blaschke");
  CHECK(options.at("depth") == "16");
  // Values may contain '='-free commas and colons verbatim.
  CHECK(options.at("domain") == "rect:-1,2,-1,1");
  CHECK(options.size() == 3);
}

TEST_CASE("log-linear fits recover exact exponentials") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 * std::exp(-0.5 * xi));
  const LogLinearFit fit = fit_log_linear(x, y);
  REQUIRE(fit.valid);
  CHECK(fit.points == 5);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.rate == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-linear fits handle degenerate inputs") {
  const LogLinearFit constant =
      fit_log_linear({1.0, 2.0, 3.0}, {2.0, 2.0, 2.0});
  REQUIRE(constant.valid);
  CHECK(constant.slope == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(constant.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_FALSE(fit_log_linear({1.0}, {2.0}).valid);
  CHECK_FALSE(fit_log_linear({}, {}).valid);

  // Non-positive responses cannot enter a log fit and are skipped.
  const LogLinearFit skipping =
      fit_log_linear({1.0, 2.0, 3.0, 4.0}, {2.0, -1.0, 0.0, 8.0});
  REQUIRE(skipping.valid);
  CHECK(skipping.points == 2);
  CHECK(skipping.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tune tables carry the verification ladder") {
  ExperimentConfig config;
  config.experiment = "tune";
  config.options["depth"] = "5";
  const ExperimentResult result = run_experiment(config);
  CHECK(result.experiment == "tune");
  CHECK(result.columns == std::vector<std::string>{"k", "a", "q", "p", "d"});
  REQUIRE(result.rows.size() == 6);
  for (std::size_t k = 0; k + 1 < result.rows.size(); ++k) {
    CHECK(result.rows[k][1] == 1.0);  // golden quotient
    // Signed residuals alternate.
    CHECK(result.rows[k][4] * (k % 2 == 0 ? 1.0 : -1.0) > 0.0);
  }
  // The deepest level has a return but no observed quotient yet.
  CHECK(std::isnan(result.rows.back()[1]));
  CHECK(result.metadata.at("config.depth") == "5");
  CHECK(result.metadata.at("config.family") == "arnold");
  CHECK(result.metadata.count("family.parameter") == 1);
  CHECK(result.metadata.at("family.matched_depth") == "5");
  CHECK(result.exit_code == 0);
  CHECK_FALSE(result.truncated);
}

TEST_CASE("csv output is stable, rfc-shaped, and hexfloat-exact") {
  ExperimentConfig config;
  config.experiment = "tune";
  config.options["depth"] = "5";
  const ExperimentResult result = run_experiment(config);
  const std::string csv = to_csv(result);
  CHECK(to_csv(run_experiment(config)) == csv);  // byte-identical rerun
  CHECK(csv.rfind("k,a,q,p,d\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
  // The NaN quotient renders as an empty field: "5,,8,..."
  CHECK(csv.find("\n5,,") != std::string::npos);

  const std::string hex_csv = to_csv(result, true);
  CHECK(hex_csv.rfind("k,a,q,p,d,d_hex\n", 0) == 0);
  // Recover the third data record's hex field and round-trip it exactly.
  std::size_t pos = 0;
  for (int line = 0; line < 3; ++line) pos = hex_csv.find('\n', pos) + 1;
  const std::size_t eol = hex_csv.find('\n', pos);
  const std::string record = hex_csv.substr(pos, eol - pos);
  const std::size_t last_comma = record.rfind(',');
  const std::string hex_field = record.substr(last_comma + 1);
  CHECK(std::strtod(hex_field.c_str(), nullptr) == result.rows[2][4]);
}

TEST_CASE("json output carries typed records and metadata") {
  ExperimentConfig config;
  config.experiment = "tune";
  config.options["depth"] = "5";
  const ExperimentResult result = run_experiment(config);
  const nlohmann::json doc = nlohmann::json::parse(to_json(result));
  CHECK(doc.at("experiment") == "tune");
  CHECK(doc.at("truncated") == false);
  CHECK(doc.at("metadata").at("version") == kVersionString);
  CHECK(doc.at("metadata").at("seed") == "12345");
  CHECK(doc.at("metadata").at("precision") == "f64");
  CHECK(doc.at("metadata").at("wall_ms").is_number());
  const auto& records = doc.at("records");
  REQUIRE(records.size() == 6);
  CHECK(records[0].at("k").is_number_integer());
  CHECK(records[0].at("a") == 1);
  CHECK(records[0].at("d").is_number_float());
  CHECK(records[5].at("a").is_null());  // NaN cell
  for (std::size_t k = 0; k < records.size(); ++k) {
    CHECK(records[k].at("d").get<double>() ==
          doctest::Approx(result.rows[k][4]).epsilon(1e-15));
  }
}

TEST_CASE("extended precision adds a recomputation column") {
  ExperimentConfig config;
  config.experiment = "tune";
  config.options["depth"] = "5";
  config.precision = "extended";
  const ExperimentResult result = run_experiment(config);
  REQUIRE(result.columns.size() == 6);
  CHECK(result.columns.back() == "d_extended");
  CHECK(result.metadata.at("precision") == "extended");
  for (const auto& row : result.rows) {
    CHECK(row[5] == doctest::Approx(row[4]).epsilon(1e-9));
  }
}

TEST_CASE("orbit tables dump the renormalization sequence") {
  ExperimentConfig config;
  config.experiment = "orbit";
  config.options["levels"] = "0..4";
  config.options["depth"] = "14";
  config.options["grid"] = "64";
  const ExperimentResult result = run_experiment(config);
  CHECK(result.columns ==
        std::vector<std::string>{"n", "eta0", "xi0", "height", "seam", "d_prev"});
  REQUIRE(result.rows.size() == 5);
  for (const auto& row : result.rows) {
    CHECK(row[1] == doctest::Approx(-1.0).epsilon(1e-13));  // eta0
    CHECK(row[2] > 1.0);                                    // xi0
    CHECK(row[3] == 1.0);                                   // golden height
    CHECK(row[4] <= 1e-10);                                 // seam
    CHECK(row[5] > 0.0);                                    // gap to previous
  }
  REQUIRE(result.fits.count("rate") == 1);
  CHECK(result.fits.at("points") == 5.0);

  // Refit from the emitted JSON: the serialized records carry enough
  // precision to reproduce the stored fit.
  const nlohmann::json doc = nlohmann::json::parse(to_json(result));
  std::vector<double> ns, gaps;
  for (const auto& record : doc.at("records")) {
    ns.push_back(record.at("n").get<double>());
    gaps.push_back(record.at("d_prev").get<double>());
  }
  const LogLinearFit refit = fit_log_linear(ns, gaps);
  REQUIRE(refit.valid);
  CHECK(refit.rate == doctest::Approx(result.fits.at("rate")).epsilon(1e-12));
  CHECK(refit.r_squared ==
        doctest::Approx(result.fits.at("r_squared")).epsilon(1e-12));
}

TEST_CASE("distortion sampling is seed-deterministic through the runner") {
  ExperimentConfig config;
  config.experiment = "beltrami";
  config.options["family"] = "blaschke";
  config.options["levels"] = "4..4";
  config.options["depth"] = "14";
  config.options["samples"] = "64";
  const std::string first = to_csv(run_experiment(config));
  const std::string second = to_csv(run_experiment(config));
  CHECK(first == second);
  config.seed = 999;
  const std::string reseeded = to_csv(run_experiment(config));
  CHECK(reseeded != first);
}

TEST_CASE("mid-table failures truncate with a marker and exit code") {
  ExperimentConfig config;
  config.experiment = "glue-check";
  config.options["levels"] = "2..6";
  config.options["depth"] = "14";
  config.options["seam_tol"] = "5e-16";
  const ExperimentResult result = run_experiment(config);
  CHECK(result.truncated);
  CHECK(result.exit_code == 1);
  CHECK_FALSE(result.truncation_reason.empty());
  CHECK(result.rows.size() >= 1);
  CHECK(result.rows.size() < 5);
  const std::string csv = to_csv(result);
  CHECK(csv.find("#truncated,") != std::string::npos);
  const nlohmann::json doc = nlohmann::json::parse(to_json(result));
  CHECK(doc.at("truncated") == true);
  CHECK_FALSE(doc.at("truncation_reason").get<std::string>().empty());
}

TEST_CASE("quadrature constants run through the dispatcher") {
  ExperimentConfig config;
  config.experiment = "qc-constant";
  config.options["domain"] = "rect:-1,2,-1,1";
  config.options["resolution"] = "96";
  const ExperimentResult result = run_experiment(config);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.columns[1] == "c_value");
  CHECK(result.rows[0][1] == doctest::Approx(25.308266).epsilon(1e-4));
  CHECK(result.rows[0][3] <= 0.01);

  config.options["domain"] = "hexagon:1,2";
  CHECK_THROWS_AS(static_cast<void>(run_experiment(config)), ValidationError);
  config.options["domain"] = "disk:0,0,1";
  config.options["resolution"] = "4";
  CHECK_THROWS_AS(static_cast<void>(run_experiment(config)), ValidationError);
}

TEST_CASE("range and dispatch failures carry their exit codes") {
  ExperimentConfig config;
  config.experiment = "converge";
  config.options["levels"] = "9..3";
  try {
    static_cast<void>(run_experiment(config));
    FAIL("expected a validation failure");
  } catch (const ValidationError& error) {
    CHECK(error.exit_code() == 2);
    CHECK(std::string(error.what()).find("empty range") != std::string::npos);
  }

  ExperimentConfig unknown;
  unknown.experiment = "bogus";
  try {
    static_cast<void>(run_experiment(unknown));
    FAIL("expected a validation failure");
  } catch (const ValidationError& error) {
    const std::string what = error.what();
    CHECK(what.find("bogus") != std::string::npos);
    CHECK(what.find("glue-check") != std::string::npos);
  }
}
