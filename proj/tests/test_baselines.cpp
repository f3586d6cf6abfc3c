#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "renorm/experiments.hpp"

using namespace renorm;

#ifndef RENORM_BASELINE_DIR
#error "RENORM_BASELINE_DIR must point at the frozen baseline tables"
#endif

namespace {

std::string read_baseline(const std::string& name) {
  const std::string path = std::string(RENORM_BASELINE_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing baseline ", path,
                  " (regenerate with tools/regen_baselines.sh)");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// The emitted CSV is specified to be byte-stable for a fixed config and
/// seed, so the regression is an exact string comparison.
void check_baseline(const std::string& name, const ExperimentConfig& config) {
  CHECK(to_csv(run_experiment(config)) == read_baseline(name));
}

}  // namespace

TEST_CASE("tuning table matches the frozen baseline") {
  ExperimentConfig config;
  config.experiment = "tune";
  config.options["depth"] = "13";
  check_baseline("tune_golden_arnold_13.csv", config);
}

TEST_CASE("orbit table matches the frozen baseline") {
  ExperimentConfig config;
  config.experiment = "orbit";
  config.options["levels"] = "0..6";
  config.options["depth"] = "14";
  config.options["grid"] = "128";
  check_baseline("orbit_golden_0_6.csv", config);
}

TEST_CASE("glue table matches the frozen baseline") {
  ExperimentConfig config;
  config.experiment = "glue-check";
  config.options["levels"] = "2..6";
  config.options["depth"] = "14";
  config.options["iterates"] = "5000";
  check_baseline("glue_check_2_6.csv", config);
}

TEST_CASE("distortion table matches the frozen baseline") {
  ExperimentConfig config;
  config.experiment = "beltrami";
  config.options["levels"] = "4..5";
  config.options["depth"] = "14";
  config.options["samples"] = "64";
  check_baseline("beltrami_4_5.csv", config);
}

TEST_CASE("quadrature constant matches the frozen baseline") {
  ExperimentConfig config;
  config.experiment = "qc-constant";
  config.options["resolution"] = "96";
  check_baseline("qc_rect_96.csv", config);
}
