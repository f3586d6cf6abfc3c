#include <cstdint>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "renorm/errors.hpp"
#include "renorm/experiments.hpp"

namespace {

using renorm::ExperimentConfig;
using renorm::ExperimentResult;

/// One experiment option surfaced as a CLI flag.  Flags left unset on the
/// command line keep the runner's own default, so defaults live in exactly
/// one place.
struct OptionFlag {
  std::string key;
  std::string value;
  CLI::Option* handle = nullptr;
};

struct Subcommand {
  CLI::App* app = nullptr;
  std::string experiment;
  std::deque<OptionFlag> flags;
};

void add_flag(Subcommand& sub, const std::string& flag, const std::string& key,
              const std::string& help) {
  sub.flags.push_back(OptionFlag{key, "", nullptr});
  OptionFlag& slot = sub.flags.back();
  slot.handle = sub.app->add_option(flag, slot.value, help);
}

void add_family_flags(Subcommand& sub, const std::string& family_help) {
  add_flag(sub, "--family", "family", family_help);
  add_flag(sub, "--rotation", "rotation",
           "Target rotation number: golden, silver, or cf:a1,a2,...");
  add_flag(sub, "--depth", "depth",
           "Continued-fraction depth the parameter is tuned through");
}

void add_levels_flag(Subcommand& sub, const std::string& help) {
  add_flag(sub, "--levels", "levels", help + " (A..B, or a bare upper end)");
}

/// Reads a key=value config file; `seed` and `precision` keys set the
/// corresponding config fields, everything else becomes an option.
void apply_config_file(const std::string& path, ExperimentConfig& config,
                       bool seed_on_cli, bool precision_on_cli) {
  std::ifstream in(path);
  if (!in) {
    throw renorm::ValidationError("cannot read config file: " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  std::map<std::string, std::string> entries;
  renorm::load_key_values(text.str(), entries);
  if (const auto it = entries.find("seed"); it != entries.end()) {
    if (!seed_on_cli) {
      config.seed = std::stoull(it->second);
    }
    entries.erase(it);
  }
  if (const auto it = entries.find("precision"); it != entries.end()) {
    if (!precision_on_cli) {
      config.precision = it->second;
    }
    entries.erase(it);
  }
  for (const auto& [key, value] : entries) {
    config.options[key] = value;
  }
}

/// csv/json choice: explicit --format wins, then the output extension, then
/// json for tune (whose point is the full-precision parameter record) and
/// csv for the tables.
std::string resolve_format(const std::string& format, const std::string& out,
                           const std::string& experiment) {
  if (!format.empty()) {
    if (format != "csv" && format != "json") {
      throw renorm::ValidationError("format must be csv or json");
    }
    return format;
  }
  if (out.size() >= 5 && out.compare(out.size() - 5, 5, ".json") == 0) {
    return "json";
  }
  if (out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0) {
    return "csv";
  }
  return experiment == "tune" ? "json" : "csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalization experiments for critical circle maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", renorm::kVersionString);

  std::string precision;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format;
  std::string config_path;
  bool hexfloat = false;
  CLI::Option* precision_opt = app.add_option(
      "--precision", precision, "Numeric precision: f64 or extended");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Sampling seed echoed into metadata");
  app.add_option("--out,--emit,-o", out_path,
                 "Write the result to this file instead of stdout");
  app.add_option("--format", format, "Output format: csv or json");
  app.add_option("--config", config_path,
                 "key=value file applied before command-line options");
  app.add_flag("--hexfloat", hexfloat,
               "Add a hexadecimal column per real column (CSV only)");

  std::deque<Subcommand> subs;
  auto make_sub = [&](const std::string& name, const std::string& help) {
    subs.push_back(Subcommand{app.add_subcommand(name, help), name, {}});
    // Global flags like --out are accepted after the subcommand too.
    subs.back().app->fallthrough();
    return std::ref(subs.back());
  };

  {
    Subcommand& sub = make_sub(
        "tune",
        "Tune a family to a rotation number and print the verification "
        "record of closest-return residuals");
    add_family_flags(sub, "Map family: rigid, arnold, or blaschke");
  }
  {
    Subcommand& sub = make_sub(
        "orbit",
        "Per-level renormalization records: branch endpoints, height, seam "
        "residual, and distance to the previous level");
    add_family_flags(sub, "Map family: rigid, arnold, or blaschke");
    add_levels_flag(sub, "Level range");
    add_flag(sub, "--grid", "grid", "Sample points per branch for distances");
  }
  {
    Subcommand& sub = make_sub(
        "converge",
        "Distance between the level-n pairs of two tuned maps, with a "
        "log-linear fit of the decay");
    add_flag(sub, "--family-f", "family_f", "First family");
    add_flag(sub, "--family-g", "family_g", "Second family");
    add_flag(sub, "--rotation", "rotation", "Rotation target for both sides");
    add_flag(sub, "--rotation-f", "rotation_f", "First side's rotation");
    add_flag(sub, "--rotation-g", "rotation_g", "Second side's rotation");
    add_flag(sub, "--depth", "depth", "Tuning depth for both sides");
    add_flag(sub, "--depth-f", "depth_f", "First side's tuning depth");
    add_flag(sub, "--depth-g", "depth_g", "Second side's tuning depth");
    add_levels_flag(sub, "Level range");
    add_flag(sub, "--order", "order", "Metric smoothness order (0, 1, or 2)");
    add_flag(sub, "--grid", "grid", "Sample points per branch for distances");
  }
  {
    Subcommand& sub = make_sub(
        "realbounds",
        "Dynamical-partition geometry per level: adjacent-atom ratios, "
        "widest atom, and cross-ratio distortion");
    add_family_flags(sub, "Map family: rigid, arnold, or blaschke");
    add_levels_flag(sub, "Level range");
    add_flag(sub, "--samples", "samples", "Distortion samples per level");
  }
  {
    Subcommand& sub = make_sub(
        "beltrami",
        "Sampled conformal distortion of the extended pair branches per "
        "level");
    add_family_flags(sub, "Map family: rigid, arnold, or blaschke");
    add_levels_flag(sub, "Level range");
    add_flag(sub, "--samples", "samples", "Sample points per neighborhood");
    add_flag(sub, "--alpha", "alpha", "Neighborhood size relative to the interval");
    add_flag(sub, "--band", "band", "Half-height of the extension band");
  }
  {
    Subcommand& sub = make_sub(
        "glue-check",
        "Rotation number of the glued circle map at each level against the "
        "Gauss-iterated target");
    add_family_flags(sub, "Map family: rigid, arnold, or blaschke");
    add_levels_flag(sub, "Level range");
    add_flag(sub, "--iterates", "iterates", "Orbit length for the estimate");
    add_flag(sub, "--seam-tol", "seam_tol", "Largest accepted seam residual");
  }
  {
    Subcommand& sub = make_sub(
        "schwarz",
        "Inclusion margins of iterated Poincare neighborhoods at one level");
    add_family_flags(sub, "Map family: rigid, arnold, or blaschke");
    add_flag(sub, "--level", "level", "Pair level whose branches are iterated");
    add_flag(sub, "--theta", "theta", "Neighborhood angle in (0, pi)");
    add_flag(sub, "--samples", "samples", "Boundary samples per step");
    add_flag(sub, "--band", "band", "Half-height of the extension band");
  }
  {
    Subcommand& sub = make_sub(
        "qc-constant",
        "Quadrature constant C(U) of a plane domain with its "
        "doubled-resolution agreement diagnostic");
    add_flag(sub, "--domain", "domain",
             "rect:x0,x1,y0,y1 or disk:cx,cy,r");
    add_flag(sub, "--resolution", "resolution", "Tensor cells per axis");
  }

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig config;
  ExperimentResult result;
  try {
    Subcommand* chosen = nullptr;
    for (Subcommand& sub : subs) {
      if (sub.app->parsed()) {
        chosen = &sub;
        break;
      }
    }
    config.experiment = chosen->experiment;
    if (seed_opt->count() > 0) {
      config.seed = seed;
    }
    if (precision_opt->count() > 0) {
      config.precision = precision;
    }
    if (!config_path.empty()) {
      apply_config_file(config_path, config, seed_opt->count() > 0,
                        precision_opt->count() > 0);
    }
    for (const OptionFlag& flag : chosen->flags) {
      if (flag.handle->count() > 0) {
        config.options[flag.key] = flag.value;
      }
    }
    const std::string resolved =
        resolve_format(format, out_path, config.experiment);
    result = renorm::run_experiment(config);
    const std::string payload = resolved == "json"
                                    ? renorm::to_json(result)
                                    : renorm::to_csv(result, hexfloat);
    if (out_path.empty()) {
      std::cout << payload;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        throw renorm::ValidationError("cannot write output file: " + out_path);
      }
      out << payload;
      std::cerr << "wrote " << result.rows.size() << " records to " << out_path
                << "\n";
    }
  } catch (const renorm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }
  if (result.truncated) {
    std::cerr << "truncated: " << result.truncation_reason << "\n";
  }
  return result.exit_code;
}
