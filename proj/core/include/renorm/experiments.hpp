#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "renorm/errors.hpp"

namespace renorm {

/// Library version stamped into emitted metadata.
inline constexpr const char* kVersionString = "0.1.0";

/// Flat key=value configuration for one experiment run.  Option keys are
/// experiment specific; seed and precision are global.  The typed accessors
/// throw ValidationError on malformed values.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> options;
  std::uint64_t seed = 12345;
  std::string precision = "f64";  // "f64" or "extended"

  std::string get(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_real(const std::string& key, double fallback) const;
  /// Inclusive range "a..b"; a bare integer "b" replaces the upper end and
  /// keeps the default start, so e.g. levels=12 means "through level 12".
  std::pair<int, int> get_range(const std::string& key, int lo_fallback,
                                int hi_fallback) const;
};

/// Parses `key=value` lines into config options (blank lines and lines
/// starting with '#' are skipped); later keys override earlier ones.
void load_key_values(const std::string& text,
                     std::map<std::string, std::string>& into);

/// Least-squares fit of ln(y) = intercept + slope * x over the points with
/// y > 0.  `rate` is exp(slope); `valid` requires at least two usable
/// points.  r_squared is 1 for an exact two-point fit and 1 when the
/// responses are constant.
struct LogLinearFit {
  bool valid = false;
  double slope = 0.0;
  double intercept = 0.0;
  double rate = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

LogLinearFit fit_log_linear(const std::vector<double>& x,
                            const std::vector<double>& y);

enum class ColumnKind { integer, real };

/// One experiment's output: a rectangular numeric table plus metadata and
/// fit summaries.  NaN cells render as empty CSV fields and JSON nulls.
/// `wall_ms` appears only in JSON metadata so CSV stays byte-identical
/// across reruns of the same config and seed.  A truncated result carries
/// the rows computed before the failure and the failure's exit code.
struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;
  std::map<std::string, double> fits;
  bool truncated = false;
  std::string truncation_reason;
  int exit_code = 0;
  double wall_ms = 0.0;
};

/// RFC-4180 table: header record then one record per row, LF line ends,
/// '.' decimal point, %.17g reals.  With `hexfloat` every real column is
/// followed by a `<name>_hex` column carrying the %a form.  A truncated
/// table ends with a record whose first field is "#truncated" and whose
/// second is the reason.
std::string to_csv(const ExperimentResult& result, bool hexfloat = false);

/// JSON object: experiment, metadata (config echo, version, seed, wall
/// time), fits, records (one object per row), truncation fields.
std::string to_json(const ExperimentResult& result);

/// Tuning verification table: one row per closest-return level k with the
/// partial quotient, return numerator/denominator, and signed residual d_k.
/// Under precision "extended" a long-double recomputation of d_k is added.
ExperimentResult run_tune(const ExperimentConfig& config);

/// Renormalization-orbit dump: per level n, branch endpoints eta(0) and
/// xi(0), height, commutation seam residual, and the C^0 distance to the
/// previous level's pair, plus a log-linear fit of that gap sequence.
ExperimentResult run_orbit(const ExperimentConfig& config);

/// Inter-family convergence table: d_order between level-n pairs of two
/// tuned maps, with per-side family/rotation/depth keys (family_f,
/// rotation_f, depth_f and the _g siblings; bare rotation/depth set both).
ExperimentResult run_converge(const ExperimentConfig& config);

/// Per-level dynamical-partition geometry: atom counts, adjacent-atom
/// ratios, widest atom, and cross-ratio distortion samples.
ExperimentResult run_realbounds(const ExperimentConfig& config);

/// Conformal-distortion decay: sampled sup |mu| of the extended pair
/// branches per level, with skip statistics for orbits leaving the band.
ExperimentResult run_beltrami(const ExperimentConfig& config);

/// Glued-map rotation numbers against the Gauss-iterated target, with
/// Birkhoff half-widths and seam residuals.
ExperimentResult run_glue_check(const ExperimentConfig& config);

/// Inclusion margins of iterated Poincare neighborhoods at one level.
ExperimentResult run_schwarz(const ExperimentConfig& config);

/// Quadrature constant C(U) for a rectangle or disk domain, with the
/// doubled-resolution agreement diagnostic.
ExperimentResult run_qc_constant(const ExperimentConfig& config);

/// Dispatches on config.experiment; ValidationError for unknown names.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace renorm
