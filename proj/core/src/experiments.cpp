#include "renorm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "renorm/arith.hpp"
#include "renorm/complexext.hpp"
#include "renorm/maps.hpp"
#include "renorm/pairs.hpp"
#include "renorm/partitions.hpp"
#include "renorm/qc.hpp"

namespace renorm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_int(std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  return buf;
}

std::string format_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t from = 0;
  while (true) {
    const std::size_t at = s.find(sep, from);
    if (at == std::string::npos) {
      parts.push_back(s.substr(from));
      return parts;
    }
    parts.push_back(s.substr(from, at - from));
    from = at + 1;
  }
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trimmed(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ValidationError("option '" + key + "': '" + text +
                          "' is not an integer");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trimmed(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ValidationError("option '" + key + "': '" + text +
                          "' is not a number");
  }
  return v;
}

/// Reads options with fallbacks, echoing every effective value under
/// "config.<key>" so the emitted metadata reproduces the run.
class Options {
 public:
  Options(const ExperimentConfig& config, ExperimentResult& result)
      : config_(config), result_(result) {}

  std::string str(const char* key, const std::string& fallback) {
    const std::string v = config_.get(key, fallback);
    echo(key, v);
    return v;
  }

  std::int64_t integer(const char* key, std::int64_t fallback) {
    const std::int64_t v = config_.get_int(key, fallback);
    echo(key, format_int(v));
    return v;
  }

  double real(const char* key, double fallback) {
    const double v = config_.get_real(key, fallback);
    echo(key, format_real(v));
    return v;
  }

  std::pair<int, int> range(const char* key, int lo, int hi) {
    const auto v = config_.get_range(key, lo, hi);
    echo(key, format_int(v.first) + ".." + format_int(v.second));
    return v;
  }

 private:
  void echo(const char* key, const std::string& value) {
    result_.metadata[std::string("config.") + key] = value;
  }

  const ExperimentConfig& config_;
  ExperimentResult& result_;
};

ExperimentResult start_result(const ExperimentConfig& config,
                              const char* name) {
  if (config.precision != "f64" && config.precision != "extended") {
    throw ValidationError("precision must be f64 or extended, got '" +
                          config.precision + "'");
  }
  ExperimentResult result;
  result.experiment = name;
  result.metadata["seed"] = format_int(static_cast<std::int64_t>(config.seed));
  result.metadata["precision"] = config.precision;
  return result;
}

void finish(ExperimentResult& result,
            std::chrono::steady_clock::time_point t0) {
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
}

void truncate_with(ExperimentResult& result, const Error& e) {
  result.truncated = true;
  result.truncation_reason = e.what();
  result.exit_code = e.exit_code();
}

Family parse_family(const std::string& name) {
  if (name == "rigid") {
    return Family::rigid;
  }
  if (name == "arnold") {
    return Family::arnold;
  }
  if (name == "blaschke") {
    return Family::blaschke;
  }
  throw ValidationError("family must be rigid, arnold, or blaschke, got '" +
                        name + "'");
}

constexpr int kRotationTerms = 40;

ContinuedFraction parse_rotation(const std::string& spec) {
  if (spec == "golden") {
    return cf_golden(kRotationTerms);
  }
  if (spec == "silver") {
    return cf_silver(kRotationTerms);
  }
  if (spec.rfind("cf:", 0) == 0) {
    std::vector<std::int64_t> block;
    for (const std::string& part : split(spec.substr(3), ',')) {
      const std::int64_t a = parse_int("rotation", part);
      if (a < 1) {
        throw ValidationError("rotation cf terms must be >= 1");
      }
      block.push_back(a);
    }
    if (block.empty()) {
      throw ValidationError("rotation cf: needs at least one term");
    }
    return cf_periodic(block, kRotationTerms);
  }
  throw ValidationError(
      "rotation must be golden, silver, or cf:a,b,... , got '" + spec + "'");
}

struct PreparedLift {
  Family fam = Family::rigid;
  ContinuedFraction target;
  std::shared_ptr<const CircleLift> lift;
  double parameter = 0.0;
  TuneResult tune;
  bool tuned = false;
  int depth = 0;
};

/// Resolves family/rotation/depth options into a tuned lift.  Rigid lifts
/// take the rotation value as their parameter directly; critical families
/// are tuned through `depth` combinatorial levels.  Deep tuning matters for
/// deep-level measurements: the parameter bracket shrinks like
/// 1/(q_depth q_{depth+1}) and orbit sensitivity amplifies any residual
/// width at the top levels, so runners default well past the deepest level
/// they report.
/// Default tuning depth for an experiment whose deepest reported level is
/// `top_level`: twelve levels of headroom, capped at 20 (where the golden
/// bracket is ~2e-9), but never less than top_level + 1.  Rotations whose
/// convergents grow faster than golden may stall before 20; callers with
/// such targets pass an explicit lower depth.
int default_depth(int top_level) {
  return std::max(top_level + 1, std::min(top_level + 12, 20));
}

PreparedLift prepare_lift(Options& opt, ExperimentResult& result,
                          const char* family_key, const char* rotation_key,
                          const char* depth_key,
                          const std::string& family_fallback,
                          const std::string& rotation_fallback,
                          int depth_fallback) {
  PreparedLift out;
  const std::string family_name = opt.str(family_key, family_fallback);
  const std::string rotation = opt.str(rotation_key, rotation_fallback);
  out.depth = static_cast<int>(opt.integer(depth_key, depth_fallback));
  if (out.depth < 1 || out.depth > 30) {
    throw ValidationError("depth must lie in [1, 30]");
  }
  out.fam = parse_family(family_name);
  out.target = parse_rotation(rotation);
  if (out.fam == Family::rigid) {
    out.parameter = cf_value(out.target);
  } else {
    out.tune = tune_parameter(out.fam, out.target, out.depth);
    out.parameter = out.tune.parameter;
    out.tuned = true;
  }
  out.lift = make_lift(out.fam, out.parameter);
  const std::string prefix = family_key;
  result.metadata[prefix + ".parameter"] = format_real(out.parameter);
  if (out.tuned) {
    result.metadata[prefix + ".matched_depth"] = format_int(out.tune.matched_depth);
    result.metadata[prefix + ".bisections"] = format_int(out.tune.bisections);
    result.metadata[prefix + ".bracket_width"] =
        format_real(out.tune.bracket_width);
  }
  return out;
}

/// d_k recomputed in long double at the same binary64 parameter.
double residual_extended(Family fam, double parameter, std::int64_t q,
                         std::int64_t p) {
  long double x = 0.0L;
  const long double par = parameter;
  for (std::int64_t i = 0; i < q; ++i) {
    x = family_step(fam, par, x);
  }
  return static_cast<double>(x - static_cast<long double>(p));
}

/// Gauss-map iterate of the target read off the continued-fraction tail,
/// which is exact where repeated floating division would drift.
double gauss_iterate_of(const ContinuedFraction& target, int n) {
  ContinuedFraction tail;
  tail.terms.assign(target.terms.begin() + n, target.terms.end());
  tail.terminated = target.terminated;
  tail.periodic = target.periodic;
  return cf_value(tail);
}

}  // namespace

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = options.find(key);
  return it == options.end() ? fallback : it->second;
}

std::int64_t ExperimentConfig::get_int(const std::string& key,
                                       std::int64_t fallback) const {
  const auto it = options.find(key);
  return it == options.end() ? fallback : parse_int(key, it->second);
}

double ExperimentConfig::get_real(const std::string& key,
                                  double fallback) const {
  const auto it = options.find(key);
  return it == options.end() ? fallback : parse_real(key, it->second);
}

std::pair<int, int> ExperimentConfig::get_range(const std::string& key,
                                                int lo_fallback,
                                                int hi_fallback) const {
  int lo = lo_fallback;
  int hi = hi_fallback;
  const auto it = options.find(key);
  if (it != options.end()) {
    const std::string& text = it->second;
    const std::size_t at = text.find("..");
    if (at == std::string::npos) {
      hi = static_cast<int>(parse_int(key, text));
    } else {
      lo = static_cast<int>(parse_int(key, text.substr(0, at)));
      hi = static_cast<int>(parse_int(key, text.substr(at + 2)));
    }
  }
  if (lo > hi) {
    throw ValidationError("option '" + key + "': empty range " +
                          format_int(lo) + ".." + format_int(hi));
  }
  return {lo, hi};
}

void load_key_values(const std::string& text,
                     std::map<std::string, std::string>& into) {
  for (const std::string& raw : split(text, '\n')) {
    const std::string line = trimmed(raw);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line without '=': '" + line + "'");
    }
    into[trimmed(line.substr(0, eq))] = trimmed(line.substr(eq + 1));
  }
}

LogLinearFit fit_log_linear(const std::vector<double>& x,
                            const std::vector<double>& y) {
  LogLinearFit fit;
  std::vector<double> xs;
  std::vector<double> ls;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (y[i] > 0.0 && std::isfinite(y[i]) && std::isfinite(x[i])) {
      xs.push_back(x[i]);
      ls.push_back(std::log(y[i]));
    }
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) {
    fit.slope = fit.intercept = fit.rate = fit.r_squared = kNaN;
    return fit;
  }
  double mx = 0.0;
  double ml = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    mx += xs[i];
    ml += ls[i];
  }
  mx /= fit.points;
  ml /= fit.points;
  double sxx = 0.0;
  double sxl = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxl += (xs[i] - mx) * (ls[i] - ml);
  }
  if (sxx == 0.0) {
    fit.slope = fit.intercept = fit.rate = fit.r_squared = kNaN;
    return fit;
  }
  fit.slope = sxl / sxx;
  fit.intercept = ml - fit.slope * mx;
  fit.rate = std::exp(fit.slope);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ls[i] - pred) * (ls[i] - pred);
    ss_tot += (ls[i] - ml) * (ls[i] - ml);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  fit.valid = true;
  return fit;
}

std::string to_csv(const ExperimentResult& result, bool hexfloat) {
  std::vector<std::string> header;
  for (std::size_t c = 0; c < result.columns.size(); ++c) {
    header.push_back(result.columns[c]);
    if (hexfloat && result.kinds[c] == ColumnKind::real) {
      header.push_back(result.columns[c] + "_hex");
    }
  }
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) {
      out += ',';
    }
    out += csv_quote(header[i]);
  }
  out += '\n';
  for (const auto& row : result.rows) {
    std::string line;
    bool first = true;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const bool is_real = result.kinds[c] == ColumnKind::real;
      const bool empty = std::isnan(row[c]);
      if (!first) {
        line += ',';
      }
      first = false;
      if (!empty) {
        line += is_real ? format_real(row[c])
                        : format_int(static_cast<std::int64_t>(row[c]));
      }
      if (hexfloat && is_real) {
        line += ',';
        if (!empty) {
          line += format_hex(row[c]);
        }
      }
    }
    out += line;
    out += '\n';
  }
  if (result.truncated) {
    std::vector<std::string> marker(header.size());
    if (!marker.empty()) {
      marker[0] = "#truncated";
    }
    if (marker.size() > 1) {
      marker[1] = result.truncation_reason;
    }
    for (std::size_t i = 0; i < marker.size(); ++i) {
      if (i) {
        out += ',';
      }
      out += csv_quote(marker[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = result.experiment;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  meta["version"] = kVersionString;
  for (const auto& [key, value] : result.metadata) {
    meta[key] = value;
  }
  meta["wall_ms"] = result.wall_ms;
  j["metadata"] = meta;
  nlohmann::ordered_json fits = nlohmann::ordered_json::object();
  for (const auto& [key, value] : result.fits) {
    if (std::isfinite(value)) {
      fits[key] = value;
    } else {
      fits[key] = nullptr;
    }
  }
  j["fits"] = fits;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isnan(row[c])) {
        rec[result.columns[c]] = nullptr;
      } else if (result.kinds[c] == ColumnKind::integer) {
        rec[result.columns[c]] = static_cast<std::int64_t>(row[c]);
      } else {
        rec[result.columns[c]] = row[c];
      }
    }
    records.push_back(rec);
  }
  j["records"] = records;
  j["truncated"] = result.truncated;
  j["truncation_reason"] = result.truncation_reason;
  return j.dump(2) + "\n";
}

ExperimentResult run_tune(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "tune");
  Options opt(config, result);
  const PreparedLift pl = prepare_lift(opt, result, "family", "rotation",
                                       "depth", "arnold", "golden", 13);
  const bool extended = config.precision == "extended";
  result.columns = {"k", "a", "q", "p", "d"};
  result.kinds = {ColumnKind::integer, ColumnKind::integer,
                  ColumnKind::integer, ColumnKind::integer, ColumnKind::real};
  if (extended) {
    result.columns.push_back("d_extended");
    result.kinds.push_back(ColumnKind::real);
  }
  try {
    const ClosestReturns rec = closest_returns(*pl.lift, pl.depth);
    for (int k = 0; k <= pl.depth; ++k) {
      std::vector<double> row{
          static_cast<double>(k),
          k < pl.depth ? static_cast<double>(rec.a[k]) : kNaN,
          static_cast<double>(rec.q[k]), static_cast<double>(rec.p[k]),
          rec.d[k]};
      if (extended) {
        row.push_back(
            residual_extended(pl.fam, pl.parameter, rec.q[k], rec.p[k]));
      }
      result.rows.push_back(std::move(row));
    }
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_orbit(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "orbit");
  Options opt(config, result);
  const auto levels = opt.range("levels", 0, 12);
  if (levels.first < 0) {
    throw ValidationError("orbit levels start at 0");
  }
  const int grid = static_cast<int>(opt.integer("grid", 512));
  if (grid < 16 || grid > 65536) {
    throw ValidationError("grid must lie in [16, 65536]");
  }
  const PreparedLift pl =
      prepare_lift(opt, result, "family", "rotation", "depth", "arnold",
                   "golden", default_depth(levels.second + 1));
  if (pl.depth < levels.second + 1) {
    throw ValidationError("tuning depth must exceed the deepest level");
  }
  result.columns = {"n", "eta0", "xi0", "height", "seam", "d_prev"};
  result.kinds = {ColumnKind::integer, ColumnKind::real, ColumnKind::real,
                  ColumnKind::integer, ColumnKind::real, ColumnKind::real};
  try {
    const ClosestReturns rec = closest_returns(*pl.lift, levels.second + 1);
    // Level -1 is the map itself as a pair, so every reported level has a
    // predecessor to measure against.
    CommutingPair prev =
        CommutingPair::from_returns(pl.lift, rec, levels.first - 1);
    std::vector<double> ns;
    std::vector<double> gaps;
    for (int n = levels.first; n <= levels.second; ++n) {
      const CommutingPair cur = CommutingPair::from_returns(pl.lift, rec, n);
      const Height height = pair_height(cur);
      const double gap = metric_distance(0, cur, prev, grid);
      result.rows.push_back(
          {static_cast<double>(n), cur.eta0(), cur.xi0(),
           height.finite ? static_cast<double>(height.value) : kNaN,
           cur.commutation_residual(), gap});
      ns.push_back(static_cast<double>(n));
      gaps.push_back(gap);
      prev = cur;
    }
    const LogLinearFit fit = fit_log_linear(ns, gaps);
    result.fits["slope"] = fit.slope;
    result.fits["rate"] = fit.rate;
    result.fits["r_squared"] = fit.r_squared;
    result.fits["points"] = static_cast<double>(fit.points);
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_converge(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "converge");
  Options opt(config, result);
  const auto levels = opt.range("levels", 3, 12);
  const int order = static_cast<int>(opt.integer("order", 0));
  const int grid = static_cast<int>(opt.integer("grid", 512));
  if (order < 0 || order > 2) {
    throw ValidationError("order must lie in [0, 2]");
  }
  if (grid < 16 || grid > 65536) {
    throw ValidationError("grid must lie in [16, 65536]");
  }
  // Per-side rotation/depth keys with shared fallbacks, so mixed-target
  // comparisons (e.g. a golden map against a silver one) fit in one run.
  const std::string rotation_shared = config.get("rotation", "golden");
  const int depth_shared = static_cast<int>(
      config.get_int("depth", default_depth(levels.second)));
  const PreparedLift f =
      prepare_lift(opt, result, "family_f", "rotation_f", "depth_f", "arnold",
                   rotation_shared, depth_shared);
  const PreparedLift g =
      prepare_lift(opt, result, "family_g", "rotation_g", "depth_g",
                   "blaschke", rotation_shared, depth_shared);
  if (f.depth < levels.second || g.depth < levels.second) {
    throw ValidationError("tuning depth must cover the level range");
  }
  result.columns = {"n", "height_f", "height_g", "d"};
  result.kinds = {ColumnKind::integer, ColumnKind::integer,
                  ColumnKind::integer, ColumnKind::real};
  try {
    const ClosestReturns rec_f = closest_returns(*f.lift, levels.second);
    const ClosestReturns rec_g = closest_returns(*g.lift, levels.second);
    for (int n = levels.first; n <= levels.second; ++n) {
      const CommutingPair pf = CommutingPair::from_returns(f.lift, rec_f, n - 1);
      const CommutingPair pg = CommutingPair::from_returns(g.lift, rec_g, n - 1);
      const Height hf = pair_height(pf);
      const Height hg = pair_height(pg);
      const double d = metric_distance(order, pf, pg, grid);
      result.rows.push_back({static_cast<double>(n),
                             hf.finite ? static_cast<double>(hf.value) : kNaN,
                             hg.finite ? static_cast<double>(hg.value) : kNaN,
                             d});
    }
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  std::vector<double> ns;
  std::vector<double> ds;
  for (const auto& row : result.rows) {
    ns.push_back(row[0]);
    ds.push_back(row[3]);
  }
  const LogLinearFit fit = fit_log_linear(ns, ds);
  result.fits["slope"] = fit.slope;
  result.fits["rate"] = fit.rate;
  result.fits["r_squared"] = fit.r_squared;
  result.fits["points"] = fit.points;
  finish(result, t0);
  return result;
}

ExperimentResult run_realbounds(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "realbounds");
  Options opt(config, result);
  const auto levels = opt.range("levels", 4, 12);
  if (levels.first < 1) {
    throw ValidationError("realbounds levels start at 1");
  }
  const PreparedLift pl =
      prepare_lift(opt, result, "family", "rotation", "depth", "arnold",
                   "golden", default_depth(levels.second));
  const int samples = static_cast<int>(opt.integer("samples", 32));
  if (samples < 2 || samples > 4096) {
    throw ValidationError("samples must lie in [2, 4096]");
  }
  result.columns = {"level",     "atoms",      "max_ratio",
                    "min_ratio", "max_adjacent", "max_atom",
                    "wide_distortion", "narrow_distortion"};
  result.kinds = {ColumnKind::integer, ColumnKind::integer, ColumnKind::real,
                  ColumnKind::real,    ColumnKind::real,    ColumnKind::real,
                  ColumnKind::real,    ColumnKind::real};
  try {
    for (int level = levels.first; level <= levels.second; ++level) {
      const DynamicalPartition part = build_partition(*pl.lift, level);
      const AdjacencyStats adj = adjacency_ratios(part);
      const DistortionStats dist = distortion_ratios(*pl.lift, level, samples);
      const double sym = adj.valid
                             ? std::max(adj.max_ratio, 1.0 / adj.min_ratio)
                             : kNaN;
      result.rows.push_back({static_cast<double>(level),
                             static_cast<double>(part.atoms.size()),
                             adj.valid ? adj.max_ratio : kNaN,
                             adj.valid ? adj.min_ratio : kNaN, sym,
                             adj.valid ? adj.max_atom : kNaN, dist.wide_ratio,
                             dist.narrow_ratio});
    }
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_beltrami(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "beltrami");
  Options opt(config, result);
  const auto levels = opt.range("levels", 3, 9);
  const PreparedLift pl =
      prepare_lift(opt, result, "family", "rotation", "depth", "blaschke",
                   "golden", default_depth(levels.second));
  const int samples = static_cast<int>(opt.integer("samples", 256));
  const double alpha = opt.real("alpha", 0.25);
  const double band = opt.real("band", 0.05);
  result.columns = {"level",       "sup_mu_eta", "sup_mu_xi",
                    "sup_mu",      "samples",    "skipped_eta",
                    "skipped_xi",  "skipped_fraction", "valid"};
  result.kinds = {ColumnKind::integer, ColumnKind::real,    ColumnKind::real,
                  ColumnKind::real,    ColumnKind::integer, ColumnKind::integer,
                  ColumnKind::integer, ColumnKind::real,    ColumnKind::integer};
  try {
    const ExtendedLift F(pl.lift, band);
    result.metadata["band"] = format_real(F.band());
    BeltramiOptions bopts;
    bopts.samples = samples;
    bopts.alpha = alpha;
    bopts.seed = config.seed;
    const std::vector<BeltramiLevel> table =
        beltrami_decay(F, levels.first, levels.second, bopts);
    for (const BeltramiLevel& row : table) {
      const double skipped =
          static_cast<double>(row.skipped_eta + row.skipped_xi) /
          (2.0 * row.samples);
      result.rows.push_back({static_cast<double>(row.level), row.sup_mu_eta,
                             row.sup_mu_xi,
                             std::max(row.sup_mu_eta, row.sup_mu_xi),
                             static_cast<double>(row.samples),
                             static_cast<double>(row.skipped_eta),
                             static_cast<double>(row.skipped_xi), skipped,
                             row.valid ? 1.0 : 0.0});
    }
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_glue_check(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "glue-check");
  Options opt(config, result);
  const auto levels = opt.range("levels", 0, 8);
  if (levels.first < 0) {
    throw ValidationError("glue-check levels start at 0");
  }
  const PreparedLift pl =
      prepare_lift(opt, result, "family", "rotation", "depth", "arnold",
                   "golden", default_depth(levels.second));
  const std::int64_t iterates = opt.integer("iterates", 10000);
  if (iterates < 10 || iterates > 100000000) {
    throw ValidationError("iterates must lie in [10, 100000000]");
  }
  const double seam_tol = opt.real("seam_tol", 1e-10);
  if (pl.depth < levels.second) {
    throw ValidationError("tuning depth must cover the level range");
  }
  result.columns = {"n",        "rho",        "expected",
                    "abs_err",  "half_width", "seam"};
  result.kinds = {ColumnKind::integer, ColumnKind::real, ColumnKind::real,
                  ColumnKind::real,    ColumnKind::real, ColumnKind::real};
  try {
    const ClosestReturns rec =
        closest_returns(*pl.lift, std::max(levels.second, 1));
    for (int n = levels.first; n <= levels.second; ++n) {
      const CommutingPair pair =
          CommutingPair::from_returns(pl.lift, rec, n - 1);
      const GluedCircleMap glued(pair, seam_tol);
      const RotationEstimate est = rotation_number(glued, iterates);
      const double expected = 1.0 / (1.0 + gauss_iterate_of(pl.target, n));
      result.rows.push_back({static_cast<double>(n), est.value, expected,
                             std::abs(est.value - expected), est.half_width,
                             glued.seam_residual()});
    }
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_schwarz(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "schwarz");
  Options opt(config, result);
  const int level_option = static_cast<int>(config.get_int("level", 6));
  const PreparedLift pl =
      prepare_lift(opt, result, "family", "rotation", "depth", "blaschke",
                   "golden", default_depth(std::max(level_option, 0)));
  const int level = static_cast<int>(opt.integer("level", 6));
  const double theta = opt.real("theta", std::numbers::pi / 2);
  const int samples = static_cast<int>(opt.integer("samples", 64));
  const double band = opt.real("band", 0.05);
  if (level < 0 || level + 1 > pl.depth) {
    throw ValidationError("level must lie in [0, depth-1]");
  }
  result.columns = {"j",          "interval_length", "theta_min",
                    "fitted_theta", "margin",        "newton_failures"};
  result.kinds = {ColumnKind::integer, ColumnKind::real, ColumnKind::real,
                  ColumnKind::real,    ColumnKind::real, ColumnKind::integer};
  try {
    const ExtendedLift F(pl.lift, band);
    result.metadata["band"] = format_real(F.band());
    const SchwarzReport report =
        schwarz_inclusion_check(F, level, theta, samples);
    for (const SchwarzStep& step : report.steps) {
      result.rows.push_back({static_cast<double>(step.j),
                             step.interval_length, step.theta_min,
                             step.fitted_theta, step.margin,
                             static_cast<double>(step.newton_failures)});
    }
    result.fits["m_hat"] = report.m_hat;
    result.fits["min_margin"] = report.min_margin;
    result.fits["total_newton_failures"] = report.total_newton_failures;
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_qc_constant(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = start_result(config, "qc-constant");
  Options opt(config, result);
  const std::string domain = opt.str("domain", "rect:-1,2,-1,1");
  const int resolution = static_cast<int>(opt.integer("resolution", 256));
  if (resolution < 8 || resolution > 4096) {
    throw ValidationError("resolution must lie in [8, 4096]");
  }
  PlaneDomain U = PlaneDomain::rectangle(-1.0, 2.0, -1.0, 1.0, resolution);
  if (domain.rfind("rect:", 0) == 0) {
    const auto parts = split(domain.substr(5), ',');
    if (parts.size() != 4) {
      throw ValidationError("domain rect: needs x0,x1,y0,y1");
    }
    U = PlaneDomain::rectangle(
        parse_real("domain", parts[0]), parse_real("domain", parts[1]),
        parse_real("domain", parts[2]), parse_real("domain", parts[3]),
        resolution);
  } else if (domain.rfind("disk:", 0) == 0) {
    const auto parts = split(domain.substr(5), ',');
    if (parts.size() != 3) {
      throw ValidationError("domain disk: needs cx,cy,r");
    }
    U = PlaneDomain::disk(
        Complex(parse_real("domain", parts[0]), parse_real("domain", parts[1])),
        parse_real("domain", parts[2]), resolution);
  } else {
    throw ValidationError("domain must be rect:x0,x1,y0,y1 or disk:cx,cy,r");
  }
  result.columns = {"resolution", "c_value", "base_value",
                    "relative_disagreement"};
  result.kinds = {ColumnKind::integer, ColumnKind::real, ColumnKind::real,
                  ColumnKind::real};
  try {
    const DomainConstant report = constant_CU_report(U);
    result.rows.push_back({static_cast<double>(resolution), report.value,
                           report.base_value, report.relative_disagreement});
  } catch (const Error& e) {
    truncate_with(result, e);
  }
  finish(result, t0);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.experiment == "tune") {
    return run_tune(config);
  }
  if (config.experiment == "orbit") {
    return run_orbit(config);
  }
  if (config.experiment == "converge") {
    return run_converge(config);
  }
  if (config.experiment == "realbounds") {
    return run_realbounds(config);
  }
  if (config.experiment == "beltrami") {
    return run_beltrami(config);
  }
  if (config.experiment == "glue-check") {
    return run_glue_check(config);
  }
  if (config.experiment == "schwarz") {
    return run_schwarz(config);
  }
  if (config.experiment == "qc-constant") {
    return run_qc_constant(config);
  }
  throw ValidationError(
      "unknown experiment '" + config.experiment +
      "' (expected tune, orbit, converge, realbounds, beltrami, glue-check, "
      "schwarz, or qc-constant)");
}

}  // namespace renorm
