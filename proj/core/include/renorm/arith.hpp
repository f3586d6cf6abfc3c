#pragma once

#include <cstdint>
#include <vector>

namespace renorm {

/// Continued fraction of a number in (0,1):
///
///   theta = 1 / (a_0 + 1 / (a_1 + 1 / ...)),   a_i >= 1.
///
/// `terms` holds the partial quotients a_0, a_1, ....  `terminated` marks an
/// exact rational whose expansion ended before the requested depth.
/// `periodic` marks a truncation of a known infinite periodic pattern.
struct ContinuedFraction {
  std::vector<std::int64_t> terms;
  bool terminated = false;
  bool periodic = false;
};

/// (sqrt(5)-1)/2 = [1,1,1,...]
inline constexpr double kGoldenMean = 0.61803398874989484820;
/// sqrt(2)-1 = [2,2,2,...]
inline constexpr double kSilverMean = 0.41421356237309504880;

/// Golden mean truncated to `depth` partial quotients.
ContinuedFraction cf_golden(int depth);
/// Silver mean truncated to `depth` partial quotients.
ContinuedFraction cf_silver(int depth);
/// `block` repeated periodically until `depth` partial quotients.
ContinuedFraction cf_periodic(const std::vector<std::int64_t>& block, int depth);

/// Expands a double to `depth` certified partial quotients.  Every emitted
/// term is validated against an interval enclosure of width `slack` ulps
/// around theta; the expansion throws PrecisionExhausted at the first term
/// the enclosure cannot decide.
ContinuedFraction cf_expand(double theta, int depth, int slack_ulps = 4);

/// Exact expansion of num/den in (0,1).  May terminate before `depth`.
ContinuedFraction cf_expand(std::int64_t num, std::int64_t den, int depth);

/// Value of a finite continued fraction by backward evaluation.
double cf_value(const ContinuedFraction& cf);

/// Gauss map G(theta) = 1/theta - floor(1/theta), with G(0) = 0.
double gauss_map(double theta);

/// Return times and numerators of the truncations:
///
///   q_0 = 1, q_1 = a_0, q_{n+1} = a_n q_n + q_{n-1}
///   p_0 = 0, p_1 = 1,   p_{n+1} = a_n p_n + p_{n-1}
///
/// so p_n / q_n = [a_0, ..., a_{n-1}].  A cf with N terms yields N+1 entries.
struct Convergents {
  std::vector<std::int64_t> p;
  std::vector<std::int64_t> q;
};

/// Throws IntegerOverflow past the largest representable index.
Convergents convergents(const ContinuedFraction& cf);

/// True iff every partial quotient is < bound.
bool is_bounded_type(const ContinuedFraction& cf, std::int64_t bound);

/// Finite-depth diagnostics of the slow-growth conditions on partial
/// quotients.  The stored terms are treated as a_1, ..., a_N here (sequence
/// position is 1-based).  No finite truncation decides membership in the
/// limiting class; these are the raw sequences for inspection.
struct ADiagnostics {
  /// avg_log[n-1]      = (1/n) sum_{j=1..n} log a_j
  std::vector<double> avg_log;
  /// tail_log[n-1]     = (1/n) log a_n
  std::vector<double> tail_log;
  /// window_max[n-1]   = max over k with n <= k, k+n <= N of
  ///                     (1/n) sum_{j=k+1..k+n} log a_j
  std::vector<double> window_max;
};

ADiagnostics a_set_diagnostics(const ContinuedFraction& cf);

}  // namespace renorm
