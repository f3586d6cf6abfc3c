#include "renorm/arith.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "renorm/errors.hpp"

namespace renorm {

namespace {

constexpr std::int64_t kMaxInt = std::numeric_limits<std::int64_t>::max();

void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace

ContinuedFraction cf_golden(int depth) {
  require(depth >= 1, "cf_golden: depth must be >= 1");
  ContinuedFraction cf;
  cf.terms.assign(static_cast<std::size_t>(depth), 1);
  cf.periodic = true;
  return cf;
}

ContinuedFraction cf_silver(int depth) {
  require(depth >= 1, "cf_silver: depth must be >= 1");
  ContinuedFraction cf;
  cf.terms.assign(static_cast<std::size_t>(depth), 2);
  cf.periodic = true;
  return cf;
}

ContinuedFraction cf_periodic(const std::vector<std::int64_t>& block, int depth) {
  require(!block.empty(), "cf_periodic: empty block");
  require(depth >= 1, "cf_periodic: depth must be >= 1");
  for (auto a : block) require(a >= 1, "cf_periodic: partial quotients must be >= 1");
  ContinuedFraction cf;
  cf.terms.reserve(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) cf.terms.push_back(block[i % block.size()]);
  cf.periodic = true;
  return cf;
}

ContinuedFraction cf_expand(double theta, int depth, int slack_ulps) {
  require(theta > 0.0 && theta < 1.0, "cf_expand: theta must lie in (0,1)");
  require(depth >= 1, "cf_expand: depth must be >= 1");
  require(slack_ulps >= 1, "cf_expand: slack must be >= 1 ulp");

  // Interval enclosure [lo, hi] of the remainder.  Each term is emitted only
  // when both endpoints agree on floor(1/remainder); endpoints are nudged
  // outward every step so rounding stays conservative.
  double lo = theta;
  double hi = theta;
  for (int i = 0; i < slack_ulps; ++i) {
    lo = std::nextafter(lo, -1.0);
    hi = std::nextafter(hi, 2.0);
  }

  ContinuedFraction cf;
  for (int n = 0; n < depth; ++n) {
    if (lo <= 0.0) {
      throw PrecisionExhausted(
          "cf_expand: enclosure touched 0 after " + std::to_string(n) +
          " certified terms (rational to working precision?)");
    }
    const double inv_lo = 1.0 / hi;
    const double inv_hi = 1.0 / lo;
    const double a_lo = std::floor(std::nextafter(inv_lo, 0.0));
    const double a_hi = std::floor(std::nextafter(inv_hi, inv_hi + 1.0));
    if (a_lo != a_hi || !(a_lo >= 1.0) || a_lo >= 9.22e18) {
      throw PrecisionExhausted(
          "cf_expand: term " + std::to_string(n) +
          " not certified by the enclosure (" + std::to_string(n) +
          " terms certified)");
    }
    const auto a = static_cast<std::int64_t>(a_lo);
    cf.terms.push_back(a);
    const double new_lo = std::nextafter(inv_lo - static_cast<double>(a), -1.0);
    const double new_hi = std::nextafter(inv_hi - static_cast<double>(a), 2.0);
    lo = new_lo;
    hi = new_hi;
  }
  return cf;
}

ContinuedFraction cf_expand(std::int64_t num, std::int64_t den, int depth) {
  require(den > 0 && num > 0 && num < den, "cf_expand: need 0 < num/den < 1");
  require(depth >= 1, "cf_expand: depth must be >= 1");
  ContinuedFraction cf;
  // Euclidean algorithm on the exact rational; terminates of itself.
  std::int64_t p = num;
  std::int64_t q = den;
  for (int n = 0; n < depth; ++n) {
    if (p == 0) {
      cf.terminated = true;
      break;
    }
    cf.terms.push_back(q / p);
    const std::int64_t r = q % p;
    q = p;
    p = r;
  }
  if (p == 0) cf.terminated = true;
  return cf;
}

double cf_value(const ContinuedFraction& cf) {
  require(!cf.terms.empty(), "cf_value: empty continued fraction");
  double v = 0.0;
  for (auto it = cf.terms.rbegin(); it != cf.terms.rend(); ++it) {
    v = 1.0 / (static_cast<double>(*it) + v);
  }
  return v;
}

double gauss_map(double theta) {
  require(theta >= 0.0 && theta < 1.0, "gauss_map: theta must lie in [0,1)");
  if (theta == 0.0) return 0.0;
  const double inv = 1.0 / theta;
  return inv - std::floor(inv);
}

Convergents convergents(const ContinuedFraction& cf) {
  require(!cf.terms.empty(), "convergents: empty continued fraction");
  for (auto a : cf.terms) require(a >= 1, "convergents: partial quotients must be >= 1");

  Convergents c;
  c.p = {0, 1};
  c.q = {1, cf.terms[0]};
  for (std::size_t n = 1; n < cf.terms.size(); ++n) {
    const std::int64_t a = cf.terms[n];
    const std::int64_t qn = c.q[n];
    const std::int64_t qp = c.q[n - 1];
    if (qn != 0 && a > (kMaxInt - qp) / qn) {
      throw IntegerOverflow(
          "convergents: q overflows past index " + std::to_string(n),
          static_cast<int>(n));
    }
    c.q.push_back(a * qn + qp);
    c.p.push_back(a * c.p[n] + c.p[n - 1]);
  }
  return c;
}

bool is_bounded_type(const ContinuedFraction& cf, std::int64_t bound) {
  for (auto a : cf.terms) {
    if (a >= bound) return false;
  }
  return true;
}

ADiagnostics a_set_diagnostics(const ContinuedFraction& cf) {
  require(!cf.terms.empty(), "a_set_diagnostics: empty continued fraction");
  const std::size_t N = cf.terms.size();
  std::vector<double> logs(N);
  for (std::size_t i = 0; i < N; ++i) {
    require(cf.terms[i] >= 1, "a_set_diagnostics: partial quotients must be >= 1");
    logs[i] = std::log(static_cast<double>(cf.terms[i]));
  }

  ADiagnostics d;
  double acc = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    acc += logs[n - 1];
    d.avg_log.push_back(acc / static_cast<double>(n));
    d.tail_log.push_back(logs[n - 1] / static_cast<double>(n));
  }

  // Prefix sums make each window average O(1).
  std::vector<double> prefix(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] + logs[i];
  for (std::size_t n = 1; 2 * n <= N; ++n) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = n; k + n <= N; ++k) {
      best = std::max(best, (prefix[k + n] - prefix[k]) / static_cast<double>(n));
    }
    d.window_max.push_back(best);
  }
  return d;
}

}  // namespace renorm
