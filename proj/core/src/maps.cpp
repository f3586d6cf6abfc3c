#include "renorm/maps.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace renorm {

double CircleLift::critical_ratio(double, int) const {
  throw ValidationError("critical_ratio: family has no stable critical-slope oracle");
}

double CircleLift::step(double y) const {
  const double k = std::floor(y);
  return eval(y - k) + k;
}

double CircleLift::iterate(double y, std::int64_t n) const {
  for (std::int64_t i = 0; i < n; ++i) y = step(y);
  return y;
}

RigidRotation::RigidRotation(double theta) : theta_(theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ValidationError("RigidRotation: theta must lie in (0,1)");
  }
}

double RigidRotation::eval(double x) const { return rigid_lift(theta_, x, 0); }
double RigidRotation::deriv(double x, int order) const {
  if (order < 1 || order > 3) throw ValidationError("deriv: order must be 1..3");
  return rigid_lift(theta_, x, order);
}

ArnoldLift::ArnoldLift(double a) : a_(a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw ValidationError("ArnoldLift: parameter must lie in (0,1)");
  }
}

double ArnoldLift::eval(double x) const { return arnold_lift(a_, x, 0); }
double ArnoldLift::deriv(double x, int order) const {
  if (order < 1 || order > 3) throw ValidationError("deriv: order must be 1..3");
  return arnold_lift(a_, x, order);
}
double ArnoldLift::critical_ratio(double, int order) const {
  switch (order) {
    case 0: return 1.0;
    case 1: return 0.0;
    case 2: return 0.0;
    default: throw ValidationError("critical_ratio: order must be 0..2");
  }
}

BlaschkeLift::BlaschkeLift(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("BlaschkeLift: parameter must lie in (0,1)");
  }
}

double BlaschkeLift::eval(double x) const { return blaschke_lift(gamma_, x, 0); }
double BlaschkeLift::deriv(double x, int order) const {
  if (order < 1 || order > 3) throw ValidationError("deriv: order must be 1..3");
  return blaschke_lift(gamma_, x, order);
}
double BlaschkeLift::critical_ratio(double x, int order) const {
  return blaschke_critical_ratio(x, order);
}

std::shared_ptr<const CircleLift> make_lift(Family fam, double param) {
  switch (fam) {
    case Family::rigid: return std::make_shared<RigidRotation>(param);
    case Family::arnold: return std::make_shared<ArnoldLift>(param);
    case Family::blaschke: return std::make_shared<BlaschkeLift>(param);
    default: throw ValidationError("make_lift: unsupported family");
  }
}

CriticalOrbit::CriticalOrbit(std::shared_ptr<const CircleLift> f) : f_(std::move(f)) {
  if (!f_) throw ValidationError("CriticalOrbit: null lift");
  pts_.push_back(0.0);
}

double CriticalOrbit::point(std::size_t j) {
  while (pts_.size() <= j) pts_.push_back(f_->step(pts_.back()));
  return pts_[j];
}

RotationEstimate rotation_number(const CircleLift& f, std::int64_t iterates) {
  if (iterates < 1) throw ValidationError("rotation_number: iterates must be >= 1");
  const double y = f.iterate(0.0, iterates);
  RotationEstimate est;
  est.value = y / static_cast<double>(iterates);
  est.half_width = 1.0 / static_cast<double>(iterates);
  est.iterates = iterates;
  return est;
}

ClosestReturns closest_returns(const CircleLift& f, int depth,
                               std::int64_t max_quotient, double tol) {
  if (depth < 1) throw ValidationError("closest_returns: depth must be >= 1");

  ClosestReturns rec;
  double d_prev = -1.0;
  std::int64_t q_prev = 0;
  std::int64_t p_prev = 1;
  double d_cur = f.step(0.0);
  std::int64_t q_cur = 1;
  std::int64_t p_cur = 0;
  if (!(d_cur > 0.0 && d_cur < 1.0)) {
    throw ValidationError("closest_returns: lift has F(0) outside (0,1)");
  }
  rec.q.push_back(q_cur);
  rec.p.push_back(p_cur);
  rec.d.push_back(d_cur);

  for (int k = 0; k < depth; ++k) {
    const bool from_above = d_prev > 0.0;
    double e = d_prev;
    std::int64_t r = 0;
    for (;; ++r) {
      if (r > max_quotient) {
        throw CombinatoricsMismatch(
            "closest_returns: no crossing within " + std::to_string(max_quotient) +
            " steps at level " + std::to_string(k) +
            " (rotation number rational, or quotient cap too small)");
      }
      double e_next = e;
      for (std::int64_t i = 0; i < q_cur; ++i) e_next = f.step(e_next);
      e_next -= static_cast<double>(p_cur);
      if (std::abs(e_next) < tol) {
        throw PrecisionExhausted(
            "closest_returns: sign decision below tolerance at level " +
            std::to_string(k));
      }
      if (from_above ? (e_next < 0.0) : (e_next > 0.0)) break;
      // Same side: the approach to 0 must be strictly monotone.
      if (from_above ? (e_next >= e) : (e_next <= e)) {
        throw CombinatoricsMismatch(
            "closest_returns: stalled approach at level " + std::to_string(k) +
            " (rotation number rational to working precision)");
      }
      e = e_next;
    }
    if (r == 0) {
      throw CombinatoricsMismatch(
          "closest_returns: zero partial quotient at level " + std::to_string(k));
    }
    const double d_next = e;
    rec.a.push_back(r);
    const std::int64_t q_next = r * q_cur + q_prev;
    const std::int64_t p_next = r * p_cur + p_prev;
    rec.q.push_back(q_next);
    rec.p.push_back(p_next);
    rec.d.push_back(d_next);
    d_prev = d_cur;
    q_prev = q_cur;
    p_prev = p_cur;
    d_cur = d_next;
    q_cur = q_next;
    p_cur = p_next;
  }
  return rec;
}

namespace detail {

int compare_rational_cf(std::int64_t p, std::int64_t q,
                        const std::vector<std::int64_t>& target, int depth) {
  if (p <= 0 || q <= 0 || p >= q) {
    throw ValidationError("compare_rational_cf: rational must lie in (0,1)");
  }
  if (depth < 1 || static_cast<int>(target.size()) < depth) {
    throw ValidationError("compare_rational_cf: bad depth");
  }
  // Exact value equality first: [.., m, 1] and [.., m+1] denote the same
  // rational, so term comparison alone cannot certify equality.
  {
    ContinuedFraction prefix;
    prefix.terms.assign(target.begin(), target.begin() + depth);
    const Convergents cv = convergents(prefix);
    const auto pt = static_cast<__int128>(cv.p.back());
    const auto qt = static_cast<__int128>(cv.q.back());
    if (static_cast<__int128>(p) * qt == static_cast<__int128>(q) * pt) {
      return 0;
    }
  }
  // Euclid expansion of p/q, term by term, against the target prefix.  At
  // the first differing index j, a larger term means a smaller value when j
  // is even and a larger one when j is odd.
  std::int64_t n = p;
  std::int64_t d = q;
  for (int j = 0; j < depth; ++j) {
    if (n == 0) {
      // The rational equals the length-j truncation; the target continues,
      // and appending terms at index j raises the value iff j is even.
      return (j % 2 == 0) ? -1 : +1;
    }
    const std::int64_t a = d / n;
    const std::int64_t t = target[static_cast<std::size_t>(j)];
    if (a != t) {
      return ((a > t) == (j % 2 == 0)) ? -1 : +1;
    }
    const std::int64_t rem = d - a * n;
    d = n;
    n = rem;
  }
  return 0;
}

}  // namespace detail

namespace {

template <class Real>
TuneResult tune_impl(Family fam, const std::vector<std::int64_t>& target, int depth) {
  const Real lo0 = Real(1e-9);
  const Real hi0 = Real(1) - Real(1e-9);
  Real lo = lo0;
  Real hi = hi0;

  int best_matched = 0;
  const auto compare = [&](Real t) {
    const auto out = detail::observed_cf_compare<Real>(fam, t, target, depth);
    best_matched = std::max(best_matched, out.matched);
    return out;
  };

  auto c_lo = compare(lo);
  if (c_lo.cmp == 0) return {static_cast<double>(lo), depth, 0, 0.0};
  auto c_hi = compare(hi);
  if (c_hi.cmp == 0) return {static_cast<double>(hi), depth, 0, 0.0};
  if (c_lo.cmp > 0 || c_hi.cmp < 0) {
    throw ValidationError("tune_parameter: family does not bracket the target");
  }

  const Real eps = std::numeric_limits<Real>::epsilon();
  TuneResult res;
  for (int it = 0; it < 40000; ++it) {
    const Real mid = lo + (hi - lo) / Real(2);
    if (mid <= lo || mid >= hi || (hi - lo) < Real(8) * eps) {
      throw BisectionStall(
          "tune_parameter: parameter interval collapsed after matching " +
          std::to_string(best_matched) + " of " + std::to_string(depth) +
          " levels",
          best_matched);
    }
    const auto c = compare(mid);
    ++res.bisections;
    if (c.cmp == 0) {
      res.parameter = static_cast<double>(mid);
      res.matched_depth = depth;
      res.bracket_width = static_cast<double>(hi - lo);
      return res;
    }
    if (c.cmp < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw BisectionStall("tune_parameter: iteration cap reached after matching " +
                           std::to_string(best_matched) + " levels",
                       best_matched);
}

}  // namespace

TuneResult tune_parameter(Family fam, const ContinuedFraction& target, int depth,
                          Precision prec) {
  if (depth < 1) throw ValidationError("tune_parameter: depth must be >= 1");
  if (static_cast<int>(target.terms.size()) < depth) {
    throw ValidationError("tune_parameter: target has fewer terms than depth");
  }
  for (int k = 0; k < depth; ++k) {
    if (target.terms[static_cast<std::size_t>(k)] < 1) {
      throw ValidationError("tune_parameter: target quotients must be >= 1");
    }
  }
  if (fam != Family::arnold && fam != Family::blaschke && fam != Family::rigid) {
    throw ValidationError("tune_parameter: unsupported family");
  }

  TuneResult res = (prec == Precision::extended)
                       ? tune_impl<long double>(fam, target.terms, depth)
                       : tune_impl<double>(fam, target.terms, depth);

  // The returned parameter is a double; certify the combinatorics for the
  // value the caller actually receives.
  const auto lift = make_lift(fam, res.parameter);
  const auto rec = closest_returns(*lift, depth);
  for (int k = 0; k < depth; ++k) {
    if (rec.a[static_cast<std::size_t>(k)] != target.terms[static_cast<std::size_t>(k)]) {
      throw BisectionStall(
          "tune_parameter: double rounding of the parameter broke the match at level " +
              std::to_string(k),
          k);
    }
  }
  return res;
}

}  // namespace renorm
