#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "renorm/arith.hpp"
#include "renorm/errors.hpp"
#include "renorm/families.hpp"

namespace renorm {

/// Lift of an orientation-preserving circle homeomorphism: F is continuous,
/// increasing, F(x+1) = F(x) + 1, and F(0) lies in (0,1).  Critical families
/// additionally have cubic critical points at the integers.
class CircleLift {
 public:
  virtual ~CircleLift() = default;

  virtual double eval(double x) const = 0;
  /// order 1..3.
  virtual double deriv(double x, int order) const = 0;
  virtual Family family() const = 0;
  virtual double parameter() const = 0;

  /// F'(x) / (2 sin^2(pi x)) and its first two derivatives (order 0..2),
  /// evaluated stably across the critical points.  Families without a cubic
  /// critical point do not provide it.
  virtual double critical_ratio(double x, int order) const;

  /// F(y) evaluated at the reduced argument, so orbits can run indefinitely
  /// without trigonometric argument growth.
  double step(double y) const;
  /// F^n(y) by reduced iteration.
  double iterate(double y, std::int64_t n) const;
};

class RigidRotation final : public CircleLift {
 public:
  explicit RigidRotation(double theta);
  double eval(double x) const override;
  double deriv(double x, int order) const override;
  Family family() const override { return Family::rigid; }
  double parameter() const override { return theta_; }

 private:
  double theta_;
};

class ArnoldLift final : public CircleLift {
 public:
  explicit ArnoldLift(double a);
  double eval(double x) const override;
  double deriv(double x, int order) const override;
  Family family() const override { return Family::arnold; }
  double parameter() const override { return a_; }
  double critical_ratio(double x, int order) const override;

 private:
  double a_;
};

class BlaschkeLift final : public CircleLift {
 public:
  explicit BlaschkeLift(double gamma);
  double eval(double x) const override;
  double deriv(double x, int order) const override;
  Family family() const override { return Family::blaschke; }
  double parameter() const override { return gamma_; }
  double critical_ratio(double x, int order) const override;

 private:
  double gamma_;
};

std::shared_ptr<const CircleLift> make_lift(Family fam, double param);

/// Cache of the critical orbit F^j(0), grown on demand.  Shared by the
/// partition builder and the pair constructors so deep return times never
/// recompute early orbit segments.
class CriticalOrbit {
 public:
  explicit CriticalOrbit(std::shared_ptr<const CircleLift> f);
  /// F^j(0).
  double point(std::size_t j);
  const CircleLift& lift() const { return *f_; }

 private:
  std::shared_ptr<const CircleLift> f_;
  std::vector<double> pts_;
};

/// Birkhoff estimate F^N(0)/N of the rotation number, with the rigorous
/// enclosure half-width 1/N.
struct RotationEstimate {
  double value = 0.0;
  double half_width = 0.0;
  std::int64_t iterates = 0;
};

RotationEstimate rotation_number(const CircleLift& f, std::int64_t iterates);

/// Closest-return record to depth n: observed partial quotients a_0..a_{n-1},
/// return times q_0..q_n, numerators p_0..p_n and the signed distances
/// d_k = F^{q_k}(0) - p_k, which alternate in sign.  (Their moduli decrease
/// for rigid rotations; critical families may wobble across sides at early
/// levels, so no cross-side magnitude condition is enforced.)
struct ClosestReturns {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> q;
  std::vector<std::int64_t> p;
  std::vector<double> d;
};

/// Derives the closest-return structure directly from the dynamics, one
/// partial quotient at a time.  Throws CombinatoricsMismatch when the orbit
/// order deviates from the rigid-rotation model (including rational rotation
/// numbers) and PrecisionExhausted when a sign decision falls below `tol`.
ClosestReturns closest_returns(const CircleLift& f, int depth,
                               std::int64_t max_quotient = 1000000,
                               double tol = 1e-12);

enum class Precision { f64, extended };

struct TuneResult {
  double parameter = 0.0;
  int matched_depth = 0;
  int bisections = 0;
  double bracket_width = 0.0;
};

/// Finds a parameter whose lift reproduces the target's closest-return
/// combinatorics through `depth` levels, by bisection on the observed
/// partial quotients in alternating lexicographic order.  No floating
/// rotation-number matching is involved.  Throws BisectionStall (with the
/// deepest matched level) if the parameter interval collapses first.
TuneResult tune_parameter(Family fam, const ContinuedFraction& target, int depth,
                          Precision prec = Precision::f64);

namespace detail {

struct CompareOutcome {
  int cmp = 0;      // -1: map rotation below target, +1: above, 0: matched
  int matched = 0;  // levels matched before the verdict
};

/// Compares the exact rational p/q in (0,1) against the value of the target
/// partial quotients, in the alternating order of continued fractions; 0
/// means the rational reproduces every target term through `depth`.
int compare_rational_cf(std::int64_t p, std::int64_t q,
                        const std::vector<std::int64_t>& target, int depth);

/// Compares the observed partial-quotient stream of the family member against
/// the target prefix, in the alternating order of continued fractions.  The
/// per-level loop is bounded by the target quotient plus one, so a verdict
/// always lands in finite time; a level that fails to cross by then is ruled
/// "observed quotient larger", which also covers rational (mode-locked)
/// parameters via the alternation of convergents.
template <class Real>
CompareOutcome observed_cf_compare(Family fam, Real param,
                                   const std::vector<std::int64_t>& target,
                                   int depth) {
  Real d_prev = Real(-1);
  std::int64_t q_prev = 0;
  std::int64_t p_prev = 1;
  Real d_cur = family_step(fam, param, Real(0));
  std::int64_t q_cur = 1;
  std::int64_t p_cur = 0;
  if (!(d_cur > Real(0) && d_cur < Real(1))) {
    throw ValidationError("observed_cf_compare: lift has F(0) outside (0,1)");
  }

  for (int k = 0; k < depth; ++k) {
    const std::int64_t a_t = target[static_cast<std::size_t>(k)];
    const bool from_above = d_prev > Real(0);
    Real e = d_prev;
    std::int64_t crossed_at = -1;
    for (std::int64_t r = 0; r <= a_t; ++r) {
      Real e_next = e;
      for (std::int64_t i = 0; i < q_cur; ++i) {
        e_next = family_step(fam, param, e_next);
      }
      e_next -= static_cast<Real>(p_cur);
      if (e_next == Real(0)) {
        // 0 is exactly periodic: the rotation number is the exact rational
        // ((r+1) p_k + p_{k-1}) / ((r+1) q_k + q_{k-1}).  Settle the
        // comparison by integers.
        CompareOutcome out;
        out.cmp = compare_rational_cf((r + 1) * p_cur + p_prev,
                                      (r + 1) * q_cur + q_prev, target, depth);
        out.matched = (out.cmp == 0) ? depth : k;
        return out;
      }
      const bool crossed = from_above ? (e_next < Real(0)) : (e_next > Real(0));
      if (crossed) {
        crossed_at = r;
        break;
      }
      e = e_next;
    }
    // crossed_at == 0 (an immediate crossing, impossible for an exact
    // rotation) can occur at mode-locked probe parameters; it is simply an
    // observed quotient of zero, smaller than any admissible target term.
    std::int64_t b;
    if (crossed_at < 0) {
      b = a_t + 1;  // observed quotient exceeds the target's
    } else {
      b = crossed_at;
    }
    if (b != a_t) {
      CompareOutcome out;
      out.matched = k;
      const bool even = (k % 2 == 0);
      out.cmp = ((b > a_t) == even) ? -1 : +1;
      return out;
    }
    // Advance one level: d_{k+1} = e at r = a_t.
    const Real d_next = e;
    const std::int64_t q_next = a_t * q_cur + q_prev;
    const std::int64_t p_next = a_t * p_cur + p_prev;
    d_prev = d_cur;
    q_prev = q_cur;
    p_prev = p_cur;
    d_cur = d_next;
    q_cur = q_next;
    p_cur = p_next;
  }
  CompareOutcome out;
  out.cmp = 0;
  out.matched = depth;
  return out;
}

}  // namespace detail

}  // namespace renorm
