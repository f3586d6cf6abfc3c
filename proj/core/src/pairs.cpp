#include "renorm/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace renorm {

Jet3 lift_jet(const CircleLift& f, double x) {
  const double k = std::floor(x);
  const double xr = x - k;
  Jet3 j;
  j.f = f.eval(xr) + k;
  j.d1 = f.deriv(xr, 1);
  j.d2 = f.deriv(xr, 2);
  j.d3 = f.deriv(xr, 3);
  return j;
}

Jet3 compose_jet(const Jet3& outer, const Jet3& inner) {
  Jet3 j;
  j.f = outer.f;
  j.d1 = outer.d1 * inner.d1;
  j.d2 = outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2;
  j.d3 = outer.d3 * inner.d1 * inner.d1 * inner.d1 +
         3.0 * outer.d2 * inner.d1 * inner.d2 + outer.d1 * inner.d3;
  return j;
}

Jet3 iterate_jet(const CircleLift& f, double x, std::int64_t n) {
  Jet3 cur{x, 1.0, 0.0, 0.0};
  for (std::int64_t i = 0; i < n; ++i) {
    cur = compose_jet(lift_jet(f, cur.f), cur);
  }
  return cur;
}

MobiusNormalizer::MobiusNormalizer(double alpha, double pole_tol)
    : alpha_(alpha), pole_tol_(pole_tol) {
  if (!(alpha > 0.0)) {
    throw ValidationError("MobiusNormalizer: alpha must be positive");
  }
}

void MobiusNormalizer::guard(double denom) const {
  if (std::abs(denom) < pole_tol_) {
    throw PoleProximity("MobiusNormalizer: evaluation within tolerance of the pole");
  }
}

double MobiusNormalizer::apply(double t) const {
  const double denom = 2.0 * alpha_ + (alpha_ - 1.0) * t;
  guard(denom);
  return (alpha_ + 1.0) * t / denom;
}

double MobiusNormalizer::inverse(double x) const {
  const double denom = (alpha_ + 1.0) - (alpha_ - 1.0) * x;
  guard(denom);
  return 2.0 * alpha_ * x / denom;
}

double MobiusNormalizer::deriv(double t) const {
  const double denom = 2.0 * alpha_ + (alpha_ - 1.0) * t;
  guard(denom);
  return 2.0 * alpha_ * (alpha_ + 1.0) / (denom * denom);
}

double MobiusNormalizer::inverse_deriv(double x) const {
  const double denom = (alpha_ + 1.0) - (alpha_ - 1.0) * x;
  guard(denom);
  return 2.0 * alpha_ * (alpha_ + 1.0) / (denom * denom);
}

double MobiusNormalizer::pole() const { return 2.0 * alpha_ / (1.0 - alpha_); }

CommutingPair CommutingPair::from_lift(std::shared_ptr<const CircleLift> f,
                                       int level, const PairOptions& opts) {
  if (!f) throw ValidationError("CommutingPair: null lift");
  const auto rec = closest_returns(*f, std::max(level + 1, 1));
  return from_returns(std::move(f), rec, level, opts);
}

CommutingPair CommutingPair::from_returns(std::shared_ptr<const CircleLift> f,
                                          const ClosestReturns& rec, int level,
                                          const PairOptions& opts) {
  if (!f) throw ValidationError("CommutingPair: null lift");
  if (level < -1) throw ValidationError("CommutingPair: level must be >= -1");

  // eta is the deep first-return branch at every level; the reflection sign
  // puts its value at 0 on the negative side, so odd levels come out in the
  // same orientation as even ones.  Level -1 is the map itself viewed as a
  // pair: eta the lift, xi the unit back-translation (return times q_0 = 1
  // and q_{-1} = 0).
  CommutingPair z;
  z.f_ = std::move(f);
  if (level == -1) {
    z.eta_ = Branch{1, 0};
    z.xi_ = Branch{0, 1};
  } else {
    const auto n = static_cast<std::size_t>(level);
    if (rec.q.size() < n + 2) {
      throw ValidationError("CommutingPair: closest-return record too shallow");
    }
    z.eta_ = Branch{rec.q[n + 1], rec.p[n + 1]};
    z.xi_ = Branch{rec.q[n], rec.p[n]};
  }
  const double eta0_u = z.branch_value_unscaled(z.eta_);
  if (eta0_u == 0.0) {
    throw PrecisionExhausted("CommutingPair: deep branch vanishes at 0 exactly");
  }
  z.sigma_ = eta0_u < 0.0 ? 1 : -1;
  z.lambda_ = std::abs(eta0_u);
  z.refresh_endpoints();
  z.validate(opts);
  return z;
}

double CommutingPair::branch_value_unscaled(const Branch& b) const {
  return f_->iterate(0.0, b.m) - static_cast<double>(b.p);
}

double CommutingPair::branch_eval(const Branch& b, double x) const {
  const double s = static_cast<double>(sigma_);
  const double y = f_->iterate(s * lambda_ * x, b.m) - static_cast<double>(b.p);
  return s * y / lambda_;
}

Jet3 CommutingPair::branch_jet(const Branch& b, double x) const {
  const double s = static_cast<double>(sigma_);
  const Jet3 j = iterate_jet(*f_, s * lambda_ * x, b.m);
  Jet3 out;
  out.f = s * (j.f - static_cast<double>(b.p)) / lambda_;
  out.d1 = j.d1;                        // sigma^2 = 1
  out.d2 = s * lambda_ * j.d2;
  out.d3 = lambda_ * lambda_ * j.d3;
  return out;
}

double CommutingPair::eta(double x) const { return branch_eval(eta_, x); }
double CommutingPair::xi(double x) const { return branch_eval(xi_, x); }
Jet3 CommutingPair::eta_jet(double x) const { return branch_jet(eta_, x); }
Jet3 CommutingPair::xi_jet(double x) const { return branch_jet(xi_, x); }

void CommutingPair::refresh_endpoints() {
  const double s = static_cast<double>(sigma_);
  eta0_ = s * branch_value_unscaled(eta_) / lambda_;
  xi0_ = s * branch_value_unscaled(xi_) / lambda_;
}

void CommutingPair::validate(const PairOptions& opts) const {
  if (!(eta0_ < 0.0 && xi0_ > 0.0)) {
    throw CombinatoricsMismatch("CommutingPair: branch values at 0 have wrong signs");
  }
  const double resid = commutation_residual();
  if (!(resid <= opts.tol)) {
    throw CombinatoricsMismatch("CommutingPair: commutation residual " +
                                std::to_string(resid) + " exceeds tolerance");
  }
  if (opts.check_criticality && f_->family() != Family::rigid) {
    if (std::abs(f_->deriv(0.0, 1)) > opts.tol ||
        std::abs(f_->deriv(0.0, 2)) > opts.tol || !(f_->deriv(0.0, 3) > 0.0)) {
      throw ValidationError("CommutingPair: lift is not cubic-critical at 0");
    }
  }
}

bool CommutingPair::is_normalized(double tol) const {
  return std::abs(eta0_ + 1.0) <= tol;
}

CommutingPair CommutingPair::normalized() const {
  const double eta0_u = branch_value_unscaled(eta_);
  if (eta0_u == 0.0) {
    throw ValidationError("CommutingPair: cannot normalize, eta vanishes at 0");
  }
  CommutingPair z = *this;
  z.sigma_ = eta0_u < 0.0 ? 1 : -1;
  z.lambda_ = std::abs(eta0_u);
  z.refresh_endpoints();
  return z;
}

CommutingPair CommutingPair::homothety(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ValidationError("CommutingPair: homothety scale must be positive");
  }
  CommutingPair z = *this;
  z.lambda_ = lambda_ * s;
  z.refresh_endpoints();
  return z;
}

double CommutingPair::commutation_residual() const {
  // Evaluate both composition orders as genuine two-stage compositions; the
  // representation makes them equal as iterate counts, so what remains is
  // the floating-point orbit error, which is the honest seam defect.
  const double a = branch_eval(eta_, xi0_);
  const double b = branch_eval(xi_, eta0_);
  return std::abs(a - b);
}

namespace {

struct HeightScan {
  bool finite = false;
  bool mirrored = false;
  std::int64_t r = 0;  // height when finite, steps taken otherwise
};

/// Walks the composition point toward 0 under the iterated branch (eta in
/// the standard case, xi in the mirrored one) entirely in pair coordinates.
HeightScan height_scan(const CommutingPair& z, std::int64_t max_r, double tol) {
  const double c = z.eta(z.xi0());
  if (std::abs(c) < tol) {
    throw PrecisionExhausted("pair height: composition point within tolerance of 0");
  }
  HeightScan scan;
  scan.mirrored = c < 0.0;

  // e_1 = c; e_{r+1} = iterated branch applied to e_r.  The height is the
  // largest r with e_r still on the starting side.
  double e = c;
  for (std::int64_t r = 1; r <= max_r; ++r) {
    const double e_next = scan.mirrored ? z.xi(e) : z.eta(e);
    if (std::abs(e_next) < tol) {
      throw PrecisionExhausted("pair height: sign decision below tolerance at step " +
                               std::to_string(r));
    }
    const bool crossed = scan.mirrored ? (e_next > 0.0) : (e_next < 0.0);
    if (crossed) {
      scan.finite = true;
      scan.r = r;
      return scan;
    }
    const bool stalled = scan.mirrored ? (e_next <= e) : (e_next >= e);
    if (stalled) {
      // A fixed point of the iterated branch sits between e_next and 0: the
      // orbit can approach it forever without crossing.
      scan.finite = false;
      scan.r = r;
      return scan;
    }
    e = e_next;
  }
  scan.finite = false;
  scan.r = max_r;
  return scan;
}

std::int64_t checked_combine(std::int64_t r, std::int64_t a, std::int64_t b,
                             const char* what) {
  // r*a + b with overflow detection.
  if (a != 0 && r > (std::numeric_limits<std::int64_t>::max() - b) / a) {
    throw IntegerOverflow(std::string("renormalize: ") + what + " overflows", 0);
  }
  return r * a + b;
}

}  // namespace

Height pair_height(const CommutingPair& z, std::int64_t max_r, double tol) {
  const HeightScan scan = height_scan(z, max_r, tol);
  Height h;
  h.finite = scan.finite;
  h.value = scan.r;
  return h;
}

CommutingPair renormalize(const CommutingPair& z, std::int64_t max_r, double tol) {
  const HeightScan scan = height_scan(z, max_r, tol);
  if (!scan.finite) {
    throw CombinatoricsMismatch(
        "renormalize: height not finite within " + std::to_string(scan.r) +
        " steps (iterated branch has a fixed point short of 0)");
  }

  const CommutingPair::Branch he = z.eta_branch();
  const CommutingPair::Branch hx = z.xi_branch();
  CommutingPair out = z;
  if (!scan.mirrored) {
    // The composite eta^r ∘ xi becomes the new deep branch; eta survives.
    out.eta_.m = checked_combine(scan.r, he.m, hx.m, "iterate count");
    out.eta_.p = checked_combine(scan.r, he.p, hx.p, "translation");
    out.xi_ = he;
  } else {
    // The composite xi^r ∘ eta becomes the new deep branch; xi survives.
    out.eta_.m = checked_combine(scan.r, hx.m, he.m, "iterate count");
    out.eta_.p = checked_combine(scan.r, hx.p, he.p, "translation");
    out.xi_ = hx;
  }
  const double eta0_u = out.branch_value_unscaled(out.eta_);
  if (eta0_u == 0.0) {
    throw PrecisionExhausted("renormalize: new eta branch vanishes at 0 exactly");
  }
  out.sigma_ = eta0_u < 0.0 ? 1 : -1;
  out.lambda_ = std::abs(eta0_u);
  out.refresh_endpoints();
  if (!(out.xi0_ > 0.0)) {
    throw CombinatoricsMismatch("renormalize: new xi branch not positive at 0");
  }
  return out;
}

namespace {

/// One conjugated branch sample: value and (order >= 1) first derivative of
/// A ∘ branch ∘ A^{-1} at t.
struct ConjSample {
  double v = 0.0;
  double s = 0.0;
};

ConjSample conjugated_sample(const CommutingPair& z, const MobiusNormalizer& A,
                             bool eta_side, double t, int order) {
  const double u = A.inverse(t);
  ConjSample out;
  if (order >= 1) {
    const Jet3 j = eta_side ? z.eta_jet(u) : z.xi_jet(u);
    out.v = A.apply(j.f);
    out.s = A.deriv(j.f) * j.d1 * A.inverse_deriv(t);
  } else {
    out.v = A.apply(eta_side ? z.eta(u) : z.xi(u));
  }
  return out;
}

}  // namespace

double metric_distance(int order, const CommutingPair& z1, const CommutingPair& z2,
                       int grid) {
  if (order < 0 || order > 2) {
    throw ValidationError("metric_distance: order must be 0..2");
  }
  if (grid < 8) throw ValidationError("metric_distance: grid too small");

  const CommutingPair a = z1.normalized();
  const CommutingPair b = z2.normalized();
  const MobiusNormalizer A1(a.xi0());
  const MobiusNormalizer A2(b.xi0());

  // Ratio of branch values at 0; eta(0) = -1 after normalization.
  double dist = std::abs(a.xi0() - b.xi0());

  const double h = 1.0 / static_cast<double>(grid);
  std::vector<double> s1, s2;
  for (int side = 0; side < 2; ++side) {
    const bool eta_side = (side == 0);
    if (order >= 2) {
      s1.assign(static_cast<std::size_t>(grid) + 1, 0.0);
      s2.assign(static_cast<std::size_t>(grid) + 1, 0.0);
    }
    for (int j = 1; j <= grid; ++j) {
      const double t = (eta_side ? 1.0 : -1.0) * static_cast<double>(j) * h;
      const ConjSample c1 = conjugated_sample(a, A1, eta_side, t, order);
      const ConjSample c2 = conjugated_sample(b, A2, eta_side, t, order);
      dist = std::max(dist, std::abs(c1.v - c2.v));
      if (order >= 1) dist = std::max(dist, std::abs(c1.s - c2.s));
      if (order >= 2) {
        s1[static_cast<std::size_t>(j)] = c1.s;
        s2[static_cast<std::size_t>(j)] = c2.s;
      }
    }
    if (order >= 2) {
      // Centered differences of the first-derivative samples; |t| increases
      // with j, so the node spacing is h on both sides.
      for (int j = 2; j <= grid - 1; ++j) {
        const auto k = static_cast<std::size_t>(j);
        const double f1 = (s1[k + 1] - s1[k - 1]) / (2.0 * h);
        const double f2 = (s2[k + 1] - s2[k - 1]) / (2.0 * h);
        dist = std::max(dist, std::abs(f1 - f2));
      }
    }
  }
  return dist;
}

double metric_distance_certified(int order, const CommutingPair& z1,
                                 const CommutingPair& z2, int grid, double rel_tol,
                                 double abs_floor) {
  const double coarse = metric_distance(order, z1, z2, grid);
  const double fine = metric_distance(order, z1, z2, 4 * grid);
  const double scale = std::max(std::abs(fine), abs_floor);
  if (std::abs(fine - coarse) > rel_tol * scale) {
    throw QuadratureNonconvergence(
        "metric_distance: grid refinement moved the value by more than the "
        "certification tolerance");
  }
  return fine;
}

GluedCircleMap::GluedCircleMap(const CommutingPair& z, double seam_tol)
    : pair_(z.normalized()), circumference_(pair_.xi0() + 1.0) {
  seam_residual_ = pair_.commutation_residual() / circumference_;
  if (!(seam_residual_ <= seam_tol)) {
    throw SeamDiscontinuity("GluedCircleMap: seam residual " +
                            std::to_string(seam_residual_) + " exceeds tolerance");
  }
}

double GluedCircleMap::eval(double x) const {
  const double k = std::floor(x);
  const double u = x - k;
  const double L = circumference_;
  const double t = -1.0 + u * L;
  const double v = (t < 0.0) ? pair_.xi(t) : pair_.eta(t) + L;
  return (v + 1.0) / L + k;
}

double GluedCircleMap::deriv(double x, int order) const {
  if (order < 1 || order > 3) throw ValidationError("deriv: order must be 1..3");
  const double u = x - std::floor(x);
  const double L = circumference_;
  const double t = -1.0 + u * L;
  const Jet3 j = (t < 0.0) ? pair_.xi_jet(t) : pair_.eta_jet(t);
  switch (order) {
    case 1: return j.d1;
    case 2: return L * j.d2;
    default: return L * L * j.d3;
  }
}

double composition_gap_bound(double deriv_bound, int count, double eps) {
  if (!(deriv_bound >= 0.0) || count < 0 || !(eps >= 0.0)) {
    throw ValidationError("composition_gap_bound: arguments must be nonnegative");
  }
  double sum = 0.0;
  double pw = 1.0;
  for (int j = 0; j < count; ++j) {
    sum += pw;
    pw *= deriv_bound;
  }
  return sum * eps;
}

}  // namespace renorm
