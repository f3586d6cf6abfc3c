#include "renorm/complexext.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace renorm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double WirtingerJet::jacobian() const {
  return std::norm(dz) - std::norm(dzbar);
}

WirtingerJet compose_wirtinger(const WirtingerJet& outer,
                               const WirtingerJet& inner) {
  WirtingerJet out;
  out.value = outer.value;
  out.dz = outer.dz * inner.dz + outer.dzbar * std::conj(inner.dzbar);
  out.dzbar = outer.dz * inner.dzbar + outer.dzbar * std::conj(inner.dz);
  return out;
}

double beltrami_modulus(const WirtingerJet& jet) {
  if (jet.dz == Complex(0.0, 0.0)) {
    throw PrecisionExhausted("beltrami_modulus: degenerate jet (dz = 0)");
  }
  return std::abs(jet.dzbar) / std::abs(jet.dz);
}

double model_lift(double x, int order) {
  return arnold_lift<double>(0.0, x, order);
}

double model_lift_inverse(double y, int max_iter, double tol) {
  if (max_iter < 1) {
    throw ValidationError("model_lift_inverse: max_iter must be positive");
  }
  if (!(tol > 0.0)) {
    throw ValidationError("model_lift_inverse: tol must be positive");
  }
  const double k = std::floor(y);
  const double t = y - k;
  if (t == 0.0) {
    return k;
  }
  // |A(x) - x| <= 1/(2 pi) < 0.16, so the preimage of t lies in this bracket.
  double lo = t - 0.16;
  double hi = t + 0.16;
  // Near the critical values A(x) ~ m + (2 pi^2 / 3)(x - m)^3: cube-root seed.
  double x;
  if (t < 0.1) {
    x = std::cbrt(1.5 * t / (kPi * kPi));
  } else if (t > 0.9) {
    x = 1.0 - std::cbrt(1.5 * (1.0 - t) / (kPi * kPi));
  } else {
    x = t;
  }
  for (int it = 0; it < max_iter; ++it) {
    const double r = model_lift(x, 0) - t;
    if (std::abs(r) <= tol) {
      return x + k;
    }
    (r > 0.0 ? hi : lo) = x;
    const double d = model_lift(x, 1);
    double nx = d > 0.0 ? x - r / d : std::numeric_limits<double>::quiet_NaN();
    if (!(nx > lo && nx < hi)) {
      nx = 0.5 * (lo + hi);
    }
    x = nx;
  }
  throw RootFindFailure("model_lift_inverse: residual above " +
                        std::to_string(tol) + " after " +
                        std::to_string(max_iter) + " iterations");
}

WirtingerJet model_lift_jet(Complex z) {
  const double k = std::floor(z.real());
  const Complex zr = z - k;
  const Complex s = std::sin(kTwoPi * zr);
  const Complex sp = std::sin(kPi * zr);
  WirtingerJet out;
  out.value = z - s / kTwoPi;
  out.dz = 2.0 * sp * sp;  // 1 - cos(2 pi z), stable at the critical points
  out.dzbar = Complex(0.0, 0.0);
  return out;
}

DecomposedOuterMap::DecomposedOuterMap(std::shared_ptr<const CircleLift> f)
    : f_(std::move(f)) {
  if (!f_) {
    throw ValidationError("DecomposedOuterMap: null lift");
  }
  // Families without the stable critical-slope oracle are rejected here.
  (void)f_->critical_ratio(0.25, 0);
}

double DecomposedOuterMap::value(double y) const {
  const double k = std::floor(y);
  const double x = model_lift_inverse(y - k);
  return f_->eval(x) + k;
}

double DecomposedOuterMap::derivative(double y) const {
  const double k = std::floor(y);
  const double x = model_lift_inverse(y - k);
  // f'(x) / A'(x) with the shared factor 2 sin^2(pi x) cancelled exactly.
  return f_->critical_ratio(x, 0);
}

Decomposition decompose(std::shared_ptr<const CircleLift> f) {
  if (!f) {
    throw ValidationError("decompose: null lift");
  }
  Decomposition d;
  d.h1 = std::make_shared<IdentityMap>();
  switch (f->family()) {
    case Family::arnold:
      // f = A + a exactly, so the outer chart is the translation by a.
      d.h2 = std::make_shared<TranslationMap>(f->parameter());
      break;
    case Family::blaschke:
      d.h2 = std::make_shared<DecomposedOuterMap>(std::move(f));
      break;
    default:
      throw ValidationError(
          "decompose: lift must have a cubic critical point at the integers");
  }
  return d;
}

namespace {

/// Node coefficients of the degree-3 interpolation extension:
/// c_j = (-1)^j C(3,j) / (1 + ij/3), their first-derivative companions
/// d_j = c_j (1 - ij/3), and the normalization N = sum c_j.
struct InterpTable {
  Complex c[4];
  Complex d[4];
  Complex n{0.0, 0.0};

  InterpTable() {
    const double sign[4] = {1.0, -3.0, 3.0, -1.0};
    for (int j = 0; j < 4; ++j) {
      const double s = static_cast<double>(j) / 3.0;
      c[j] = sign[j] / Complex(1.0, s);
      d[j] = c[j] * Complex(1.0, -s);
      n += c[j];
    }
  }
};

const InterpTable& interp_table() {
  static const InterpTable table;
  return table;
}

constexpr double kNode[4] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

/// Unsymmetrized extension jet at x + iy.
WirtingerJet interp_raw(const RealMap& h, double x, double y) {
  double hv[4];
  double hd[4];
  for (int j = 0; j < 4; ++j) {
    const double t = x + kNode[j] * y;
    hv[j] = h.value(t);
    hd[j] = h.derivative(t);
  }
  const InterpTable& ct = interp_table();
  Complex v{0.0, 0.0};
  Complex p{0.0, 0.0};
  for (int j = 0; j < 4; ++j) {
    v += ct.c[j] * hv[j];
    p += ct.d[j] * hd[j];
  }
  // The dzbar coefficients are the integers (-1)^j C(3,j); paired as
  // differences the sum is exactly zero whenever the four slopes agree.
  const double q = (hd[0] - hd[3]) + 3.0 * (hd[2] - hd[1]);
  WirtingerJet out;
  out.value = v / ct.n;
  out.dz = p / (2.0 * ct.n);
  out.dzbar = Complex(q, 0.0) / (2.0 * ct.n);
  return out;
}

}  // namespace

WirtingerJet interp_extend(const RealMap& h, Complex z) {
  const double x = z.real();
  const double y = z.imag();
  if (y == 0.0) {
    WirtingerJet out;
    out.value = Complex(h.value(x), 0.0);
    out.dz = Complex(h.derivative(x), 0.0);
    out.dzbar = Complex(0.0, 0.0);
    return out;
  }
  const WirtingerJet up = interp_raw(h, x, y);
  const WirtingerJet dn = interp_raw(h, x, -y);
  WirtingerJet out;
  out.value = 0.5 * (up.value + std::conj(dn.value));
  out.dz = 0.5 * (up.dz + std::conj(dn.dz));
  out.dzbar = 0.5 * (up.dzbar + std::conj(dn.dzbar));
  return out;
}

InterpolationExtension::InterpolationExtension(
    std::shared_ptr<const RealMap> base)
    : h_(std::move(base)) {
  if (!h_) {
    throw ValidationError("InterpolationExtension: null base map");
  }
}

WirtingerJet InterpolationExtension::jet(Complex z) const {
  return interp_extend(*h_, z);
}

Complex InterpolationExtension::normalization() const {
  return interp_table().n;
}

ExtendedLift::ExtendedLift(std::shared_ptr<const CircleLift> f,
                           double band_target, double band_floor)
    : f_(std::move(f)),
      charts_(decompose(f_)),
      h1x_(charts_.h1),
      h2x_(charts_.h2) {
  if (!(band_floor > 0.0) || !(band_target >= band_floor)) {
    throw ValidationError("ExtendedLift: need 0 < band_floor <= band_target");
  }
  for (double band = band_target; band >= band_floor; band *= 0.5) {
    if (outer_jacobian_positive(band)) {
      band_ = band;
      return;
    }
  }
  throw BandExceeded(
      "ExtendedLift: no band above " + std::to_string(band_floor) +
      " keeps the outer factor's Jacobian positive");
}

bool ExtendedLift::outer_jacobian_positive(double band) const {
  std::vector<double> xs;
  for (int i = 0; i < 64; ++i) {
    xs.push_back(static_cast<double>(i) / 64.0);
  }
  // Extra columns near the critical point, where the outer chart is least
  // regular.
  const double offsets[] = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  for (const double off : offsets) {
    xs.push_back(off);
    xs.push_back(1.0 - off);
  }
  const double rows[] = {1.0, 0.5, 0.25, 0.125};
  for (const double x : xs) {
    for (const double s : rows) {
      // Probe the outer factor along the model image of the band column:
      // the image pinches cubically at the critical points, which is
      // exactly what keeps the chart's distortion in check there.
      const Complex w = model_lift_jet(Complex(x, band * s)).value;
      const WirtingerJet jet = h2x_.jet(w);
      if (!(jet.jacobian() > 0.0)) {
        return false;
      }
    }
  }
  return true;
}

WirtingerJet ExtendedLift::jet(Complex z) const {
  if (std::abs(z.imag()) > band_) {
    throw BandExceeded("ExtendedLift: |Im z| = " +
                       std::to_string(std::abs(z.imag())) +
                       " exceeds the band half-height " +
                       std::to_string(band_));
  }
  const WirtingerJet j1 = h1x_.jet(z);
  const WirtingerJet jm = model_lift_jet(j1.value);
  const WirtingerJet j2 = h2x_.jet(jm.value);
  return compose_wirtinger(j2, compose_wirtinger(jm, j1));
}

WirtingerJet extended_branch_jet(const ExtendedLift& F,
                                 const CommutingPair& pair, bool eta_branch,
                                 Complex z) {
  const CommutingPair::Branch& br =
      eta_branch ? pair.eta_branch() : pair.xi_branch();
  const double s = static_cast<double>(pair.reflection()) * pair.scale();
  WirtingerJet acc;
  acc.value = s * z;
  for (std::int64_t k = 0; k < br.m; ++k) {
    const WirtingerJet fj = F.jet(acc.value);
    acc = compose_wirtinger(fj, acc);
  }
  // Branch value in pair coordinates; the real coordinate scalings leave the
  // Wirtinger derivatives (hence the Beltrami modulus) unchanged.
  acc.value = static_cast<double>(pair.reflection()) *
              (acc.value - static_cast<double>(br.p)) / pair.scale();
  return acc;
}

std::vector<BeltramiLevel> beltrami_decay(const ExtendedLift& F, int level_lo,
                                          int level_hi,
                                          const BeltramiOptions& opts) {
  if (level_lo < -1 || level_hi < level_lo) {
    throw ValidationError("beltrami_decay: need -1 <= level_lo <= level_hi");
  }
  if (opts.samples < 1) {
    throw ValidationError("beltrami_decay: samples must be positive");
  }
  if (!(opts.alpha > 0.0 && opts.alpha <= 10.0)) {
    throw ValidationError("beltrami_decay: alpha must lie in (0, 10]");
  }
  if (!(opts.in_band_fraction >= 0.0 && opts.in_band_fraction <= 1.0)) {
    throw ValidationError(
        "beltrami_decay: in_band_fraction must lie in [0, 1]");
  }
  const auto rec = closest_returns(F.source(), std::max(level_hi + 1, 1));
  std::vector<BeltramiLevel> out;
  out.reserve(static_cast<std::size_t>(level_hi - level_lo + 1));
  for (int n = level_lo; n <= level_hi; ++n) {
    const CommutingPair pair =
        CommutingPair::from_returns(F.source_ptr(), rec, n);
    BeltramiLevel row;
    row.level = n;
    row.samples = opts.samples;
    for (int b = 0; b < 2; ++b) {
      const bool is_eta = (b == 0);
      const double dom_a = is_eta ? 0.0 : -1.0;
      const double dom_b = is_eta ? pair.xi0() : 0.0;
      const double len = dom_b - dom_a;
      const double r = opts.alpha * len;
      std::mt19937_64 rng(opts.seed +
                          1000003ull * static_cast<std::uint64_t>(n + 2) +
                          static_cast<std::uint64_t>(b));
      // Uniform doubles straight from the engine's bits, so the stream does
      // not depend on the library's distribution implementation.
      const auto draw = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
      };
      double sup = 0.0;
      int skipped = 0;
      int produced = 0;
      long attempts = 0;
      const long cap = 1000L * opts.samples + 1000L;
      while (produced < opts.samples) {
        if (++attempts > cap) {
          throw ValidationError(
              "beltrami_decay: stadium rejection sampling stalled");
        }
        const double x = (dom_a - r) + draw() * (len + 2.0 * r);
        const double y = (2.0 * draw() - 1.0) * r;
        const double dx = x < dom_a ? dom_a - x : (x > dom_b ? x - dom_b : 0.0);
        if (dx * dx + y * y > r * r) {
          continue;
        }
        ++produced;
        try {
          const WirtingerJet jet =
              extended_branch_jet(F, pair, is_eta, Complex(x, y));
          const double mu = beltrami_modulus(jet);
          sup = std::max(sup, mu);
        } catch (const BandExceeded&) {
          ++skipped;
        } catch (const PrecisionExhausted&) {
          ++skipped;
        }
      }
      if (is_eta) {
        row.sup_mu_eta = sup;
        row.skipped_eta = skipped;
      } else {
        row.sup_mu_xi = sup;
        row.skipped_xi = skipped;
      }
    }
    const double need = opts.in_band_fraction * opts.samples;
    row.valid = (opts.samples - row.skipped_eta) >= need &&
                (opts.samples - row.skipped_xi) >= need;
    out.push_back(row);
  }
  return out;
}

PoincareDisk::PoincareDisk(double a, double b, double theta)
    : a_(a), b_(b), theta_(theta) {
  if (!(a < b)) {
    throw ValidationError("PoincareDisk: need a < b");
  }
  if (!(theta > 0.0 && theta < kPi)) {
    throw ValidationError("PoincareDisk: theta must lie in (0, pi)");
  }
}

double PoincareDisk::viewing_angle(Complex z) const {
  if (z == Complex(b_, 0.0)) {
    return 0.0;
  }
  const Complex ratio = (Complex(a_, 0.0) - z) / (Complex(b_, 0.0) - z);
  return std::abs(std::arg(ratio));
}

bool PoincareDisk::contains(Complex z) const {
  return viewing_angle(z) > theta_;
}

double PoincareDisk::diameter() const {
  return poincare_diam(theta_, a_, b_);
}

Complex PoincareDisk::upper_center() const {
  const double half = 0.5 * (b_ - a_);
  return Complex(0.5 * (a_ + b_),
                 half * std::cos(theta_) / std::sin(theta_));
}

double PoincareDisk::radius() const {
  return 0.5 * (b_ - a_) / std::sin(theta_);
}

double poincare_diam(double theta, double a, double b) {
  if (!(a < b)) {
    throw ValidationError("poincare_diam: need a < b");
  }
  if (!(theta > 0.0 && theta < kPi)) {
    throw ValidationError("poincare_diam: theta must lie in (0, pi)");
  }
  const double psi =
      std::max(1.0, (1.0 + std::cos(theta)) / std::sin(theta));
  return psi * (b - a);
}

double poincare_epsilon(double theta) {
  if (!(theta > 0.0 && theta < kPi)) {
    throw ValidationError("poincare_epsilon: theta must lie in (0, pi)");
  }
  return std::log(std::tan(0.5 * kPi - 0.25 * theta));
}

namespace {

/// Inverse of a monotone lift by guarded Newton/bisection.  Any degree-one
/// lift with F(0) in (0, 1) satisfies |F(x) - x| < 2, which brackets the
/// preimage.
double invert_lift_reduced(const CircleLift& f, double y) {
  const double k = std::floor(y);
  const double t = y - k;
  double lo = t - 2.0;
  double hi = t + 2.0;
  double x = t;
  for (int it = 0; it < 80; ++it) {
    const double r = f.eval(x) - t;
    if (std::abs(r) <= 1e-13) {
      return x + k;
    }
    (r > 0.0 ? hi : lo) = x;
    const double d = f.deriv(x, 1);
    double nx = d > 0.0 ? x - r / d : std::numeric_limits<double>::quiet_NaN();
    if (!(nx > lo && nx < hi)) {
      nx = 0.5 * (lo + hi);
    }
    x = nx;
  }
  throw RootFindFailure("lift inverse: residual target not met");
}

/// One planar Newton pullback F(zeta) = target from the given seed.
/// Returns false on divergence (band exit, degenerate Jacobian, iteration
/// cap).
bool planar_pullback(const ExtendedLift& F, Complex target, Complex seed,
                     Complex* zeta_out) {
  Complex zeta = seed;
  const double scale = std::max(1.0, std::abs(target));
  for (int it = 0; it < 50; ++it) {
    WirtingerJet jet;
    try {
      jet = F.jet(zeta);
    } catch (const BandExceeded&) {
      return false;
    }
    const Complex r = target - jet.value;
    if (std::abs(r) <= 1e-12 * scale) {
      *zeta_out = zeta;
      return true;
    }
    const double den = jet.jacobian();
    if (!(den > 1e-20)) {
      return false;
    }
    Complex delta = (std::conj(jet.dz) * r - jet.dzbar * std::conj(r)) / den;
    const double mag = std::abs(delta);
    if (mag > 0.25) {
      delta *= 0.25 / mag;
    }
    zeta += delta;
  }
  return false;
}

}  // namespace

SchwarzReport schwarz_inclusion_check(const ExtendedLift& F, int level,
                                      double theta, int boundary_samples) {
  if (level < 0) {
    throw ValidationError("schwarz_inclusion_check: level must be >= 0");
  }
  if (!(theta > 0.0 && theta < kPi)) {
    throw ValidationError(
        "schwarz_inclusion_check: theta must lie in (0, pi)");
  }
  if (boundary_samples < 4) {
    throw ValidationError(
        "schwarz_inclusion_check: need at least 4 boundary samples");
  }
  const CircleLift& f = F.source();
  const auto rec = closest_returns(f, level + 1);
  const auto qn1 = rec.q[static_cast<std::size_t>(level) + 1];
  const double dn = rec.d[static_cast<std::size_t>(level)];
  std::vector<double> lo(static_cast<std::size_t>(qn1) + 1);
  std::vector<double> hi(static_cast<std::size_t>(qn1) + 1);
  double e = 0.0;
  double c = dn;
  for (std::int64_t j = 0; j <= qn1; ++j) {
    lo[static_cast<std::size_t>(j)] = std::min(e, c);
    hi[static_cast<std::size_t>(j)] = std::max(e, c);
    if (j < qn1) {
      e = f.step(e);
      c = f.step(c);
    }
  }
  SchwarzReport rep;
  rep.level = level;
  rep.theta = theta;
  rep.boundary_samples = boundary_samples;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::int64_t j = qn1; j >= 1; --j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    const PoincareDisk target_disk(lo[sj], hi[sj], theta);
    const PoincareDisk dest_disk(lo[sj - 1], hi[sj - 1], theta);
    const Complex ctr = target_disk.upper_center();
    const double radius = target_disk.radius();
    const double half = 0.5 * (hi[sj] - lo[sj]);
    const double phi_b = std::atan2(-ctr.imag(), half);
    double phi_a = std::atan2(-ctr.imag(), -half);
    if (phi_a <= phi_b) {
      phi_a += kTwoPi;
    }
    int fails = 0;
    double vmin = inf;
    for (int s = 0; s < boundary_samples; ++s) {
      const double phi =
          phi_b + (static_cast<double>(s) + 0.5) * (phi_a - phi_b) /
                      static_cast<double>(boundary_samples);
      const Complex target =
          ctr + radius * Complex(std::cos(phi), std::sin(phi));
      const double u = std::clamp(target.real(), lo[sj], hi[sj]);
      double xpre;
      try {
        xpre = invert_lift_reduced(f, u);
      } catch (const RootFindFailure&) {
        ++fails;
        continue;
      }
      const double slope = std::max(0.2, f.deriv(xpre, 1));
      const double im_seed =
          std::min(target.imag() / slope, 0.5 * F.band());
      Complex zeta;
      if (planar_pullback(F, target, Complex(xpre, im_seed), &zeta)) {
        vmin = std::min(vmin, dest_disk.viewing_angle(zeta));
      } else {
        ++fails;
      }
    }
    SchwarzStep step;
    step.j = j;
    step.interval_length = hi[sj] - lo[sj];
    step.theta_min = vmin == inf ? 0.0 : vmin;
    step.newton_failures = fails;
    rep.steps.push_back(step);
    rep.total_newton_failures += fails;
  }
  const double psi = std::max(1.0, (1.0 + std::cos(theta)) / std::sin(theta));
  double sxx = 0.0;
  double sxl = 0.0;
  for (const SchwarzStep& step : rep.steps) {
    const double x = psi * step.interval_length * step.interval_length;
    const double loss = std::max(0.0, theta - step.theta_min);
    sxx += x * x;
    sxl += x * loss;
  }
  rep.m_hat = sxx > 0.0 ? std::max(0.0, sxl / sxx) : 0.0;
  rep.min_margin = inf;
  for (SchwarzStep& step : rep.steps) {
    step.fitted_theta =
        theta - rep.m_hat * psi * step.interval_length * step.interval_length;
    step.margin = step.theta_min - step.fitted_theta;
    rep.min_margin = std::min(rep.min_margin, step.margin);
  }
  if (rep.steps.empty()) {
    rep.min_margin = 0.0;
  }
  return rep;
}

}  // namespace renorm
