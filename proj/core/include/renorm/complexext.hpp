#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "renorm/errors.hpp"
#include "renorm/maps.hpp"
#include "renorm/pairs.hpp"

namespace renorm {

using Complex = std::complex<double>;

/// Value and both Wirtinger derivatives of a planar map at a point.  For
/// holomorphic factors dzbar is exactly zero.
struct WirtingerJet {
  Complex value{0.0, 0.0};
  Complex dz{1.0, 0.0};
  Complex dzbar{0.0, 0.0};

  /// |dz|^2 - |dzbar|^2: positive where the map preserves orientation.
  double jacobian() const;
};

/// Jet of outer∘inner given the outer jet at inner.value:
///
///   d(g∘f)    = dg df + d̄g conj(d̄f),
///   d̄(g∘f)   = dg d̄f + d̄g conj(df).
WirtingerJet compose_wirtinger(const WirtingerJet& outer,
                               const WirtingerJet& inner);

/// |dzbar / dz|.  Throws PrecisionExhausted at a degenerate point (dz = 0).
double beltrami_modulus(const WirtingerJet& jet);

/// One-dimensional map with a first-derivative oracle: the ingredient a
/// planar interpolation extension is built from.
class RealMap {
 public:
  virtual ~RealMap() = default;
  virtual double value(double x) const = 0;
  virtual double derivative(double x) const = 0;
};

class IdentityMap final : public RealMap {
 public:
  double value(double x) const override { return x; }
  double derivative(double) const override { return 1.0; }
};

class TranslationMap final : public RealMap {
 public:
  explicit TranslationMap(double c) : c_(c) {}
  double value(double x) const override { return x + c_; }
  double derivative(double) const override { return 1.0; }
  double offset() const { return c_; }

 private:
  double c_;
};

/// The model lift A(x) = x - sin(2 pi x) / (2 pi) (the parameter-zero
/// standard-family lift): entire, commutes with unit translation, cubic
/// critical points exactly at the integers, critical values the integers.
double model_lift(double x, int order = 0);

/// Monotone inverse of the model lift by guarded Newton/bisection inside the
/// bracket |A(x) - x| <= 1/(2 pi), seeded with the local cube root near the
/// critical values.  Throws RootFindFailure if the residual target is not
/// met.  Commutes exactly with unit translation (the argument is reduced).
double model_lift_inverse(double y, int max_iter = 60, double tol = 1e-14);

/// Entire complex extension of the model lift; dzbar = 0 identically.
WirtingerJet model_lift_jet(Complex z);

/// Outer factor h2 = f ∘ A^{-1} of the identity-chart decomposition.  The
/// value inverts the model lift numerically; the derivative is the stable
/// critical-slope ratio f'(x) / A'(x) evaluated with the common cubic factor
/// cancelled analytically, so it stays finite and positive across the
/// critical values (its limit there is f'''(c) / A'''(c)).
class DecomposedOuterMap final : public RealMap {
 public:
  explicit DecomposedOuterMap(std::shared_ptr<const CircleLift> f);
  double value(double y) const override;
  double derivative(double y) const override;
  const CircleLift& source() const { return *f_; }

 private:
  std::shared_ptr<const CircleLift> f_;
};

/// Charts of the decomposition f = h2 ∘ A ∘ h1 with the identity chart
/// h1 = id: for the standard family h2 is exactly the translation by the
/// family parameter (f = A + a), for the Blaschke family it is the numeric
/// outer factor.  Lifts without a cubic critical point are rejected.
struct Decomposition {
  std::shared_ptr<const RealMap> h1;
  std::shared_ptr<const RealMap> h2;
};

Decomposition decompose(std::shared_ptr<const CircleLift> f);

/// Planar extension of a one-dimensional map h from its values on four
/// equally spaced real nodes between x and x + y: the degree-3 Lagrange
/// interpolation polynomial of h at the nodes x + (j/3) y, evaluated at
/// x + iy, then symmetrized about the real axis,
///
///   H(z) = (H_raw(z) + conj(H_raw(conj z))) / 2,
///
/// which preserves the restriction to the real line.  H restricted to R is
/// h exactly, d̄H vanishes on R exactly (the coefficient sum is a paired
/// third difference of equal values), transversally to order 2, and a unit
/// translation of a lift-like h commutes with H.  Polynomials of degree at
/// most 3 are reproduced exactly, so the extension of the identity is the
/// identity.
class InterpolationExtension {
 public:
  static constexpr int order = 3;

  explicit InterpolationExtension(std::shared_ptr<const RealMap> base);
  WirtingerJet jet(Complex z) const;
  const RealMap& base() const { return *h_; }
  /// Normalization constant N = sum of the node coefficients
  /// (-1)^j C(3,j) / (1 + ij/3).
  Complex normalization() const;

 private:
  std::shared_ptr<const RealMap> h_;
};

/// Extension jet of h at z without constructing the class.
WirtingerJet interp_extend(const RealMap& h, Complex z);

/// Complex extension F = H2 ∘ A ∘ H1 of a cubic-critical lift on the band
/// |Im z| <= band(): interpolation extensions of the decomposition charts
/// around the entire model lift.  The restriction to R is the source lift
/// (to the inversion residual), critical points are exactly the integers,
/// and F commutes with unit translation.  The band half-height is chosen by
/// halving from `band_target` until the outer factor's Jacobian is positive
/// on a scan grid of its image band; BandExceeded if none above
/// `band_floor` qualifies, and from jet() for arguments off the band.
class ExtendedLift {
 public:
  explicit ExtendedLift(std::shared_ptr<const CircleLift> f,
                        double band_target = 0.05, double band_floor = 1e-4);

  WirtingerJet jet(Complex z) const;
  double band() const { return band_; }
  const CircleLift& source() const { return *f_; }
  const std::shared_ptr<const CircleLift>& source_ptr() const { return f_; }
  const InterpolationExtension& inner() const { return h1x_; }
  const InterpolationExtension& outer() const { return h2x_; }

 private:
  bool outer_jacobian_positive(double band) const;

  std::shared_ptr<const CircleLift> f_;
  Decomposition charts_;
  InterpolationExtension h1x_;
  InterpolationExtension h2x_;
  double band_ = 0.0;
};

/// Jet of the pair's branch map at the pair-coordinate point z: the branch
/// iterate of the extended lift composed through the (holomorphic, real)
/// coordinate scaling, so value is the branch value and dz, dzbar are those
/// of the lift-coordinate composition.  Throws BandExceeded if the orbit
/// leaves the band.
WirtingerJet extended_branch_jet(const ExtendedLift& F,
                                 const CommutingPair& pair, bool eta_branch,
                                 Complex z);

struct BeltramiOptions {
  int samples = 256;
  double alpha = 0.25;
  std::uint64_t seed = 12345;
  /// Minimum fraction of samples whose orbit must stay inside the band for
  /// the level to be marked valid.
  double in_band_fraction = 0.9;
};

/// Per-level supremum of the Beltrami modulus |d̄/d| of the two branch
/// compositions, sampled over the alpha-neighborhoods of the branch domains
/// [0, xi(0)] (eta) and [-1, 0] (xi) in pair coordinates.
struct BeltramiLevel {
  int level = 0;
  double sup_mu_eta = 0.0;
  double sup_mu_xi = 0.0;
  int samples = 0;
  int skipped_eta = 0;
  int skipped_xi = 0;
  bool valid = false;
};

/// Measures the decay of conformal distortion along the renormalization
/// orbit: for each level the branch compositions are evaluated at `samples`
/// points of the stadium neighborhoods N_alpha of their domains (uniform,
/// deterministic given the seed), mapped to lift coordinates by the pair's
/// scaling.  Points whose orbit leaves the band or meets a degenerate
/// Jacobian are skipped and counted.
std::vector<BeltramiLevel> beltrami_decay(const ExtendedLift& F, int level_lo,
                                          int level_hi,
                                          const BeltramiOptions& opts = {});

/// Region of points that view the open interval (a, b) under an angle
/// greater than theta: the union of two circular segments glued along the
/// interval, each bounded by an arc through a and b with inscribed angle
/// theta.  theta = pi/2 is the Euclidean disk on diameter (a, b); as theta
/// decreases the region grows, with diameter psi(theta) (b - a),
/// psi(theta) = max{1, (1 + cos theta) / sin theta}.
class PoincareDisk {
 public:
  PoincareDisk(double a, double b, double theta);

  /// Angle under which z views the interval: |arg((a - z) / (b - z))|.
  /// Zero at the endpoints and at infinity, pi on the open interval.
  double viewing_angle(Complex z) const;
  /// Open-region membership: viewing_angle(z) > theta.
  bool contains(Complex z) const;
  double diameter() const;
  /// Center and radius of the arc bounding the upper segment.
  Complex upper_center() const;
  double radius() const;

  double a() const { return a_; }
  double b() const { return b_; }
  double theta() const { return theta_; }

 private:
  double a_;
  double b_;
  double theta_;
};

double poincare_diam(double theta, double a, double b);

/// Hyperbolic radius of the region in the slit-plane metric:
/// log tan(pi/2 - theta/4), decreasing in theta.
double poincare_epsilon(double theta);

/// One pullback step of the inclusion check: boundary points of the disk
/// over f^j(I_n) pulled back through the inverse branch of the extended
/// lift, then measured against the disk over f^{j-1}(I_n).
struct SchwarzStep {
  std::int64_t j = 0;
  double interval_length = 0.0;  // |f^j(I_n)|, the pulled-back disk's base
  double theta_min = 0.0;        // worst pulled-back viewing angle
  double fitted_theta = 0.0;     // theta - m_hat psi(theta) |f^j(I_n)|^2
  double margin = 0.0;           // theta_min - fitted_theta
  int newton_failures = 0;
};

struct SchwarzReport {
  int level = 0;
  double theta = 0.0;
  int boundary_samples = 0;
  /// Least-squares angle-loss coefficient of theta - theta_min against
  /// psi(theta) |I|^2, clamped to be nonnegative.
  double m_hat = 0.0;
  double min_margin = 0.0;
  int total_newton_failures = 0;
  std::vector<SchwarzStep> steps;
};

/// Pulls boundary samples of the angle-theta disks over the intervals
/// f^j(I_n), j = q_{n+1} down to 1, back through one inverse branch of the
/// extended lift (planar Newton on the Wirtinger jet, seeded from the real
/// inverse orbit) and reports how much viewing angle each step loses.
/// Newton failures are counted per step, not fatal.
SchwarzReport schwarz_inclusion_check(const ExtendedLift& F, int level,
                                      double theta,
                                      int boundary_samples = 64);

}  // namespace renorm
