#pragma once

#include <complex>
#include <functional>
#include <utility>

#include "renorm/errors.hpp"

namespace renorm {

using Complex = std::complex<double>;

/// Variational kernel with simple poles at 0, 1 and z and O(|w|^-3) decay,
/// in partial-fraction form 1/(w-z) - z/(w-1) + (z-1)/w.  Throws PoleHit at
/// the poles.  S(., 0) and S(., 1) vanish identically (and do so exactly in
/// floating point).
Complex kernel_S(Complex w, Complex z);

/// The same kernel in product form z(z-1) / (w(w-1)(w-z)); agrees with
/// kernel_S to roundoff away from the poles.
Complex kernel_S_factored(Complex w, Complex z);

/// Bounded integration domain (axis-aligned rectangle or round disk)
/// carrying its tensor quadrature resolution: the midpoint rule runs on an
/// n-by-n grid of the bounding box, keeping cells whose centers lie inside.
class PlaneDomain {
 public:
  enum class Kind { rectangle, disk };

  static PlaneDomain rectangle(double x0, double x1, double y0, double y1,
                               int resolution = 256);
  static PlaneDomain disk(Complex center, double radius, int resolution = 256);

  Kind kind() const { return kind_; }
  int resolution() const { return n_; }
  /// Same geometry at a different tensor resolution.
  PlaneDomain with_resolution(int resolution) const;

  bool contains(Complex w) const;
  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  Complex center() const { return center_; }
  double radius() const { return radius_; }

 private:
  PlaneDomain() = default;

  Kind kind_ = Kind::rectangle;
  double x0_ = 0.0, x1_ = 0.0, y0_ = 0.0, y1_ = 0.0;  // bounding box
  Complex center_{0.0, 0.0};
  double radius_ = 0.0;
  int n_ = 0;
};

/// Beltrami coefficient supported on a bounded domain and extended by zero
/// outside it, with a sup-norm estimate cached over the domain's quadrature
/// grid.  Rejects fields with sampled sup >= 1.
class BeltramiField {
 public:
  BeltramiField(PlaneDomain domain, std::function<Complex(Complex)> mu);

  /// Constant coefficient k on the domain (zero outside).
  static BeltramiField constant(PlaneDomain domain, Complex k);

  /// Zero outside the domain.
  Complex mu(Complex w) const;
  const PlaneDomain& domain() const { return domain_; }
  double sup_norm() const { return sup_norm_; }

 private:
  PlaneDomain domain_;
  std::function<Complex(Complex)> mu_;
  double sup_norm_ = 0.0;
};

/// First variation of the normalized Beltrami solution at dilatation zero:
///
///   -(1/pi) integral over U of mu(w) S(w, z) dA(w)
///
/// by midpoint tensor quadrature; disks of radius two grid cells around the
/// poles 0, 1, z that meet U are excised from the tensor grid and integrated
/// in polar coordinates (64 angular x 24 radial midpoints; the simple poles
/// are absolutely integrable), with a smooth taper handing the annulus
/// around each excision back to the tensor grid.  Computed at the domain
/// resolution and certified against a doubled-resolution pass; throws
/// QuadratureNonconvergence if the two disagree by more than 1%, otherwise
/// returns the finer value.  At z = 0 and z = 1 the integrand vanishes
/// identically and the result is exactly zero.
Complex first_variation(const BeltramiField& mu, Complex z);

/// First-order normalized solution z + first_variation(mu, z): fixes 0 and
/// 1 exactly.  Warns on stderr when the field's sup norm exceeds 0.1 (the
/// expansion is first-order only).
Complex approx_solution(const BeltramiField& mu, Complex z);

/// Domain constant C(U) = (4/pi) sup over z in U of the integral of
/// |S(w, z)| over U, the sup taken over a fixed interior lattice of z
/// probes, each integral quadratured like first_variation.  Monotone under
/// domain inclusion; certified against a doubled-resolution pass and throws
/// QuadratureNonconvergence on disagreement above 1%.
double constant_CU(const PlaneDomain& U);

/// constant_CU value together with its convergence certificate: the pass at
/// the domain resolution, the doubled-resolution value that is returned,
/// and their relative disagreement.
struct DomainConstant {
  double value = 0.0;
  double base_value = 0.0;
  double relative_disagreement = 0.0;
};

DomainConstant constant_CU_report(const PlaneDomain& U);

}  // namespace renorm
