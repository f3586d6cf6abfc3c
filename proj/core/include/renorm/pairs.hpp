#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "renorm/errors.hpp"
#include "renorm/maps.hpp"

namespace renorm {

/// Value and first three derivatives at a point.
struct Jet3 {
  double f = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Jet of F at x (reduced argument).
Jet3 lift_jet(const CircleLift& f, double x);

/// Jet of outer∘inner given the outer jet at inner.f.
Jet3 compose_jet(const Jet3& outer, const Jet3& inner);

/// Jet of F^n at x.
Jet3 iterate_jet(const CircleLift& f, double x, std::int64_t n);

/// Moebius map fixing -1 and 0 and sending alpha to 1:
///
///   T(t) = (alpha+1) t / (2 alpha + (alpha-1) t),
///
/// with pole at 2 alpha / (1 - alpha).  Used to place both branch endpoints
/// of a normalized pair at -1 and 1 before comparing pairs.
class MobiusNormalizer {
 public:
  explicit MobiusNormalizer(double alpha, double pole_tol = 1e-9);

  double apply(double t) const;
  double inverse(double x) const;
  double deriv(double t) const;
  double inverse_deriv(double x) const;
  double alpha() const { return alpha_; }
  double pole() const;

 private:
  void guard(double denom) const;
  double alpha_;
  double pole_tol_;
};

/// Commuting pair (eta, xi): eta is defined on [0, xi(0)] with eta(0) < 0,
/// xi on [eta(0), 0] with xi(0) > 0, the two commute at the origin, and both
/// have a cubic critical point at 0.  Branches are stored as exact conjugates
/// of iterates of a shared lift by the coordinate map h(x) = sigma lambda x,
///
///   branch(x) = sigma (F^m(sigma lambda x) - p) / lambda,
///
/// so deep renormalizations never accumulate symbolic error: iterate counts
/// and integer translations just add, and the reflection sign sigma keeps
/// every level in the standard orientation (eta is the deeper return branch,
/// xi(0) stays above 1, and the glued rotation number follows one fixed law
/// at every level instead of alternating with its 1-complement).
struct PairOptions {
  bool check_criticality = true;
  double tol = 1e-9;
};

class CommutingPair {
 public:
  struct Branch {
    std::int64_t m = 0;  // iterate count
    std::int64_t p = 0;  // integer translation
  };

  /// Pair induced by the lift at `level` n >= -1: eta is the deep
  /// first-return branch F^{q_{n+1}} - p_{n+1}, xi is F^{q_n} - p_n,
  /// reflected (sigma) and rescaled (lambda) so that eta(0) = -1.  Level -1
  /// is the map itself as a pair (eta the lift, xi the unit
  /// back-translation); its height is the leading partial quotient a_0.
  static CommutingPair from_lift(std::shared_ptr<const CircleLift> f, int level,
                                 const PairOptions& opts = {});

  /// As from_lift, reusing an existing closest-return record.
  static CommutingPair from_returns(std::shared_ptr<const CircleLift> f,
                                    const ClosestReturns& rec, int level,
                                    const PairOptions& opts = {});

  double eta(double x) const;
  double xi(double x) const;
  Jet3 eta_jet(double x) const;
  Jet3 xi_jet(double x) const;

  double eta0() const { return eta0_; }  // eta(0) < 0
  double xi0() const { return xi0_; }    // xi(0) > 0
  double scale() const { return lambda_; }
  int reflection() const { return sigma_; }
  const Branch& eta_branch() const { return eta_; }
  const Branch& xi_branch() const { return xi_; }
  const std::shared_ptr<const CircleLift>& lift() const { return f_; }

  bool is_normalized(double tol = 1e-12) const;
  /// Copy with sigma and lambda recomputed from the eta branch, so that
  /// eta(0) = -1.
  CommutingPair normalized() const;
  /// Conjugate by the homothety x -> s x (s > 0).
  CommutingPair homothety(double s) const;

  /// |(eta∘xi)(0) - (xi∘eta)(0)|: zero up to roundoff for lift pairs.
  double commutation_residual() const;

 private:
  CommutingPair() = default;
  void refresh_endpoints();
  void validate(const PairOptions& opts) const;
  double branch_value_unscaled(const Branch& b) const;
  double branch_eval(const Branch& b, double x) const;
  Jet3 branch_jet(const Branch& b, double x) const;

  friend CommutingPair renormalize(const CommutingPair& z, std::int64_t max_r,
                                   double tol);
  friend struct PairAccess;

  std::shared_ptr<const CircleLift> f_;
  Branch eta_;
  Branch xi_;
  double lambda_ = 1.0;
  int sigma_ = 1;
  double eta0_ = 0.0;
  double xi0_ = 0.0;
};

/// Height: the number of eta-steps (resp. xi-steps, on the mirrored side)
/// the composition point survives before crossing 0.
struct Height {
  bool finite = false;
  std::int64_t value = 0;
};

/// Computes the height, INFINITE if the iterated branch exhibits a fixed
/// point before crossing or `max_r` is exceeded.  Throws PrecisionExhausted
/// when an iterate's sign cannot be certified at `tol`.
Height pair_height(const CommutingPair& z, std::int64_t max_r = 1000000,
                   double tol = 1e-12);

/// One renormalization step: the composite branch (eta^r ∘ xi in the
/// standard case, xi^r ∘ eta in the mirrored one) becomes the new eta, the
/// surviving branch becomes the new xi, and sigma/lambda are recomputed so
/// the new eta(0) = -1 (a reflection happens exactly when the composite is
/// positive at 0, i.e. in the standard case).  Requires finite height.
CommutingPair renormalize(const CommutingPair& z, std::int64_t max_r = 1000000,
                          double tol = 1e-12);

/// Inter-pair distance
///
///   d_r = max{ |xi_1(0)/eta_1(0) - xi_2(0)/eta_2(0)|,
///              ||A_1∘z_1∘A_1^{-1} - A_2∘z_2∘A_2^{-1}||_{C^r on [-1,1]} }
///
/// where A_i is the MobiusNormalizer of pair i.  The C^r norm is evaluated on
/// `grid` points per branch, excluding the discontinuity at 0; orders 0 and 1
/// use exact chain-rule derivatives, order 2 centered differences of the
/// order-1 data.  Both pairs must be normalized.
double metric_distance(int order, const CommutingPair& z1, const CommutingPair& z2,
                       int grid = 512);

/// metric_distance evaluated at `grid` and `4*grid` points; throws
/// QuadratureNonconvergence if the two disagree by more than `rel_tol`
/// relative to the larger (with an absolute floor), else returns the finer
/// value.
double metric_distance_certified(int order, const CommutingPair& z1,
                                 const CommutingPair& z2, int grid = 512,
                                 double rel_tol = 0.01, double abs_floor = 1e-13);

/// Circle map obtained by glueing the two branches along the commutation
/// seam, rescaled to circumference 1.  Derivative oracles are piecewise: the
/// seam itself carries none.
///
/// Rotation number: the glued circle [eta(0), xi(0)] has circumference
/// 1 + xi(0) in pair coordinates and both branches advance by xi(0) modulo
/// that circumference, so rho(glued) = xi(0) / (1 + xi(0)) = 1 / (1 + t)
/// where t is the pair's own rotation number (the continued fraction of its
/// height sequence).  Equivalently the Gauss map of the glued rotation
/// number recovers t: the glueing prepends a partial quotient 1.  The golden
/// mean is the fixed point of x -> 1/(1+x), so golden-type pairs glue to
/// rotation number exactly the golden mean at every level.
class GluedCircleMap final : public CircleLift {
 public:
  explicit GluedCircleMap(const CommutingPair& z, double seam_tol = 1e-10);

  double eval(double x) const override;
  double deriv(double x, int order) const override;
  Family family() const override { return Family::glued; }
  double parameter() const override { return circumference_; }

  double seam_residual() const { return seam_residual_; }

 private:
  CommutingPair pair_;
  double circumference_;
  double seam_residual_;
};

/// C0 distance bound for compositions: ||f_n∘...∘f_1 - g_n∘...∘g_1|| <=
/// (sum_{j<n} B^j) * eps for C1 maps with derivative bound B and pairwise C0
/// distance eps.
double composition_gap_bound(double deriv_bound, int count, double eps);

}  // namespace renorm
