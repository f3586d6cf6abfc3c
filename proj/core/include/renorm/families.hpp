#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "renorm/errors.hpp"

namespace renorm {

/// Concrete one-parameter families of degree-one circle lifts.  All lifts F
/// are normalized so the critical point (when there is one) sits at the
/// integers and F(0) lies in (0,1).
enum class Family { rigid, arnold, blaschke, glued };

/// Rigid rotation lift F(x) = x + theta.  order 0..3.
template <class Real>
Real rigid_lift(Real theta, Real x, int order) {
  switch (order) {
    case 0: return x + theta;
    case 1: return Real(1);
    case 2: return Real(0);
    case 3: return Real(0);
    default: throw ValidationError("rigid_lift: order must be 0..3");
  }
}

/// Standard-family lift F(x) = x + a - sin(2 pi x) / (2 pi).  The critical
/// points are the integers and are cubic: F'(m) = F''(m) = 0, F'''(m) > 0.
template <class Real>
Real arnold_lift(Real a, Real x, int order) {
  constexpr Real two_pi = Real(2) * std::numbers::pi_v<Real>;
  switch (order) {
    case 0: return x + a - std::sin(two_pi * x) / two_pi;
    case 1: {
      // 1 - cos(2 pi x) written as 2 sin^2(pi x): no cancellation near the
      // critical points.
      const Real s = std::sin(std::numbers::pi_v<Real> * x);
      return Real(2) * s * s;
    }
    case 2: return two_pi * std::sin(two_pi * x);
    case 3: return two_pi * two_pi * std::cos(two_pi * x);
    default: throw ValidationError("arnold_lift: order must be 0..3");
  }
}

namespace detail {

/// g(z) = z f'(z)/f(z) for the degree-2 Blaschke product
/// f(z) = e^{2 pi i gamma} z^2 (z-3)/(1-3z); the lift derivatives on the
/// circle are algebraic in g.  Factored forms keep the zero at z = 1 exact.
template <class Real>
std::complex<Real> blaschke_g(std::complex<Real> z, int order) {
  const std::complex<Real> one(1);
  const std::complex<Real> u = z - Real(3);
  const std::complex<Real> v = one - Real(3) * z;
  switch (order) {
    case 0: return Real(-6) * (z - one) * (z - one) / (u * v);
    case 1: return Real(-24) * (z + one) * (z - one) / (u * u * v * v);
    case 2: return Real(6) / (u * u * u) + Real(18) / (v * v * v);
    default: throw ValidationError("blaschke_g: order must be 0..2");
  }
}

}  // namespace detail

/// Lift of the restriction to the unit circle of
/// f(z) = e^{2 pi i gamma} z^2 (z-3)/(1-3z).  Since e^{2 pi i x} - 3 stays in
/// the left half-plane, a branch cut along the positive real axis gives the
/// continuous argument in closed form:
///
///   F(x) = gamma + x + arg(e^{2 pi i x} - 3)/pi - 1,  arg taken in (0, 2 pi).
///
/// F(0) = gamma and the critical points are the integers (cubic).
template <class Real>
Real blaschke_lift(Real gamma, Real x, int order) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real two_pi = Real(2) * pi;
  const std::complex<Real> z = std::polar(Real(1), two_pi * x);
  switch (order) {
    case 0: {
      const std::complex<Real> w = z - Real(3);
      Real arg = std::atan2(w.imag(), w.real());
      if (arg < Real(0)) arg += two_pi;
      return gamma + x + arg / pi - Real(1);
    }
    case 1: return detail::blaschke_g(z, 0).real();
    case 2: {
      const std::complex<Real> i2pi(Real(0), two_pi);
      return (i2pi * z * detail::blaschke_g(z, 1)).real();
    }
    case 3: {
      const std::complex<Real> g1 = detail::blaschke_g(z, 1);
      const std::complex<Real> g2 = detail::blaschke_g(z, 2);
      return -(two_pi * two_pi) * (z * g1 + z * z * g2).real();
    }
    default: throw ValidationError("blaschke_lift: order must be 0..3");
  }
}

/// Derivative of the Blaschke lift relative to the standard-family critical
/// slope:  ratio(x) = F'(x) / (2 sin^2(pi x)) = 12 Re[z / ((z-3)(1-3z))].
/// Smooth and positive across the critical points, where its value is
/// F'''(0)/A'''(0) = 3.  `order` 0..2 differentiates the ratio itself.
template <class Real>
Real blaschke_critical_ratio(Real x, int order) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real two_pi = Real(2) * pi;
  const std::complex<Real> one(1);
  const std::complex<Real> z = std::polar(Real(1), two_pi * x);
  const std::complex<Real> den = (z - Real(3)) * (one - Real(3) * z);
  // phi(z) = z / (-3 z^2 + 10 z - 3) and its z-derivatives.
  switch (order) {
    case 0: return Real(12) * (z / den).real();
    case 1: {
      const std::complex<Real> phi1 = Real(3) * (z * z - one) / (den * den);
      const std::complex<Real> i2pi(Real(0), two_pi);
      return Real(12) * (i2pi * z * phi1).real();
    }
    case 2: {
      const std::complex<Real> phi1 = Real(3) * (z * z - one) / (den * den);
      const std::complex<Real> dden = Real(-6) * z + Real(10);
      const std::complex<Real> phi2 =
          (Real(6) * z * den - Real(6) * (z * z - one) * dden) / (den * den * den);
      return Real(-12) * two_pi * two_pi * (z * phi1 + z * z * phi2).real();
    }
    default: throw ValidationError("blaschke_critical_ratio: order must be 0..2");
  }
}

/// One reduced lift step: y -> F(y) computed at the fractional part so the
/// trigonometric argument never grows with the orbit.
template <class Real>
Real family_step(Family fam, Real param, Real y) {
  const Real k = std::floor(y);
  const Real x = y - k;
  switch (fam) {
    case Family::rigid: return rigid_lift(param, x, 0) + k;
    case Family::arnold: return arnold_lift(param, x, 0) + k;
    case Family::blaschke: return blaschke_lift(param, x, 0) + k;
    default: throw ValidationError("family_step: unsupported family");
  }
}

}  // namespace renorm
