#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "doctest.h"
#include "renorm/arith.hpp"
#include "renorm/complexext.hpp"
#include "renorm/errors.hpp"
#include "renorm/maps.hpp"
#include "renorm/pairs.hpp"

using namespace renorm;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const CircleLift> tuned_lift(Family fam) {
  return make_lift(fam, tune_parameter(fam, cf_golden(40), 16).parameter);
}

}  // namespace

TEST_CASE("wirtinger composition implements the planar chain rule") {
  const Complex z(0.7, -0.4);
  // inner = conjugation, outer = squaring; the composite is z -> conj(z)^2.
  const WirtingerJet inner{std::conj(z), Complex(0.0, 0.0), Complex(1.0, 0.0)};
  const WirtingerJet outer{std::conj(z) * std::conj(z), 2.0 * std::conj(z),
                           Complex(0.0, 0.0)};
  const WirtingerJet composed = compose_wirtinger(outer, inner);
  CHECK(std::abs(composed.value - std::conj(z) * std::conj(z)) <= 1e-15);
  CHECK(std::abs(composed.dz) <= 1e-15);
  CHECK(std::abs(composed.dzbar - 2.0 * std::conj(z)) <= 1e-15);
}

TEST_CASE("jacobian and distortion modulus read off the jet") {
  WirtingerJet jet;
  jet.dz = Complex(3.0, 0.0);
  jet.dzbar = Complex(0.0, 1.0);
  CHECK(jet.jacobian() == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(beltrami_modulus(jet) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  jet.dz = Complex(0.0, 0.0);
  CHECK_THROWS_AS(static_cast<void>(beltrami_modulus(jet)), PrecisionExhausted);
}

TEST_CASE("extension reproduces polynomials up to its interpolation degree") {
  const IdentityMap identity;
  const TranslationMap shift(0.375);
  for (Complex z : {Complex(0.3, 0.2), Complex(-1.1, 0.05), Complex(2.0, 1.0)}) {
    const WirtingerJet jid = interp_extend(identity, z);
    CHECK(std::abs(jid.value - z) <= 1e-14);
    CHECK(std::abs(jid.dz - 1.0) <= 1e-14);
    CHECK(std::abs(jid.dzbar) <= 1e-15);
    CHECK(jid.jacobian() > 0.0);

    const WirtingerJet jsh = interp_extend(shift, z);
    CHECK(std::abs(jsh.value - (z + 0.375)) <= 1e-14);
    CHECK(std::abs(jsh.dz - 1.0) <= 1e-14);
    CHECK(std::abs(jsh.dzbar) <= 1e-15);
  }
  struct Cubic final : RealMap {
    double value(double x) const override { return ((x - 2.0) * x) * x + 0.5; }
    double derivative(double x) const override { return (3.0 * x - 4.0) * x; }
  } cubic;
  for (Complex z : {Complex(0.3, 0.2), Complex(-1.1, 0.05), Complex(2.0, 1.0)}) {
    const WirtingerJet jet = interp_extend(cubic, z);
    const Complex exact = ((z - 2.0) * z) * z + 0.5;
    CHECK(std::abs(jet.value - exact) <= 1e-12);
    CHECK(std::abs(jet.dz - ((3.0 * z - 4.0) * z)) <= 1e-12);
    CHECK(std::abs(jet.dzbar) <= 1e-12);
  }
}

TEST_CASE("extension normalization constant matches its closed form") {
  const InterpolationExtension ext(std::make_shared<IdentityMap>());
  Complex expected(0.0, 0.0);
  const double binom[4] = {1.0, 3.0, 3.0, 1.0};
  for (int j = 0; j <= 3; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    expected += sign * binom[j] / Complex(1.0, static_cast<double>(j) / 3.0);
  }
  CHECK(std::abs(ext.normalization() - expected) <= 1e-14);
}

TEST_CASE("model lift has exact cubic critical points at the integers") {
  CHECK(model_lift(0.0) == 0.0);
  CHECK(model_lift(0.0, 1) == 0.0);
  CHECK(model_lift(0.0, 2) == 0.0);
  CHECK(model_lift(0.0, 3) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
  for (double x : {0.2, 0.55, -1.3}) {
    CHECK(model_lift(x + 1.0) == doctest::Approx(model_lift(x) + 1.0).epsilon(1e-15));
    const double h = 1e-6;
    const double fd = (model_lift(x + h) - model_lift(x - h)) / (2 * h);
    CHECK(model_lift(x, 1) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("model lift inverse round-trips and commutes with translation") {
  for (double x : {0.1, 0.5, 0.9999, 1e-4, 0.33}) {
    CHECK(std::abs(model_lift_inverse(model_lift(x)) - x) <= 1e-13);
  }
  for (double y : {0.25, 0.5, 0.375}) {
    CHECK(model_lift_inverse(y + 1.0) ==
          doctest::Approx(model_lift_inverse(y) + 1.0).epsilon(1e-15));
  }
}

TEST_CASE("model lift extension is holomorphic") {
  for (Complex z : {Complex(0.3, 0.02), Complex(-0.7, -0.04), Complex(1.2, 0.1)}) {
    const WirtingerJet jet = model_lift_jet(z);
    CHECK(std::abs(jet.dzbar) == 0.0);
    if (z.imag() == 0.0) continue;
    const double h = 1e-6;
    const Complex fd =
        (model_lift_jet(z + Complex(h, 0)).value - model_lift_jet(z - Complex(h, 0)).value) /
        (2 * h);
    CHECK(std::abs(jet.dz - fd) <= 1e-8);
  }
  const WirtingerJet real_jet = model_lift_jet(Complex(0.4, 0.0));
  CHECK(real_jet.value.real() == doctest::Approx(model_lift(0.4)).epsilon(1e-15));
  CHECK(real_jet.value.imag() == 0.0);
}

TEST_CASE("standard-family decomposition has an exact translation outer chart") {
  const TuneResult tuned = tune_parameter(Family::arnold, cf_golden(40), 16);
  const auto lift = make_lift(Family::arnold, tuned.parameter);
  const Decomposition charts = decompose(lift);
  CHECK(dynamic_cast<const IdentityMap*>(charts.h1.get()) != nullptr);
  const auto* shift = dynamic_cast<const TranslationMap*>(charts.h2.get());
  REQUIRE(shift != nullptr);
  CHECK(shift->offset() == tuned.parameter);
}

TEST_CASE("numeric outer chart closes the decomposition and stays regular") {
  const auto lift = tuned_lift(Family::blaschke);
  const Decomposition charts = decompose(lift);
  for (double x : {0.2, 0.5, 0.77, 0.95}) {
    CHECK(charts.h2->value(model_lift(x)) ==
          doctest::Approx(lift->eval(x)).epsilon(1e-12));
  }
  // The derivative stays finite and positive across the critical values,
  // where both factors of the quotient vanish to third order.
  CHECK(charts.h2->derivative(0.0) > 0.0);
  CHECK(charts.h2->derivative(-1e-9) ==
        doctest::Approx(charts.h2->derivative(0.0)).epsilon(1e-3));
  CHECK(charts.h2->derivative(1e-9) ==
        doctest::Approx(charts.h2->derivative(0.0)).epsilon(1e-3));
}

TEST_CASE("extended lifts restrict to their source exactly on the real axis") {
  for (Family fam : {Family::arnold, Family::blaschke}) {
    const auto lift = tuned_lift(fam);
    const ExtendedLift F(lift);
    CHECK(F.band() > 0.0);
    for (double x : {0.13, 0.5, 0.91}) {
      const WirtingerJet jet = F.jet(Complex(x, 0.0));
      CHECK(std::abs(jet.value - Complex(lift->eval(x), 0.0)) <= 1e-10);
      // Symmetrization kills the antiholomorphic derivative on the axis.
      CHECK(std::abs(jet.dzbar) == 0.0);
    }
  }
}

TEST_CASE("extended lifts commute with unit translation and respect the band") {
  const auto lift = tuned_lift(Family::blaschke);
  const ExtendedLift F(lift);
  for (Complex z : {Complex(0.3, 0.01), Complex(-0.2, -0.03), Complex(0.8, 0.04)}) {
    CHECK(std::abs(F.jet(z + 1.0).value - (F.jet(z).value + 1.0)) <= 1e-12);
  }
  CHECK_THROWS_AS(static_cast<void>(F.jet(Complex(0.3, 2.0 * F.band()))),
                  BandExceeded);
}

TEST_CASE("antiholomorphic defect decays at better than quadratic order") {
  const auto lift = tuned_lift(Family::blaschke);
  const ExtendedLift F(lift);
  for (double x : {0.23, 0.57, 0.86}) {
    const double y_hi = 1e-2;
    const double y_lo = y_hi / 8.0;
    const double d_hi = std::abs(F.jet(Complex(x, y_hi)).dzbar);
    const double d_lo = std::abs(F.jet(Complex(x, y_lo)).dzbar);
    REQUIRE(d_lo > 0.0);
    const double order = std::log(d_hi / d_lo) / std::log(8.0);
    CHECK(order >= 1.8);
  }
}

TEST_CASE("branch jets restrict to the pair branches with zero defect") {
  const auto lift = tuned_lift(Family::blaschke);
  const ExtendedLift F(lift);
  const ClosestReturns rec = closest_returns(*lift, 8);
  const CommutingPair pair = CommutingPair::from_returns(lift, rec, 5);
  for (double x : {0.2, 0.8}) {
    const WirtingerJet jet = extended_branch_jet(F, pair, true, Complex(x, 0.0));
    CHECK(std::abs(jet.dzbar) == 0.0);
    CHECK(jet.value.real() == doctest::Approx(pair.eta(x)).epsilon(1e-9));
  }
  for (double x : {-0.7, -0.2}) {
    const WirtingerJet jet = extended_branch_jet(F, pair, false, Complex(x, 0.0));
    CHECK(std::abs(jet.dzbar) == 0.0);
    CHECK(jet.value.real() == doctest::Approx(pair.xi(x)).epsilon(1e-9));
  }
}

TEST_CASE("holomorphic-family distortion is exactly zero at every level") {
  // The standard family decomposes into entire factors, so its extension is
  // genuinely holomorphic and the sampled sups vanish identically.
  const auto lift = tuned_lift(Family::arnold);
  const ExtendedLift F(lift);
  const std::vector<BeltramiLevel> levels = beltrami_decay(F, 4, 6);
  REQUIRE(levels.size() == 3);
  for (const BeltramiLevel& level : levels) {
    CHECK(level.valid);
    CHECK(level.sup_mu_eta == 0.0);
    CHECK(level.sup_mu_xi == 0.0);
    CHECK(level.samples == 256);
  }
}

TEST_CASE("distortion sampling is deterministic in the seed") {
  const auto lift = tuned_lift(Family::blaschke);
  const ExtendedLift F(lift);
  BeltramiOptions opts;
  opts.samples = 64;
  const std::vector<BeltramiLevel> a = beltrami_decay(F, 5, 6, opts);
  const std::vector<BeltramiLevel> b = beltrami_decay(F, 5, 6, opts);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sup_mu_eta == b[i].sup_mu_eta);
    CHECK(a[i].sup_mu_xi == b[i].sup_mu_xi);
    CHECK(a[i].skipped_eta == b[i].skipped_eta);
  }
  opts.seed = 999;
  const std::vector<BeltramiLevel> c = beltrami_decay(F, 5, 6, opts);
  CHECK(c[0].sup_mu_eta != a[0].sup_mu_eta);
}

TEST_CASE("poincare regions view the interval correctly") {
  const PoincareDisk thales(0.0, 1.0, kPi / 2.0);
  CHECK(thales.viewing_angle(Complex(0.5, 0.0)) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(thales.viewing_angle(Complex(0.0, 0.0)) == 0.0);
  CHECK(thales.viewing_angle(Complex(100.0, 0.0)) <= 1e-10);
  CHECK(thales.contains(Complex(0.5, 0.49)));
  CHECK_FALSE(thales.contains(Complex(0.5, 0.51)));
  CHECK(thales.upper_center() == Complex(0.5, 0.0));
  CHECK(thales.radius() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(thales.diameter() == doctest::Approx(1.0).epsilon(1e-15));

  const PoincareDisk wide(0.0, 1.0, kPi / 3.0);
  CHECK(wide.radius() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(wide.upper_center().imag() ==
        doctest::Approx(wide.radius() * 0.5).epsilon(1e-13));
  CHECK(wide.contains(Complex(0.5, 0.85)));
  CHECK_FALSE(wide.contains(Complex(0.5, 0.87)));
}

TEST_CASE("poincare diameter and hyperbolic radius match closed forms") {
  CHECK(poincare_diam(kPi / 2.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(poincare_diam(kPi / 3.0, 0.0, 1.0) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(poincare_diam(2.0, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(poincare_epsilon(kPi / 2.0) ==
        doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK(poincare_epsilon(kPi / 3.0) ==
        doctest::Approx(std::log(2.0 + std::sqrt(3.0))).epsilon(1e-12));
  CHECK(poincare_epsilon(kPi / 3.0) > poincare_epsilon(kPi / 2.0));
  CHECK(poincare_epsilon(kPi / 2.0) > poincare_epsilon(2.0));
}

TEST_CASE("inclusion check walks the full return orbit and reports margins") {
  const auto lift = tuned_lift(Family::blaschke);
  const ExtendedLift F(lift);
  const SchwarzReport report = schwarz_inclusion_check(F, 4, kPi / 2.0, 32);
  CHECK(report.level == 4);
  CHECK(report.theta == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(report.boundary_samples == 32);
  // Golden level 4: one step per iterate of the return time q_5 = 8.
  REQUIRE(report.steps.size() == 8);
  CHECK(report.steps.front().j == 8);
  CHECK(report.steps.back().j == 1);
  CHECK(report.m_hat >= 0.0);
  CHECK(std::isfinite(report.min_margin));
  for (const SchwarzStep& step : report.steps) {
    CHECK(step.interval_length > 0.0);
    CHECK(std::isfinite(step.theta_min));
    CHECK(std::isfinite(step.margin));
  }
}
