#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "doctest.h"
#include "renorm/arith.hpp"
#include "renorm/errors.hpp"
#include "renorm/maps.hpp"
#include "renorm/pairs.hpp"

using namespace renorm;

namespace {

std::shared_ptr<const CircleLift> tuned_lift(Family fam, const ContinuedFraction& cf,
                                             int depth) {
  const TuneResult tuned = tune_parameter(fam, cf, depth);
  return make_lift(fam, tuned.parameter);
}

}  // namespace

TEST_CASE("pairs from a lift come out normalized") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 10);
  for (int level : {-1, 0, 3, 7}) {
    const CommutingPair pair = CommutingPair::from_returns(lift, rec, level);
    CHECK(pair.eta0() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pair.is_normalized());
    CHECK(pair.xi0() > 0.0);
    CHECK(pair.scale() > 0.0);
  }
}

TEST_CASE("golden pairs have height one at every level") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 12);
  for (int level = -1; level <= 10; ++level) {
    const Height h = pair_height(CommutingPair::from_returns(lift, rec, level));
    REQUIRE(h.finite);
    CHECK(h.value == 1);
  }
}

TEST_CASE("silver pairs have height two at every level") {
  const auto lift = tuned_lift(Family::arnold, cf_silver(40), 14);
  const ClosestReturns rec = closest_returns(*lift, 12);
  for (int level = -1; level <= 10; ++level) {
    const Height h = pair_height(CommutingPair::from_returns(lift, rec, level));
    REQUIRE(h.finite);
    CHECK(h.value == 2);
  }
}

TEST_CASE("period-two rotation numbers alternate heights two and one") {
  const auto lift = tuned_lift(Family::arnold, cf_periodic({2, 1}, 40), 14);
  const ClosestReturns rec = closest_returns(*lift, 12);
  for (int level = -1; level <= 10; ++level) {
    const Height h = pair_height(CommutingPair::from_returns(lift, rec, level));
    REQUIRE(h.finite);
    CHECK(h.value == (level % 2 == 0 ? 1 : 2));
  }
}

TEST_CASE("one renormalization step equals the next-level return pair") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 10);
  for (int level = 0; level <= 6; ++level) {
    const CommutingPair pair = CommutingPair::from_returns(lift, rec, level);
    const CommutingPair stepped = renormalize(pair);
    const CommutingPair direct = CommutingPair::from_returns(lift, rec, level + 1);
    // The step recombines return branches symbolically, so it reproduces the
    // next level's branch data exactly, not just approximately.
    CHECK(stepped.eta_branch().m == direct.eta_branch().m);
    CHECK(stepped.eta_branch().p == direct.eta_branch().p);
    CHECK(stepped.xi_branch().m == direct.xi_branch().m);
    CHECK(stepped.xi_branch().p == direct.xi_branch().p);
    CHECK(metric_distance(0, stepped, direct, 128) <= 1e-15);
  }
}

TEST_CASE("branches commute at the origin up to roundoff") {
  for (Family fam : {Family::arnold, Family::blaschke}) {
    const auto lift = tuned_lift(fam, cf_golden(40), 16);
    const ClosestReturns rec = closest_returns(*lift, 10);
    for (int level = -1; level <= 8; ++level) {
      const CommutingPair pair = CommutingPair::from_returns(lift, rec, level);
      CHECK(pair.commutation_residual() <= 1e-11);
    }
  }
}

TEST_CASE("homothety conjugation rescales endpoints and normalizes back") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 8);
  const CommutingPair pair = CommutingPair::from_returns(lift, rec, 5);
  const CommutingPair scaled = pair.homothety(2.0);
  CHECK(scaled.eta0() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_FALSE(scaled.is_normalized());
  // The endpoint ratio is a conjugacy invariant.
  CHECK(scaled.xi0() / scaled.eta0() ==
        doctest::Approx(pair.xi0() / pair.eta0()).epsilon(1e-15));
  const CommutingPair back = scaled.normalized();
  CHECK(back.is_normalized());
  CHECK(metric_distance(0, pair, back, 128) <= 1e-15);
}

TEST_CASE("moebius normalizer fixes the endpoints exactly") {
  const MobiusNormalizer map(1.2887);
  CHECK(map.apply(-1.0) == -1.0);
  CHECK(map.apply(0.0) == 0.0);
  CHECK(map.apply(1.2887) == 1.0);
  for (double t : {-0.8, -0.25, 0.1, 0.37, 1.1}) {
    CHECK(map.inverse(map.apply(t)) == doctest::Approx(t).epsilon(1e-14));
    const double h = 1e-6;
    const double fd = (map.apply(t + h) - map.apply(t - h)) / (2 * h);
    CHECK(map.deriv(t) == doctest::Approx(fd).epsilon(1e-8));
    CHECK(map.inverse_deriv(map.apply(t)) ==
          doctest::Approx(1.0 / map.deriv(t)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(map.apply(map.pole()), PoleProximity);
}

TEST_CASE("inter-pair distance satisfies the metric axioms") {
  std::vector<CommutingPair> pool;
  for (Family fam : {Family::arnold, Family::blaschke}) {
    const auto lift = tuned_lift(fam, cf_golden(40), 16);
    const ClosestReturns rec = closest_returns(*lift, 8);
    for (int level : {2, 4, 6}) {
      pool.push_back(CommutingPair::from_returns(lift, rec, level));
    }
  }
  for (int order : {0, 1}) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      CHECK(metric_distance(order, pool[i], pool[i], 128) == 0.0);
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const double dij = metric_distance(order, pool[i], pool[j], 128);
        CHECK(dij > 0.0);
        CHECK(dij == metric_distance(order, pool[j], pool[i], 128));
        for (std::size_t k = 0; k < pool.size(); ++k) {
          const double dik = metric_distance(order, pool[i], pool[k], 128);
          const double dkj = metric_distance(order, pool[k], pool[j], 128);
          CHECK(dij <= dik + dkj + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("level-five distance between the two critical families is stable") {
  const auto arnold = tuned_lift(Family::arnold, cf_golden(40), 20);
  const auto blaschke = tuned_lift(Family::blaschke, cf_golden(40), 20);
  const ClosestReturns rec_a = closest_returns(*arnold, 8);
  const ClosestReturns rec_b = closest_returns(*blaschke, 8);
  const CommutingPair pa = CommutingPair::from_returns(arnold, rec_a, 5);
  const CommutingPair pb = CommutingPair::from_returns(blaschke, rec_b, 5);
  const double d0 = metric_distance(0, pa, pb, 512);
  const double d1 = metric_distance(1, pa, pb, 512);
  const double d2 = metric_distance(2, pa, pb, 512);
  CHECK(d0 == doctest::Approx(0.049233498250153773).epsilon(1e-9));
  CHECK(d1 == doctest::Approx(0.30721874739489463).epsilon(1e-9));
  CHECK(d2 == doctest::Approx(2.0194418475660996).epsilon(1e-9));
  // Higher orders see more structure, never less.
  CHECK(d0 < d1);
  CHECK(d1 < d2);
  const double certified = metric_distance_certified(0, pa, pb, 512);
  CHECK(certified == doctest::Approx(0.049234160024325679).epsilon(1e-9));
  CHECK(certified == doctest::Approx(d0).epsilon(0.01));
}

TEST_CASE("glued circle map recovers the level rotation number") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 10);
  for (int level = 2; level <= 6; ++level) {
    const CommutingPair pair = CommutingPair::from_returns(lift, rec, level);
    const GluedCircleMap glued(pair);
    CHECK(glued.seam_residual() <= 1e-12);
    CHECK(glued.parameter() == doctest::Approx(1.0 + pair.xi0()).epsilon(1e-15));
    const RotationEstimate est = rotation_number(glued, 20000);
    // Height-one pairs glue to the golden mean at every single level: the
    // glueing prepends a partial quotient 1, and the all-ones expansion is
    // the fixed point of that operation.
    CHECK(std::abs(est.value - kGoldenMean) <= 1e-4);
  }
}

TEST_CASE("glued rotation numbers alternate for period-two combinatorics") {
  const auto lift = tuned_lift(Family::arnold, cf_periodic({2, 1}, 40), 14);
  const ClosestReturns rec = closest_returns(*lift, 10);
  // 1/(1 + [2,1,2,1,...]) and 1/(1 + [1,2,1,2,...]).
  const double rho_from_two = 0.73205080756887764;
  const double rho_from_one = 0.57735026918962584;
  for (int level = -1; level <= 6; ++level) {
    const CommutingPair pair = CommutingPair::from_returns(lift, rec, level);
    const GluedCircleMap glued(pair);
    const RotationEstimate est = rotation_number(glued, 20000);
    const double expected = (level % 2 == 0) ? rho_from_one : rho_from_two;
    CHECK(std::abs(est.value - expected) <= 1e-4);
  }
}

TEST_CASE("glueing rejects a seam wider than its tolerance") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 10);
  const CommutingPair pair = CommutingPair::from_returns(lift, rec, 7);
  const double residual = GluedCircleMap(pair).seam_residual();
  REQUIRE(residual > 0.0);
  CHECK_THROWS_AS(GluedCircleMap(pair, residual / 2.0), SeamDiscontinuity);
}

TEST_CASE("rigid rotations induce pairs with exact golden endpoints") {
  const auto rigid =
      std::shared_ptr<const CircleLift>(std::make_shared<RigidRotation>(kGoldenMean));
  const CommutingPair pair = CommutingPair::from_lift(rigid, 3);
  CHECK(pair.is_normalized());
  // For the rigid golden rotation the rescaled return structure is
  // self-similar: xi(0) is the reciprocal golden mean at every level.
  CHECK(pair.xi0() == doctest::Approx(1.0 / kGoldenMean).epsilon(1e-10));
  const Height h = pair_height(pair);
  REQUIRE(h.finite);
  CHECK(h.value == 1);
}

TEST_CASE("jets compose by the chain rule and match finite differences") {
  const auto lift = tuned_lift(Family::arnold, cf_golden(40), 14);
  const double x = 0.2;
  const Jet3 inner = lift_jet(*lift, x);
  const Jet3 outer = lift_jet(*lift, inner.f);
  const Jet3 composed = compose_jet(outer, inner);
  const Jet3 twice = iterate_jet(*lift, x, 2);
  CHECK(composed.f == doctest::Approx(twice.f).epsilon(1e-14));
  CHECK(composed.d1 == doctest::Approx(twice.d1).epsilon(1e-14));
  CHECK(composed.d2 == doctest::Approx(twice.d2).epsilon(1e-13));
  CHECK(composed.d3 == doctest::Approx(twice.d3).epsilon(1e-13));

  const Jet3 jet = iterate_jet(*lift, x, 3);
  CHECK(jet.f == doctest::Approx(lift->iterate(x, 3)).epsilon(1e-14));
  const double h = 1e-5;
  const double fd1 = (lift->iterate(x + h, 3) - lift->iterate(x - h, 3)) / (2 * h);
  CHECK(jet.d1 == doctest::Approx(fd1).epsilon(1e-6));
  const double fp = iterate_jet(*lift, x + h, 3).d1;
  const double fm = iterate_jet(*lift, x - h, 3).d1;
  CHECK(jet.d2 == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("pair branch jets differentiate the branch itself") {
  const auto lift = tuned_lift(Family::blaschke, cf_golden(40), 16);
  const ClosestReturns rec = closest_returns(*lift, 8);
  const CommutingPair pair = CommutingPair::from_returns(lift, rec, 4);
  const double h = 1e-6;
  for (double x : {0.15, 0.6, 1.05}) {
    const Jet3 jet = pair.eta_jet(x);
    CHECK(jet.f == doctest::Approx(pair.eta(x)).epsilon(1e-14));
    const double fd = (pair.eta(x + h) - pair.eta(x - h)) / (2 * h);
    CHECK(jet.d1 == doctest::Approx(fd).epsilon(1e-6));
  }
  for (double x : {-0.8, -0.4, -0.1}) {
    const Jet3 jet = pair.xi_jet(x);
    CHECK(jet.f == doctest::Approx(pair.xi(x)).epsilon(1e-14));
    const double fd = (pair.xi(x + h) - pair.xi(x - h)) / (2 * h);
    CHECK(jet.d1 == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("composition gap bound is the exact geometric sum") {
  CHECK(composition_gap_bound(2.0, 3, 0.5) == 3.5);
  CHECK(composition_gap_bound(1.0, 4, 0.25) == 1.0);
  CHECK(composition_gap_bound(1.0, 5, 0.1) == 0.5);
  CHECK(composition_gap_bound(3.0, 1, 0.125) == 0.125);
  CHECK(composition_gap_bound(0.5, 3, 1.0) == 1.75);
}
