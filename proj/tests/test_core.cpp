#include <cmath>
#include <stdexcept>

#include "cvqkd/core.hpp"
#include "doctest.h"

using namespace cvqkd;

TEST_CASE("transmittance follows the 0.2 dB/km fiber law") {
  CHECK(transmittance_from_distance(0.0) == 1.0);
  CHECK(transmittance_from_distance(50.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(transmittance_from_distance(100.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(transmittance_from_distance(10.0, 0.0) == 1.0);
  CHECK(transmittance_from_distance(10.0, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(transmittance_from_distance(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(transmittance_from_distance(1.0, -0.2), std::invalid_argument);
}

TEST_CASE("channel noise variance is T*eps*N0 + N0") {
  ChannelTruth ch{0.25, 0.08};
  CHECK(ch.noise_variance() == doctest::Approx(1.02).epsilon(1e-15));
  CHECK(ch.noise_variance(2.0) == doctest::Approx(2.04).epsilon(1e-15));
  ChannelTruth ideal{1.0, 0.0};
  CHECK(ideal.noise_variance() == 1.0);
}

TEST_CASE("coherent state polar decomposition") {
  const QuadraturePair q = coherent_from_polar(2.0, 0.0);
  CHECK(q.x == 2.0);
  CHECK(q.p == 0.0);
  const QuadraturePair r = coherent_from_polar(3.0, std::atan2(4.0, 3.0));
  CHECK(r.x == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(r.x * r.x + r.p * r.p == doctest::Approx(9.0).epsilon(1e-12));
  CHECK_THROWS_AS(coherent_from_polar(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation rejects out-of-range inputs") {
  CHECK_NOTHROW((DetectorModel{1.0, 0.0}.validate()));
  CHECK_THROWS_AS((DetectorModel{0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DetectorModel{1.2, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DetectorModel{0.5, -0.1}.validate()), std::invalid_argument);

  CHECK_NOTHROW((ChannelTruth{1.0, 0.0}.validate()));
  CHECK_THROWS_AS((ChannelTruth{0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ChannelTruth{1.5, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ChannelTruth{0.5, -1.0}.validate()), std::invalid_argument);

  OneWayParams ow;
  CHECK_NOTHROW(ow.validate());
  ow.beta = 1.5;
  CHECK_THROWS_AS(ow.validate(), std::invalid_argument);
  ow.beta = 0.95;
  ow.v_a0 = 0.0;
  CHECK_THROWS_AS(ow.validate(), std::invalid_argument);

  MdiParams mdi;
  CHECK_NOTHROW(mdi.validate());
  mdi.l_ac_km = -3.0;
  CHECK_THROWS_AS(mdi.validate(), std::invalid_argument);

  AttackConfig attack;
  CHECK_NOTHROW(attack.validate());
  attack.g_alice = 0.9;
  CHECK_THROWS_AS(attack.validate(), std::invalid_argument);
  attack.g_alice = 1.0;
  attack.u = 1.0001;
  CHECK_THROWS_AS(attack.validate(), std::invalid_argument);
  attack.u = 1.0;
  CHECK_NOTHROW(attack.validate());
}

TEST_CASE("MDI topology helpers") {
  MdiParams mdi;
  mdi.l_ac_km = 4.0;
  mdi.l_bc_km = 4.0;
  CHECK(mdi.symmetric());
  CHECK_FALSE(mdi.extreme_asymmetric());
  mdi.l_bc_km = 0.0;
  CHECK(mdi.extreme_asymmetric());
  CHECK_FALSE(mdi.symmetric());
}
