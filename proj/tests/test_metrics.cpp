#include <doctest.h>

#include <cmath>

#include "bdris/leakage.hpp"
#include "bdris/metrics.hpp"
#include "support.hpp"

using namespace bdris;

TEST_CASE("delta INR") {
  std::mt19937_64 rng(21);
  ChannelSet ch = testing::random_channels(2, 2, 2, 2, rng);
  CHECK(delta_inr_db(ch, Matrix::Zero(2, 2)) == doctest::Approx(0.0));

  // Cascaded links equal to the direct ones double every interfering field.
  for (auto& f : ch.f_ris) f = Matrix::Identity(2, 2);
  ch.g_ris[0] = ch.h_direct[0][1].adjoint();
  ch.g_ris[1] = ch.h_direct[1][0].adjoint();
  CHECK(delta_inr_db(ch, Matrix::Identity(2, 2)) ==
        doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));

  ch.h_direct[0][1].setZero();
  ch.h_direct[1][0].setZero();
  CHECK_THROWS_AS(delta_inr_db(ch, Matrix::Identity(2, 2)), ContractViolation);
}

TEST_CASE("trial summaries") {
  const TrialResult one = make_trial_result(0.5, -8.0, {1.0, 2.0});
  CHECK(one.sum_rate == 3.0);

  const Summary single = aggregate({one});
  CHECK(single.delta_inr_db.mean == -8.0);
  CHECK(single.delta_inr_db.std == 0.0);
  CHECK(single.il.count == 1);

  const TrialResult two = make_trial_result(1.5, -12.0, {3.0, 1.0});
  const Summary pair = aggregate({one, two});
  CHECK(pair.delta_inr_db.mean == doctest::Approx(-10.0));
  CHECK(pair.delta_inr_db.std == doctest::Approx(std::sqrt(8.0)));
  CHECK(pair.il.mean == doctest::Approx(1.0));
  CHECK(pair.sum_rate.mean == doctest::Approx(3.5));
  REQUIRE(pair.rates.size() == 2);
  CHECK(pair.rates[0].mean == doctest::Approx(2.0));
  CHECK(pair.rates[1].mean == doctest::Approx(1.5));
  CHECK(pair.sum_rate.mean ==
        doctest::Approx(pair.rates[0].mean + pair.rates[1].mean).epsilon(1e-12));

  const Summary lin = aggregate({one, two}, InrAveraging::linear);
  const double ratio = 0.5 * (std::pow(10.0, -0.8) + std::pow(10.0, -1.2));
  CHECK(lin.delta_inr_db.mean == doctest::Approx(10.0 * std::log10(ratio)));

  CHECK_THROWS(aggregate({}));
}
