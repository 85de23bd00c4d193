#include <stdexcept>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "mg1/model.hpp"
#include "mg1/rng.hpp"
#include "mg1/simulator.hpp"

using namespace mg1;

TEST_CASE("natural parametrization round trips") {
  SUBCASE("reference values") {
    const NaturalParameters e = to_natural({4.0, 7.0, 0.15});
    CHECK(e.min_service == 4.0);
    CHECK(e.service_range == 3.0);
    CHECK(e.log_rate == doctest::Approx(std::log(0.15)).epsilon(1e-14));
    CHECK(e.log_rate == doctest::Approx(-1.8971).epsilon(1e-4));
  }
  SUBCASE("log of unit rate is zero") {
    const NaturalParameters e = to_natural({0.0, 0.0, 1.0});
    CHECK(e.min_service == 0.0);
    CHECK(e.service_range == 0.0);
    CHECK(e.log_rate == 0.0);
  }
  SUBCASE("inverse map") {
    const Parameters p = from_natural({8.0, 8.0, std::log(0.15)});
    CHECK(p.min_service == 8.0);
    CHECK(p.max_service == 16.0);
    CHECK(p.arrival_rate == doctest::Approx(0.15).epsilon(1e-14));
  }
  SUBCASE("round trip within 1e-12 relative") {
    RandomStream rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
      const Parameters p{rng.uniform_range(0.0, 10.0), 0.0, rng.uniform_range(1e-4, 1.0 / 3.0)};
      Parameters q = p;
      q.max_service = p.min_service + rng.uniform_range(1e-3, 10.0);
      const Parameters back = from_natural(to_natural(q));
      CHECK(back.min_service == doctest::Approx(q.min_service).epsilon(1e-12));
      CHECK(back.max_service == doctest::Approx(q.max_service).epsilon(1e-12));
      CHECK(back.arrival_rate == doctest::Approx(q.arrival_rate).epsilon(1e-12));
      const NaturalParameters e{rng.uniform_range(0.0, 10.0), rng.uniform_range(0.0, 10.0),
                                rng.uniform_range(-8.0, std::log(1.0 / 3.0))};
      const NaturalParameters back_e = to_natural(from_natural(e));
      CHECK(back_e.min_service == doctest::Approx(e.min_service).epsilon(1e-12));
      CHECK(back_e.service_range == doctest::Approx(e.service_range).epsilon(1e-12));
      CHECK(back_e.log_rate == doctest::Approx(e.log_rate).epsilon(1e-12));
    }
  }
}

TEST_CASE("natural prior density") {
  const Prior prior;
  SUBCASE("returns log_rate on the support") {
    const double lr = std::log(0.15);
    CHECK(log_prior_natural({4.0, 3.0, lr}, prior) == lr);
  }
  SUBCASE("outside the min_service box") {
    CHECK(log_prior_natural({11.0, 3.0, -2.0}, prior) == kNegInf);
  }
  SUBCASE("above the rate cap") {
    CHECK(log_prior_natural({4.0, 3.0, std::log(1.0 / 3.0) + 0.01}, prior) == kNegInf);
  }
  SUBCASE("rate cap is strict") {
    CHECK(log_prior_natural({4.0, 3.0, std::log(1.0 / 3.0)}, prior) == kNegInf);
    CHECK(log_prior_natural({4.0, 3.0, std::log(1.0 / 3.0) - 1e-9}, prior) ==
          doctest::Approx(std::log(1.0 / 3.0) - 1e-9));
  }
}

TEST_CASE("observations store the data verbatim with running departures") {
  SUBCASE("y kept bit-exact, x consistent to rounding") {
    RandomStream rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> y(50);
      for (auto& v : y) v = rng.uniform_range(1e-3, 300.0);
      const Observations obs(y);
      for (std::size_t i = 0; i < obs.size(); ++i) {
        CHECK(obs.interdeparture(i) == y[i]);
        CHECK(obs.departure(i) > obs.departure_before(i));
        const double diff = obs.departure(i) - obs.departure_before(i);
        CHECK(diff == doctest::Approx(y[i]).epsilon(1e-12).scale(obs.departure(i)));
      }
    }
  }
  SUBCASE("rejects bad input") {
    CHECK_THROWS_AS(Observations(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(Observations({1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Observations({0.0}), std::invalid_argument);
  }
}

TEST_CASE("constraint summary") {
  SUBCASE("single observation") {
    const Observations obs({5.0});
    const ConstraintSummary s = compute_summary({2.0}, obs);
    CHECK(s.n == 1);
    CHECK(s.last_arrival == 2.0);
    CHECK(s.min_service_cap == 3.0);
    CHECK(s.max_service_floor == 3.0);
  }
  SUBCASE("two observations with an idle second arrival") {
    const Observations obs({5.0, 4.0});
    const ConstraintSummary s = compute_summary({1.0, 2.0}, obs);
    CHECK(s.n == 2);
    CHECK(s.last_arrival == 2.0);
    // i=1: 5 - 1 = 4; i=2: arrival at 2 before x_1 = 5, so 4 - max(0, -3) = 4.
    CHECK(s.min_service_cap == 4.0);
    CHECK(s.max_service_floor == 4.0);
  }
  SUBCASE("all arrivals at time zero") {
    const Observations obs({5.0, 4.0, 7.0});
    const ConstraintSummary s = compute_summary({0.0, 0.0, 0.0}, obs);
    CHECK(s.min_service_cap == 4.0);
    CHECK(s.max_service_floor == 7.0);
  }
  SUBCASE("length mismatch") {
    const Observations obs({5.0, 4.0});
    CHECK_THROWS_AS(compute_summary({1.0}, obs), std::invalid_argument);
  }
  SUBCASE("pure function of (arrivals, observations)") {
    RandomStream rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> y(10), v(10);
      double prev = 0.0;
      for (auto& val : y) val = rng.uniform_range(0.5, 20.0);
      const Observations obs(y);
      for (std::size_t i = 0; i < v.size(); ++i) {
        prev += rng.uniform_range(0.0, 5.0);
        v[i] = prev;
      }
      const ConstraintSummary s = compute_summary(v, obs);
      // Recompute with the defining formula, written out independently.
      double cap = std::numeric_limits<double>::infinity();
      double floor = -cap;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double x_prev = i == 0 ? 0.0 : obs.departure(i - 1);
        const double term = obs.interdeparture(i) - std::max(0.0, v[i] - x_prev);
        cap = std::min(cap, term);
        floor = std::max(floor, term);
      }
      CHECK(s.min_service_cap == cap);
      CHECK(s.max_service_floor == floor);
      CHECK(s.last_arrival == v.back());
    }
  }
}

TEST_CASE("log posterior") {
  const Prior prior;
  SUBCASE("term-by-term reference value") {
    const Observations obs({5.0});
    // Independent evaluation of the three-term formula.
    const double expected = 1.0 * std::log(0.25) - 0.25 * 2.0 - 1.0 * std::log(8.0);
    const double lp = log_posterior({1.0, 9.0, 0.25}, {2.0}, obs, prior);
    CHECK(lp == doctest::Approx(expected).epsilon(1e-14));
    CHECK(lp == doctest::Approx(-3.9657).epsilon(1e-4));
  }
  SUBCASE("degenerate service range") {
    const Observations obs({5.0});
    CHECK(log_posterior({4.0, 3.9, 0.1}, {2.0}, obs, prior) == kNegInf);
    CHECK(log_posterior({4.0, 4.0, 0.1}, {1.0}, obs, prior) == kNegInf);
  }
  SUBCASE("arrival after its own departure window") {
    const Observations obs({5.0});
    CHECK(log_posterior({1.0, 9.0, 0.25}, {6.0}, obs, prior) == kNegInf);
  }
  SUBCASE("non-monotone or negative arrivals") {
    const Observations obs({5.0, 4.0});
    CHECK(log_posterior({1.0, 9.0, 0.25}, {2.0, 1.0}, obs, prior) == kNegInf);
    CHECK(log_posterior({1.0, 9.0, 0.25}, {-0.5, 1.0}, obs, prior) == kNegInf);
  }
}

TEST_CASE("cached log posterior matches the full scan") {
  const Prior prior;
  RandomStream rng(1234);

  SUBCASE("reference value via the summary") {
    const Observations obs({5.0});
    const ConstraintSummary s = compute_summary({2.0}, obs);
    const double expected = std::log(0.25) - 0.25 * 2.0 - std::log(8.0);
    CHECK(log_posterior_cached({1.0, 9.0, 0.25}, s, prior) ==
          doctest::Approx(expected).epsilon(1e-14));
    CHECK(log_posterior_cached({3.5, 9.0, 0.25}, s, prior) == kNegInf);  // above the cap
  }

  SUBCASE("bit-identical over random parameter draws") {
    // A simulated pair (y, v) keeps the implied service times inside a
    // narrow band, so plenty of parameter draws land in the support.
    const SimOutput sim = simulate({2.0, 6.0, 0.15}, 20, 8);
    const Observations& obs = sim.observations;
    const std::vector<double>& v = sim.arrivals;
    const ConstraintSummary s = compute_summary(v, obs);
    int finite_count = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const double t1 = rng.uniform_range(-1.0, 11.0);
      const Parameters p{t1, t1 + rng.uniform_range(-0.5, 10.5),
                         rng.uniform_range(1e-4, 0.4)};
      const double full = log_posterior(p, v, obs, prior);
      const double cached = log_posterior_cached(p, s, prior);
      // Same arithmetic terms, so equality is exact, including -inf cases.
      CHECK(full == cached);
      if (full > kNegInf) ++finite_count;
    }
    CHECK(finite_count > 0);
  }

  SUBCASE("finite exactly when every support constraint holds") {
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> y(5), v(5);
      for (auto& val : y) val = rng.uniform_range(0.5, 12.0);
      const Observations obs(y);
      double prev = rng.uniform_range(-1.0, 2.0);
      for (std::size_t i = 0; i < v.size(); ++i) {
        prev += rng.uniform_range(-0.2, 6.0);
        v[i] = prev;
      }
      const double t1 = rng.uniform_range(-0.5, 10.5);
      const Parameters p{t1, t1 + rng.uniform_range(-0.5, 10.5), rng.uniform_range(-0.01, 0.4)};
      const double lp = log_posterior(p, v, obs, prior);

      bool sorted = v.front() >= 0.0;
      for (std::size_t i = 1; i < v.size(); ++i) sorted = sorted && v[i] >= v[i - 1];
      bool support = sorted && p.max_service - p.min_service > 0.0 &&
                     p.min_service >= 0.0 && p.min_service <= 10.0 &&
                     p.max_service - p.min_service <= 10.0 && p.arrival_rate > 0.0 &&
                     p.arrival_rate < 1.0 / 3.0;
      if (sorted) {
        const ConstraintSummary s = compute_summary(v, obs);
        support = support && p.min_service <= s.min_service_cap &&
                  p.max_service >= s.max_service_floor;
      }
      CHECK((lp > kNegInf) == support);
    }
  }
}

TEST_CASE("natural-parametrization posterior adds the rate Jacobian") {
  const Prior prior;
  const Observations obs({5.0, 4.0, 7.0});
  const ConstraintSummary s = compute_summary({1.0, 2.0, 3.0}, obs);
  RandomStream rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const NaturalParameters e{rng.uniform_range(0.0, 4.0), rng.uniform_range(3.5, 9.9),
                              rng.uniform_range(-6.0, std::log(1.0 / 3.0) - 1e-9)};
    const double natural = log_posterior_natural(e, s, prior);
    const double theta_space = log_posterior_cached(from_natural(e), s, prior);
    if (natural == kNegInf) {
      CHECK(theta_space == kNegInf);
      continue;
    }
    CHECK(natural == doctest::Approx(theta_space + e.log_rate).epsilon(1e-10));
  }
}
