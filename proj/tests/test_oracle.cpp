#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "mg1/io.hpp"
#include "mg1/oracle.hpp"
#include "mg1/rng.hpp"
#include "mg1/simulator.hpp"

using namespace mg1;

namespace {

struct IsEstimate {
  std::array<double, 3> mean{};
  std::array<double, 3> se{};
  double acceptance = 0.0;
};

// Likelihood-weighted importance sampling: draw theta from the prior and
// the arrival path from its Markov prior, weight by the observation
// density. Entirely independent of the quadrature code path.
IsEstimate importance_sampling_moments(const Observations& obs, const Prior& prior,
                                       std::size_t draws, std::uint64_t seed) {
  RandomStream rng(seed);
  const std::size_t n = obs.size();
  double wsum = 0.0;
  std::array<double, 3> msum{};
  std::vector<double> eta1s, eta2s, eta3s, weights;
  eta1s.reserve(draws / 100);
  for (std::size_t k = 0; k < draws; ++k) {
    const double theta1 = rng.uniform_range(prior.min_service.lo, prior.min_service.hi);
    const double range = rng.uniform_range(prior.service_range.lo, prior.service_range.hi);
    const double rate = rng.uniform_range(prior.arrival_rate.lo, prior.arrival_rate.hi);
    if (rate <= 0.0 || range <= 0.0) continue;
    double arrival = 0.0;
    double weight = 1.0;
    for (std::size_t i = 0; i < n && weight > 0.0; ++i) {
      arrival += rng.exponential(rate);
      const double service =
          obs.interdeparture(i) - std::max(0.0, arrival - obs.departure_before(i));
      if (service < theta1 || service > theta1 + range) {
        weight = 0.0;
      } else {
        weight /= range;
      }
    }
    if (weight <= 0.0) continue;
    wsum += weight;
    msum[0] += weight * theta1;
    msum[1] += weight * range;
    msum[2] += weight * std::log(rate);
    eta1s.push_back(theta1);
    eta2s.push_back(range);
    eta3s.push_back(std::log(rate));
    weights.push_back(weight);
  }
  REQUIRE(wsum > 0.0);
  IsEstimate est;
  est.acceptance = double(weights.size()) / double(draws);
  for (int p = 0; p < 3; ++p) est.mean[p] = msum[p] / wsum;
  // Delta-method standard error of the self-normalized estimator.
  const std::vector<double>* values[3] = {&eta1s, &eta2s, &eta3s};
  for (int p = 0; p < 3; ++p) {
    double ss = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double dev = (*values[p])[k] - est.mean[p];
      ss += weights[k] * weights[k] * dev * dev;
    }
    est.se[p] = std::sqrt(ss) / wsum;
  }
  return est;
}

}  // namespace

TEST_CASE("oracle input validation") {
  const Prior prior;
  const Observations big({1.0, 2.0, 3.0, 4.0});
  CHECK_THROWS_AS(posterior_moments_oracle(big, prior, {}), std::invalid_argument);
  const Observations ok({5.0});
  QuadratureSpec coarse;
  coarse.theta_resolution = 16;
  CHECK_THROWS_AS(posterior_moments_oracle(ok, prior, coarse), std::invalid_argument);
}

TEST_CASE("oracle converges under grid doubling") {
  const Prior prior;
  SUBCASE("single observation") {
    const Observations obs({5.0});
    QuadratureSpec spec;
    spec.theta_resolution = 64;
    spec.latent_resolution = 64;
    const OracleMoments m = posterior_moments_oracle(obs, prior, spec);
    CHECK(m.converged);
    for (int p = 0; p < 3; ++p) {
      CHECK(m.refinement_delta[p] < 0.005);
      CHECK(std::isfinite(m.mean[p]));
      CHECK(m.variance[p] > 0.0);
    }
    CHECK(m.mean[0] > 0.0);
    CHECK(m.mean[0] < 5.0);   // min service cannot exceed the observation
    CHECK(m.mean[2] < std::log(1.0 / 3.0));
  }
  SUBCASE("three observations") {
    const Observations obs({3.2, 6.0, 4.5});
    QuadratureSpec spec;
    spec.theta_resolution = 48;
    spec.latent_resolution = 48;
    const OracleMoments m = posterior_moments_oracle(obs, prior, spec);
    CHECK(m.converged);
    CHECK(m.mean[0] > 0.0);
    CHECK(m.mean[0] < 3.2);
  }
}

TEST_CASE("oracle agrees with an independent importance-sampling estimate") {
  const Prior prior;
  SUBCASE("n = 1") {
    const Observations obs({5.0});
    QuadratureSpec spec;
    spec.theta_resolution = 96;
    spec.latent_resolution = 64;
    const OracleMoments quad = posterior_moments_oracle(obs, prior, spec);
    const IsEstimate is = importance_sampling_moments(obs, prior, 2000000, 2025);
    for (int p = 0; p < 3; ++p) {
      const double oracle_err = quad.refinement_delta[p] * std::abs(quad.mean[p]);
      const double tol = 3.0 * std::sqrt(is.se[p] * is.se[p] + oracle_err * oracle_err);
      CAPTURE(p);
      CAPTURE(quad.mean[p]);
      CAPTURE(is.mean[p]);
      CHECK(std::abs(quad.mean[p] - is.mean[p]) < tol);
    }
  }
  SUBCASE("n = 2") {
    const SimOutput sim = simulate({1.0, 5.0, 0.25}, 2, 41);
    REQUIRE(sim.observations.min_interdeparture() < 10.0);
    QuadratureSpec spec;
    spec.theta_resolution = 96;
    spec.latent_resolution = 64;
    const OracleMoments quad = posterior_moments_oracle(sim.observations, prior, spec);
    const IsEstimate is = importance_sampling_moments(sim.observations, prior, 10000000, 77);
    CAPTURE(is.acceptance);
    for (int p = 0; p < 3; ++p) {
      const double oracle_err = quad.refinement_delta[p] * std::abs(quad.mean[p]);
      const double tol = 3.0 * std::sqrt(is.se[p] * is.se[p] + oracle_err * oracle_err);
      CAPTURE(p);
      CAPTURE(quad.mean[p]);
      CAPTURE(is.mean[p]);
      CHECK(std::abs(quad.mean[p] - is.mean[p]) < tol);
    }
  }
}

TEST_CASE("oracle results are recorded with their generating spec") {
  const Observations obs({5.0});
  QuadratureSpec spec;
  spec.theta_resolution = 64;
  spec.latent_resolution = 64;
  const OracleMoments m = posterior_moments_oracle(obs, Prior{}, spec);
  const std::string path =
      (std::filesystem::temp_directory_path() / "mg1_oracle_golden.csv").string();
  write_oracle_csv(m, obs, spec, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  bool has_res = false, has_mean = false, has_data = false;
  while (std::getline(in, line)) {
    if (line.rfind("theta_resolution,64", 0) == 0) has_res = true;
    if (line.rfind("eta1_mean,", 0) == 0) has_mean = true;
    if (line.rfind("y1,5", 0) == 0) has_data = true;
  }
  CHECK(has_res);
  CHECK(has_mean);
  CHECK(has_data);
  std::filesystem::remove(path);
}
