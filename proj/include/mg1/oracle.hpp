#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "mg1/model.hpp"

namespace mg1 {

/// Grid sizes for the brute-force posterior integration. theta_resolution
/// controls each parameter dimension, latent_resolution the one remaining
/// numeric latent dimension (the arrival-time integrals that admit exact
/// evaluation are done exactly). Both must be >= 32.
struct QuadratureSpec {
  std::size_t theta_resolution = 64;
  std::size_t latent_resolution = 64;
};

/// Posterior means/variances of the natural parameters from nested
/// trapezoid quadrature, with a grid-doubling refinement check.
struct OracleMoments {
  std::array<double, 3> mean{};             // at doubled resolution
  std::array<double, 3> variance{};
  std::array<double, 3> coarse_mean{};      // at the requested resolution
  std::array<double, 3> refinement_delta{}; // relative mean change under doubling
  bool converged = false;                   // all deltas below 0.5%
};

/// Brute-force evaluator for tiny instances (n <= 3): integrates the joint
/// density of (arrivals, theta) over the constraint region and the prior
/// box. Used to validate the samplers end to end.
OracleMoments posterior_moments_oracle(const Observations& obs, const Prior& prior,
                                       const QuadratureSpec& spec);

/// Record oracle output next to the grid spec that generated it.
void write_oracle_csv(const OracleMoments& m, const Observations& obs,
                      const QuadratureSpec& spec, const std::string& path);

}  // namespace mg1
