#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "mg1/model.hpp"

namespace mg1 {

/// Output of a forward simulation of the queue. The ground-truth latents
/// (arrivals, services, interarrivals) are kept alongside the observable
/// interdeparture times; inference never sees them.
struct SimOutput {
  Observations observations;
  std::vector<double> arrivals;       // v, cumulative sums of interarrivals
  std::vector<double> services;       // u
  std::vector<double> interarrivals;  // w
};

/// Draw interarrivals from Exp(arrival_rate) and services from
/// Uniform(min_service, max_service), then fold them through
/// y_i = u_i + max(0, v_i - x_{i-1}). Deterministic given the seed.
SimOutput simulate(const Parameters& p, std::size_t n, std::uint64_t seed);

/// Step-function data for the queue-length process: (event time, queue
/// length after the event), truncated at the last arrival.
struct QueueTrajectory {
  std::vector<std::pair<double, int>> steps;  // starts with (0, 0)
  int max_queue_length() const;
};

QueueTrajectory trajectory(const std::vector<double>& arrivals,
                           const std::vector<double>& departures);
QueueTrajectory trajectory(const SimOutput& sim);

/// Names of the embedded reference datasets: frequent, intermediate, rare.
const std::vector<std::string_view>& dataset_names();

/// Embedded reference dataset (50 interdeparture times each), by name.
/// Throws std::invalid_argument for an unknown name.
Observations load_dataset(std::string_view name);

}  // namespace mg1
