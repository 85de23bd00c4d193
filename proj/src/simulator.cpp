#include "mg1/simulator.hpp"

#include <algorithm>
#include <stdexcept>

#include "mg1/rng.hpp"

namespace mg1 {

SimOutput simulate(const Parameters& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("simulate: n must be >= 1");
  if (!(p.arrival_rate > 0.0) || !(p.max_service >= p.min_service) || !(p.min_service >= 0.0)) {
    throw std::invalid_argument("simulate: invalid parameters");
  }
  RandomStream rng(seed);
  std::vector<double> y(n), v(n), u(n), w(n);
  double arrival = 0.0;
  double departure = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = rng.exponential(p.arrival_rate);
    arrival += w[i];
    v[i] = arrival;
    u[i] = rng.uniform_range(p.min_service, p.max_service);
    y[i] = u[i] + std::max(0.0, v[i] - departure);
    departure += y[i];
  }
  return SimOutput{Observations(y), std::move(v), std::move(u), std::move(w)};
}

int QueueTrajectory::max_queue_length() const {
  int best = 0;
  for (const auto& [t, q] : steps) best = std::max(best, q);
  return best;
}

QueueTrajectory trajectory(const std::vector<double>& arrivals,
                           const std::vector<double>& departures) {
  if (arrivals.empty() || arrivals.size() != departures.size()) {
    throw std::invalid_argument("trajectory: need equal-length nonempty arrivals/departures");
  }
  const double cutoff = arrivals.back();
  QueueTrajectory traj;
  traj.steps.emplace_back(0.0, 0);
  int q = 0;
  std::size_t ia = 0, id = 0;
  const std::size_t n = arrivals.size();
  while (ia < n || (id < n && departures[id] <= cutoff)) {
    // Arrivals win ties so a customer is never discharged before arriving.
    const bool take_arrival =
        ia < n && (id >= n || departures[id] > cutoff || arrivals[ia] <= departures[id]);
    if (take_arrival) {
      traj.steps.emplace_back(arrivals[ia++], ++q);
    } else {
      traj.steps.emplace_back(departures[id++], --q);
    }
  }
  return traj;
}

QueueTrajectory trajectory(const SimOutput& sim) {
  return trajectory(sim.arrivals, sim.observations.departures());
}

}  // namespace mg1
