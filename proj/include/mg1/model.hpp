#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace mg1 {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Log density value; kNegInf encodes "outside the support".
using LogDensity = double;

/// Queue parameters: service times are Uniform(min_service, max_service),
/// interarrival times are Exponential(arrival_rate).
struct Parameters {
  double min_service = 0.0;
  double max_service = 0.0;
  double arrival_rate = 0.0;
};

/// Sampling parametrization: (min_service, max_service - min_service,
/// log arrival_rate). The box prior keeps the first two coordinates in
/// fixed ranges, and the log transform frees the rate scale.
struct NaturalParameters {
  double min_service = 0.0;
  double service_range = 0.0;
  double log_rate = 0.0;
};

NaturalParameters to_natural(const Parameters& p);
Parameters from_natural(const NaturalParameters& e);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Independent uniform priors on min_service, on the service range, and on
/// the arrival rate.
struct Prior {
  Interval min_service{0.0, 10.0};
  Interval service_range{0.0, 10.0};
  Interval arrival_rate{0.0, 1.0 / 3.0};
};

/// Observed interdeparture times y with cached departure epochs x.
/// The stored y are canonicalized so that x[i] - x[i-1] == y[i] holds
/// bit-exactly; downstream interval arithmetic relies on this.
class Observations {
 public:
  explicit Observations(const std::vector<double>& interdepartures);

  std::size_t size() const { return y_.size(); }
  double interdeparture(std::size_t i) const { return y_[i]; }
  double departure(std::size_t i) const { return x_[i]; }
  double departure_before(std::size_t i) const { return i == 0 ? 0.0 : x_[i - 1]; }
  double min_interdeparture() const;
  const std::vector<double>& interdepartures() const { return y_; }
  const std::vector<double>& departures() const { return x_; }

 private:
  std::vector<double> y_;
  std::vector<double> x_;
};

/// Sufficient statistics of (arrivals, observations) for the log posterior:
/// the tightest bounds the implied service times place on the parameters,
/// plus the last arrival epoch. Allows O(1) re-evaluation at a new theta.
struct ConstraintSummary {
  std::size_t n = 0;
  double last_arrival = 0.0;
  double min_service_cap = 0.0;    // largest admissible min_service
  double max_service_floor = 0.0;  // smallest admissible max_service
};

/// O(n) scan over the implied service times y_i - max(0, v_i - x_{i-1}).
ConstraintSummary compute_summary(const std::vector<double>& arrivals, const Observations& obs);

/// Log prior density of the natural parametrization, up to a constant:
/// log_rate on the support, -inf outside. (The exp(log_rate) factor is the
/// Jacobian of the rate's log transform.)
LogDensity log_prior_natural(const NaturalParameters& e, const Prior& prior);

/// Joint log density of (arrivals, theta) given the data, up to an additive
/// constant, with a flat prior over the theta box:
///   n log theta3 - theta3 v_n - n log(theta2 - theta1)
/// when all support constraints hold, -inf otherwise. Full O(n) scan.
LogDensity log_posterior(const Parameters& p, const std::vector<double>& arrivals,
                         const Observations& obs, const Prior& prior);

/// Same value as log_posterior for every theta, in O(1), given a summary
/// computed from the current (arrivals, observations).
LogDensity log_posterior_cached(const Parameters& p, const ConstraintSummary& s,
                                const Prior& prior);

/// Joint log density in the natural parametrization (includes the
/// exp(log_rate) prior factor). This is the quantity the samplers target.
LogDensity log_posterior_natural(const NaturalParameters& e, const ConstraintSummary& s,
                                 const Prior& prior);

}  // namespace mg1
