#include "mg1/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mg1 {

NaturalParameters to_natural(const Parameters& p) {
  return {p.min_service, p.max_service - p.min_service, std::log(p.arrival_rate)};
}

Parameters from_natural(const NaturalParameters& e) {
  return {e.min_service, e.min_service + e.service_range, std::exp(e.log_rate)};
}

Observations::Observations(const std::vector<double>& interdepartures) {
  if (interdepartures.empty()) {
    throw std::invalid_argument("observations: need at least one interdeparture time");
  }
  const std::size_t n = interdepartures.size();
  y_ = interdepartures;
  x_.resize(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y_[i] > 0.0) || !std::isfinite(y_[i])) {
      throw std::invalid_argument("observations: interdeparture times must be positive and finite");
    }
    // y is stored verbatim; x is the rounded running sum, and all interval
    // arithmetic treats y as authoritative for the differences.
    x_[i] = prev + y_[i];
    if (!(x_[i] > prev)) {
      throw std::invalid_argument("observations: departure times must be strictly increasing");
    }
    prev = x_[i];
  }
}

double Observations::min_interdeparture() const {
  return *std::min_element(y_.begin(), y_.end());
}

ConstraintSummary compute_summary(const std::vector<double>& arrivals, const Observations& obs) {
  if (arrivals.size() != obs.size()) {
    throw std::invalid_argument("compute_summary: arrivals/observations length mismatch");
  }
  const std::size_t n = arrivals.size();
  double cap = std::numeric_limits<double>::infinity();
  double floor = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double slack = arrivals[i] - obs.departure_before(i);
    const double service = obs.interdeparture(i) - std::max(0.0, slack);
    cap = std::min(cap, service);
    floor = std::max(floor, service);
  }
  return {n, arrivals[n - 1], cap, floor};
}

LogDensity log_prior_natural(const NaturalParameters& e, const Prior& prior) {
  if (!prior.min_service.contains(e.min_service)) return kNegInf;
  if (!prior.service_range.contains(e.service_range)) return kNegInf;
  if (!(e.log_rate < std::log(prior.arrival_rate.hi))) return kNegInf;
  if (prior.arrival_rate.lo > 0.0 && std::exp(e.log_rate) < prior.arrival_rate.lo) return kNegInf;
  return e.log_rate;
}

LogDensity log_posterior_cached(const Parameters& p, const ConstraintSummary& s,
                                const Prior& prior) {
  const double range = p.max_service - p.min_service;
  if (!(range > 0.0)) return kNegInf;
  if (!prior.min_service.contains(p.min_service)) return kNegInf;
  if (!prior.service_range.contains(range)) return kNegInf;
  if (!(p.arrival_rate > 0.0) || !(p.arrival_rate < prior.arrival_rate.hi) ||
      p.arrival_rate < prior.arrival_rate.lo) {
    return kNegInf;
  }
  if (!(p.min_service <= s.min_service_cap)) return kNegInf;
  if (!(p.max_service >= s.max_service_floor)) return kNegInf;
  const double n = static_cast<double>(s.n);
  return n * std::log(p.arrival_rate) - p.arrival_rate * s.last_arrival - n * std::log(range);
}

LogDensity log_posterior(const Parameters& p, const std::vector<double>& arrivals,
                         const Observations& obs, const Prior& prior) {
  if (arrivals.size() != obs.size()) {
    throw std::invalid_argument("log_posterior: arrivals/observations length mismatch");
  }
  if (!(arrivals.front() >= 0.0)) return kNegInf;
  for (std::size_t i = 1; i < arrivals.size(); ++i) {
    if (arrivals[i] < arrivals[i - 1]) return kNegInf;
  }
  return log_posterior_cached(p, compute_summary(arrivals, obs), prior);
}

LogDensity log_posterior_natural(const NaturalParameters& e, const ConstraintSummary& s,
                                 const Prior& prior) {
  const double lp = log_prior_natural(e, prior);
  if (!(lp > kNegInf)) return kNegInf;
  if (!(e.service_range > 0.0)) return kNegInf;
  if (!(e.min_service <= s.min_service_cap)) return kNegInf;
  if (!(e.min_service + e.service_range >= s.max_service_floor)) return kNegInf;
  const double n = static_cast<double>(s.n);
  return lp + n * e.log_rate - std::exp(e.log_rate) * s.last_arrival -
         n * std::log(e.service_range);
}

}  // namespace mg1
