#include "mg1/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mg1 {

void AcceptanceStats::merge(const AcceptanceStats& other) {
  auto add = [](Counter& a, const Counter& b) {
    a.proposals += b.proposals;
    a.accepts += b.accepts;
  };
  add(metropolis, other.metropolis);
  add(shift, other.shift);
  add(range, other.range);
  add(rate, other.rate);
}

double sample_truncated_exponential(double rate, double lo, double hi, double u) {
  if (!(rate > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || !(lo >= 0.0)) {
    throw std::invalid_argument("sample_truncated_exponential: bad rate or bounds");
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("sample_truncated_exponential: need lo < hi");
  }
  // Inverting F(t) = (e^{-rate lo} - e^{-rate t}) / (e^{-rate lo} - e^{-rate hi})
  // with the e^{-rate lo} factored out, so large rate*lo does not cancel.
  const double q = std::exp(-rate * (hi - lo));
  const double t = lo - std::log1p(u * (q - 1.0)) / rate;
  return std::min(std::max(t, lo), hi);
}

namespace {

void refresh(ChainState& state, const Observations& obs, const Prior& prior) {
  state.summary = compute_summary(state.arrivals, obs);
  state.log_post = log_posterior_natural(state.eta, state.summary, prior);
  if (!(state.log_post > kNegInf)) {
    throw std::logic_error("chain state left the posterior support");
  }
}

double draw_from_conditional(const GibbsConditional& c, double rate, RandomStream& rng) {
  if (c.hi < c.lo) {
    throw std::logic_error("gibbs conditional is empty; chain state is corrupted");
  }
  if (c.hi == c.lo) return c.lo;
  if (c.exponential) return sample_truncated_exponential(rate, c.lo, c.hi, rng.uniform());
  return rng.uniform_range(c.lo, c.hi);
}

}  // namespace

GibbsConditional gibbs_conditional(const ChainState& state, const Observations& obs,
                                   std::size_t i) {
  const std::size_t n = obs.size();
  const double theta1 = state.eta.min_service;
  const double theta2 = state.eta.min_service + state.eta.service_range;
  const double xi = obs.departure(i);
  const double yi = obs.interdeparture(i);
  const std::vector<double>& v = state.arrivals;

  GibbsConditional c;
  c.hi = xi - theta1;
  if (n == 1) {
    // Single customer: exponential factor has no successor to cancel it.
    c.lo = yi > theta2 ? std::max(0.0, xi - theta2) : 0.0;
    c.exponential = true;
  } else if (i == 0) {
    c.lo = std::max(0.0, xi - theta2);
    c.hi = std::min(v[1], c.hi);
    c.exponential = false;
  } else if (i + 1 < n) {
    c.lo = yi > theta2 ? std::max(v[i - 1], xi - theta2) : v[i - 1];
    c.hi = std::min(v[i + 1], c.hi);
    c.exponential = false;
  } else {
    c.lo = yi > theta2 ? std::max(v[i - 1], xi - theta2) : v[i - 1];
    c.exponential = true;
  }
  return c;
}

void gibbs_update_one(ChainState& state, const Observations& obs, const Prior& prior,
                      std::size_t i, RandomStream& rng) {
  const GibbsConditional c = gibbs_conditional(state, obs, i);
  state.arrivals[i] = draw_from_conditional(c, std::exp(state.eta.log_rate), rng);
  refresh(state, obs, prior);
}

void gibbs_sweep(ChainState& state, const Observations& obs, const Prior& prior,
                 RandomStream& rng) {
  const double rate = std::exp(state.eta.log_rate);
  for (std::size_t i = 0; i < state.arrivals.size(); ++i) {
    const GibbsConditional c = gibbs_conditional(state, obs, i);
    state.arrivals[i] = draw_from_conditional(c, rate, rng);
  }
  refresh(state, obs, prior);
}

void metropolis_eta(ChainState& state, const Observations& obs, const Prior& prior,
                    const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats) {
  (void)obs;  // arrivals fixed; the cached summary carries everything needed
  for (int k = 0; k < tuning.met_repeats; ++k) {
    ++stats.metropolis.proposals;
    NaturalParameters cand{state.eta.min_service + tuning.met_sd[0] * rng.normal(),
                           state.eta.service_range + tuning.met_sd[1] * rng.normal(),
                           state.eta.log_rate + tuning.met_sd[2] * rng.normal()};
    // Box coordinates outside the prior reject without a density evaluation.
    if (!prior.min_service.contains(cand.min_service) ||
        !prior.service_range.contains(cand.service_range)) {
      continue;
    }
    const LogDensity lp = log_posterior_natural(cand, state.summary, prior);
    if (!(lp > kNegInf)) continue;
    const double delta = lp - state.log_post;
    if (delta >= 0.0 || std::log(rng.uniform_pos()) < delta) {
      state.eta = cand;
      state.log_post = lp;
      ++stats.metropolis.accepts;
    }
  }
}

bool shift_propose(const std::vector<double>& arrivals, double shift, std::vector<double>& out) {
  out.resize(arrivals.size());
  if (arrivals.front() - shift < 0.0) return false;
  for (std::size_t i = 0; i < arrivals.size(); ++i) out[i] = arrivals[i] - shift;
  return true;
}

bool range_scale_propose(const std::vector<double>& arrivals, const Observations& obs,
                         double min_service, double scale, std::vector<double>& out) {
  const std::size_t n = arrivals.size();
  out.resize(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double latest = obs.departure(i) - min_service;
    const double vi = latest - scale * (latest - arrivals[i]);
    if (vi < prev) return false;  // covers both ordering and v_1 < 0
    out[i] = vi;
    prev = vi;
  }
  return true;
}

bool rate_scale_propose(const std::vector<double>& arrivals, const Observations& obs,
                        double min_service, double max_service, double scale,
                        std::vector<double>& out) {
  const std::size_t n = arrivals.size();
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = scale * arrivals[i];
    const double xi = obs.departure(i);
    if (obs.interdeparture(i) > max_service) {
      // Must stay busy: the implied service time pins the arrival window.
      if (vi < xi - max_service || vi > xi - min_service) return false;
    } else if (vi > xi - min_service) {
      return false;
    }
    out[i] = vi;
  }
  return true;
}

void shift_update(ChainState& state, const Observations& obs, const Prior& prior,
                  const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats,
                  Workspace& ws) {
  ++stats.shift.proposals;
  const double s = std::sqrt(tuning.shift_variance) * rng.normal();
  NaturalParameters cand = state.eta;
  cand.min_service += s;
  if (!prior.min_service.contains(cand.min_service)) return;
  if (!shift_propose(state.arrivals, s, ws.arrivals)) return;
  const ConstraintSummary summary = compute_summary(ws.arrivals, obs);
  const LogDensity lp = log_posterior_natural(cand, summary, prior);
  if (!(lp > kNegInf)) return;
  const double delta = lp - state.log_post;
  if (delta >= 0.0 || std::log(rng.uniform_pos()) < delta) {
    std::swap(state.arrivals, ws.arrivals);
    state.eta = cand;
    state.summary = summary;
    state.log_post = lp;
    ++stats.shift.accepts;
  }
}

void range_scale_update(ChainState& state, const Observations& obs, const Prior& prior,
                        const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats,
                        Workspace& ws) {
  ++stats.range.proposals;
  const int z = rng.plus_minus_one();
  const double c = z > 0 ? tuning.range_scale : 1.0 / tuning.range_scale;
  NaturalParameters cand = state.eta;
  cand.service_range = c * state.eta.service_range;
  if (!prior.service_range.contains(cand.service_range)) return;
  if (!range_scale_propose(state.arrivals, obs, state.eta.min_service, c, ws.arrivals)) return;
  const ConstraintSummary summary = compute_summary(ws.arrivals, obs);
  const LogDensity lp = log_posterior_natural(cand, summary, prior);
  if (!(lp > kNegInf)) return;
  const double n = static_cast<double>(obs.size());
  const double log_jacobian = z * (n + 1.0) * std::log(tuning.range_scale);
  const double delta = lp - state.log_post + log_jacobian;
  if (delta >= 0.0 || std::log(rng.uniform_pos()) < delta) {
    std::swap(state.arrivals, ws.arrivals);
    state.eta = cand;
    state.summary = summary;
    state.log_post = lp;
    ++stats.range.accepts;
  }
}

void rate_scale_update(ChainState& state, const Observations& obs, const Prior& prior,
                       const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats,
                       Workspace& ws) {
  ++stats.rate.proposals;
  const int z = rng.plus_minus_one();
  const double log_c = std::log(tuning.rate_scale);
  const double c = z > 0 ? tuning.rate_scale : 1.0 / tuning.rate_scale;
  NaturalParameters cand = state.eta;
  cand.log_rate = state.eta.log_rate - z * log_c;
  if (!(cand.log_rate < std::log(prior.arrival_rate.hi))) return;
  const double theta2 = state.eta.min_service + state.eta.service_range;
  if (!rate_scale_propose(state.arrivals, obs, state.eta.min_service, theta2, c, ws.arrivals)) {
    return;
  }
  const ConstraintSummary summary = compute_summary(ws.arrivals, obs);
  const LogDensity lp = log_posterior_natural(cand, summary, prior);
  if (!(lp > kNegInf)) return;
  const double n = static_cast<double>(obs.size());
  const double delta = lp - state.log_post + z * n * log_c;
  if (delta >= 0.0 || std::log(rng.uniform_pos()) < delta) {
    std::swap(state.arrivals, ws.arrivals);
    state.eta = cand;
    state.summary = summary;
    state.log_post = lp;
    ++stats.rate.accepts;
  }
}

void scheme_step(ChainState& state, const Observations& obs, const Prior& prior,
                 const TuningParams& tuning, const SchemeSpec& scheme, RandomStream& rng,
                 AcceptanceStats& stats, Workspace& ws) {
  gibbs_sweep(state, obs, prior, rng);
  metropolis_eta(state, obs, prior, tuning, rng, stats);
  if (scheme.use_shift) shift_update(state, obs, prior, tuning, rng, stats, ws);
  if (scheme.use_range) range_scale_update(state, obs, prior, tuning, rng, stats, ws);
  if (scheme.use_rate) rate_scale_update(state, obs, prior, tuning, rng, stats, ws);
}

ChainState init_state(const Observations& obs, const Prior& prior) {
  const double min_y = obs.min_interdeparture();
  ChainState state;
  state.eta.service_range = 0.5 * (prior.service_range.lo + prior.service_range.hi);
  state.eta.log_rate = std::log(0.5 * (prior.arrival_rate.lo + prior.arrival_rate.hi));
  state.arrivals.resize(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    state.arrivals[i] = obs.departure(i) - min_y;
  }
  state.summary = compute_summary(state.arrivals, obs);
  // min(y) sits exactly on the support boundary in real arithmetic; clamp
  // to the cap the stored arrivals actually imply so rounding cannot tip
  // the start outside.
  state.eta.min_service = std::min(min_y, state.summary.min_service_cap);
  state.log_post = log_posterior_natural(state.eta, state.summary, prior);
  if (!(state.log_post > kNegInf)) {
    throw std::runtime_error(
        "init_state: starting point lies outside the posterior support "
        "(is min(y) inside the min_service prior range?)");
  }
  return state;
}

}  // namespace mg1
