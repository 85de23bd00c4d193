#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mg1/model.hpp"
#include "mg1/rng.hpp"

namespace mg1 {

/// Full sampler state for one chain. summary and log_post are kept
/// consistent with (eta, arrivals) after every update; log_post stays
/// finite from initialization on.
struct ChainState {
  NaturalParameters eta;
  std::vector<double> arrivals;  // nondecreasing, arrivals[0] >= 0
  ConstraintSummary summary;
  LogDensity log_post = kNegInf;
};

struct TuningParams {
  std::array<double, 3> met_sd = {0.1, 0.1, 0.1};  // proposal sd per eta coordinate
  int met_repeats = 1;                             // K block Metropolis updates per step
  double shift_variance = 1.0;                     // variance of the shift proposal
  double range_scale = 1.5;                        // fixed c for range scale updates
  double rate_scale = 1.5;                         // fixed c for rate scale updates
};

/// Which of the joint updates run each iteration (Gibbs sweep and the
/// Metropolis block always run).
struct SchemeSpec {
  bool use_shift = false;
  bool use_range = false;
  bool use_rate = false;
};

struct AcceptanceStats {
  struct Counter {
    long long proposals = 0;
    long long accepts = 0;
    double rate() const { return proposals == 0 ? 0.0 : double(accepts) / double(proposals); }
  };
  Counter metropolis, shift, range, rate;
  void merge(const AcceptanceStats& other);
};

/// Scratch buffers reused across updates so the hot loop does not allocate.
struct Workspace {
  std::vector<double> arrivals;
};

/// Inverse-CDF draw from Exp(rate) truncated to [lo, hi], u in [0, 1].
/// Uses the log1p form, stable when rate*lo is large.
double sample_truncated_exponential(double rate, double lo, double hi, double u);

/// Support of the full conditional of arrivals[i] given the rest.
struct GibbsConditional {
  double lo = 0.0;
  double hi = 0.0;
  bool exponential = false;  // truncated Exp(rate) if true, else Uniform
};

GibbsConditional gibbs_conditional(const ChainState& state, const Observations& obs,
                                   std::size_t i);

/// Redraw arrivals[i] from its full conditional; refreshes summary/log_post.
void gibbs_update_one(ChainState& state, const Observations& obs, const Prior& prior,
                      std::size_t i, RandomStream& rng);

/// Redraw every arrival in ascending index order, each conditional seeing
/// the freshest neighbours. One summary/log_post refresh at the end.
void gibbs_sweep(ChainState& state, const Observations& obs, const Prior& prior,
                 RandomStream& rng);

/// K successive block random-walk Metropolis updates of eta at fixed
/// arrivals. Both sides of each acceptance ratio are O(1) via the cached
/// constraint summary.
void metropolis_eta(ChainState& state, const Observations& obs, const Prior& prior,
                    const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats);

// Deterministic proposal maps, exposed for property tests. Each writes the
// proposed arrivals into out (resized) and returns false if the proposal is
// immediately infeasible.

/// arrivals[i] - shift for all i; infeasible if the first goes negative.
bool shift_propose(const std::vector<double>& arrivals, double shift, std::vector<double>& out);

/// Scale the gaps (x_i - theta1 - v_i) by c, keeping theta1 fixed:
/// v_i* = (x_i - theta1) - c (x_i - theta1 - v_i). Infeasible if the
/// proposal breaks ordering or sends the first arrival negative.
bool range_scale_propose(const std::vector<double>& arrivals, const Observations& obs,
                         double min_service, double scale, std::vector<double>& out);

/// Scale every interarrival time by c (v_i* = c v_i). Infeasible if any
/// proposed arrival leaves its admissible service window.
bool rate_scale_propose(const std::vector<double>& arrivals, const Observations& obs,
                        double min_service, double max_service, double scale,
                        std::vector<double>& out);

/// Joint translation: arrivals down by s, min_service up by s, range fixed.
/// Plain Metropolis (unit Jacobian).
void shift_update(ChainState& state, const Observations& obs, const Prior& prior,
                  const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats,
                  Workspace& ws);

/// Involutive scale of the service range and the arrival gaps; MHG
/// acceptance with Jacobian c^{z(n+1)}.
void range_scale_update(ChainState& state, const Observations& obs, const Prior& prior,
                        const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats,
                        Workspace& ws);

/// Involutive scale of all interarrival times against the arrival rate;
/// MHG acceptance with Jacobian c^{zn}.
void rate_scale_update(ChainState& state, const Observations& obs, const Prior& prior,
                       const TuningParams& tuning, RandomStream& rng, AcceptanceStats& stats,
                       Workspace& ws);

/// One sampler iteration: Gibbs sweep, Metropolis block, then the enabled
/// joint updates (shift, range scale, rate scale) in that fixed order.
void scheme_step(ChainState& state, const Observations& obs, const Prior& prior,
                 const TuningParams& tuning, const SchemeSpec& scheme, RandomStream& rng,
                 AcceptanceStats& stats, Workspace& ws);

/// Deterministic starting state: min_service at min(y), the other two
/// coordinates at their prior means, arrivals at x_i - min(y). Throws if
/// the resulting state falls outside the support.
ChainState init_state(const Observations& obs, const Prior& prior);

}  // namespace mg1
