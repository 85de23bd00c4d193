// Acceptance suite: runs every correctness and efficiency gate end to end
// and prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "mg1/diagnostics.hpp"
#include "mg1/io.hpp"
#include "mg1/kernels.hpp"
#include "mg1/oracle.hpp"
#include "mg1/runner.hpp"
#include "mg1/simulator.hpp"

#include "sampling_checks.hpp"

using namespace mg1;

namespace {

const Prior kPrior;
int g_failures = 0;
std::vector<std::string> g_notes;

void note(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  g_notes.push_back(buf);
}

void report(int criterion, const char* label, bool pass) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, label);
  for (const auto& n : g_notes) std::printf("       %s\n", n.c_str());
  g_notes.clear();
  if (!pass) ++g_failures;
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

TuningParams tuning_from_oracle(const OracleMoments& oracle) {
  TuningParams tuning;
  tuning.met_sd = {std::sqrt(oracle.variance[0]), std::sqrt(oracle.variance[1]),
                   std::sqrt(oracle.variance[2])};
  tuning.met_repeats = 4;
  tuning.shift_variance = oracle.variance[0];
  tuning.range_scale = 1.3;
  tuning.rate_scale = 1.3;
  return tuning;
}

// ---------------------------------------------------------------- 1 ----

bool oracle_equivalence_case(const Observations& obs, const QuadratureSpec& qspec,
                             std::uint64_t seed, const std::string& golden_path) {
  const OracleMoments oracle = posterior_moments_oracle(obs, kPrior, qspec);
  write_oracle_csv(oracle, obs, qspec, golden_path);
  if (!oracle.converged) {
    note("n=%zu: oracle refinement did not converge", obs.size());
    return false;
  }

  RunParams params;
  params.iterations = 1000000;
  params.chains = 5;
  params.burnin_frac = 0.1;
  params.thin = 1;
  params.seed = seed;
  const ChainArchive archive =
      run_scheme(obs, kPrior, tuning_from_oracle(oracle), {true, true, true}, params);
  const MeanReport means = posterior_means(archive);

  bool pass = true;
  for (int p = 0; p < 3; ++p) {
    const double oracle_err = oracle.refinement_delta[p] * std::abs(oracle.mean[p]);
    const double combined = std::sqrt(means.se[p] * means.se[p] + oracle_err * oracle_err);
    const double gap = std::abs(means.mean[p] - oracle.mean[p]);
    note("n=%zu eta%d: mcmc %.5f vs oracle %.5f (gap %.2g, 3*combined se %.2g)", obs.size(),
         p + 1, means.mean[p], oracle.mean[p], gap, 3.0 * combined);
    if (!(gap < 3.0 * combined)) pass = false;
  }
  return pass;
}

bool criterion1(const std::string& out_dir) {
  const SimOutput one = simulate({1.0, 5.0, 0.25}, 1, 12);
  const SimOutput three = simulate({1.0, 5.0, 0.25}, 3, 5);
  if (one.observations.min_interdeparture() >= 10.0 ||
      three.observations.min_interdeparture() >= 10.0) {
    note("synthetic data fell outside the prior box; pick different seeds");
    return false;
  }
  QuadratureSpec spec_n1{128, 64};
  QuadratureSpec spec_n3{64, 64};
  const bool a = oracle_equivalence_case(one.observations, spec_n1, 101,
                                         out_dir + "/oracle_golden_n1.csv");
  const bool b = oracle_equivalence_case(three.observations, spec_n3, 103,
                                         out_dir + "/oracle_golden_n3.csv");
  return a && b;
}

// ---------------------------------------------------------------- 2 ----

bool criterion2(const std::string& out_dir, AcceptanceStats* intermediate_all_stats) {
  const Observations obs = load_dataset("intermediate");
  const ScenarioConfig& scenario = scenario_config("intermediate");
  const std::array<double, 3> reference = {3.9612, 2.9865, -1.7316};

  std::vector<MeanReport> reports;
  bool pass = true;
  for (std::size_t s = 0; s < scheme_names().size(); ++s) {
    RunParams params;
    params.iterations = 200000;
    params.chains = 5;
    params.burnin_frac = 0.1;
    params.thin = 1;
    params.seed = 500 + s;
    const SchemeSpec scheme = scheme_by_name(scheme_names()[s]);
    const ChainArchive archive = run_scheme(obs, kPrior, scenario.tuning, scheme, params);
    const MeanReport means = posterior_means(archive);
    reports.push_back(means);
    if (scheme_names()[s] == "all" && intermediate_all_stats) {
      *intermediate_all_stats = archive.merged_stats();
    }
    write_mean_report_csv(means, out_dir + "/means_" + std::string(scheme_names()[s]) + ".csv");
    for (int p = 0; p < 3; ++p) {
      const double gap = std::abs(means.mean[p] - reference[p]);
      if (!(gap < 0.02)) {
        note("%s eta%d mean %.5f is %.4f from the reference %.4f", scheme_names()[s].data(),
             p + 1, means.mean[p], gap, reference[p]);
        pass = false;
      }
    }
    note("%s means: %.5f %.5f %.5f (se %.2g %.2g %.2g)", scheme_names()[s].data(),
         means.mean[0], means.mean[1], means.mean[2], means.se[0], means.se[1], means.se[2]);
  }

  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      for (int p = 0; p < 3; ++p) {
        const bool overlap = reports[a].ci_lo[p] <= reports[b].ci_hi[p] &&
                             reports[b].ci_lo[p] <= reports[a].ci_hi[p];
        if (!overlap) {
          note("eta%d CIs of %s and %s do not overlap", p + 1, scheme_names()[a].data(),
               scheme_names()[b].data());
          pass = false;
        }
      }
    }
  }
  return pass;
}

// ---------------------------------------------------------------- 3 ----

struct ScenarioRuns {
  std::vector<std::pair<std::string, ActReport>> acts;
  AcceptanceStats all_stats;  // merged stats of the Basic+All run
  long long all_proposals_per_kernel = 0;
};

ScenarioRuns run_scenario_at_scale(const std::string& name, double scale, std::uint64_t seed,
                                   const std::string& out_dir) {
  const Observations obs = load_dataset(name);
  const ScenarioConfig& scenario = scenario_config(name);
  ScenarioRuns result;
  std::vector<std::pair<std::string, ActReport>> acts;
  for (std::size_t s = 0; s < scheme_names().size(); ++s) {
    RunParams params;
    params.iterations = static_cast<long long>(scenario.run_millions[s] * 1e6 * scale);
    params.chains = 5;
    params.burnin_frac = 0.1;
    params.thin = 1;
    params.seed = seed + s;
    const SchemeSpec scheme = scheme_by_name(scheme_names()[s]);
    const ChainArchive archive = run_scheme(obs, kPrior, scenario.tuning, scheme, params);
    acts.emplace_back(std::string(scheme_names()[s]), act_report(archive));
    if (scheme_names()[s] == "all") {
      result.all_stats = archive.merged_stats();
      result.all_proposals_per_kernel = params.iterations * params.chains;
    }
  }
  const EfficiencyTable table = efficiency_table(acts);
  write_efficiency_csv(table, out_dir + "/efficiency_" + name + ".csv");
  write_efficiency_text(table, out_dir + "/efficiency_" + name + ".txt");
  result.acts = std::move(acts);
  return result;
}

bool criterion3(const ScenarioRuns& frequent, const ScenarioRuns& rare) {
  const ActReport& freq_basic = frequent.acts[0].second;
  const ActReport& freq_all = frequent.acts[4].second;
  const ActReport& rare_basic = rare.acts[0].second;
  const ActReport& rare_all = rare.acts[4].second;

  const double gain_eta3 = freq_basic.tau_ms(2) / freq_all.tau_ms(2);
  const double gain_eta1 = rare_basic.tau_ms(0) / rare_all.tau_ms(0);
  const double gain_eta2 = rare_basic.tau_ms(1) / rare_all.tau_ms(1);
  note("frequent eta3 time-adjusted gain: %.1f (needs >= 20; reference full-scale ~179)",
       gain_eta3);
  note("rare eta1 gain: %.1f, eta2 gain: %.1f (need >= 10; reference ~58 and ~61)", gain_eta1,
       gain_eta2);
  return gain_eta3 >= 20.0 && gain_eta1 >= 10.0 && gain_eta2 >= 10.0;
}

// ---------------------------------------------------------------- 4 ----

bool check_rates(const char* label, const AcceptanceStats& stats, bool has_joint_updates) {
  bool pass = true;
  auto check_one = [&](const char* kernel, const AcceptanceStats::Counter& c) {
    if (c.proposals == 0) return;
    if (c.proposals < 100000) {
      note("%s %s: only %lld proposals (need >= 1e5)", label, kernel, c.proposals);
      pass = false;
    }
    const double rate = c.rate();
    note("%s %s acceptance: %.3f over %lld proposals", label, kernel, rate, c.proposals);
    if (!(rate >= 0.10 && rate <= 0.45)) pass = false;
  };
  check_one("metropolis", stats.metropolis);
  if (has_joint_updates) {
    check_one("shift", stats.shift);
    check_one("range", stats.range);
    check_one("rate", stats.rate);
  }
  return pass;
}

// ---------------------------------------------------------------- 5 ----

bool kernel_property_suite() {
  bool pass = true;
  const Observations obs = load_dataset("intermediate");

  // Involutions and Jacobian reciprocity for the two scale updates.
  {
    const auto states = checks::sample_states(obs, kPrior, 30, 301);
    std::vector<double> fwd, back;
    double worst = 0.0;
    for (const auto& state : states) {
      const double theta2 = state.eta.min_service + state.eta.service_range;
      if (range_scale_propose(state.arrivals, obs, state.eta.min_service, 1.3, fwd) &&
          range_scale_propose(fwd, obs, state.eta.min_service, 1.0 / 1.3, back)) {
        for (std::size_t i = 0; i < back.size(); ++i) {
          worst = std::max(worst, std::abs(back[i] - state.arrivals[i]) /
                                      (1.0 + std::abs(state.arrivals[i])));
        }
      }
      if (rate_scale_propose(state.arrivals, obs, state.eta.min_service, theta2, 1.02, fwd) &&
          rate_scale_propose(fwd, obs, state.eta.min_service, theta2, 1.0 / 1.02, back)) {
        for (std::size_t i = 0; i < back.size(); ++i) {
          worst = std::max(worst, std::abs(back[i] - state.arrivals[i]) /
                                      (1.0 + std::abs(state.arrivals[i])));
        }
      }
    }
    note("scale involution worst relative error: %.2e (limit 1e-10)", worst);
    if (!(worst < 1e-10)) pass = false;
    const double n = 50.0;
    const double jac_sum_range = (+1) * (n + 1.0) * std::log(1.03) + (-1) * (n + 1.0) * std::log(1.03);
    const double jac_sum_rate = (+1) * n * std::log(1.004) + (-1) * n * std::log(1.004);
    if (jac_sum_range != 0.0 || jac_sum_rate != 0.0 ||
        std::exp(jac_sum_range) * std::exp(jac_sum_rate) != 1.0) {
      note("Jacobian factors of opposite directions do not cancel exactly");
      pass = false;
    }
  }

  // Cached vs full log posterior on random states.
  {
    RandomStream rng(303);
    long long mismatches = 0;
    int finite_seen = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6);
      std::vector<double> y(n), v(n);
      for (auto& val : y) val = rng.uniform_range(0.5, 12.0);
      const Observations data(y);
      double prev = rng.uniform_range(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        prev = std::min(prev + rng.uniform_range(0.0, 6.0), data.departure(i));
        v[i] = prev;
      }
      const double t1 = rng.uniform_range(-0.5, 10.5);
      const Parameters p{t1, t1 + rng.uniform_range(-0.5, 10.5), rng.uniform_range(1e-4, 0.4)};
      const double full = log_posterior(p, v, data, kPrior);
      const double cached = log_posterior_cached(p, compute_summary(v, data), kPrior);
      if (full != cached) ++mismatches;
      if (full > kNegInf) ++finite_seen;
    }
    note("cached vs full posterior: %lld mismatches over 10000 states (%d in support)",
         mismatches, finite_seen);
    if (mismatches != 0 || finite_seen == 0) pass = false;
  }

  // Gibbs conditionals against rejection oracles.
  {
    struct Case {
      const char* label;
      Observations obs;
      ChainState state;
      std::size_t index;
      double box_lo, box_hi;
    };
    std::vector<Case> cases;
    {
      Observations o({5.0, 4.0});
      ChainState st = checks::make_state(o, {1.0, 2.0, std::log(0.2)}, {3.0, 6.0}, kPrior);
      cases.push_back({"first", o, st, 0, 0.0, 6.0});
    }
    {
      Observations o({5.0, 4.0, 5.0});
      ChainState st = checks::make_state(o, {1.0, 2.0, std::log(0.2)}, {3.0, 7.0, 12.0}, kPrior);
      cases.push_back({"middle busy", o, st, 1, 3.0, 12.0});
    }
    {
      Observations o({5.0, 2.5, 2.5});
      ChainState st = checks::make_state(o, {1.0, 2.0, std::log(0.2)}, {3.0, 4.0, 9.0}, kPrior);
      cases.push_back({"middle idle", o, st, 1, 3.0, 9.0});
    }
    {
      Observations o({5.0});
      ChainState st = checks::make_state(o, {1.0, 2.0, std::log(0.2)}, {2.5}, kPrior);
      cases.push_back({"last exponential", o, st, 0, 0.0, 5.0});
    }
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const auto& cs = cases[c];
      const auto mine = checks::gibbs_draws(cs.state, cs.obs, kPrior, cs.index, 100000, 400 + c);
      const auto oracle = checks::rejection_draws(cs.obs, cs.state.eta, cs.state.arrivals,
                                                  cs.index, cs.box_lo, cs.box_hi, 100000,
                                                  500 + c);
      const double d = checks::ks_statistic(mine, oracle);
      note("gibbs %s conditional KS distance: %.4f (limit 0.01)", cs.label, d);
      if (!(d < 0.01)) pass = false;
    }
  }

  // Shift margin invariance.
  {
    const auto states = checks::sample_states(obs, kPrior, 40, 305);
    RandomStream rng(307);
    std::vector<double> proposed;
    double worst = 0.0;
    for (const auto& state : states) {
      const double s = rng.uniform_range(-1.0, 1.0);
      if (!shift_propose(state.arrivals, s, proposed)) continue;
      for (std::size_t i = 0; i < proposed.size(); ++i) {
        const double x_prev = obs.departure_before(i);
        const double before =
            obs.interdeparture(i) - (state.arrivals[i] - x_prev) - state.eta.min_service;
        const double after =
            obs.interdeparture(i) - (proposed[i] - x_prev) - (state.eta.min_service + s);
        worst = std::max(worst, std::abs(after - before));
      }
    }
    note("shift margin invariance worst absolute drift: %.2e (limit 1e-9)", worst);
    if (!(worst < 1e-9)) pass = false;
  }

  // Non-ergodicity witness: exact tie preservation.
  {
    bool witness = true;
    {
      const Observations data({12.0, 3.0, 3.0});
      ChainState state =
          checks::make_state(data, {1.0, 5.0, std::log(0.05)}, {10.0, 12.5, 15.0}, kPrior);
      TuningParams tuning;
      tuning.shift_variance = 0.01;
      RandomStream rng(311);
      AcceptanceStats stats;
      Workspace ws;
      const double w2 = state.arrivals[1] - state.arrivals[0];
      for (int step = 0; step < 400 && witness; ++step) {
        shift_update(state, data, kPrior, tuning, rng, stats, ws);
        witness = (state.arrivals[1] - state.arrivals[0] == w2) &&
                  (state.arrivals[2] - state.arrivals[1] == w2);
      }
      witness = witness && stats.shift.accepts > 0;
    }
    {
      const Observations data({4.0, 3.0, 3.0});
      ChainState state =
          checks::make_state(data, {1.0, 5.0, std::log(1e-7)}, {2.0, 5.0, 8.0}, kPrior);
      TuningParams tuning;
      tuning.range_scale = 2.0;
      tuning.rate_scale = 2.0;
      RandomStream rng(313);
      AcceptanceStats stats;
      Workspace ws;
      for (int step = 0; step < 400 && witness; ++step) {
        if (step % 2 == 0) {
          range_scale_update(state, data, kPrior, tuning, rng, stats, ws);
        } else {
          rate_scale_update(state, data, kPrior, tuning, rng, stats, ws);
        }
        witness = state.arrivals[1] - state.arrivals[0] == state.arrivals[2] - state.arrivals[1];
      }
      witness = witness && stats.range.accepts > 0 && stats.rate.accepts > 0;
    }
    note("non-ergodicity witness (tie w_2 = w_3 preserved exactly): %s",
         witness ? "holds" : "violated");
    if (!witness) pass = false;
  }

  return pass;
}

// ---------------------------------------------------------------- 6 ----

bool diagnostics_self_test() {
  bool pass = true;
  RandomStream rng(601);

  {
    const std::size_t m = 100000;
    std::vector<double> x(m);
    for (auto& v : x) v = rng.normal();
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(m);
    const ActEstimate est = integrated_act({autocovariance(x, mean, m / 10)});
    note("iid normal tau: %.3f (needs [0.8, 1.2])", est.tau);
    if (!(est.tau > 0.8 && est.tau < 1.2)) pass = false;
  }
  {
    const double phi = 0.9;
    const std::size_t m = 1000000;
    std::vector<double> x(m);
    double state = 0.0;
    const double innovation_sd = std::sqrt(1.0 - phi * phi);
    for (auto& v : x) {
      state = phi * state + innovation_sd * rng.normal();
      v = state;
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(m);
    const ActEstimate est = integrated_act({autocovariance(x, mean, m / 10)});
    const double analytic = (1.0 + phi) / (1.0 - phi);
    note("AR(1) phi=0.9 tau: %.2f vs analytic %.0f (needs within 15%%)", est.tau, analytic);
    if (!(std::abs(est.tau - analytic) / analytic < 0.15)) pass = false;
  }
  {
    const std::size_t m = 1024;
    std::vector<double> x(m);
    for (auto& v : x) v = rng.normal() + 0.4;
    const double grand = 0.37;
    const auto fft_gamma = autocovariance(x, grand, 200);
    double worst = 0.0;
    for (std::size_t k = 0; k <= 200; ++k) {
      double direct = 0.0;
      for (std::size_t i = 0; i + k < m; ++i) direct += (x[i] - grand) * (x[i + k] - grand);
      direct /= double(m);
      worst = std::max(worst, std::abs(fft_gamma[k] - direct) / std::max(1e-30, std::abs(direct)));
    }
    note("FFT vs direct autocovariance worst relative error: %.2e (limit 1e-8)", worst);
    if (!(worst < 1e-8)) pass = false;
  }
  return pass;
}

}  // namespace

int main() {
  const std::string out_dir = "acceptance_out";
  std::filesystem::create_directories(out_dir);
  Timer total;

  {
    Timer t;
    const bool ok = criterion1(out_dir);
    note("elapsed %.1f s", t.seconds());
    report(1, "oracle equivalence (Basic+All vs quadrature, n=1 and n=3)", ok);
  }

  AcceptanceStats intermediate_all_stats;
  {
    Timer t;
    const bool ok = criterion2(out_dir, &intermediate_all_stats);
    note("elapsed %.1f s", t.seconds());
    report(2, "scheme agreement on the intermediate dataset", ok);
  }

  ScenarioRuns frequent, rare;
  {
    Timer t;
    frequent = run_scenario_at_scale("frequent", 0.02, 900, out_dir);
    rare = run_scenario_at_scale("rare", 0.02, 950, out_dir);
    const bool ok = criterion3(frequent, rare);
    note("elapsed %.1f s", t.seconds());
    report(3, "time-adjusted efficiency gains (frequent eta3, rare eta1/eta2)", ok);
  }

  {
    bool ok = check_rates("frequent", frequent.all_stats, true);
    ok = check_rates("intermediate", intermediate_all_stats, true) && ok;
    ok = check_rates("rare", rare.all_stats, true) && ok;
    report(4, "kernel acceptance rates in [0.10, 0.45] with reference tuning", ok);
  }

  {
    Timer t;
    const bool ok = kernel_property_suite();
    note("elapsed %.1f s", t.seconds());
    report(5, "kernel property suite (involutions, cache, conditionals, witness)", ok);
  }

  {
    Timer t;
    const bool ok = diagnostics_self_test();
    note("elapsed %.1f s", t.seconds());
    report(6, "diagnostics self-test (iid tau, AR(1) tau, FFT autocovariance)", ok);
  }

  std::printf("acceptance: %s (%d failure%s, %.1f s total)\n", g_failures == 0 ? "PASS" : "FAIL",
              g_failures, g_failures == 1 ? "" : "s", total.seconds());
  return g_failures == 0 ? 0 : 1;
}
