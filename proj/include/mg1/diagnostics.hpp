#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mg1/kernels.hpp"

namespace mg1 {

/// Post-burn-in eta traces for one chain, stored per coordinate.
struct ChainTrace {
  std::array<std::vector<double>, 3> eta;
  AcceptanceStats stats;
  double ms_per_iter = 0.0;
  long long first_iteration = 0;  // absolute index of the first retained draw

  std::size_t length() const { return eta[0].size(); }
};

/// Equal-length traces from S independent runs of one sampler.
struct ChainArchive {
  std::vector<ChainTrace> chains;
  long long iterations = 0;  // per chain, before burn-in removal
  long long thin = 1;
  double burnin_frac = 0.0;

  std::size_t num_chains() const { return chains.size(); }
  std::size_t length() const { return chains.empty() ? 0 : chains.front().length(); }
  double ms_per_iter() const;
  AcceptanceStats merged_stats() const;
  double grand_mean(int param) const;
};

/// Grand mean over all runs, with the spread of per-run means giving the
/// standard error (stdev / sqrt(S)) and an approximate CI of +-2 se.
struct MeanReport {
  std::array<double, 3> mean{}, se{}, ci_lo{}, ci_hi{};
};

MeanReport posterior_means(const ChainArchive& archive);

/// In-place radix-2 FFT (size must be a power of two). The inverse applies
/// the 1/n normalization.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Lag-k autocovariances gamma_k = (1/M) sum_{m=1}^{M-k} (x_m - g)(x_{m+k} - g)
/// for k = 0..max_lag, centered at the supplied grand mean g (not the
/// per-run mean, so runs stuck in different regions inflate gamma_0).
/// FFT-based; matches the direct sum to ~1e-12 relative.
std::vector<double> autocovariance(std::span<const double> trace, double grand_mean,
                                   std::size_t max_lag);

struct ActEstimate {
  double tau = 0.0;
  std::size_t trunc_lag = 0;
};

/// Integrated autocorrelation time 1 + 2 sum_{k=1}^{K} rho_k from per-run
/// autocovariance vectors (averaged before normalizing). K is the first lag
/// with rho_k < 0.01, capped at the supplied vector length.
ActEstimate integrated_act(const std::vector<std::vector<double>>& per_run_autocov);

/// Per-parameter autocorrelation times with the time-adjusted values
/// (tau multiplied by the measured ms per sampler iteration).
struct ActReport {
  std::array<ActEstimate, 3> act{};
  double ms_per_draw = 0.0;  // ms_per_iter * thin
  double tau_ms(int param) const { return act[param].tau * ms_per_draw; }
};

ActReport act_report(const ChainArchive& archive);

/// Time-adjusted autocorrelation-time comparison across schemes; rows are
/// schemes, the first row is the baseline the gains are relative to.
struct EfficiencyTable {
  struct Row {
    std::string label;
    std::array<double, 3> tau{}, tau_ms{}, gain{};
  };
  std::vector<Row> rows;
};

EfficiencyTable efficiency_table(const std::vector<std::pair<std::string, ActReport>>& reports);

// Report writers (CSV plus aligned plain text).
void write_mean_report_csv(const MeanReport& r, const std::string& path);
void write_mean_report_text(const MeanReport& r, const std::string& path);
std::string format_mean_report(const MeanReport& r);
void write_act_report_csv(const ActReport& r, const std::string& path);
void write_act_report_text(const ActReport& r, const std::string& path);
std::string format_act_report(const ActReport& r);
void write_efficiency_csv(const EfficiencyTable& t, const std::string& path);
void write_efficiency_text(const EfficiencyTable& t, const std::string& path);
std::string format_efficiency(const EfficiencyTable& t);

}  // namespace mg1
