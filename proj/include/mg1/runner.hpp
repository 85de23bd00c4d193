#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "mg1/diagnostics.hpp"
#include "mg1/kernels.hpp"

namespace mg1 {

struct RunParams {
  long long iterations = 0;
  int chains = 1;
  double burnin_frac = 0.1;
  long long thin = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = min(hardware, chains)
};

/// Run S independent chains of the given scheme; chains execute
/// concurrently with per-chain derived seeds, so results are reproducible
/// regardless of thread scheduling. Traces retain post-burn-in draws only.
ChainArchive run_scheme(const Observations& obs, const Prior& prior, const TuningParams& tuning,
                        const SchemeSpec& scheme, const RunParams& params);

/// The five reference schemes: basic, shift, range, rate, all.
const std::array<std::string_view, 5>& scheme_names();
SchemeSpec scheme_by_name(std::string_view name);

/// Per-scenario tuning settings and reference run lengths (in millions of
/// iterations, ordered as scheme_names()).
struct ScenarioConfig {
  std::string_view name;
  TuningParams tuning;
  std::array<double, 5> run_millions;
};

const std::array<ScenarioConfig, 3>& scenario_configs();
const ScenarioConfig& scenario_config(std::string_view name);

/// Everything needed to persist/reload a run directory.
struct RunBundle {
  ChainArchive archive;
  TuningParams tuning;
  SchemeSpec scheme;
  RunParams params;
  std::string data_label;  // builtin dataset name or source path
};

/// Writes config.txt, meta.csv and chain<k>.csv into dir (created if absent).
void save_run(const RunBundle& bundle, const std::string& dir);
RunBundle load_run(const std::string& dir);
ChainArchive load_traces(const std::vector<std::string>& paths, double ms_per_iter);

}  // namespace mg1
