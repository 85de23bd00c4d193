#include "mg1queue.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "mg1/io.hpp"
#include "mg1/oracle.hpp"
#include "mg1/runner.hpp"

struct mg1_dataset {
  mg1::Observations obs;
  std::string label;
};

struct mg1_simulation {
  mg1::SimOutput sim;
};

struct mg1_run {
  mg1::RunBundle bundle;
};

namespace {

thread_local std::string t_last_error;

void set_error(const char* msg) { t_last_error = msg ? msg : ""; }

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return MG1_EINVAL;
  } catch (const mg1::IoError& e) {
    set_error(e.what());
    return MG1_EIO;
  } catch (const std::filesystem::filesystem_error& e) {
    set_error(e.what());
    return MG1_EIO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return MG1_ERUNTIME;
  } catch (...) {
    set_error("unknown error");
    return MG1_ERUNTIME;
  }
}

int require(bool ok, const char* msg) {
  if (!ok) {
    set_error(msg);
    return MG1_EINVAL;
  }
  return MG1_OK;
}

mg1::TuningParams tuning_of(const mg1_config& cfg) {
  mg1::TuningParams t;
  t.met_sd = {cfg.met_prop_sd[0], cfg.met_prop_sd[1], cfg.met_prop_sd[2]};
  t.met_repeats = cfg.met_repeats;
  t.shift_variance = cfg.shift_variance;
  t.range_scale = cfg.range_scale;
  t.rate_scale = cfg.rate_scale;
  return t;
}

mg1::SchemeSpec scheme_of(const mg1_config& cfg) {
  return {cfg.use_shift != 0, cfg.use_range != 0, cfg.use_rate != 0};
}

mg1::RunParams params_of(const mg1_config& cfg) {
  mg1::RunParams p;
  p.iterations = cfg.iterations;
  p.chains = cfg.chains;
  p.burnin_frac = cfg.burnin_frac;
  p.thin = cfg.thin;
  p.seed = cfg.seed;
  p.threads = cfg.threads;
  return p;
}

void validate_tuning(const mg1_config& cfg) {
  if (!(cfg.met_prop_sd[0] >= 0.0 && cfg.met_prop_sd[1] >= 0.0 && cfg.met_prop_sd[2] >= 0.0) ||
      cfg.met_repeats < 1 || !(cfg.shift_variance >= 0.0) || !(cfg.range_scale > 0.0) ||
      !(cfg.rate_scale > 0.0)) {
    throw std::invalid_argument("config: tuning parameters out of range");
  }
}

mg1::MeanReport mean_of(const mg1_mean_report& r) {
  mg1::MeanReport m;
  for (int p = 0; p < 3; ++p) {
    m.mean[p] = r.mean[p];
    m.se[p] = r.se[p];
    m.ci_lo[p] = r.ci_lo[p];
    m.ci_hi[p] = r.ci_hi[p];
  }
  return m;
}

mg1::ActReport act_of(const mg1_act_report& r) {
  mg1::ActReport a;
  for (int p = 0; p < 3; ++p) {
    a.act[p].tau = r.tau[p];
    a.act[p].trunc_lag = static_cast<std::size_t>(r.trunc_lag[p]);
  }
  a.ms_per_draw = r.ms_per_draw;
  return a;
}

}  // namespace

extern "C" {

const char* mg1_status_name(int status) {
  switch (status) {
    case MG1_OK:
      return "ok";
    case MG1_EINVAL:
      return "invalid argument";
    case MG1_ERUNTIME:
      return "runtime failure";
    case MG1_EIO:
      return "io failure";
    default:
      return "unknown status";
  }
}

const char* mg1_last_error(void) { return t_last_error.c_str(); }

size_t mg1_builtin_dataset_count(void) { return mg1::dataset_names().size(); }

const char* mg1_builtin_dataset_name(size_t index) {
  const auto& names = mg1::dataset_names();
  return index < names.size() ? names[index].data() : nullptr;
}

int mg1_dataset_builtin(const char* name, mg1_dataset** out) {
  if (int rc = require(name && out, "dataset_builtin: null argument")) return rc;
  return guarded([&] {
    *out = new mg1_dataset{mg1::load_dataset(name), name};
    return MG1_OK;
  });
}

int mg1_dataset_from_values(const double* y, size_t n, mg1_dataset** out) {
  if (int rc = require(y && out && n > 0, "dataset_from_values: null or empty input")) return rc;
  return guarded([&] {
    *out = new mg1_dataset{mg1::Observations(std::vector<double>(y, y + n)), "custom"};
    return MG1_OK;
  });
}

int mg1_dataset_read_csv(const char* path, mg1_dataset** out) {
  if (int rc = require(path && out, "dataset_read_csv: null argument")) return rc;
  return guarded([&] {
    *out = new mg1_dataset{mg1::Observations(mg1::read_dataset_csv(path)), path};
    return MG1_OK;
  });
}

int mg1_dataset_write_csv(const mg1_dataset* ds, const char* path) {
  if (int rc = require(ds && path, "dataset_write_csv: null argument")) return rc;
  return guarded([&] {
    mg1::write_dataset_csv(ds->obs, path);
    return MG1_OK;
  });
}

size_t mg1_dataset_size(const mg1_dataset* ds) { return ds ? ds->obs.size() : 0; }

int mg1_dataset_values(const mg1_dataset* ds, double* out, size_t capacity) {
  if (int rc = require(ds && out, "dataset_values: null argument")) return rc;
  if (int rc = require(capacity >= ds->obs.size(), "dataset_values: buffer too small")) return rc;
  const auto& y = ds->obs.interdepartures();
  std::memcpy(out, y.data(), y.size() * sizeof(double));
  return MG1_OK;
}

void mg1_dataset_free(mg1_dataset* ds) { delete ds; }

int mg1_simulate(double min_service, double max_service, double arrival_rate, size_t n,
                 uint64_t seed, mg1_simulation** out) {
  if (int rc = require(out != nullptr, "simulate: null output")) return rc;
  return guarded([&] {
    mg1::Parameters p{min_service, max_service, arrival_rate};
    *out = new mg1_simulation{mg1::simulate(p, n, seed)};
    return MG1_OK;
  });
}

size_t mg1_simulation_size(const mg1_simulation* sim) {
  return sim ? sim->sim.observations.size() : 0;
}

int mg1_simulation_values(const mg1_simulation* sim, double* y, double* v, double* u, double* w,
                          size_t capacity) {
  if (int rc = require(sim != nullptr, "simulation_values: null simulation")) return rc;
  const size_t n = sim->sim.observations.size();
  if (int rc = require(capacity >= n, "simulation_values: buffer too small")) return rc;
  if (y) std::memcpy(y, sim->sim.observations.interdepartures().data(), n * sizeof(double));
  if (v) std::memcpy(v, sim->sim.arrivals.data(), n * sizeof(double));
  if (u) std::memcpy(u, sim->sim.services.data(), n * sizeof(double));
  if (w) std::memcpy(w, sim->sim.interarrivals.data(), n * sizeof(double));
  return MG1_OK;
}

int mg1_simulation_dataset(const mg1_simulation* sim, mg1_dataset** out) {
  if (int rc = require(sim && out, "simulation_dataset: null argument")) return rc;
  return guarded([&] {
    *out = new mg1_dataset{sim->sim.observations, "simulated"};
    return MG1_OK;
  });
}

int mg1_simulation_write_dataset_csv(const mg1_simulation* sim, const char* path) {
  if (int rc = require(sim && path, "simulation_write_dataset_csv: null argument")) return rc;
  return guarded([&] {
    mg1::write_dataset_csv(sim->sim.observations, path);
    return MG1_OK;
  });
}

int mg1_simulation_write_trajectory_csv(const mg1_simulation* sim, const char* path) {
  if (int rc = require(sim && path, "simulation_write_trajectory_csv: null argument")) return rc;
  return guarded([&] {
    mg1::write_trajectory_csv(mg1::trajectory(sim->sim), path);
    return MG1_OK;
  });
}

void mg1_simulation_free(mg1_simulation* sim) { delete sim; }

int mg1_config_defaults(mg1_config* cfg) {
  if (int rc = require(cfg != nullptr, "config_defaults: null config")) return rc;
  *cfg = mg1_config{};
  cfg->met_prop_sd[0] = 0.1;
  cfg->met_prop_sd[1] = 0.1;
  cfg->met_prop_sd[2] = 0.1;
  cfg->met_repeats = 1;
  cfg->shift_variance = 1.0;
  cfg->range_scale = 1.5;
  cfg->rate_scale = 1.5;
  cfg->iterations = 100000;
  cfg->chains = 5;
  cfg->burnin_frac = 0.1;
  cfg->thin = 1;
  return MG1_OK;
}

int mg1_config_scenario(const char* scenario, const char* scheme, double run_scale,
                        mg1_config* cfg) {
  if (int rc = require(scenario && scheme && cfg, "config_scenario: null argument")) return rc;
  if (int rc = require(run_scale > 0.0, "config_scenario: run_scale must be > 0")) return rc;
  return guarded([&] {
    const mg1::ScenarioConfig& sc = mg1::scenario_config(scenario);
    const mg1::SchemeSpec spec = mg1::scheme_by_name(scheme);
    std::size_t scheme_index = 0;
    for (std::size_t i = 0; i < mg1::scheme_names().size(); ++i) {
      if (mg1::scheme_names()[i] == scheme) scheme_index = i;
    }
    mg1_config_defaults(cfg);
    cfg->met_prop_sd[0] = sc.tuning.met_sd[0];
    cfg->met_prop_sd[1] = sc.tuning.met_sd[1];
    cfg->met_prop_sd[2] = sc.tuning.met_sd[2];
    cfg->met_repeats = sc.tuning.met_repeats;
    cfg->shift_variance = sc.tuning.shift_variance;
    cfg->range_scale = sc.tuning.range_scale;
    cfg->rate_scale = sc.tuning.rate_scale;
    cfg->use_shift = spec.use_shift;
    cfg->use_range = spec.use_range;
    cfg->use_rate = spec.use_rate;
    const double iters = sc.run_millions[scheme_index] * 1e6 * run_scale;
    cfg->iterations = iters < 1.0 ? 1 : static_cast<long long>(iters);
    cfg->chains = 5;
    return MG1_OK;
  });
}

int mg1_config_read(const char* path, mg1_config* cfg) {
  if (int rc = require(path && cfg, "config_read: null argument")) return rc;
  return guarded([&] {
    const mg1::KeyValues kv = mg1::read_key_values(path);
    auto get_d = [&](const char* key, double& slot) {
      if (const std::string* v = mg1::find_key(kv, key)) slot = std::stod(*v);
    };
    auto get_i = [&](const char* key, auto& slot) {
      if (const std::string* v = mg1::find_key(kv, key)) {
        slot = static_cast<std::remove_reference_t<decltype(slot)>>(std::stoll(*v));
      }
    };
    get_d("met_sd1", cfg->met_prop_sd[0]);
    get_d("met_sd2", cfg->met_prop_sd[1]);
    get_d("met_sd3", cfg->met_prop_sd[2]);
    get_i("met_repeats", cfg->met_repeats);
    get_d("shift_variance", cfg->shift_variance);
    get_d("range_scale", cfg->range_scale);
    get_d("rate_scale", cfg->rate_scale);
    get_i("use_shift", cfg->use_shift);
    get_i("use_range", cfg->use_range);
    get_i("use_rate", cfg->use_rate);
    get_i("iterations", cfg->iterations);
    get_i("chains", cfg->chains);
    get_d("burnin_frac", cfg->burnin_frac);
    get_i("thin", cfg->thin);
    get_i("seed", cfg->seed);
    get_i("threads", cfg->threads);
    return MG1_OK;
  });
}

int mg1_config_write(const mg1_config* cfg, const char* path) {
  if (int rc = require(cfg && path, "config_write: null argument")) return rc;
  return guarded([&] {
    char buf[64];
    mg1::KeyValues kv;
    auto put_d = [&](const char* key, double v) {
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      kv.emplace_back(key, buf);
    };
    put_d("met_sd1", cfg->met_prop_sd[0]);
    put_d("met_sd2", cfg->met_prop_sd[1]);
    put_d("met_sd3", cfg->met_prop_sd[2]);
    kv.emplace_back("met_repeats", std::to_string(cfg->met_repeats));
    put_d("shift_variance", cfg->shift_variance);
    put_d("range_scale", cfg->range_scale);
    put_d("rate_scale", cfg->rate_scale);
    kv.emplace_back("use_shift", std::to_string(cfg->use_shift));
    kv.emplace_back("use_range", std::to_string(cfg->use_range));
    kv.emplace_back("use_rate", std::to_string(cfg->use_rate));
    kv.emplace_back("iterations", std::to_string(cfg->iterations));
    kv.emplace_back("chains", std::to_string(cfg->chains));
    put_d("burnin_frac", cfg->burnin_frac);
    kv.emplace_back("thin", std::to_string(cfg->thin));
    kv.emplace_back("seed", std::to_string(cfg->seed));
    kv.emplace_back("threads", std::to_string(cfg->threads));
    mg1::write_key_values(kv, path);
    return MG1_OK;
  });
}

int mg1_run_sampler(const mg1_dataset* data, const mg1_config* cfg, mg1_run** out) {
  if (int rc = require(data && cfg && out, "run_sampler: null argument")) return rc;
  return guarded([&] {
    validate_tuning(*cfg);
    auto run = std::make_unique<mg1_run>();
    run->bundle.tuning = tuning_of(*cfg);
    run->bundle.scheme = scheme_of(*cfg);
    run->bundle.params = params_of(*cfg);
    run->bundle.data_label = data->label;
    run->bundle.archive = mg1::run_scheme(data->obs, mg1::Prior{}, run->bundle.tuning,
                                          run->bundle.scheme, run->bundle.params);
    *out = run.release();
    return MG1_OK;
  });
}

int mg1_run_save(const mg1_run* run, const char* dir) {
  if (int rc = require(run && dir, "run_save: null argument")) return rc;
  return guarded([&] {
    mg1::save_run(run->bundle, dir);
    return MG1_OK;
  });
}

int mg1_run_open(const char* dir, mg1_run** out) {
  if (int rc = require(dir && out, "run_open: null argument")) return rc;
  return guarded([&] {
    *out = new mg1_run{mg1::load_run(dir)};
    return MG1_OK;
  });
}

int mg1_run_open_traces(const char* const* paths, size_t count, double ms_per_iter,
                        mg1_run** out) {
  if (int rc = require(paths && out && count > 0, "run_open_traces: null or empty input")) {
    return rc;
  }
  return guarded([&] {
    std::vector<std::string> files(paths, paths + count);
    auto run = std::make_unique<mg1_run>();
    run->bundle.archive = mg1::load_traces(files, ms_per_iter);
    run->bundle.data_label = "traces";
    *out = run.release();
    return MG1_OK;
  });
}

int mg1_run_num_chains(const mg1_run* run) {
  return run ? static_cast<int>(run->bundle.archive.num_chains()) : 0;
}

long long mg1_run_chain_length(const mg1_run* run) {
  return run ? static_cast<long long>(run->bundle.archive.length()) : 0;
}

double mg1_run_ms_per_iteration(const mg1_run* run) {
  return run ? run->bundle.archive.ms_per_iter() : 0.0;
}

int mg1_run_acceptance(const mg1_run* run, const char* kernel, long long* proposals,
                       long long* accepts) {
  if (int rc = require(run && kernel, "run_acceptance: null argument")) return rc;
  const mg1::AcceptanceStats stats = run->bundle.archive.merged_stats();
  const mg1::AcceptanceStats::Counter* counter = nullptr;
  const std::string name = kernel;
  if (name == "metropolis") counter = &stats.metropolis;
  if (name == "shift") counter = &stats.shift;
  if (name == "range") counter = &stats.range;
  if (name == "rate") counter = &stats.rate;
  if (int rc = require(counter != nullptr, "run_acceptance: unknown kernel name")) return rc;
  if (proposals) *proposals = counter->proposals;
  if (accepts) *accepts = counter->accepts;
  return MG1_OK;
}

void mg1_run_free(mg1_run* run) { delete run; }

int mg1_run_mean_report(const mg1_run* run, mg1_mean_report* out) {
  if (int rc = require(run && out, "run_mean_report: null argument")) return rc;
  return guarded([&] {
    const mg1::MeanReport r = mg1::posterior_means(run->bundle.archive);
    for (int p = 0; p < 3; ++p) {
      out->mean[p] = r.mean[p];
      out->se[p] = r.se[p];
      out->ci_lo[p] = r.ci_lo[p];
      out->ci_hi[p] = r.ci_hi[p];
    }
    return MG1_OK;
  });
}

int mg1_run_act_report(const mg1_run* run, mg1_act_report* out) {
  if (int rc = require(run && out, "run_act_report: null argument")) return rc;
  return guarded([&] {
    const mg1::ActReport r = mg1::act_report(run->bundle.archive);
    for (int p = 0; p < 3; ++p) {
      out->tau[p] = r.act[p].tau;
      out->trunc_lag[p] = static_cast<long long>(r.act[p].trunc_lag);
      out->tau_ms[p] = r.tau_ms(p);
    }
    out->ms_per_draw = r.ms_per_draw;
    return MG1_OK;
  });
}

int mg1_mean_report_write(const mg1_mean_report* r, const char* csv_path, const char* txt_path) {
  if (int rc = require(r != nullptr, "mean_report_write: null report")) return rc;
  return guarded([&] {
    const mg1::MeanReport m = mean_of(*r);
    if (csv_path) mg1::write_mean_report_csv(m, csv_path);
    if (txt_path) mg1::write_mean_report_text(m, txt_path);
    return MG1_OK;
  });
}

int mg1_act_report_write(const mg1_act_report* r, const char* csv_path, const char* txt_path) {
  if (int rc = require(r != nullptr, "act_report_write: null report")) return rc;
  return guarded([&] {
    const mg1::ActReport a = act_of(*r);
    if (csv_path) mg1::write_act_report_csv(a, csv_path);
    if (txt_path) mg1::write_act_report_text(a, txt_path);
    return MG1_OK;
  });
}

int mg1_efficiency_write(const mg1_act_report* reports, const char* const* labels, size_t count,
                         const char* csv_path, const char* txt_path) {
  if (int rc = require(reports && labels && count >= 2, "efficiency_write: need >= 2 reports")) {
    return rc;
  }
  return guarded([&] {
    std::vector<std::pair<std::string, mg1::ActReport>> rows;
    rows.reserve(count);
    for (size_t i = 0; i < count; ++i) rows.emplace_back(labels[i], act_of(reports[i]));
    const mg1::EfficiencyTable table = mg1::efficiency_table(rows);
    if (csv_path) mg1::write_efficiency_csv(table, csv_path);
    if (txt_path) mg1::write_efficiency_text(table, txt_path);
    return MG1_OK;
  });
}

}  // extern "C"
