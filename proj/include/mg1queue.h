/* C interface to the M/G/1 interdeparture-time inference library.
 *
 * All functions return MG1_OK (0) on success or a nonzero status code;
 * mg1_last_error() describes the most recent failure on the calling
 * thread. Objects returned through out-parameters are owned by the caller
 * and released with the matching _free function.
 */
#ifndef MG1QUEUE_H
#define MG1QUEUE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MG1_OK 0       /* success */
#define MG1_EINVAL 1   /* invalid argument / usage error */
#define MG1_ERUNTIME 2 /* runtime or numeric failure */
#define MG1_EIO 3      /* file I/O failure */

const char* mg1_status_name(int status);
const char* mg1_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets: vectors of interdeparture times.                          */

typedef struct mg1_dataset mg1_dataset;

size_t mg1_builtin_dataset_count(void);
const char* mg1_builtin_dataset_name(size_t index);

int mg1_dataset_builtin(const char* name, mg1_dataset** out);
int mg1_dataset_from_values(const double* y, size_t n, mg1_dataset** out);
int mg1_dataset_read_csv(const char* path, mg1_dataset** out);
int mg1_dataset_write_csv(const mg1_dataset* ds, const char* path);
size_t mg1_dataset_size(const mg1_dataset* ds);
/* Copies up to capacity values into out; returns MG1_EINVAL if capacity
 * is smaller than the dataset. */
int mg1_dataset_values(const mg1_dataset* ds, double* out, size_t capacity);
void mg1_dataset_free(mg1_dataset* ds);

/* ------------------------------------------------------------------ */
/* Forward simulation of the queue.                                    */

typedef struct mg1_simulation mg1_simulation;

int mg1_simulate(double min_service, double max_service, double arrival_rate, size_t n,
                 uint64_t seed, mg1_simulation** out);
size_t mg1_simulation_size(const mg1_simulation* sim);
/* Any of y, v, u, w may be NULL; non-NULL buffers need >= capacity slots. */
int mg1_simulation_values(const mg1_simulation* sim, double* y, double* v, double* u, double* w,
                          size_t capacity);
int mg1_simulation_dataset(const mg1_simulation* sim, mg1_dataset** out);
int mg1_simulation_write_dataset_csv(const mg1_simulation* sim, const char* path);
int mg1_simulation_write_trajectory_csv(const mg1_simulation* sim, const char* path);
void mg1_simulation_free(mg1_simulation* sim);

/* ------------------------------------------------------------------ */
/* Sampler configuration.                                              */

typedef struct mg1_config {
  double met_prop_sd[3]; /* Metropolis proposal sd per eta coordinate */
  int met_repeats;       /* Metropolis updates per iteration */
  double shift_variance; /* variance of the shift proposal */
  double range_scale;    /* fixed scale c of range scale updates */
  double rate_scale;     /* fixed scale c of rate scale updates */
  int use_shift;
  int use_range;
  int use_rate;
  long long iterations;
  int chains;
  double burnin_frac; /* fraction of each run discarded, in [0, 0.5] */
  long long thin;
  uint64_t seed;
  int threads; /* 0 = one per hardware thread, capped at chains */
} mg1_config;

int mg1_config_defaults(mg1_config* cfg);
/* Reference tuning and run length for a scenario/scheme pair; iterations
 * are the reference run length multiplied by run_scale. Scenario is one of
 * frequent/intermediate/rare, scheme one of basic/shift/range/rate/all. */
int mg1_config_scenario(const char* scenario, const char* scheme, double run_scale,
                        mg1_config* cfg);
int mg1_config_read(const char* path, mg1_config* cfg);
int mg1_config_write(const mg1_config* cfg, const char* path);

/* ------------------------------------------------------------------ */
/* Runs: multi-chain sampler output.                                   */

typedef struct mg1_run mg1_run;

int mg1_run_sampler(const mg1_dataset* data, const mg1_config* cfg, mg1_run** out);
/* Writes config.txt, meta.csv and per-chain trace CSVs into dir. */
int mg1_run_save(const mg1_run* run, const char* dir);
int mg1_run_open(const char* dir, mg1_run** out);
/* Loads bare trace CSVs; ms_per_iter may be 0 when timing is unknown
 * (time-adjusted diagnostics are then zero too). */
int mg1_run_open_traces(const char* const* paths, size_t count, double ms_per_iter,
                        mg1_run** out);
int mg1_run_num_chains(const mg1_run* run);
long long mg1_run_chain_length(const mg1_run* run);
double mg1_run_ms_per_iteration(const mg1_run* run);
/* kernel is one of "metropolis", "shift", "range", "rate". */
int mg1_run_acceptance(const mg1_run* run, const char* kernel, long long* proposals,
                       long long* accepts);
void mg1_run_free(mg1_run* run);

/* ------------------------------------------------------------------ */
/* Diagnostics.                                                        */

typedef struct mg1_mean_report {
  double mean[3];
  double se[3];
  double ci_lo[3];
  double ci_hi[3];
} mg1_mean_report;

typedef struct mg1_act_report {
  double tau[3];
  long long trunc_lag[3];
  double tau_ms[3]; /* tau multiplied by ms per retained draw */
  double ms_per_draw;
} mg1_act_report;

int mg1_run_mean_report(const mg1_run* run, mg1_mean_report* out);
int mg1_run_act_report(const mg1_run* run, mg1_act_report* out);
/* Either path may be NULL to skip that output. */
int mg1_mean_report_write(const mg1_mean_report* r, const char* csv_path, const char* txt_path);
int mg1_act_report_write(const mg1_act_report* r, const char* csv_path, const char* txt_path);
/* reports[0] is the baseline; gains are baseline tau_ms / scheme tau_ms. */
int mg1_efficiency_write(const mg1_act_report* reports, const char* const* labels, size_t count,
                         const char* csv_path, const char* txt_path);

#ifdef __cplusplus
}
#endif

#endif /* MG1QUEUE_H */
