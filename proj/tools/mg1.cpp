// Command-line front end for the M/G/1 interdeparture-time sampler.
// Talks to the library exclusively through the C API in mg1queue.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mg1queue.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Maps a library status to a process exit code (EINVAL is a usage error).
int fail(int status, const std::string& context) {
  std::cerr << "mg1: " << context << ": " << mg1_last_error() << "\n";
  return status == MG1_EINVAL ? kExitUsage : kExitRuntime;
}

bool is_builtin(const std::string& name) {
  for (size_t i = 0; i < mg1_builtin_dataset_count(); ++i) {
    if (name == mg1_builtin_dataset_name(i)) return true;
  }
  return false;
}

int open_dataset(const std::string& spec, mg1_dataset** out) {
  return is_builtin(spec) ? mg1_dataset_builtin(spec.c_str(), out)
                          : mg1_dataset_read_csv(spec.c_str(), out);
}

void print_file(const std::string& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

void print_acceptance(const mg1_run* run) {
  const char* kernels[] = {"metropolis", "shift", "range", "rate"};
  for (const char* k : kernels) {
    long long proposals = 0, accepts = 0;
    if (mg1_run_acceptance(run, k, &proposals, &accepts) == MG1_OK && proposals > 0) {
      std::printf("  %-10s %10lld / %-10lld (%.1f%%)\n", k, accepts, proposals,
                  100.0 * double(accepts) / double(proposals));
    }
  }
}

int cmd_simulate(const std::vector<double>& theta, long long n, uint64_t seed,
                 const std::string& out_dir, bool plot) {
  std::filesystem::create_directories(out_dir);
  mg1_simulation* sim = nullptr;
  int rc = mg1_simulate(theta[0], theta[1], theta[2], static_cast<size_t>(n), seed, &sim);
  if (rc != MG1_OK) return fail(rc, "simulate");
  const std::string data_path = out_dir + "/dataset.csv";
  const std::string traj_path = out_dir + "/trajectory.csv";
  rc = mg1_simulation_write_dataset_csv(sim, data_path.c_str());
  if (rc == MG1_OK) rc = mg1_simulation_write_trajectory_csv(sim, traj_path.c_str());
  mg1_simulation_free(sim);
  if (rc != MG1_OK) return fail(rc, "simulate: writing output");
  std::cout << "wrote " << data_path << "\nwrote " << traj_path << "\n";
  if (plot) {
    std::ofstream gp(out_dir + "/trajectory.gp");
    gp << "set datafile separator ','\n"
          "set xlabel 'time'\n"
          "set ylabel 'queue length'\n"
          "plot 'trajectory.csv' every ::1 using 1:2 with steps notitle\n"
          "pause -1\n";
    std::cout << "wrote " << out_dir << "/trajectory.gp\n";
  }
  return 0;
}

int cmd_datasets(const std::string& name, const std::string& out_path) {
  if (name.empty()) {
    for (size_t i = 0; i < mg1_builtin_dataset_count(); ++i) {
      mg1_dataset* ds = nullptr;
      mg1_dataset_builtin(mg1_builtin_dataset_name(i), &ds);
      std::printf("%-14s n=%zu\n", mg1_builtin_dataset_name(i), mg1_dataset_size(ds));
      mg1_dataset_free(ds);
    }
    return 0;
  }
  mg1_dataset* ds = nullptr;
  int rc = mg1_dataset_builtin(name.c_str(), &ds);
  if (rc != MG1_OK) return fail(rc, "datasets");
  if (out_path.empty()) {
    std::vector<double> y(mg1_dataset_size(ds));
    mg1_dataset_values(ds, y.data(), y.size());
    for (size_t i = 0; i < y.size(); ++i) std::printf("%zu,%.10g\n", i + 1, y[i]);
  } else {
    rc = mg1_dataset_write_csv(ds, out_path.c_str());
    if (rc != MG1_OK) {
      mg1_dataset_free(ds);
      return fail(rc, "datasets: writing output");
    }
    std::cout << "wrote " << out_path << "\n";
  }
  mg1_dataset_free(ds);
  return 0;
}

int cmd_run(const std::string& data, const mg1_config& cfg, const std::string& out_dir,
            bool plot) {
  mg1_dataset* ds = nullptr;
  int rc = open_dataset(data, &ds);
  if (rc != MG1_OK) return fail(rc, "run: opening dataset");
  mg1_run* run = nullptr;
  rc = mg1_run_sampler(ds, &cfg, &run);
  mg1_dataset_free(ds);
  if (rc != MG1_OK) return fail(rc, "run");
  rc = mg1_run_save(run, out_dir.c_str());
  if (rc != MG1_OK) {
    mg1_run_free(run);
    return fail(rc, "run: saving output");
  }
  std::printf("%d chains x %lld iterations, %lld retained draws each, %.4g ms/iter\n",
              mg1_run_num_chains(run), cfg.iterations, mg1_run_chain_length(run),
              mg1_run_ms_per_iteration(run));
  std::printf("acceptance rates:\n");
  print_acceptance(run);
  if (plot) {
    // Thin each trace to at most 4000 plot points via gnuplot's row stride.
    const long long retained = mg1_run_chain_length(run);
    const long long stride = retained <= 4000 ? 1 : (retained + 3999) / 4000;
    std::ofstream gp(out_dir + "/trace.gp");
    gp << "set datafile separator ','\n"
       << "chains = " << mg1_run_num_chains(run) << "\n"
       << "stride = " << stride << "\n"
       << "set multiplot layout 3,1\n";
    const char* labels[3] = {"eta1", "eta2", "eta3"};
    for (int p = 0; p < 3; ++p) {
      gp << "set ylabel '" << labels[p] << "'\n"
         << "plot for [c=0:chains-1] sprintf('chain%d.csv', c) every stride::1 using 1:" << (p + 2)
         << " with lines notitle\n";
    }
    gp << "unset multiplot\npause -1\n";
    std::cout << "wrote " << out_dir << "/trace.gp\n";
  }
  mg1_run_free(run);
  std::cout << "wrote " << out_dir << "\n";
  return 0;
}

int cmd_diagnose(const std::string& run_dir, const std::vector<std::string>& traces,
                 double ms_per_iter, const std::string& out_dir) {
  mg1_run* run = nullptr;
  int rc;
  if (!run_dir.empty()) {
    rc = mg1_run_open(run_dir.c_str(), &run);
  } else {
    std::vector<const char*> paths;
    paths.reserve(traces.size());
    for (const auto& t : traces) paths.push_back(t.c_str());
    rc = mg1_run_open_traces(paths.data(), paths.size(), ms_per_iter, &run);
  }
  if (rc != MG1_OK) return fail(rc, "diagnose: loading traces");

  std::filesystem::create_directories(out_dir);
  mg1_mean_report means{};
  rc = mg1_run_mean_report(run, &means);
  if (rc != MG1_OK) {
    mg1_run_free(run);
    return fail(rc, "diagnose: posterior means");
  }
  const std::string mean_csv = out_dir + "/means.csv";
  const std::string mean_txt = out_dir + "/means.txt";
  mg1_mean_report_write(&means, mean_csv.c_str(), mean_txt.c_str());
  std::cout << "posterior means:\n";
  print_file(mean_txt);

  mg1_act_report act{};
  rc = mg1_run_act_report(run, &act);
  mg1_run_free(run);
  if (rc != MG1_OK) return fail(rc, "diagnose: autocorrelation times");
  const std::string act_csv = out_dir + "/act.csv";
  const std::string act_txt = out_dir + "/act.txt";
  mg1_act_report_write(&act, act_csv.c_str(), act_txt.c_str());
  std::cout << "autocorrelation times:\n";
  print_file(act_txt);
  std::cout << "wrote " << mean_csv << ", " << act_csv << "\n";
  return 0;
}

int cmd_reproduce(const std::string& scenario, double scale, uint64_t seed, int threads,
                  const std::string& out_dir) {
  const char* schemes[] = {"basic", "shift", "range", "rate", "all"};
  std::vector<mg1_act_report> acts;
  std::vector<std::string> labels;
  std::filesystem::create_directories(out_dir);

  for (size_t i = 0; i < 5; ++i) {
    mg1_config cfg{};
    int rc = mg1_config_scenario(scenario.c_str(), schemes[i], scale, &cfg);
    if (rc != MG1_OK) return fail(rc, "reproduce");
    cfg.seed = seed + i;
    cfg.threads = threads;

    mg1_dataset* ds = nullptr;
    rc = mg1_dataset_builtin(scenario.c_str(), &ds);
    if (rc != MG1_OK) return fail(rc, "reproduce: opening dataset");
    std::printf("running %s / %s: %lld iterations x %d chains...\n", scenario.c_str(), schemes[i],
                cfg.iterations, cfg.chains);
    std::fflush(stdout);
    mg1_run* run = nullptr;
    rc = mg1_run_sampler(ds, &cfg, &run);
    mg1_dataset_free(ds);
    if (rc != MG1_OK) return fail(rc, "reproduce: sampler");

    const std::string scheme_dir = out_dir + "/" + schemes[i];
    rc = mg1_run_save(run, scheme_dir.c_str());
    if (rc != MG1_OK) {
      mg1_run_free(run);
      return fail(rc, "reproduce: saving run");
    }

    mg1_mean_report means{};
    mg1_act_report act{};
    rc = mg1_run_mean_report(run, &means);
    if (rc == MG1_OK) rc = mg1_run_act_report(run, &act);
    if (rc != MG1_OK) {
      mg1_run_free(run);
      return fail(rc, "reproduce: diagnostics");
    }
    mg1_mean_report_write(&means, (scheme_dir + "/means.csv").c_str(),
                          (scheme_dir + "/means.txt").c_str());
    mg1_act_report_write(&act, (scheme_dir + "/act.csv").c_str(),
                         (scheme_dir + "/act.txt").c_str());
    std::printf("acceptance rates (%s):\n", schemes[i]);
    print_acceptance(run);
    mg1_run_free(run);
    acts.push_back(act);
    labels.push_back(schemes[i]);
  }

  std::vector<const char*> label_ptrs;
  for (const auto& l : labels) label_ptrs.push_back(l.c_str());
  const std::string eff_csv = out_dir + "/efficiency.csv";
  const std::string eff_txt = out_dir + "/efficiency.txt";
  int rc = mg1_efficiency_write(acts.data(), label_ptrs.data(), acts.size(), eff_csv.c_str(),
                                eff_txt.c_str());
  if (rc != MG1_OK) return fail(rc, "reproduce: efficiency table");
  std::cout << "\ntime-adjusted autocorrelation comparison (" << scenario << "):\n";
  print_file(eff_txt);
  std::cout << "wrote " << eff_csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for the M/G/1 queue from interdeparture times"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic interdeparture data");
  std::vector<double> theta;
  long long sim_n = 50;
  uint64_t sim_seed = 1;
  std::string sim_out = ".";
  sim_cmd->add_option("--theta", theta, "min_service,max_service,arrival_rate")
      ->required()
      ->delimiter(',')
      ->expected(3);
  sim_cmd->add_option("--n", sim_n, "number of interdeparture times")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "random seed");
  sim_cmd->add_option("--out", sim_out, "output directory");
  bool sim_plot = false;
  sim_cmd->add_flag("--plot", sim_plot, "also write a gnuplot script");

  // datasets
  auto* data_cmd = app.add_subcommand("datasets", "list or export the embedded datasets");
  std::string data_name, data_out;
  data_cmd->add_option("--name", data_name, "dataset to export (frequent|intermediate|rare)");
  data_cmd->add_option("--out", data_out, "output CSV path (default: print to stdout)");

  // run
  auto* run_cmd = app.add_subcommand("run", "run one sampling scheme");
  std::string run_data, run_scheme = "basic", run_scenario, run_config, run_out;
  long long run_iters = 100000, run_thin = 1;
  int run_chains = 5, run_threads = 0, run_metk = 1;
  double run_burnin = 0.1, run_shiftv = 1.0, run_crange = 1.5, run_crate = 1.5;
  uint64_t run_seed = 0;
  std::vector<double> run_metsd;
  run_cmd->add_option("--data", run_data, "builtin dataset name or CSV path")->required();
  run_cmd->add_option("--scheme", run_scheme, "basic|shift|range|rate|all");
  run_cmd->add_option("--scenario", run_scenario,
                      "use reference tuning for this scenario (frequent|intermediate|rare)");
  run_cmd->add_option("--config", run_config, "key=value config file");
  run_cmd->add_option("--out", run_out, "output directory")->required();
  auto* o_iters = run_cmd->add_option("--iterations", run_iters, "iterations per chain");
  auto* o_chains = run_cmd->add_option("--chains", run_chains, "number of chains");
  auto* o_burn = run_cmd->add_option("--burnin", run_burnin, "burn-in fraction in [0, 0.5]");
  auto* o_thin = run_cmd->add_option("--thin", run_thin, "thinning interval");
  auto* o_seed = run_cmd->add_option("--seed", run_seed, "random seed");
  auto* o_threads = run_cmd->add_option("--threads", run_threads, "worker threads (0=auto)");
  auto* o_metsd = run_cmd->add_option("--met-sd", run_metsd, "Metropolis proposal sds")
                      ->delimiter(',')
                      ->expected(3);
  auto* o_metk =
      run_cmd->add_option("--met-repeats", run_metk, "Metropolis updates per iteration");
  auto* o_shiftv =
      run_cmd->add_option("--shift-variance", run_shiftv, "shift proposal variance");
  auto* o_crange = run_cmd->add_option("--c-range", run_crange, "range scale factor");
  auto* o_crate = run_cmd->add_option("--c-rate", run_crate, "rate scale factor");
  bool run_plot = false;
  run_cmd->add_flag("--plot", run_plot, "also write a gnuplot trace script");

  // diagnose
  auto* diag_cmd = app.add_subcommand("diagnose", "posterior means and autocorrelation times");
  std::string diag_run, diag_out = ".";
  std::vector<std::string> diag_traces;
  double diag_ms = 0.0;
  diag_cmd->add_option("--run", diag_run, "run directory written by 'run'");
  diag_cmd->add_option("traces", diag_traces, "bare trace CSV files");
  diag_cmd->add_option("--ms-per-iter", diag_ms, "iteration time for bare traces");
  diag_cmd->add_option("--out", diag_out, "output directory");

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "run all five schemes and compare efficiency");
  std::string rep_scenario;
  double rep_scale = 0.02;
  uint64_t rep_seed = 1;
  int rep_threads = 0;
  std::string rep_out = "reproduce_out";
  rep_cmd->add_option("--scenario", rep_scenario, "frequent|intermediate|rare")->required();
  rep_cmd->add_option("--scale", rep_scale, "fraction of the reference run lengths")
      ->check(CLI::PositiveNumber);
  rep_cmd->add_option("--seed", rep_seed, "base random seed");
  rep_cmd->add_option("--threads", rep_threads, "worker threads (0=auto)");
  rep_cmd->add_option("--out", rep_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(theta, sim_n, sim_seed, sim_out, sim_plot);
    if (data_cmd->parsed()) return cmd_datasets(data_name, data_out);
    if (run_cmd->parsed()) {
      // Precedence: defaults < scenario tuning < config file < explicit flags.
      mg1_config cfg{};
      mg1_config_defaults(&cfg);
      if (!run_scenario.empty()) {
        int rc = mg1_config_scenario(run_scenario.c_str(), run_scheme.c_str(), 1.0, &cfg);
        if (rc != MG1_OK) return fail(rc, "run: scenario");
        cfg.iterations = run_iters;  // scenario run lengths only apply to 'reproduce'
      } else {
        if (run_scheme != "basic" && run_scheme != "shift" && run_scheme != "range" &&
            run_scheme != "rate" && run_scheme != "all") {
          std::cerr << "mg1: run: unknown scheme '" << run_scheme << "'\n";
          return kExitUsage;
        }
        cfg.use_shift = (run_scheme == "shift" || run_scheme == "all");
        cfg.use_range = (run_scheme == "range" || run_scheme == "all");
        cfg.use_rate = (run_scheme == "rate" || run_scheme == "all");
      }
      if (!run_config.empty()) {
        int rc = mg1_config_read(run_config.c_str(), &cfg);
        if (rc != MG1_OK) return fail(rc, "run: config file");
      }
      if (*o_iters) cfg.iterations = run_iters;
      if (*o_chains) cfg.chains = run_chains;
      if (*o_burn) cfg.burnin_frac = run_burnin;
      if (*o_thin) cfg.thin = run_thin;
      if (*o_seed) cfg.seed = run_seed;
      if (*o_threads) cfg.threads = run_threads;
      if (*o_metsd) {
        cfg.met_prop_sd[0] = run_metsd[0];
        cfg.met_prop_sd[1] = run_metsd[1];
        cfg.met_prop_sd[2] = run_metsd[2];
      }
      if (*o_metk) cfg.met_repeats = run_metk;
      if (*o_shiftv) cfg.shift_variance = run_shiftv;
      if (*o_crange) cfg.range_scale = run_crange;
      if (*o_crate) cfg.rate_scale = run_crate;
      return cmd_run(run_data, cfg, run_out, run_plot);
    }
    if (diag_cmd->parsed()) {
      if (diag_run.empty() && diag_traces.empty()) {
        std::cerr << "mg1: diagnose: need --run or trace files\n";
        return kExitUsage;
      }
      return cmd_diagnose(diag_run, diag_traces, diag_ms, diag_out);
    }
    if (rep_cmd->parsed()) {
      return cmd_reproduce(rep_scenario, rep_scale, rep_seed, rep_threads, rep_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "mg1: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
