#include "mg1/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mg1/io.hpp"

namespace mg1 {

namespace {

void validate(const RunParams& p) {
  if (p.iterations <= 0) throw std::invalid_argument("run: iterations must be > 0");
  if (p.chains < 1) throw std::invalid_argument("run: need at least one chain");
  if (!(p.burnin_frac >= 0.0 && p.burnin_frac <= 0.5)) {
    throw std::invalid_argument("run: burn-in fraction must be in [0, 0.5]");
  }
  if (p.thin < 1) throw std::invalid_argument("run: thinning must be >= 1");
}

void run_one_chain(const Observations& obs, const Prior& prior, const TuningParams& tuning,
                   const SchemeSpec& scheme, const RunParams& params, int chain_index,
                   ChainTrace& out) {
  RandomStream rng = RandomStream::for_chain(params.seed, static_cast<std::uint64_t>(chain_index));
  ChainState state = init_state(obs, prior);
  Workspace ws;
  AcceptanceStats stats;

  const long long burn =
      static_cast<long long>(params.burnin_frac * static_cast<double>(params.iterations));
  const long long retained = (params.iterations - burn) / params.thin;
  for (auto& t : out.eta) t.reserve(static_cast<std::size_t>(retained));

  const auto start = std::chrono::steady_clock::now();
  for (long long m = 1; m <= params.iterations; ++m) {
    scheme_step(state, obs, prior, tuning, scheme, rng, stats, ws);
    if (m > burn && (m - burn) % params.thin == 0) {
      out.eta[0].push_back(state.eta.min_service);
      out.eta[1].push_back(state.eta.service_range);
      out.eta[2].push_back(state.eta.log_rate);
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
  out.ms_per_iter = ms / static_cast<double>(params.iterations);
  out.stats = stats;
  out.first_iteration = burn + params.thin;
}

}  // namespace

ChainArchive run_scheme(const Observations& obs, const Prior& prior, const TuningParams& tuning,
                        const SchemeSpec& scheme, const RunParams& params) {
  validate(params);
  ChainArchive archive;
  archive.iterations = params.iterations;
  archive.thin = params.thin;
  archive.burnin_frac = params.burnin_frac;
  archive.chains.resize(static_cast<std::size_t>(params.chains));

  int workers = params.threads;
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, params.chains);

  if (workers == 1) {
    for (int k = 0; k < params.chains; ++k) {
      run_one_chain(obs, prior, tuning, scheme, params, k, archive.chains[k]);
    }
    return archive;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= params.chains) return;
      try {
        run_one_chain(obs, prior, tuning, scheme, params, k, archive.chains[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return archive;
}

const std::array<std::string_view, 5>& scheme_names() {
  static const std::array<std::string_view, 5> names = {"basic", "shift", "range", "rate", "all"};
  return names;
}

SchemeSpec scheme_by_name(std::string_view name) {
  if (name == "basic") return {false, false, false};
  if (name == "shift") return {true, false, false};
  if (name == "range") return {false, true, false};
  if (name == "rate") return {false, false, true};
  if (name == "all") return {true, true, true};
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected basic, shift, range, rate, or all)");
}

const std::array<ScenarioConfig, 3>& scenario_configs() {
  static const std::array<ScenarioConfig, 3> configs = {{
      {"frequent",
       {{0.1191, 0.1679, 0.2136}, 1, 0.3, 1.008, 1.7},
       {20.0, 10.8, 10.8, 9.6, 5.1}},
      {"intermediate",
       {{0.0764, 0.1093, 0.1441}, 16, 0.2, 1.03, 1.004},
       {5.2, 4.2, 4.2, 4.0, 2.9}},
      {"rare",
       {{0.0655, 0.2071, 0.1403}, 16, 2.0, 1.4, 1.00005},
       {5.2, 4.2, 4.2, 4.0, 2.9}},
  }};
  return configs;
}

const ScenarioConfig& scenario_config(std::string_view name) {
  for (const auto& c : scenario_configs()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected frequent, intermediate, or rare)");
}

namespace {

std::string chain_file(const std::string& dir, std::size_t k) {
  return dir + "/chain" + std::to_string(k) + ".csv";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void save_run(const RunBundle& bundle, const std::string& dir) {
  std::filesystem::create_directories(dir);

  KeyValues kv;
  kv.emplace_back("data", bundle.data_label);
  kv.emplace_back("use_shift", bundle.scheme.use_shift ? "1" : "0");
  kv.emplace_back("use_range", bundle.scheme.use_range ? "1" : "0");
  kv.emplace_back("use_rate", bundle.scheme.use_rate ? "1" : "0");
  kv.emplace_back("iterations", std::to_string(bundle.params.iterations));
  kv.emplace_back("chains", std::to_string(bundle.params.chains));
  kv.emplace_back("burnin_frac", fmt(bundle.params.burnin_frac));
  kv.emplace_back("thin", std::to_string(bundle.params.thin));
  kv.emplace_back("seed", std::to_string(bundle.params.seed));
  kv.emplace_back("threads", std::to_string(bundle.params.threads));
  kv.emplace_back("met_sd1", fmt(bundle.tuning.met_sd[0]));
  kv.emplace_back("met_sd2", fmt(bundle.tuning.met_sd[1]));
  kv.emplace_back("met_sd3", fmt(bundle.tuning.met_sd[2]));
  kv.emplace_back("met_repeats", std::to_string(bundle.tuning.met_repeats));
  kv.emplace_back("shift_variance", fmt(bundle.tuning.shift_variance));
  kv.emplace_back("range_scale", fmt(bundle.tuning.range_scale));
  kv.emplace_back("rate_scale", fmt(bundle.tuning.rate_scale));
  write_key_values(kv, dir + "/config.txt");

  std::ofstream meta(dir + "/meta.csv");
  if (!meta) throw IoError("cannot open for writing: " + dir + "/meta.csv");
  meta << "chain,file,retained,first_iteration,ms_per_iter,"
          "met_proposals,met_accepts,shift_proposals,shift_accepts,"
          "range_proposals,range_accepts,rate_proposals,rate_accepts\n";
  for (std::size_t k = 0; k < bundle.archive.chains.size(); ++k) {
    const ChainTrace& t = bundle.archive.chains[k];
    meta << k << ",chain" << k << ".csv," << t.length() << "," << t.first_iteration << ","
         << fmt(t.ms_per_iter) << "," << t.stats.metropolis.proposals << ","
         << t.stats.metropolis.accepts << "," << t.stats.shift.proposals << ","
         << t.stats.shift.accepts << "," << t.stats.range.proposals << ","
         << t.stats.range.accepts << "," << t.stats.rate.proposals << ","
         << t.stats.rate.accepts << "\n";
    write_trace_csv(t, bundle.archive.thin, chain_file(dir, k));
  }
}

RunBundle load_run(const std::string& dir) {
  const KeyValues kv = read_key_values(dir + "/config.txt");
  auto get = [&](const std::string& key) -> const std::string& {
    const std::string* v = find_key(kv, key);
    if (!v) throw std::runtime_error("missing key '" + key + "' in " + dir + "/config.txt");
    return *v;
  };

  RunBundle bundle;
  bundle.data_label = get("data");
  bundle.scheme.use_shift = get("use_shift") == "1";
  bundle.scheme.use_range = get("use_range") == "1";
  bundle.scheme.use_rate = get("use_rate") == "1";
  bundle.params.iterations = std::stoll(get("iterations"));
  bundle.params.chains = std::stoi(get("chains"));
  bundle.params.burnin_frac = std::stod(get("burnin_frac"));
  bundle.params.thin = std::stoll(get("thin"));
  bundle.params.seed = std::stoull(get("seed"));
  bundle.params.threads = std::stoi(get("threads"));
  bundle.tuning.met_sd = {std::stod(get("met_sd1")), std::stod(get("met_sd2")),
                          std::stod(get("met_sd3"))};
  bundle.tuning.met_repeats = std::stoi(get("met_repeats"));
  bundle.tuning.shift_variance = std::stod(get("shift_variance"));
  bundle.tuning.range_scale = std::stod(get("range_scale"));
  bundle.tuning.rate_scale = std::stod(get("rate_scale"));

  bundle.archive.iterations = bundle.params.iterations;
  bundle.archive.thin = bundle.params.thin;
  bundle.archive.burnin_frac = bundle.params.burnin_frac;

  std::ifstream meta(dir + "/meta.csv");
  if (!meta) throw IoError("cannot open for reading: " + dir + "/meta.csv");
  std::string line;
  std::getline(meta, line);  // header
  while (std::getline(meta, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 13) continue;
    ChainTrace trace = read_trace_csv(dir + "/" + fields[1]);
    trace.ms_per_iter = std::stod(fields[4]);
    trace.stats.metropolis = {std::stoll(fields[5]), std::stoll(fields[6])};
    trace.stats.shift = {std::stoll(fields[7]), std::stoll(fields[8])};
    trace.stats.range = {std::stoll(fields[9]), std::stoll(fields[10])};
    trace.stats.rate = {std::stoll(fields[11]), std::stoll(fields[12])};
    bundle.archive.chains.push_back(std::move(trace));
  }
  if (bundle.archive.chains.empty()) {
    throw std::runtime_error("no chains listed in " + dir + "/meta.csv");
  }
  return bundle;
}

ChainArchive load_traces(const std::vector<std::string>& paths, double ms_per_iter) {
  ChainArchive archive;
  for (const auto& p : paths) {
    ChainTrace trace = read_trace_csv(p);
    trace.ms_per_iter = ms_per_iter;
    archive.chains.push_back(std::move(trace));
  }
  if (archive.chains.empty()) throw std::invalid_argument("load_traces: no paths given");
  return archive;
}

}  // namespace mg1
