#include "mg1/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "mg1/io.hpp"
#include <stdexcept>

namespace mg1 {

namespace {

const char* const kParamNames[3] = {"eta1", "eta2", "eta3"};

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

double ChainArchive::ms_per_iter() const {
  if (chains.empty()) return 0.0;
  double total = 0.0;
  for (const auto& c : chains) total += c.ms_per_iter;
  return total / static_cast<double>(chains.size());
}

AcceptanceStats ChainArchive::merged_stats() const {
  AcceptanceStats merged;
  for (const auto& c : chains) merged.merge(c.stats);
  return merged;
}

double ChainArchive::grand_mean(int param) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& c : chains) {
    sum = std::accumulate(c.eta[param].begin(), c.eta[param].end(), sum);
    count += c.eta[param].size();
  }
  return sum / static_cast<double>(count);
}

MeanReport posterior_means(const ChainArchive& archive) {
  const std::size_t s = archive.num_chains();
  if (s < 2) {
    throw std::invalid_argument("posterior_means: need at least two chains for standard errors");
  }
  const std::size_t m = archive.length();
  for (const auto& c : archive.chains) {
    if (c.length() != m) throw std::invalid_argument("posterior_means: unequal chain lengths");
  }
  if (m == 0) throw std::invalid_argument("posterior_means: empty chains");

  MeanReport report;
  for (int p = 0; p < 3; ++p) {
    std::vector<double> per_run(s);
    for (std::size_t k = 0; k < s; ++k) {
      const auto& t = archive.chains[k].eta[p];
      per_run[k] = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(m);
    }
    const double grand = std::accumulate(per_run.begin(), per_run.end(), 0.0) / double(s);
    double ss = 0.0;
    for (double v : per_run) ss += (v - grand) * (v - grand);
    const double sd = std::sqrt(ss / static_cast<double>(s - 1));
    report.mean[p] = grand;
    report.se[p] = sd / std::sqrt(static_cast<double>(s));
    report.ci_lo[p] = grand - 2.0 * report.se[p];
    report.ci_hi[p] = grand + 2.0 * report.se[p];
  }
  return report;
}

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft_pow2: size must be a nonzero power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

std::vector<double> autocovariance(std::span<const double> trace, double grand_mean,
                                   std::size_t max_lag) {
  const std::size_t m = trace.size();
  if (m == 0) throw std::invalid_argument("autocovariance: empty trace");
  if (max_lag >= m) throw std::invalid_argument("autocovariance: max_lag must be < length");

  std::size_t padded = 1;
  while (padded < m + max_lag + 1) padded <<= 1;
  std::vector<std::complex<double>> work(padded, std::complex<double>(0.0, 0.0));
  for (std::size_t i = 0; i < m; ++i) work[i] = trace[i] - grand_mean;
  fft_pow2(work, false);
  for (auto& x : work) x = std::complex<double>(std::norm(x), 0.0);
  fft_pow2(work, true);

  std::vector<double> gamma(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    gamma[k] = work[k].real() / static_cast<double>(m);
  }
  return gamma;
}

ActEstimate integrated_act(const std::vector<std::vector<double>>& per_run_autocov) {
  if (per_run_autocov.empty()) throw std::invalid_argument("integrated_act: no runs");
  const std::size_t len = per_run_autocov.front().size();
  for (const auto& g : per_run_autocov) {
    if (g.size() != len) throw std::invalid_argument("integrated_act: unequal autocov lengths");
  }
  if (len == 0) throw std::invalid_argument("integrated_act: empty autocovariances");

  std::vector<double> gamma(len, 0.0);
  for (const auto& g : per_run_autocov) {
    for (std::size_t k = 0; k < len; ++k) gamma[k] += g[k];
  }
  const double runs = static_cast<double>(per_run_autocov.size());
  for (auto& g : gamma) g /= runs;

  if (gamma[0] == 0.0) {
    throw std::domain_error("integrated_act: zero variance (gamma_0 = 0), tau undefined");
  }

  ActEstimate est;
  est.tau = 1.0;
  est.trunc_lag = len > 1 ? len - 1 : 1;
  for (std::size_t k = 1; k < len; ++k) {
    const double rho = gamma[k] / gamma[0];
    est.tau += 2.0 * rho;
    if (rho < 0.01) {  // no longer appreciably different from zero
      est.trunc_lag = k;
      break;
    }
  }
  return est;
}

ActReport act_report(const ChainArchive& archive) {
  const std::size_t m = archive.length();
  if (m < 10) throw std::invalid_argument("act_report: traces too short");
  const std::size_t max_lag = m / 10;

  ActReport report;
  report.ms_per_draw = archive.ms_per_iter() * static_cast<double>(archive.thin);
  for (int p = 0; p < 3; ++p) {
    const double grand = archive.grand_mean(p);
    std::vector<std::vector<double>> per_run;
    per_run.reserve(archive.num_chains());
    for (const auto& c : archive.chains) {
      per_run.push_back(autocovariance(c.eta[p], grand, max_lag));
    }
    report.act[p] = integrated_act(per_run);
  }
  return report;
}

EfficiencyTable efficiency_table(
    const std::vector<std::pair<std::string, ActReport>>& reports) {
  if (reports.size() < 2) {
    throw std::invalid_argument("efficiency_table: need a baseline plus at least one scheme");
  }
  EfficiencyTable table;
  const ActReport& base = reports.front().second;
  for (const auto& [label, rep] : reports) {
    EfficiencyTable::Row row;
    row.label = label;
    for (int p = 0; p < 3; ++p) {
      row.tau[p] = rep.act[p].tau;
      row.tau_ms[p] = rep.tau_ms(p);
      row.gain[p] = base.tau_ms(p) / rep.tau_ms(p);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_mean_report_csv(const MeanReport& r, const std::string& path) {
  std::string out = "parameter,mean,ci_lo,ci_hi,stderr\n";
  for (int p = 0; p < 3; ++p) {
    out += kParamNames[p];
    out += "," + format_double("%.10g", r.mean[p]) + "," + format_double("%.10g", r.ci_lo[p]) +
           "," + format_double("%.10g", r.ci_hi[p]) + "," + format_double("%.10g", r.se[p]) + "\n";
  }
  write_file(path, out);
}

std::string format_mean_report(const MeanReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-6s %12s %26s %12s\n", "param", "mean", "CI", "std.err.");
  out += line;
  for (int p = 0; p < 3; ++p) {
    char ci[64];
    std::snprintf(ci, sizeof(ci), "(%.4f, %.4f)", r.ci_lo[p], r.ci_hi[p]);
    std::snprintf(line, sizeof(line), "%-6s %12.4f %26s %12.5f\n", kParamNames[p], r.mean[p], ci,
                  r.se[p]);
    out += line;
  }
  return out;
}

void write_mean_report_text(const MeanReport& r, const std::string& path) {
  write_file(path, format_mean_report(r));
}

void write_act_report_csv(const ActReport& r, const std::string& path) {
  std::string out = "parameter,tau,trunc_lag,tau_time_adjusted_ms,ms_per_draw\n";
  for (int p = 0; p < 3; ++p) {
    out += kParamNames[p];
    out += "," + format_double("%.10g", r.act[p].tau) + "," +
           std::to_string(r.act[p].trunc_lag) + "," + format_double("%.10g", r.tau_ms(p)) + "," +
           format_double("%.10g", r.ms_per_draw) + "\n";
  }
  write_file(path, out);
}

std::string format_act_report(const ActReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-6s %12s %10s %16s\n", "param", "tau", "trunc", "tau x ms/iter");
  out += line;
  for (int p = 0; p < 3; ++p) {
    std::snprintf(line, sizeof(line), "%-6s %12.4g %10zu %16.4g\n", kParamNames[p], r.act[p].tau,
                  r.act[p].trunc_lag, r.tau_ms(p));
    out += line;
  }
  std::snprintf(line, sizeof(line), "ms per draw: %.5g\n", r.ms_per_draw);
  out += line;
  return out;
}

void write_act_report_text(const ActReport& r, const std::string& path) {
  write_file(path, format_act_report(r));
}

void write_efficiency_csv(const EfficiencyTable& t, const std::string& path) {
  std::string out = "scheme,parameter,tau,tau_time_adjusted_ms,gain_vs_baseline\n";
  for (const auto& row : t.rows) {
    for (int p = 0; p < 3; ++p) {
      out += row.label;
      out += ",";
      out += kParamNames[p];
      out += "," + format_double("%.10g", row.tau[p]) + "," +
             format_double("%.10g", row.tau_ms[p]) + "," + format_double("%.10g", row.gain[p]) +
             "\n";
    }
  }
  write_file(path, out);
}

std::string format_efficiency(const EfficiencyTable& t) {
  std::string out;
  char line[240];
  std::snprintf(line, sizeof(line), "%-16s %30s %33s\n", "", "tau x ms/iter (eta1 eta2 eta3)",
                "gain vs baseline (eta1 eta2 eta3)");
  out += line;
  for (const auto& row : t.rows) {
    std::snprintf(line, sizeof(line), "%-16s %10.4g %10.4g %10.4g  %10.3g %10.3g %10.3g\n",
                  row.label.c_str(), row.tau_ms[0], row.tau_ms[1], row.tau_ms[2], row.gain[0],
                  row.gain[1], row.gain[2]);
    out += line;
  }
  return out;
}

void write_efficiency_text(const EfficiencyTable& t, const std::string& path) {
  write_file(path, format_efficiency(t));
}

}  // namespace mg1
