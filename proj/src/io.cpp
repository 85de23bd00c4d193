#include "mg1/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mg1 {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && end != nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_dataset_csv(const Observations& obs, const std::string& path) {
  auto out = open_out(path);
  out << "index,y\n";
  char buf[64];
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i + 1, obs.interdeparture(i));
    out << buf;
  }
}

std::vector<double> read_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    const std::string& cell = fields.size() >= 2 ? fields[1] : fields[0];
    double v;
    if (!parse_double(trim(cell), v)) continue;  // header or junk line
    values.push_back(v);
  }
  if (values.empty()) throw IoError("no numeric rows found in " + path);
  return values;
}

void write_trajectory_csv(const QueueTrajectory& traj, const std::string& path) {
  auto out = open_out(path);
  out << "time,queue_length\n";
  char buf[64];
  for (const auto& [t, q] : traj.steps) {
    std::snprintf(buf, sizeof(buf), "%.12g,%d\n", t, q);
    out << buf;
  }
}

void write_trace_csv(const ChainTrace& trace, long long thin, const std::string& path) {
  auto out = open_out(path);
  out << "iteration,eta1,eta2,eta3\n";
  char buf[128];
  for (std::size_t m = 0; m < trace.length(); ++m) {
    const long long iter = trace.first_iteration + static_cast<long long>(m) * thin;
    std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g\n", iter, trace.eta[0][m],
                  trace.eta[1][m], trace.eta[2][m]);
    out << buf;
  }
}

ChainTrace read_trace_csv(const std::string& path) {
  auto in = open_in(path);
  ChainTrace trace;
  std::string line;
  bool first_row = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv(line);
    if (fields.size() < 4) continue;
    double iter, e1, e2, e3;
    if (!parse_double(trim(fields[0]), iter) || !parse_double(trim(fields[1]), e1) ||
        !parse_double(trim(fields[2]), e2) || !parse_double(trim(fields[3]), e3)) {
      continue;  // header
    }
    if (first_row) {
      trace.first_iteration = static_cast<long long>(iter);
      first_row = false;
    }
    trace.eta[0].push_back(e1);
    trace.eta[1].push_back(e2);
    trace.eta[2].push_back(e3);
  }
  if (trace.length() == 0) throw IoError("no trace rows found in " + path);
  return trace;
}

void write_key_values(const KeyValues& kv, const std::string& path) {
  auto out = open_out(path);
  for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
}

KeyValues read_key_values(const std::string& path) {
  auto in = open_in(path);
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

const std::string* find_key(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace mg1
