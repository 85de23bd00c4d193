#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mg1/diagnostics.hpp"
#include "mg1/simulator.hpp"

namespace mg1 {

/// Thrown for file open/read/write failures (kept distinct from numeric
/// failures so API layers can map them to an I/O status).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_dataset_csv(const Observations& obs, const std::string& path);
std::vector<double> read_dataset_csv(const std::string& path);

void write_trajectory_csv(const QueueTrajectory& traj, const std::string& path);

/// Trace schema: iteration,eta1,eta2,eta3 with 12 significant digits.
void write_trace_csv(const ChainTrace& trace, long long thin, const std::string& path);
ChainTrace read_trace_csv(const std::string& path);

/// Flat key=value config text, one pair per line, '#' comments allowed.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(const KeyValues& kv, const std::string& path);
KeyValues read_key_values(const std::string& path);
const std::string* find_key(const KeyValues& kv, const std::string& key);

}  // namespace mg1
