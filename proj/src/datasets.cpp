#include <array>
#include <stdexcept>
#include <string>

#include "mg1/simulator.hpp"

namespace mg1 {
namespace {

// Reference interdeparture datasets for the three arrival regimes, n = 50
// each. Values are embedded verbatim as decimal literals.

constexpr std::array<double, 50> kFrequent = {
    11.57, 13.44, 13.24, 9.30,  8.95,  11.99, 15.68, 10.72, 12.68, 9.79,
    14.01, 10.04, 12.05, 13.59, 15.13, 15.67, 12.38, 9.11,  9.19,  10.06,
    14.73, 10.03, 14.51, 9.95,  15.43, 10.80, 9.57,  10.01, 12.93, 11.79,
    10.81, 14.65, 12.68, 12.40, 15.34, 10.29, 14.06, 14.03, 11.04, 12.54,
    8.61,  8.43,  12.25, 14.23, 15.47, 9.04,  12.55, 11.76, 8.10,  10.70};

constexpr std::array<double, 50> kIntermediate = {
    6.19, 6.04, 9.52,  4.49, 4.36, 9.86, 9.91, 5.02, 5.76, 4.67,
    6.25, 4.77, 5.52,  6.10, 6.67, 6.88, 5.64, 4.42, 4.45, 4.77,
    6.52, 4.76, 6.44,  4.73, 6.79, 5.05, 4.59, 4.75, 5.85, 5.42,
    5.05, 6.49, 5.76,  8.67, 16.65, 4.86, 6.27, 6.26, 5.14, 10.60,
    4.23, 6.15, 5.59,  6.34, 6.80, 4.39, 5.71, 5.41, 4.04, 5.01};

constexpr std::array<double, 50> kRare = {
    21.77,  10.30,  206.34, 8.57,   45.79,  233.13, 128.30, 59.73,  4.59,   3.21,
    185.29, 2.49,   4.63,   72.48,  22.47,  195.34, 85.92,  8.39,   23.30,  4.24,
    42.78,  332.64, 16.91,  6.26,   39.44,  27.16,  29.53,  93.65,  42.60,  176.36,
    34.69,  345.20, 128.16, 307.50, 233.54, 18.79,  36.88,  114.85, 4.73,   337.02,
    81.89,  96.33,  27.20,  23.16,  167.89, 70.58,  81.28,  43.55,  33.88,  28.47};

}  // namespace

const std::vector<std::string_view>& dataset_names() {
  static const std::vector<std::string_view> names = {"frequent", "intermediate", "rare"};
  return names;
}

Observations load_dataset(std::string_view name) {
  const std::array<double, 50>* values = nullptr;
  if (name == "frequent") {
    values = &kFrequent;
  } else if (name == "intermediate") {
    values = &kIntermediate;
  } else if (name == "rare") {
    values = &kRare;
  } else {
    throw std::invalid_argument("load_dataset: unknown dataset '" + std::string(name) +
                                "' (expected frequent, intermediate, or rare)");
  }
  return Observations(std::vector<double>(values->begin(), values->end()));
}

}  // namespace mg1
