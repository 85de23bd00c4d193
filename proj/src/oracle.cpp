#include "mg1/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "mg1/io.hpp"

namespace mg1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact integral of exp(-rate t) over [lo, hi]; 0 when the interval is empty.
double exp_segment(double rate, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return std::exp(-rate * lo) * (-std::expm1(-rate * (hi - lo))) / rate;
}

struct MomentSums {
  double z = 0.0;
  std::array<double, 3> m{}, q{};

  void add(double weight, double density, double e1, double e2, double e3) {
    const double wf = weight * density;
    if (!(wf > 0.0)) return;
    z += wf;
    m[0] += wf * e1;
    m[1] += wf * e2;
    m[2] += wf * e3;
    q[0] += wf * e1 * e1;
    q[1] += wf * e2 * e2;
    q[2] += wf * e3 * e3;
  }
};

// Geometry of the admissible arrival region for fixed theta: per index,
// v_i <= upper[i] = x_i - theta1, and v_i >= busy_floor[i] = x_i - theta2
// whenever y_i > theta2 forces the server to have been busy.
struct LatentRegion {
  std::size_t n = 0;
  std::array<double, 3> upper{};
  std::array<double, 3> busy_floor{};  // -inf when the idle branch is allowed
  double first_lo = 0.0;               // lower bound for v_1
  double tail_lo = 0.0;                // lower bound for v_n from all floors
};

LatentRegion make_region(const Observations& obs, double theta1, double theta2) {
  LatentRegion r;
  r.n = obs.size();
  double tail = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    r.upper[i] = obs.departure(i) - theta1;
    r.busy_floor[i] = obs.interdeparture(i) > theta2 ? obs.departure(i) - theta2 : -kInf;
    if (std::isfinite(r.busy_floor[i])) tail = std::max(tail, r.busy_floor[i]);
  }
  r.first_lo = std::max(0.0, r.busy_floor[0]);
  r.tail_lo = std::max(r.first_lo, tail);
  return r;
}

// Cross-sectional volume of the first n-1 arrivals given v_n = t.
// For n = 2 this is an interval length; for n = 3 the inner v_1 integral of
// the v_2 interval length is evaluated exactly (it is piecewise linear).
double cross_section(const LatentRegion& r, double t) {
  if (r.n == 2) {
    if (std::isfinite(r.busy_floor[1]) && t < r.busy_floor[1]) return 0.0;
    return std::max(0.0, std::min(r.upper[0], t) - r.first_lo);
  }
  // n == 3
  if (std::isfinite(r.busy_floor[2]) && t < r.busy_floor[2]) return 0.0;
  const double a = r.first_lo;
  const double b = r.upper[0];
  const double cap = std::min(r.upper[1], t);  // v_2 upper limit
  const double k = r.busy_floor[1];            // v_2 busy lower limit (may be -inf)
  double area = 0.0;
  if (std::isfinite(k) && k > a && cap > k) {
    area += std::max(0.0, std::min(b, k) - a) * (cap - k);
  }
  const double c = std::max(a, std::isfinite(k) ? k : a);
  const double d = std::min(b, cap);
  if (d > c) area += 0.5 * ((cap - c) + (cap - d)) * (d - c);
  return area;
}

// Latent integral I(theta) = int exp(-theta3 v_n) over the region, for all
// theta3 grid values at once (the cross-section table does not depend on
// theta3). nodes/sections are scratch reused across calls.
void latent_integrals(const LatentRegion& r, const std::vector<double>& rates,
                      std::size_t resolution, std::vector<double>& nodes,
                      std::vector<double>& sections, std::vector<double>& out) {
  out.assign(rates.size(), 0.0);
  const double t_hi = r.upper[r.n - 1];
  const double t_lo = r.tail_lo;
  if (!(t_hi > t_lo)) return;  // empty or zero-measure region
  if (r.n == 1) {
    for (std::size_t c = 0; c < rates.size(); ++c) {
      out[c] = exp_segment(rates[c], t_lo, t_hi);
    }
    return;
  }

  nodes.clear();
  const double h = (t_hi - t_lo) / static_cast<double>(resolution);
  for (std::size_t j = 0; j <= resolution; ++j) {
    nodes.push_back(t_lo + h * static_cast<double>(j));
  }
  // Insert the kink locations of the cross-section so trapezoids only ever
  // span smooth pieces.
  for (std::size_t i = 0; i < r.n; ++i) {
    for (double candidate : {r.upper[i], r.busy_floor[i]}) {
      if (std::isfinite(candidate) && candidate > t_lo && candidate < t_hi) {
        nodes.push_back(candidate);
      }
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  sections.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) sections[j] = cross_section(r, nodes[j]);

  for (std::size_t c = 0; c < rates.size(); ++c) {
    const double rate = rates[c];
    double sum = 0.0;
    double prev_f = std::exp(-rate * nodes[0]) * sections[0];
    for (std::size_t j = 1; j < nodes.size(); ++j) {
      const double f = std::exp(-rate * nodes[j]) * sections[j];
      sum += 0.5 * (prev_f + f) * (nodes[j] - nodes[j - 1]);
      prev_f = f;
    }
    out[c] = sum;
  }
}

struct PassResult {
  std::array<double, 3> mean{}, variance{};
};

PassResult quadrature_pass(const Observations& obs, const Prior& prior, std::size_t theta_res,
                           std::size_t latent_res) {
  const std::size_t n = obs.size();
  const double n_d = static_cast<double>(n);
  const double min_y = obs.min_interdeparture();
  const double last_x = obs.departure(n - 1);

  const double t1_lo = prior.min_service.lo;
  const double t1_hi = std::min(prior.min_service.hi, min_y);
  if (!(t1_hi > t1_lo)) {
    throw std::runtime_error("oracle: posterior support for min_service is empty");
  }
  const double range_lo = std::max(0.0, prior.service_range.lo);
  const double range_hi = prior.service_range.hi;
  const double rate_lo = std::max(0.0, prior.arrival_rate.lo);
  const double rate_hi = prior.arrival_rate.hi;

  const double h1 = (t1_hi - t1_lo) / static_cast<double>(theta_res);
  const double h2 = (range_hi - range_lo) / static_cast<double>(theta_res);
  const double h3 = (rate_hi - rate_lo) / static_cast<double>(theta_res);

  std::vector<double> rates(theta_res + 1), rate_weights(theta_res + 1);
  for (std::size_t c = 0; c <= theta_res; ++c) {
    rates[c] = rate_lo + h3 * static_cast<double>(c);
    rate_weights[c] = (c == 0 || c == theta_res) ? 0.5 * h3 : h3;
  }

  MomentSums sums;
  std::vector<double> nodes, sections, latent;
  for (std::size_t a = 0; a <= theta_res; ++a) {
    const double theta1 = t1_lo + h1 * static_cast<double>(a);
    const double w1 = ((a == 0 || a == theta_res) ? 0.5 : 1.0) * h1;
    for (std::size_t b = 0; b <= theta_res; ++b) {
      const double range = range_lo + h2 * static_cast<double>(b);
      const double w12 = w1 * (((b == 0 || b == theta_res) ? 0.5 : 1.0) * h2);
      if (range == 0.0) {
        // Limit of the integrand as the range shrinks: every service time is
        // pinned at theta1, so the arrivals collapse onto x_i - theta1.
        for (std::size_t c = 0; c <= theta_res; ++c) {
          const double rate = rates[c];
          if (!(rate > 0.0)) continue;
          const double density = std::pow(rate, n_d) * std::exp(-rate * (last_x - theta1));
          sums.add(w12 * rate_weights[c], density, theta1, range, std::log(rate));
        }
        continue;
      }
      const LatentRegion region = make_region(obs, theta1, theta1 + range);
      latent_integrals(region, rates, latent_res, nodes, sections, latent);
      const double range_factor = std::pow(range, -n_d);
      for (std::size_t c = 0; c <= theta_res; ++c) {
        const double rate = rates[c];
        if (!(rate > 0.0) || latent[c] == 0.0) continue;
        const double density = std::pow(rate, n_d) * range_factor * latent[c];
        sums.add(w12 * rate_weights[c], density, theta1, range, std::log(rate));
      }
    }
  }

  if (!(sums.z > 0.0)) throw std::runtime_error("oracle: zero posterior mass on the grid");
  PassResult res;
  for (int p = 0; p < 3; ++p) {
    res.mean[p] = sums.m[p] / sums.z;
    res.variance[p] = std::max(0.0, sums.q[p] / sums.z - res.mean[p] * res.mean[p]);
  }
  return res;
}

}  // namespace

OracleMoments posterior_moments_oracle(const Observations& obs, const Prior& prior,
                                       const QuadratureSpec& spec) {
  if (obs.size() > 3) {
    throw std::invalid_argument("posterior_moments_oracle: only n <= 3 is tractable");
  }
  if (spec.theta_resolution < 32 || spec.latent_resolution < 32) {
    throw std::invalid_argument("posterior_moments_oracle: resolutions must be >= 32");
  }

  const PassResult coarse = quadrature_pass(obs, prior, spec.theta_resolution,
                                            spec.latent_resolution);
  const PassResult fine = quadrature_pass(obs, prior, 2 * spec.theta_resolution,
                                          2 * spec.latent_resolution);

  OracleMoments out;
  out.mean = fine.mean;
  out.variance = fine.variance;
  out.coarse_mean = coarse.mean;
  out.converged = true;
  for (int p = 0; p < 3; ++p) {
    const double scale = std::max(std::abs(fine.mean[p]), 1e-9);
    out.refinement_delta[p] = std::abs(fine.mean[p] - coarse.mean[p]) / scale;
    if (!(out.refinement_delta[p] < 0.005)) out.converged = false;
  }
  return out;
}

void write_oracle_csv(const OracleMoments& m, const Observations& obs,
                      const QuadratureSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "key,value\n";
  out << "n," << obs.size() << "\n";
  char buf[64];
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", obs.interdeparture(i));
    out << "y" << (i + 1) << "," << buf << "\n";
  }
  out << "theta_resolution," << spec.theta_resolution << "\n";
  out << "latent_resolution," << spec.latent_resolution << "\n";
  const char* names[3] = {"eta1", "eta2", "eta3"};
  for (int p = 0; p < 3; ++p) {
    std::snprintf(buf, sizeof(buf), "%.12g", m.mean[p]);
    out << names[p] << "_mean," << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.12g", m.variance[p]);
    out << names[p] << "_variance," << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6g", m.refinement_delta[p]);
    out << names[p] << "_refinement_delta," << buf << "\n";
  }
  out << "converged," << (m.converged ? 1 : 0) << "\n";
}

}  // namespace mg1
