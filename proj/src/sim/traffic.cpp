#include "vnflab/sim/traffic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace vnflab::sim {

namespace {

double gaussian(double mu, double sigma, Rng& rng) {
  if (sigma <= 0.0) return mu;
  return std::normal_distribution<double>(mu, sigma)(rng);
}

}  // namespace

double sample_rate_block(const VnfSpec& spec, Rng& rng) {
  return std::max(gaussian(spec.mu_arr, spec.sigma_arr, rng), 0.0);
}

Eigen::VectorXi sample_arrivals(const Eigen::VectorXd& lambdas, double slot_T, Rng& rng) {
  Eigen::VectorXi n(lambdas.size());
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    const double mean = lambdas(j) * slot_T;
    if (mean < 0.0) throw std::invalid_argument("sample_arrivals: negative arrival rate");
    n(j) = mean == 0.0 ? 0 : std::poisson_distribution<int>(mean)(rng);
  }
  return n;
}

double sample_cloud_rate(const TrafficConfig& cfg, Rng& rng) {
  return std::max(gaussian(cfg.mu_r, cfg.sigma_r, rng), cfg.r_min);
}

Eigen::MatrixXi apply_departures(AllocationState& state, const std::vector<VnfSpec>& specs, Rng& rng) {
  Eigen::MatrixXi leavers = Eigen::MatrixXi::Zero(state.users.rows(), state.users.cols());
  for (Eigen::Index j = 0; j < state.users.cols(); ++j) {
    std::bernoulli_distribution stays(std::clamp(specs[static_cast<std::size_t>(j)].p_stay, 0.0, 1.0));
    for (Eigen::Index k = 0; k < state.users.rows(); ++k) {
      for (int u = 0; u < state.users(k, j); ++u) {
        if (!stays(rng)) ++leavers(k, j);
      }
    }
  }
  state.users -= leavers;
  return leavers;
}

}  // namespace vnflab::sim
