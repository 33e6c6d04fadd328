#include "uavnet/esn.hpp"

#include <vector>

#include "uavnet/error.hpp"
#include "uavnet/reservoir.hpp"
#include "uavnet/rng.hpp"

namespace uavnet::esn {

void EsnParams::validate() const {
  require(size > 0, "ESN size must be positive");
  require(density > 0.0 && density <= 1.0, "ESN density must lie in (0, 1]");
  require(spectral_radius >= 0.0 && spectral_radius < 1.0,
          "ESN spectral radius must lie in [0, 1)");
  require(leak > 0.0 && leak <= 1.0, "ESN leak rate must lie in (0, 1]");
  require(input_scale >= 0.0, "ESN input scale must be non-negative");
}

EchoStateNetwork::EchoStateNetwork(const EsnParams& params, int inputs,
                                   std::uint64_t seed)
    : params_(params) {
  params_.validate();
  require(inputs >= 0, "input width must be non-negative");
  Rng rng = make_rng(seed);
  const int n = params_.size;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double draw = uniform01(rng);
      const double w = 2.0 * uniform01(rng) - 1.0;
      if (draw < params_.density) trip.emplace_back(i, j, w);
    }
  }
  w_.resize(n, n);
  w_.setFromTriplets(trip.begin(), trip.end());
  const double bound = reservoir::abs_spectral_bound(w_);
  if (bound > 0.0) w_ *= params_.spectral_radius / bound;

  w_in_.resize(n, inputs);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < inputs; ++c) {
      w_in_(i, c) = params_.input_scale * (2.0 * uniform01(rng) - 1.0);
    }
  }
  x_ = Eigen::VectorXd::Zero(n);
}

const Eigen::VectorXd& EchoStateNetwork::step(const Eigen::VectorXd& u) {
  require(u.size() == w_in_.cols(), "input width does not match the ESN");
  const Eigen::VectorXd pre = w_in_ * u + w_ * x_;
  x_ = (1.0 - params_.leak) * x_ + params_.leak * pre.array().tanh().matrix();
  return x_;
}

const Eigen::VectorXd& EchoStateNetwork::drive(const Eigen::VectorXd& u,
                                               int steps) {
  for (int s = 0; s < steps; ++s) step(u);
  return x_;
}

Eigen::MatrixXd EchoStateNetwork::run_and_collect(const Eigen::MatrixXd& sequence,
                                                  int steps_per_input) {
  require(sequence.cols() > 0, "input sequence must not be empty");
  require(steps_per_input >= 1, "need at least one step per input");
  reset();
  Eigen::MatrixXd out(size(), sequence.cols());
  for (Eigen::Index t = 0; t < sequence.cols(); ++t) {
    out.col(t) = drive(sequence.col(t), steps_per_input);
  }
  return out;
}

}  // namespace uavnet::esn
