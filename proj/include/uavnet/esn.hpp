#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace uavnet::esn {

/// Leaky-tanh echo state network:
/// x' = (1 - leak) x + leak * tanh(W_in u + W x).
struct EsnParams {
  int size = 500;
  double density = 0.05;
  double spectral_radius = 0.9;
  double leak = 0.3;
  double input_scale = 1.0;

  void validate() const;
};

class EchoStateNetwork {
 public:
  EchoStateNetwork(const EsnParams& params, int inputs, std::uint64_t seed);

  int size() const { return static_cast<int>(x_.size()); }
  int inputs() const { return static_cast<int>(w_in_.cols()); }
  const Eigen::VectorXd& state() const { return x_; }
  const Eigen::SparseMatrix<double>& recurrent() const { return w_; }

  void reset() { x_.setZero(); }
  const Eigen::VectorXd& step(const Eigen::VectorXd& u);
  const Eigen::VectorXd& drive(const Eigen::VectorXd& u, int steps);
  Eigen::MatrixXd run_and_collect(const Eigen::MatrixXd& sequence,
                                  int steps_per_input);

 private:
  EsnParams params_;
  Eigen::SparseMatrix<double> w_;
  Eigen::MatrixXd w_in_;
  Eigen::VectorXd x_;
};

}  // namespace uavnet::esn
