#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace uavnet::reservoir {

enum class NeuronKind : std::uint8_t { excitatory, inhibitory };

/// LIF liquid parameters. One liquid step is 1 ms. Connection scales are
/// keyed source-then-target (c_ei: excitatory source, inhibitory target).
struct LiquidParams {
  int w1 = 5;
  int w2 = 5;
  int w3 = 20;
  double resting_mv = 13.5;
  double resistance_db = 20.0;
  double time_constant_ms = 30.0;
  double threshold_offset_mv = 15.0;
  int refractory_steps = 2;
  double lambda = 2.0;
  double input_probability = 0.3;
  double c_ee = 0.3;
  double c_ei = 0.4;
  double c_ie = 0.2;
  double c_ii = 0.1;
  double excitatory_fraction = 0.8;
  double spectral_radius = 0.9;
  double input_scale = 30.0;
  double synaptic_gain = 30.0;

  void validate() const;
  int neuron_count() const { return w1 * w2 * w3; }
  double resistance() const;
};

/// scale * exp(-(d / lambda)^2); zero for lambda <= 0.
double connection_probability(double scale, double d, double lambda);

/// Largest eigenvalue of |W| by shifted power iteration. It bounds the
/// spectral radius of W itself.
double abs_spectral_bound(const Eigen::SparseMatrix<double>& w);

class Reservoir {
 public:
  Reservoir(const LiquidParams& params, int inputs, std::uint64_t seed);

  int size() const { return static_cast<int>(v_.size()); }
  int inputs() const { return static_cast<int>(w_in_.cols()); }
  const LiquidParams& params() const { return params_; }
  NeuronKind kind(int j) const { return kind_[j]; }
  const Eigen::SparseMatrix<double>& recurrent() const { return w_res_; }
  const Eigen::SparseMatrix<double>& input_weights() const { return w_in_; }

  const Eigen::VectorXd& state() const { return v_; }
  const std::vector<int>& spikes() const { return spikes_; }
  int refractory(int j) const { return refractory_[j]; }

  /// v = S everywhere, no pending spikes, no refractory neurons.
  void reset();
  /// Overwrites the membrane state (refractory counters untouched).
  void set_state(const Eigen::VectorXd& v);

  /// W_in * u.
  Eigen::VectorXd input_current(const Eigen::VectorXd& u) const;
  /// One step with a precomputed external current per neuron.
  const Eigen::VectorXd& step_current(const Eigen::VectorXd& external);
  const Eigen::VectorXd& step(const Eigen::VectorXd& u);
  /// Holds `u` for `steps` liquid steps.
  const Eigen::VectorXd& drive(const Eigen::VectorXd& u, int steps);

  /// Resets, then feeds each column of `sequence` for `steps_per_input`
  /// steps; column t of the result is the state after input t.
  Eigen::MatrixXd run_and_collect(const Eigen::MatrixXd& sequence,
                                  int steps_per_input);

 private:
  LiquidParams params_;
  std::vector<NeuronKind> kind_;
  Eigen::SparseMatrix<double> w_res_;  // [target, source]
  Eigen::SparseMatrix<double> w_in_;   // [neuron, input]
  Eigen::VectorXd v_;
  Eigen::VectorXd current_;
  std::vector<int> refractory_;
  std::vector<int> spikes_;
  std::vector<int> next_spikes_;
};

/// Linear map from a feature vector to outputs.
struct Readout {
  Eigen::MatrixXd weights;  // outputs x features
  double delta = 0.0;

  int outputs() const { return static_cast<int>(weights.rows()); }
  int features() const { return static_cast<int>(weights.cols()); }
  Eigen::VectorXd predict(const Eigen::VectorXd& features) const;
  double predict_row(int row, const Eigen::VectorXd& features) const;
};

/// Ridge fit F = Y V^T (V V^T + delta^2 I)^-1 with states V (features x
/// samples) and targets Y (outputs x samples). Uses the sample-space form
/// when there are fewer samples than features.
Readout train_ridge_readout(const Eigen::MatrixXd& states,
                            const Eigen::MatrixXd& targets, double delta);

/// f_row += rate * (observed - estimate) * features^T.
void sgd_readout_update(Readout& readout, int row, double observed,
                        double estimate, const Eigen::VectorXd& features,
                        double rate);

void write_readout_csv(std::ostream& out, const Readout& readout);
Readout read_readout_csv(std::istream& in);

}  // namespace uavnet::reservoir
