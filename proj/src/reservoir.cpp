#include "uavnet/reservoir.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "uavnet/error.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/units.hpp"

namespace uavnet::reservoir {

void LiquidParams::validate() const {
  require(w1 > 0 && w2 > 0 && w3 > 0, "liquid dimensions must be positive");
  require(time_constant_ms > 0.0, "liquid time constant must be positive");
  require(threshold_offset_mv > 0.0, "firing threshold must exceed rest");
  require(refractory_steps >= 0, "refractory period must be non-negative");
  require(lambda >= 0.0, "connectivity length scale must be non-negative");
  require(input_probability >= 0.0 && input_probability <= 1.0,
          "input connection probability must lie in [0, 1]");
  for (double c : {c_ee, c_ei, c_ie, c_ii}) {
    require(c >= 0.0 && c <= 1.0, "connection scales must lie in [0, 1]");
  }
  require(excitatory_fraction >= 0.0 && excitatory_fraction <= 1.0,
          "excitatory fraction must lie in [0, 1]");
  require(spectral_radius >= 0.0, "spectral radius must be non-negative");
}

double LiquidParams::resistance() const { return db_to_ratio(resistance_db); }

double connection_probability(double scale, double d, double lambda) {
  if (lambda <= 0.0) return 0.0;
  const double r = d / lambda;
  return scale * std::exp(-r * r);
}

double abs_spectral_bound(const Eigen::SparseMatrix<double>& w) {
  if (w.nonZeros() == 0) return 0.0;
  const Eigen::SparseMatrix<double> a = w.cwiseAbs();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(w.cols()) / std::sqrt(double(w.cols()));
  double estimate = 0.0;
  for (int iter = 0; iter < 20000; ++iter) {
    // The identity shift makes the iteration aperiodic.
    Eigen::VectorXd y = a * x + x;
    const double norm = y.norm();
    const double next = norm - 1.0;
    x = y / norm;
    if (iter > 10 && std::abs(next - estimate) <= 1e-12 * std::max(1.0, next)) {
      return next;
    }
    estimate = next;
  }
  return estimate;
}

Reservoir::Reservoir(const LiquidParams& params, int inputs, std::uint64_t seed)
    : params_(params) {
  params_.validate();
  require(inputs >= 0, "input width must be non-negative");
  const int n = params_.neuron_count();
  Rng rng = make_rng(seed);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int excitatory =
      static_cast<int>(std::lround(params_.excitatory_fraction * n));
  kind_.assign(n, NeuronKind::inhibitory);
  for (int j = 0; j < excitatory; ++j) kind_[order[j]] = NeuronKind::excitatory;

  auto coord = [&](int j) {
    return std::array<double, 3>{double(j % params_.w1),
                                 double((j / params_.w1) % params_.w2),
                                 double(j / (params_.w1 * params_.w2))};
  };
  auto scale = [&](NeuronKind from, NeuronKind to) {
    const bool fe = from == NeuronKind::excitatory;
    const bool te = to == NeuronKind::excitatory;
    if (fe) return te ? params_.c_ee : params_.c_ei;
    return te ? params_.c_ie : params_.c_ii;
  };

  std::vector<Eigen::Triplet<double>> trip;
  for (int src = 0; src < n; ++src) {
    const auto a = coord(src);
    const double sign = kind_[src] == NeuronKind::excitatory ? 1.0 : -1.0;
    for (int dst = 0; dst < n; ++dst) {
      const double draw = uniform01(rng);
      const double mag = uniform01(rng);
      if (src == dst) continue;
      const auto b = coord(dst);
      const double d = std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
      if (draw < connection_probability(scale(kind_[src], kind_[dst]), d,
                                        params_.lambda)) {
        trip.emplace_back(dst, src, sign * (0.1 + 0.9 * mag));
      }
    }
  }
  w_res_.resize(n, n);
  w_res_.setFromTriplets(trip.begin(), trip.end());
  const double bound = abs_spectral_bound(w_res_);
  if (bound > 0.0) w_res_ *= params_.spectral_radius / bound;

  trip.clear();
  for (int c = 0; c < inputs; ++c) {
    for (int j = 0; j < n; ++j) {
      const double draw = uniform01(rng);
      const double mag = uniform01(rng);
      if (draw < params_.input_probability) {
        trip.emplace_back(j, c, params_.input_scale * (0.2 + 0.8 * mag));
      }
    }
  }
  w_in_.resize(n, inputs);
  w_in_.setFromTriplets(trip.begin(), trip.end());

  v_.resize(n);
  current_.resize(n);
  refractory_.resize(n);
  reset();
}

void Reservoir::reset() {
  v_.setConstant(params_.resting_mv);
  std::fill(refractory_.begin(), refractory_.end(), 0);
  spikes_.clear();
}

void Reservoir::set_state(const Eigen::VectorXd& v) {
  require(v.size() == v_.size(), "state size does not match the liquid");
  v_ = v;
}

Eigen::VectorXd Reservoir::input_current(const Eigen::VectorXd& u) const {
  require(u.size() == w_in_.cols(), "input width does not match the liquid");
  return w_in_ * u;
}

const Eigen::VectorXd& Reservoir::step_current(const Eigen::VectorXd& external) {
  require(external.size() == v_.size(), "current size does not match the liquid");
  current_ = external;
  for (int src : spikes_) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(w_res_, src); it; ++it) {
      current_[it.row()] += params_.synaptic_gain * it.value();
    }
  }
  const double s = params_.resting_mv;
  const double z = params_.resistance();
  const double zr = z * params_.time_constant_ms;
  const double threshold = s + params_.threshold_offset_mv;
  next_spikes_.clear();
  for (int j = 0; j < size(); ++j) {
    if (refractory_[j] > 0) {
      v_[j] = s;
      --refractory_[j];
      continue;
    }
    v_[j] += (s + z * current_[j] - v_[j]) / zr;
    if (v_[j] >= threshold) {
      next_spikes_.push_back(j);
      v_[j] = s;
      refractory_[j] = params_.refractory_steps;
    }
  }
  spikes_.swap(next_spikes_);
  return v_;
}

const Eigen::VectorXd& Reservoir::step(const Eigen::VectorXd& u) {
  return step_current(input_current(u));
}

const Eigen::VectorXd& Reservoir::drive(const Eigen::VectorXd& u, int steps) {
  const Eigen::VectorXd external = input_current(u);
  for (int s = 0; s < steps; ++s) step_current(external);
  return v_;
}

Eigen::MatrixXd Reservoir::run_and_collect(const Eigen::MatrixXd& sequence,
                                           int steps_per_input) {
  require(sequence.cols() > 0, "input sequence must not be empty");
  require(steps_per_input >= 1, "need at least one liquid step per input");
  reset();
  Eigen::MatrixXd out(size(), sequence.cols());
  for (Eigen::Index t = 0; t < sequence.cols(); ++t) {
    out.col(t) = drive(sequence.col(t), steps_per_input);
  }
  return out;
}

Eigen::VectorXd Readout::predict(const Eigen::VectorXd& features) const {
  require(features.size() == weights.cols(),
          "feature size does not match the readout");
  return weights * features;
}

double Readout::predict_row(int row, const Eigen::VectorXd& features) const {
  require(row >= 0 && row < weights.rows(), "readout row out of range");
  require(features.size() == weights.cols(),
          "feature size does not match the readout");
  return weights.row(row).dot(features);
}

Readout train_ridge_readout(const Eigen::MatrixXd& states,
                            const Eigen::MatrixXd& targets, double delta) {
  require(states.cols() > 0, "ridge readout needs training samples");
  require(states.cols() == targets.cols(),
          "states and targets must have the same sequence length");
  require(delta >= 0.0, "ridge parameter must be non-negative");
  const double d2 = delta * delta;
  Readout out;
  out.delta = delta;
  if (states.cols() < states.rows()) {
    Eigen::MatrixXd gram = states.transpose() * states;
    gram.diagonal().array() += d2;
    const Eigen::MatrixXd x = gram.ldlt().solve(targets.transpose());
    out.weights = (states * x).transpose();
  } else {
    Eigen::MatrixXd gram = states * states.transpose();
    gram.diagonal().array() += d2;
    const Eigen::MatrixXd x = gram.ldlt().solve(states * targets.transpose());
    out.weights = x.transpose();
  }
  if (!out.weights.allFinite()) {
    throw ComputationError("ridge readout system is singular");
  }
  return out;
}

void sgd_readout_update(Readout& readout, int row, double observed,
                        double estimate, const Eigen::VectorXd& features,
                        double rate) {
  require(row >= 0 && row < readout.weights.rows(), "readout row out of range");
  require(features.size() == readout.weights.cols(),
          "feature size does not match the readout");
  const double err = observed - estimate;
  if (err == 0.0) return;
  readout.weights.row(row) += (rate * err) * features.transpose();
}

void write_readout_csv(std::ostream& out, const Readout& readout) {
  out << fmt::format("{},{},{:.17g}\n", readout.weights.rows(),
                     readout.weights.cols(), readout.delta);
  for (Eigen::Index r = 0; r < readout.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < readout.weights.cols(); ++c) {
      out << (c ? "," : "") << fmt::format("{:.17g}", readout.weights(r, c));
    }
    out << '\n';
  }
}

Readout read_readout_csv(std::istream& in) {
  std::string line;
  auto fields = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    return f;
  };
  if (!std::getline(in, line)) throw InvalidArgument("empty readout file");
  const auto head = fields(line);
  if (head.size() != 3) throw InvalidArgument("malformed readout header");
  Readout out;
  const long rows = std::stol(head[0]);
  const long cols = std::stol(head[1]);
  require(rows >= 0 && cols >= 0, "malformed readout header");
  out.delta = std::stod(head[2]);
  out.weights.resize(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw InvalidArgument("truncated readout file");
    const auto f = fields(line);
    if (static_cast<long>(f.size()) != cols) {
      throw InvalidArgument("readout row has the wrong width");
    }
    for (long c = 0; c < cols; ++c) out.weights(r, c) = std::stod(f[c]);
  }
  return out;
}

}  // namespace uavnet::reservoir
