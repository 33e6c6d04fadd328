#include "uavnet/agents.hpp"

#include <algorithm>
#include <cmath>

#include "uavnet/error.hpp"

namespace uavnet::agents {

std::vector<double> epsilon_greedy_policy(int actions, int greedy, double eps) {
  require(actions >= 1, "policy needs at least one action");
  require(greedy >= 0 && greedy < actions, "greedy action out of range");
  require(eps >= 0.0 && eps <= 1.0, "epsilon must lie in [0, 1]");
  std::vector<double> pi(actions, eps / actions);
  pi[greedy] = 1.0 - eps + eps / actions;
  return pi;
}

int argmax_lowest(const Eigen::VectorXd& values) {
  require(values.size() > 0, "argmax of an empty vector");
  int best = 0;
  for (Eigen::Index j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = static_cast<int>(j);
  }
  return best;
}

int argmax_lowest(const std::vector<double>& values) {
  require(!values.empty(), "argmax of an empty vector");
  return static_cast<int>(std::max_element(values.begin(), values.end()) -
                          values.begin());
}

int epsilon_greedy_select(int greedy, int actions, double eps, Rng& rng) {
  const double u = uniform01(rng);
  const double pick = uniform01(rng);
  if (u < eps) {
    return std::min(actions - 1, static_cast<int>(pick * actions));
  }
  return greedy;
}

double epsilon_schedule(double start, double end, double fraction,
                        int iteration, int iterations) {
  const double horizon = fraction * iterations;
  if (horizon <= 0.0 || iteration >= horizon || start <= 0.0 || end <= 0.0) {
    return iteration >= horizon ? end : start;
  }
  return start * std::pow(end / start, iteration / horizon);
}

LsmAgent::LsmAgent(const LsmAgentParams& params, int input_width,
                   std::vector<double> prior, std::uint64_t seed)
    : params_(params), prior_(std::move(prior)) {
  require(!prior_.empty(), "agent needs at least one action");
  require(params_.steps_per_iteration >= 1, "need at least one liquid step");
  liquid_ = std::make_unique<reservoir::Reservoir>(params_.liquid, input_width, seed);
  readout_.weights = Eigen::MatrixXd::Zero(actions(), liquid_->size() + input_width);
  readout_.delta = params_.learning_rate;
}

void LsmAgent::observe(const Eigen::VectorXd& m) {
  liquid_->reset();
  const auto& v = liquid_->drive(m, params_.steps_per_iteration);
  const int n = liquid_->size();
  features_.resize(n + m.size());
  // Scaled so the resting liquid block has unit norm.
  features_.head(n) = v / (params_.liquid.resting_mv * std::sqrt(double(n)));
  features_.tail(m.size()) = m;
  if (!primed_ && params_.optimistic_init) {
    const double norm2 = features_.squaredNorm();
    if (norm2 > 0.0) {
      for (int j = 0; j < actions(); ++j) {
        readout_.weights.row(j) = (prior_[j] / norm2) * features_.transpose();
      }
    }
  }
  primed_ = true;
}

Eigen::VectorXd LsmAgent::estimates() {
  require(primed_, "agent has not observed an input yet");
  return readout_.predict(features_);
}

void LsmAgent::learn(int action, double observed) {
  require(primed_, "agent has not observed an input yet");
  const double b = readout_.predict_row(action, features_);
  reservoir::sgd_readout_update(readout_, action, observed, b, features_,
                                params_.learning_rate);
}

std::uint64_t discretize_state(const Eigen::VectorXd& m, int policy_entries,
                               int levels) {
  require(policy_entries >= 0 && policy_entries <= m.size(),
          "policy block exceeds the input");
  require(levels >= 2, "need at least two levels");
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    std::uint64_t code;
    if (j < policy_entries) {
      code = static_cast<std::uint64_t>(
          std::clamp(static_cast<int>(m[j] * levels), 0, levels - 1));
    } else {
      code = m[j] > 0.0 ? 1 : 0;
    }
    h = splitmix64(h ^ (code + 0x9e3779b97f4a7c15ULL * (j + 1)));
  }
  return h;
}

QAgent::QAgent(const QAgentParams& params, std::vector<double> prior)
    : params_(params), prior_(std::move(prior)) {
  require(!prior_.empty(), "agent needs at least one action");
  require(params_.capacity >= 1, "Q-table capacity must be positive");
  require(params_.discount >= 0.0 && params_.discount < 1.0,
          "discount must lie in [0, 1)");
  if (params_.optimistic_init) {
    for (auto& p : prior_) p /= 1.0 - params_.discount;
  } else {
    std::fill(prior_.begin(), prior_.end(), 0.0);
  }
}

QAgent::Entry& QAgent::touch(std::uint64_t state) {
  auto it = table_.find(state);
  if (it != table_.end()) {
    order_.splice(order_.begin(), order_, it->second.lru);
    return it->second;
  }
  if (table_.size() >= params_.capacity) {
    table_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(state);
  auto& e = table_[state];
  e.q = prior_;
  e.lru = order_.begin();
  return e;
}

const std::vector<double>& QAgent::values(std::uint64_t state) {
  return touch(state).q;
}

int QAgent::greedy(std::uint64_t state) { return argmax_lowest(values(state)); }

void QAgent::update(std::uint64_t state, int action, double reward,
                    std::uint64_t next_state) {
  require(action >= 0 && action < actions(), "action index out of range");
  const auto& next = values(next_state);
  const double target =
      reward + params_.discount * *std::max_element(next.begin(), next.end());
  auto& q = touch(state).q;
  q[action] += params_.alpha * (target - q[action]);
}

}  // namespace uavnet::agents
