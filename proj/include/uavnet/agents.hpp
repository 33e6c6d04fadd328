#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "uavnet/reservoir.hpp"
#include "uavnet/rng.hpp"

namespace uavnet::agents {

/// Greedy action gets 1 - eps + eps/A, every other action eps/A.
std::vector<double> epsilon_greedy_policy(int actions, int greedy, double eps);

/// Index of the largest entry, ties to the lowest index.
int argmax_lowest(const Eigen::VectorXd& values);
int argmax_lowest(const std::vector<double>& values);

/// With probability eps a uniformly random action, otherwise `greedy`.
int epsilon_greedy_select(int greedy, int actions, double eps, Rng& rng);

/// Exponential decay from `start` to `end` over the first `fraction` of
/// `iterations`, then held at `end`.
double epsilon_schedule(double start, double end, double fraction,
                        int iteration, int iterations);

struct LsmAgentParams {
  reservoir::LiquidParams liquid{};
  int steps_per_iteration = 20;
  double learning_rate = 0.05;
  bool optimistic_init = true;
};

/// Liquid-state value estimator of one UAV: the liquid is driven by m_k for
/// one slot from rest, and one readout row per action maps [v; m] to the
/// expected number of stable users.
class LsmAgent {
 public:
  /// `prior[j]` is the optimistic starting estimate of action j.
  LsmAgent(const LsmAgentParams& params, int input_width,
           std::vector<double> prior, std::uint64_t seed);

  int actions() const { return static_cast<int>(prior_.size()); }
  const reservoir::Readout& readout() const { return readout_; }
  reservoir::Readout& readout() { return readout_; }
  const Eigen::VectorXd& features() const { return features_; }

  /// Drives the liquid with `m` and caches [v; m].
  void observe(const Eigen::VectorXd& m);
  /// b_j = f_j [v; m] for every action.
  Eigen::VectorXd estimates();
  /// One LMS step on the row of `action` toward `observed`.
  void learn(int action, double observed);

 private:
  LsmAgentParams params_;
  std::vector<double> prior_;
  std::unique_ptr<reservoir::Reservoir> liquid_;
  reservoir::Readout readout_;
  Eigen::VectorXd features_;
  bool primed_ = false;
};

/// Hashes an LSM input vector after discretizing each policy entry to
/// `levels` levels and each arrival to a bit.
std::uint64_t discretize_state(const Eigen::VectorXd& m, int policy_entries,
                               int levels);

struct QAgentParams {
  double alpha = 0.5;
  double discount = 0.5;
  std::size_t capacity = 100000;
  bool optimistic_init = true;
};

/// Tabular Q-learning with least-recently-used eviction.
class QAgent {
 public:
  QAgent(const QAgentParams& params, std::vector<double> prior);

  int actions() const { return static_cast<int>(prior_.size()); }
  std::size_t table_size() const { return table_.size(); }
  const std::vector<double>& values(std::uint64_t state);
  int greedy(std::uint64_t state);
  /// Q(s,a) += alpha * (r + discount * max Q(s') - Q(s,a)).
  void update(std::uint64_t state, int action, double reward,
              std::uint64_t next_state);

 private:
  struct Entry {
    std::vector<double> q;
    std::list<std::uint64_t>::iterator lru;
  };
  Entry& touch(std::uint64_t state);

  QAgentParams params_;
  std::vector<double> prior_;
  std::unordered_map<std::uint64_t, Entry> table_;
  std::list<std::uint64_t> order_;  // front = most recent
};

}  // namespace uavnet::agents
