#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "uavnet/allocation.hpp"
#include "uavnet/cache.hpp"
#include "uavnet/channel.hpp"
#include "uavnet/config.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet::sim {

/// UAVs uniform over the disk at the configured altitude, users uniform
/// over the disk on the ground.
channel::Geometry place_nodes(const SimConfig& config, std::uint64_t seed);

struct WifiState {
  double tau = 0.0;
  double saturation = 0.0;
  double theta = 0.0;
};

WifiState wifi_state(const SimConfig& config);

traffic::TraceParams trace_params(const SimConfig& config);

/// Everything fixed for one seed: placement, rates, action spaces, request
/// model and the trained per-user predictions.
struct Scenario {
  SimConfig config;
  std::uint64_t seed = 0;
  channel::Geometry geometry;
  WifiState wifi;
  channel::LinkRates rates;  // bits per slot
  std::vector<allocation::ActionSpace> spaces;
  std::shared_ptr<const traffic::SyntheticTrace> trace;
  // [hour][user][content]
  std::vector<std::vector<std::vector<double>>> predictions;
  std::vector<double> expected_requests;

  int uav_count() const { return static_cast<int>(spaces.size()); }
  int user_count() const { return config.users; }
  int max_actions() const { return 1 << config.action.cap; }
  /// Width of one agent input: padded opponent policies, then arrivals.
  int input_width() const;
};

/// `with_predictor` false replaces the learned predictions with the ground
/// truth (used where only the network side matters).
Scenario build_scenario(const SimConfig& config, std::uint64_t seed,
                        bool with_predictor = true);

struct JointOutcome {
  std::vector<int> association;  // per user: serving UAV or -1
  std::vector<int> stable_per_uav;
  std::vector<bool> stable;      // per user
  std::vector<double> delivered; // per user, bits per slot
  std::vector<bool> cache_hit;   // per user, meaningful when associated
  std::vector<cache::CacheAssignment> caches;
  std::vector<allocation::AllocationPlan> plans;
  std::vector<std::vector<int>> served;  // per UAV, associated users
  int cloud_users = 0;
  int requests = 0;
  int hits = 0;

  int total_stable() const;
};

/// A user proposed by several UAVs joins the one with the largest
/// full-allocation direct rate, ties to the lower index.
std::vector<int> resolve_association(const Scenario& scenario,
                                     const std::vector<int>& actions);

JointOutcome evaluate_joint_action(const Scenario& scenario,
                                   const std::vector<int>& actions,
                                   const std::vector<traffic::Request>& requests,
                                   int hour, bool caching);

enum class Algorithm { lsm, q_cache, q_nocache };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct IterationRecord {
  int iteration = 0;
  int stable = 0;
  std::vector<int> actions;
  double hit_ratio = 0.0;
  int cloud_users = 0;
  double epsilon = 0.0;
};

struct EpisodeResult {
  Algorithm algorithm = Algorithm::lsm;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  double converged = 0.0;        // mean stable count, last 10%
  int convergence_iteration = 0;
  // Per-user mean delivered rate (bits/s) over the last 10%, users served
  // at least once in that window.
  std::vector<double> delivered_rates;
  std::vector<double> final_backlog;
};

EpisodeResult run_episode(const Scenario& scenario, Algorithm algorithm);

/// First iteration after which the running mean over `window` iterations
/// stays within `band` of the final running mean.
int settling_iteration(const std::vector<double>& trace, int window, double band);

void write_iterations_csv(std::ostream& out, const EpisodeResult& result,
                          bool header = true);

}  // namespace uavnet::sim
