#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavnet/allocation.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/simulation.hpp"

namespace uavnet::sim {

enum class SweepAxis { uavs, cache_size, theta, fronthaul, users };

const char* axis_name(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

/// Returns `base` with the axis set to `value`. theta pins the duty
/// fraction; fronthaul is the fronthaul bandwidth in Hz.
SimConfig apply_axis(SimConfig base, SweepAxis axis, double value);

struct SweepCell {
  double value = 0.0;
  Algorithm algorithm = Algorithm::lsm;
  std::uint64_t seed = 0;
  double converged = 0.0;
  int convergence_iteration = 0;
};

struct CellStats {
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  int runs = 0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::uavs;
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
  // Ordered by (value, seed, algorithm) regardless of execution order.
  std::vector<SweepCell> cells;

  CellStats stats(double value, Algorithm algorithm) const;
  void write_csv(std::ostream& out) const;
};

/// Runs every (value, seed) scenario with every algorithm on up to
/// `threads` workers.
SweepReport run_sweep(const SimConfig& config, SweepAxis axis,
                      const std::vector<double>& values,
                      const std::vector<Algorithm>& algorithms,
                      const std::vector<std::uint64_t>& seeds, int threads = 1);

/// Calls `job(i)` for i in [0, count) on up to `threads` workers; the first
/// exception is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

double median(std::vector<double> values);

struct CdfPoint {
  double rate = 0.0;
  double fraction = 0.0;
};

/// Sorted rates with cumulative fraction i/n.
std::vector<CdfPoint> rate_cdf(std::vector<double> rates);
void write_rate_cdf_csv(std::ostream& out, const std::vector<CdfPoint>& cdf);

/// Mean rate of each link kind over every (UAV, user) pair with full band
/// allocation and the fronthaul shared by `cloud_users` users.
struct LinkKindRates {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

LinkKindRates link_kind_rates(const channel::LinkRates& rates, int uav, int user,
                              int cloud_users);

/// Random single-UAV instance with at most `max_users` users. Half the
/// instances come from link rates, half from requirement fractions drawn
/// directly.
allocation::RequirementVectors random_allocation_instance(int users,
                                                          std::uint64_t seed,
                                                          std::uint64_t index);

struct AllocVerifyReport {
  long instances = 0;
  // Indexed by AllocationCase.
  std::vector<long> per_case = std::vector<long>(4, 0);
  std::vector<long> mismatches = std::vector<long>(4, 0);
  std::vector<nlohmann::json> counterexamples;

  long total_mismatches() const;
  double agreement(allocation::AllocationCase kind) const;
};

AllocVerifyReport alloc_verify(long instances, int max_users, std::uint64_t seed);

struct SearchCountRow {
  int users = 0;
  double algorithm1 = 0.0;
  double oracle = 0.0;
};

std::vector<SearchCountRow> search_count_report(const std::vector<int>& users,
                                                int instances, std::uint64_t seed);
void write_search_count_csv(std::ostream& out,
                            const std::vector<SearchCountRow>& rows);

struct CacheVerifyReport {
  long instances = 0;
  long mismatches = 0;
  std::vector<nlohmann::json> counterexamples;
};

/// Random instances with N <= 12 contents, C <= 4, at most 8 users.
CacheVerifyReport cache_verify(long instances, std::uint64_t seed);

/// Prediction benchmark settings matching the simulation's request model.
predictor::BenchParams bench_params(const SimConfig& config);

nlohmann::json episode_summary(const EpisodeResult& result);

}  // namespace uavnet::sim
