#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace uavnet::traffic {

struct ContentCatalog {
  int size = 25;
  double content_bits = 2e6;

  void validate() const;
};

/// Categorical context of one user: age band, gender, occupation, device.
struct UserContext {
  static constexpr std::array<int, 4> kCardinality{5, 2, 6, 3};
  std::array<int, 4> features{};
};

/// Per-user request behavior. `distribution[i]` sums to one, `activity[i]`
/// is the per-slot request probability q_i and `expected_requests[i]` the
/// per-epoch request count N_i^C.
struct RequestProfile {
  std::vector<std::vector<double>> distribution;
  std::vector<double> activity;
  std::vector<double> expected_requests;
  std::vector<UserContext> context;

  int user_count() const { return static_cast<int>(distribution.size()); }
  void validate() const;
};

struct Request {
  double bits = 0.0;
  int content = -1;  // -1 when the user is idle this slot
};

/// Draws every user's request for slot `slot`; a pure function of
/// (profile, catalog, seed, slot).
std::vector<Request> generate_requests(const RequestProfile& profile,
                                       const ContentCatalog& catalog,
                                       std::uint64_t seed, std::int64_t slot);

/// Synthetic diurnal request model: a Zipf popularity ranking rotated per
/// user cluster, each content's weight following its own daily cosine.
struct TraceParams {
  int users = 20;
  int contents = 25;
  int clusters = 2;
  double zipf_exponent = 1.0;
  double diurnal_depth = 0.4;
  double user_jitter = 0.1;
  int hours = 24;

  void validate() const;
};

class SyntheticTrace {
 public:
  SyntheticTrace(const TraceParams& params, std::uint64_t seed);

  const TraceParams& params() const { return params_; }
  int cluster_of(int user) const { return cluster_[user]; }
  const UserContext& context(int user) const { return context_[user]; }
  /// Ground-truth distribution of `user` during hour bucket `hour`.
  std::span<const double> distribution(int user, int hour) const;

  RequestProfile profile(int hour, double activity, double epoch_length) const;

  /// Observed request histogram of one epoch: `requests` draws from the
  /// hour's distribution, smoothed as (count + 1/N) / (requests + 1).
  std::vector<double> epoch_histogram(int user, int epoch, int requests,
                                      std::uint64_t seed) const;

 private:
  TraceParams params_;
  std::vector<int> cluster_;
  std::vector<UserContext> context_;
  // [user][hour][content]
  std::vector<std::vector<std::vector<double>>> truth_;
};

/// Link kinds: a/b serve from the UAV cache on licensed/unlicensed, c/d
/// relay from the cloud over unlicensed/licensed.
enum class LinkKind { a, b, c, d };

double compose_link_rate(LinkKind kind, double direct, double fronthaul);

struct QueueSample {
  double arrival = 0.0;
  double service = 0.0;
};

struct QueueState {
  double backlog = 0.0;
  std::vector<QueueSample> history;
  std::vector<double> backlog_trace;
};

/// Q' = max(Q - R, 0) + V.
QueueState step_queue(QueueState state, double arrival, double service);

bool is_rate_stable(double service, double arrival);

/// Least-squares slope of the backlog over the final half of the trace
/// compared against `slope_tol` (bits per slot).
bool empirical_stability(std::span<const double> backlog_trace,
                         double slope_tol);
double backlog_slope(std::span<const double> backlog_trace);

struct TraceRow {
  std::int64_t slot = 0;
  int user = 0;
  int content = -1;
  double arrival = 0.0;
  double service = 0.0;
  double backlog = 0.0;
};

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);

}  // namespace uavnet::traffic
