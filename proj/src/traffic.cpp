#include "uavnet/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "uavnet/error.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/units.hpp"

namespace uavnet::traffic {

namespace {

int sample_categorical(std::span<const double> p, double u) {
  double acc = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    acc += p[n];
    if (u < acc) return static_cast<int>(n);
  }
  // u landed in the rounding gap above the final partial sum.
  for (std::size_t n = p.size(); n-- > 0;) {
    if (p[n] > 0.0) return static_cast<int>(n);
  }
  return 0;
}

void check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    require(v >= 0.0, "request probabilities must be non-negative");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "request distribution must sum to 1");
}

}  // namespace

void ContentCatalog::validate() const {
  require(size >= 1, "catalog needs at least one content");
  require(content_bits > 0.0, "content size L must be positive");
}

void RequestProfile::validate() const {
  const auto n = distribution.size();
  require(activity.size() == n && expected_requests.size() == n,
          "request profile vectors must have one entry per user");
  for (std::size_t i = 0; i < n; ++i) {
    check_distribution(distribution[i]);
    require(activity[i] >= 0.0 && activity[i] <= 1.0,
            "activity rate must lie in [0, 1]");
  }
}

std::vector<Request> generate_requests(const RequestProfile& profile,
                                       const ContentCatalog& catalog,
                                       std::uint64_t seed, std::int64_t slot) {
  std::vector<Request> out(profile.distribution.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng = make_rng(seed, {stream::kRequests, static_cast<std::uint64_t>(slot),
                              static_cast<std::uint64_t>(i)});
    const double active = uniform01(rng);
    const double pick = uniform01(rng);
    if (active < profile.activity[i]) {
      out[i].bits = catalog.content_bits;
      out[i].content = sample_categorical(profile.distribution[i], pick);
    }
  }
  return out;
}

void TraceParams::validate() const {
  require(users >= 1, "trace needs at least one user");
  require(contents >= 1, "trace needs at least one content");
  require(clusters >= 1 && clusters <= users, "cluster count out of range");
  require(zipf_exponent >= 0.0, "zipf exponent must be non-negative");
  require(diurnal_depth >= 0.0 && diurnal_depth < 1.0,
          "diurnal depth must lie in [0, 1)");
  require(user_jitter >= 0.0, "user jitter must be non-negative");
  require(hours >= 1, "trace needs at least one hour bucket");
}

SyntheticTrace::SyntheticTrace(const TraceParams& params, std::uint64_t seed)
    : params_(params) {
  params_.validate();
  const int n = params_.contents;
  Rng rng = make_rng(seed, {stream::kTrace});

  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::shuffle(base.begin(), base.end(), rng);

  // rank_of[c][content]: cluster c rotates the base ranking so the clusters'
  // most popular contents are disjoint.
  std::vector<std::vector<int>> rank_of(params_.clusters, std::vector<int>(n));
  std::vector<std::vector<double>> phase(params_.clusters, std::vector<double>(n));
  for (int c = 0; c < params_.clusters; ++c) {
    const int shift = c * n / params_.clusters;
    for (int r = 0; r < n; ++r) rank_of[c][base[(r + shift) % n]] = r;
    for (int m = 0; m < n; ++m) phase[c][m] = uniform01(rng) * params_.hours;
  }

  cluster_.resize(params_.users);
  context_.resize(params_.users);
  truth_.assign(params_.users, {});
  std::normal_distribution<double> jitter_dist(0.0, 1.0);
  for (int i = 0; i < params_.users; ++i) {
    const int c = i % params_.clusters;
    cluster_[i] = c;
    const auto& card = UserContext::kCardinality;
    context_[i].features = {c % card[0], c % card[1], (2 * c) % card[2],
                            c % card[3]};
    std::vector<double> jitter(n);
    for (auto& j : jitter) j = std::exp(params_.user_jitter * jitter_dist(rng));
    truth_[i].assign(params_.hours, std::vector<double>(n));
    for (int h = 0; h < params_.hours; ++h) {
      auto& p = truth_[i][h];
      for (int m = 0; m < n; ++m) {
        const double zipf = std::pow(rank_of[c][m] + 1.0, -params_.zipf_exponent);
        const double angle = 2.0 * kPi * (h - phase[c][m]) / params_.hours;
        p[m] = zipf * jitter[m] * (1.0 + params_.diurnal_depth * std::cos(angle));
      }
      const double sum = std::accumulate(p.begin(), p.end(), 0.0);
      for (auto& v : p) v /= sum;
    }
  }
}

std::span<const double> SyntheticTrace::distribution(int user, int hour) const {
  return truth_.at(user).at(hour % params_.hours);
}

RequestProfile SyntheticTrace::profile(int hour, double activity,
                                       double epoch_length) const {
  RequestProfile out;
  for (int i = 0; i < params_.users; ++i) {
    const auto p = distribution(i, hour);
    out.distribution.emplace_back(p.begin(), p.end());
    out.activity.push_back(activity);
    out.expected_requests.push_back(activity * epoch_length);
    out.context.push_back(context_[i]);
  }
  return out;
}

std::vector<double> SyntheticTrace::epoch_histogram(int user, int epoch,
                                                    int requests,
                                                    std::uint64_t seed) const {
  const auto p = distribution(user, epoch % params_.hours);
  const int n = params_.contents;
  std::vector<double> counts(n, 0.0);
  Rng rng = make_rng(seed, {stream::kHistory, static_cast<std::uint64_t>(user),
                            static_cast<std::uint64_t>(epoch)});
  for (int r = 0; r < requests; ++r) counts[sample_categorical(p, uniform01(rng))] += 1.0;
  for (auto& c : counts) c = (c + 1.0 / n) / (requests + 1.0);
  return counts;
}

double compose_link_rate(LinkKind kind, double direct, double fronthaul) {
  require(direct >= 0.0, "direct rate must be non-negative");
  if (kind == LinkKind::a || kind == LinkKind::b) return direct;
  require(fronthaul >= 0.0, "fronthaul rate must be non-negative");
  if (direct == 0.0 || fronthaul == 0.0) return 0.0;
  if (std::isinf(fronthaul)) return direct;
  if (std::isinf(direct)) return fronthaul;
  return direct * fronthaul / (direct + fronthaul);
}

QueueState step_queue(QueueState state, double arrival, double service) {
  require(arrival >= 0.0 && service >= 0.0,
          "arrival and service must be non-negative");
  state.backlog = std::max(state.backlog - service, 0.0) + arrival;
  state.history.push_back({arrival, service});
  state.backlog_trace.push_back(state.backlog);
  return state;
}

bool is_rate_stable(double service, double arrival) { return service >= arrival; }

double backlog_slope(std::span<const double> trace) {
  require(trace.size() >= 100, "stability check needs at least 100 slots");
  const std::size_t start = trace.size() / 2;
  const auto tail = trace.subspan(start);
  const double n = static_cast<double>(tail.size());
  const double t_mean = (n - 1.0) / 2.0;
  const double q_mean = std::accumulate(tail.begin(), tail.end(), 0.0) / n;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < tail.size(); ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    num += dt * (tail[t] - q_mean);
    den += dt * dt;
  }
  return num / den;
}

bool empirical_stability(std::span<const double> trace, double slope_tol) {
  return backlog_slope(trace) <= slope_tol;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << "t,user,content,V,R,Q\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.slot, r.user, r.content,
                       r.arrival, r.service, r.backlog);
  }
}

}  // namespace uavnet::traffic
