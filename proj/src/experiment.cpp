#include "uavnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "uavnet/cache.hpp"
#include "uavnet/error.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet::sim {

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::uavs: return "uavs";
    case SweepAxis::cache_size: return "cache_size";
    case SweepAxis::theta: return "theta";
    case SweepAxis::fronthaul: return "fronthaul";
    case SweepAxis::users: return "users";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (auto a : {SweepAxis::uavs, SweepAxis::cache_size, SweepAxis::theta,
                 SweepAxis::fronthaul, SweepAxis::users}) {
    if (name == axis_name(a)) return a;
  }
  throw InvalidArgument(fmt::format("unknown sweep axis {}", name));
}

SimConfig apply_axis(SimConfig c, SweepAxis axis, double value) {
  auto as_int = [&] {
    require(value == std::floor(value), fmt::format(
        "axis {} needs integer values, got {}", axis_name(axis), value));
    return static_cast<int>(value);
  };
  switch (axis) {
    case SweepAxis::uavs: c.uavs = as_int(); break;
    case SweepAxis::cache_size: c.cache_size = as_int(); break;
    case SweepAxis::theta: c.theta_override = value; break;
    case SweepAxis::fronthaul: c.channel.bw_fronthaul = value; break;
    case SweepAxis::users: c.users = as_int(); break;
  }
  c.validate();
  return c;
}

double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty set");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CellStats SweepReport::stats(double value, Algorithm algorithm) const {
  std::vector<double> xs;
  for (const auto& c : cells) {
    if (c.value == value && c.algorithm == algorithm) xs.push_back(c.converged);
  }
  CellStats s;
  s.runs = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= xs.size();
  for (double x : xs) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(s.stddev / (xs.size() - 1)) : 0.0;
  s.median = median(xs);
  return s;
}

void SweepReport::write_csv(std::ostream& out) const {
  out << fmt::format("{},algorithm,runs,mean,std,median\n", axis_name(axis));
  for (double v : values) {
    for (auto a : algorithms) {
      const auto s = stats(v, a);
      out << fmt::format("{},{},{},{},{},{}\n", v, algorithm_name(a), s.runs,
                         s.mean, s.stddev, s.median);
    }
  }
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

SweepReport run_sweep(const SimConfig& config, SweepAxis axis,
                      const std::vector<double>& values,
                      const std::vector<Algorithm>& algorithms,
                      const std::vector<std::uint64_t>& seeds, int threads) {
  require(!values.empty() && !algorithms.empty() && !seeds.empty(),
          "sweep needs values, algorithms and seeds");
  SweepReport report;
  report.axis = axis;
  report.values = values;
  report.algorithms = algorithms;
  const int per_job = static_cast<int>(algorithms.size());
  const int jobs = static_cast<int>(values.size() * seeds.size());
  report.cells.resize(jobs * per_job);
  std::vector<SimConfig> configs;
  for (double v : values) configs.push_back(apply_axis(config, axis, v));
  parallel_for(jobs, threads, [&](int j) {
    const int vi = j / static_cast<int>(seeds.size());
    const auto seed = seeds[j % seeds.size()];
    const Scenario sc = build_scenario(configs[vi], seed);
    for (int a = 0; a < per_job; ++a) {
      const auto r = run_episode(sc, algorithms[a]);
      report.cells[j * per_job + a] = {values[vi], algorithms[a], seed, r.converged,
                                       r.convergence_iteration};
    }
  });
  return report;
}

std::vector<CdfPoint> rate_cdf(std::vector<double> rates) {
  std::sort(rates.begin(), rates.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out.push_back({rates[i], (i + 1) / n});
  }
  return out;
}

void write_rate_cdf_csv(std::ostream& out, const std::vector<CdfPoint>& cdf) {
  out << "rate,fraction\n";
  if (cdf.empty()) out << "# no users served\n";
  for (const auto& p : cdf) out << fmt::format("{},{}\n", p.rate, p.fraction);
}

LinkKindRates link_kind_rates(const channel::LinkRates& rates, int uav, int user,
                              int cloud_users) {
  require(cloud_users >= 1, "at least one cloud user");
  const double rl = rates.licensed.at(uav).at(user);
  const double ru = rates.unlicensed.at(uav).at(user);
  const double rc = rates.fronthaul_max.at(uav) / cloud_users;
  using traffic::LinkKind;
  return {traffic::compose_link_rate(LinkKind::a, rl, rc),
          traffic::compose_link_rate(LinkKind::b, ru, rc),
          traffic::compose_link_rate(LinkKind::c, ru, rc),
          traffic::compose_link_rate(LinkKind::d, rl, rc)};
}

allocation::RequirementVectors random_allocation_instance(int users,
                                                          std::uint64_t seed,
                                                          std::uint64_t index) {
  require(users >= 1, "instance needs users");
  Rng rng = make_rng(seed, {index});
  auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, uniform01(rng));
  };
  if (uniform01(rng) < 0.5) {
    constexpr double kBits = 2e6;
    std::vector<allocation::UserDemand> demand;
    for (int i = 0; i < users; ++i) {
      allocation::UserDemand d;
      d.arrival_bits = uniform01(rng) < 0.1 ? 0.0 : kBits;
      d.licensed_rate = kBits * log_uniform(0.5, 20.0);
      d.unlicensed_rate = kBits * log_uniform(0.3, 10.0);
      d.cache_hit = uniform01(rng) < 0.5;
      demand.push_back(d);
    }
    return allocation::requirement_vectors(demand, kBits * log_uniform(1.0, 30.0));
  }
  std::vector<double> u_r;
  std::vector<double> e_r;
  for (int i = 0; i < users; ++i) {
    u_r.push_back(uniform01(rng) * 1.2);
    e_r.push_back(uniform01(rng) < 0.1 ? allocation::kUnreachable
                                       : uniform01(rng) * 1.2);
  }
  return allocation::split_requirements(std::move(u_r), std::move(e_r));
}

namespace {

nlohmann::json finite_or_null(const std::vector<double>& xs) {
  auto arr = nlohmann::json::array();
  for (double x : xs) {
    if (std::isfinite(x)) {
      arr.push_back(x);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

nlohmann::json plan_json(const allocation::AllocationPlan& p) {
  return {{"objective", p.objective},
          {"u", p.u},
          {"e", p.e},
          {"searches", p.searches}};
}

}  // namespace

long AllocVerifyReport::total_mismatches() const {
  long s = 0;
  for (long m : mismatches) s += m;
  return s;
}

double AllocVerifyReport::agreement(allocation::AllocationCase kind) const {
  const auto k = static_cast<std::size_t>(kind);
  if (per_case[k] == 0) return 1.0;
  return 1.0 - static_cast<double>(mismatches[k]) / per_case[k];
}

AllocVerifyReport alloc_verify(long instances, int max_users, std::uint64_t seed) {
  require(max_users >= 1 && max_users <= 12, "max_users must lie in [1, 12]");
  AllocVerifyReport report;
  report.instances = instances;
  Rng size_rng = make_rng(seed, {0xa11});
  for (long t = 0; t < instances; ++t) {
    const int n = 1 + static_cast<int>(uniform01(size_rng) * max_users) % max_users;
    const auto req = random_allocation_instance(n, seed, static_cast<std::uint64_t>(t));
    const auto alg = allocation::algorithm1_allocate(req);
    const auto opt = allocation::allocation_oracle(req);
    const auto k = static_cast<std::size_t>(alg.kind);
    ++report.per_case[k];
    if (alg.objective != opt.objective) {
      ++report.mismatches[k];
      report.counterexamples.push_back(
          {{"instance", t},
           {"users", n},
           {"case", static_cast<int>(alg.kind)},
           {"u_r", finite_or_null(req.u_r)},
           {"e_r", finite_or_null(req.e_r)},
           {"algorithm1", plan_json(alg)},
           {"oracle", plan_json(opt)}});
    }
  }
  return report;
}

std::vector<SearchCountRow> search_count_report(const std::vector<int>& users,
                                                int instances, std::uint64_t seed) {
  require(instances >= 1, "need at least one instance");
  std::vector<SearchCountRow> rows;
  for (int n : users) {
    SearchCountRow row{n, 0.0, 0.0};
    for (int t = 0; t < instances; ++t) {
      const auto req = random_allocation_instance(
          n, seed, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(t));
      row.algorithm1 += allocation::algorithm1_allocate(req).searches;
      row.oracle += allocation::allocation_oracle(req).searches;
    }
    row.algorithm1 /= instances;
    row.oracle /= instances;
    rows.push_back(row);
  }
  return rows;
}

void write_search_count_csv(std::ostream& out, const std::vector<SearchCountRow>& rows) {
  out << "users,algorithm1_searches,oracle_searches\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{}\n", r.users, r.algorithm1, r.oracle);
  }
}

CacheVerifyReport cache_verify(long instances, std::uint64_t seed) {
  CacheVerifyReport report;
  report.instances = instances;
  for (long t = 0; t < instances; ++t) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(t)});
    const int contents = 2 + static_cast<int>(uniform01(rng) * 11);   // 2..12
    const int cache = static_cast<int>(uniform01(rng) * (std::min(4, contents) + 1));
    const int users = 1 + static_cast<int>(uniform01(rng) * 8);       // 1..8
    std::vector<std::vector<double>> pred(users, std::vector<double>(contents));
    std::vector<double> requests(users);
    std::vector<int> served;
    for (int i = 0; i < users; ++i) {
      double sum = 0.0;
      for (auto& p : pred[i]) sum += (p = uniform01(rng));
      for (auto& p : pred[i]) p /= sum;
      requests[i] = 1.0 + std::floor(uniform01(rng) * 100.0);
      served.push_back(i);
    }
    const auto fast = cache::plan_cache(served, pred, requests, cache);
    const auto best = cache::cache_oracle(served, pred, requests, cache);
    if (fast.contents != best.contents) {
      ++report.mismatches;
      report.counterexamples.push_back({{"instance", t},
                                        {"predictions", pred},
                                        {"requests", requests},
                                        {"cache_size", cache},
                                        {"plan", fast.contents},
                                        {"oracle", best.contents}});
    }
  }
  return report;
}

predictor::BenchParams bench_params(const SimConfig& c) {
  predictor::BenchParams b;
  b.trace = trace_params(c);
  b.requests_per_epoch =
      std::max(1, static_cast<int>(std::lround(c.activity * c.epoch_length)));
  b.cache_size = c.cache_size;
  return b;
}

nlohmann::json episode_summary(const EpisodeResult& r) {
  return {{"algorithm", algorithm_name(r.algorithm)},
          {"seed", r.seed},
          {"iterations", r.iterations.size()},
          {"converged_stable", r.converged},
          {"convergence_iteration", r.convergence_iteration},
          {"served_users_tail", r.delivered_rates.size()},
          {"max_delivered_rate", r.delivered_rates.empty()
                                     ? 0.0
                                     : *std::max_element(r.delivered_rates.begin(),
                                                         r.delivered_rates.end())}};
}

}  // namespace uavnet::sim
