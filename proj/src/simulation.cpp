#include "uavnet/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "uavnet/agents.hpp"
#include "uavnet/error.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/units.hpp"
#include "uavnet/wifi.hpp"

namespace uavnet::sim {

channel::Geometry place_nodes(const SimConfig& config, std::uint64_t seed) {
  // Separate streams so a UAV-count sweep keeps the users and the first
  // UAVs in place.
  Rng uav_rng = make_rng(seed, {stream::kTopology, 0});
  Rng user_rng = make_rng(seed, {stream::kTopology, 1});
  auto in_disk = [&](Rng& rng, double z) {
    const double r = config.radius * std::sqrt(uniform01(rng));
    const double phi = 2.0 * kPi * uniform01(rng);
    return Vec3{r * std::cos(phi), r * std::sin(phi), z};
  };
  channel::Geometry g;
  for (int k = 0; k < config.uavs; ++k) g.uavs.push_back(in_disk(uav_rng, config.uav_altitude));
  for (int i = 0; i < config.users; ++i) g.users.push_back(in_disk(user_rng, 0.0));
  g.cloud = config.cloud;
  return g;
}

WifiState wifi_state(const SimConfig& c) {
  WifiState s;
  if (c.wifi_stations == 0) {
    s.theta = c.theta_override >= 0.0 ? c.theta_override : 1.0;
    return s;
  }
  s.tau = c.tau_override > 0.0
              ? c.tau_override
              : wifi::bianchi_tau(c.cw_min, c.backoff_stages, c.wifi_stations);
  const auto busy = wifi::rts_cts_busy_times(c.timing, c.wifi_payload_bits);
  wifi::WifiParams p;
  p.tau = s.tau;
  p.stations = c.wifi_stations;
  p.payload_bits = c.wifi_payload_bits;
  p.slot_time = c.timing.slot;
  p.t_success = busy.success;
  p.t_collision = busy.collision;
  p.gamma = c.wifi_gamma;
  s.saturation = wifi::saturation_throughput(p);
  s.theta = c.theta_override >= 0.0
                ? c.theta_override
                : wifi::max_duty_fraction(s.saturation, c.wifi_gamma, c.wifi_stations);
  return s;
}

traffic::TraceParams trace_params(const SimConfig& c) {
  traffic::TraceParams tp;
  tp.users = c.users;
  tp.contents = c.contents;
  tp.clusters = c.clusters;
  tp.zipf_exponent = c.zipf_exponent;
  tp.diurnal_depth = c.diurnal_depth;
  tp.user_jitter = c.user_jitter;
  tp.hours = 24;
  return tp;
}

int Scenario::input_width() const {
  return (uav_count() - 1) * max_actions() + config.action.cap;
}

Scenario build_scenario(const SimConfig& config, std::uint64_t seed,
                        bool with_predictor) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.seed = seed;
  sc.geometry = place_nodes(config, seed);
  sc.wifi = wifi_state(config);
  sc.rates = channel::compute_link_rates(sc.geometry, config.channel, sc.wifi.theta);
  for (auto& row : sc.rates.licensed) for (auto& r : row) r *= config.slot_seconds;
  for (auto& row : sc.rates.unlicensed) for (auto& r : row) r *= config.slot_seconds;
  for (auto& r : sc.rates.fronthaul_max) r *= config.slot_seconds;
  for (int k = 0; k < config.uavs; ++k) {
    sc.spaces.push_back(allocation::build_action_space(k, sc.rates,
                                                       config.content_bits,
                                                       config.action));
  }

  const traffic::TraceParams tp = trace_params(config);
  sc.trace = std::make_shared<traffic::SyntheticTrace>(tp, seed);
  sc.expected_requests.assign(config.users, config.activity * config.epoch_length);

  sc.predictions.assign(tp.hours, std::vector<std::vector<double>>(config.users));
  if (!with_predictor) {
    for (int h = 0; h < tp.hours; ++h) {
      for (int i = 0; i < config.users; ++i) {
        const auto p = sc.trace->distribution(i, h);
        sc.predictions[h][i].assign(p.begin(), p.end());
      }
    }
    return sc;
  }
  const predictor::ContextEncoder encoder{tp.hours};
  const int epochs = config.history_days * tp.hours;
  const int per_epoch = std::max(
      1, static_cast<int>(std::lround(config.activity * config.epoch_length)));
  for (int i = 0; i < config.users; ++i) {
    predictor::RequestPredictor model(
        config.lsm_predictor(), encoder.width(), config.contents,
        derive_seed(seed, {stream::kPredictor, 0, std::uint64_t(i)}));
    std::vector<Eigen::VectorXd> feats;
    for (int h = 0; h < tp.hours; ++h) {
      feats.push_back(model.features(encoder.encode(sc.trace->context(i), h)));
    }
    Eigen::MatrixXd x(feats[0].size(), epochs);
    Eigen::MatrixXd y(config.contents, epochs);
    for (int e = 0; e < epochs; ++e) {
      x.col(e) = feats[e % tp.hours];
      const auto hist = sc.trace->epoch_histogram(i, e, per_epoch, seed);
      for (int n = 0; n < config.contents; ++n) y(n, e) = hist[n];
    }
    model.train_features(x, y);
    for (int h = 0; h < tp.hours; ++h) {
      sc.predictions[h][i] =
          predictor::normalize_prediction(model.readout().predict(feats[h]));
    }
  }
  return sc;
}

int JointOutcome::total_stable() const {
  int s = 0;
  for (int c : stable_per_uav) s += c;
  return s;
}

std::vector<int> resolve_association(const Scenario& sc,
                                     const std::vector<int>& actions) {
  require(static_cast<int>(actions.size()) == sc.uav_count(),
          "one action per UAV is required");
  std::vector<int> assoc(sc.user_count(), -1);
  auto direct = [&](int k, int i) {
    return std::max(sc.rates.licensed[k][i], sc.rates.unlicensed[k][i]);
  };
  for (int k = 0; k < sc.uav_count(); ++k) {
    for (int i : sc.spaces[k].users_of(actions[k])) {
      if (assoc[i] < 0 || direct(k, i) > direct(assoc[i], i)) assoc[i] = k;
    }
  }
  return assoc;
}

JointOutcome evaluate_joint_action(const Scenario& sc,
                                   const std::vector<int>& actions,
                                   const std::vector<traffic::Request>& requests,
                                   int hour, bool caching) {
  const int K = sc.uav_count();
  const int U = sc.user_count();
  require(static_cast<int>(requests.size()) == U, "one request per user is required");
  JointOutcome out;
  out.association = resolve_association(sc, actions);
  out.served.assign(K, {});
  for (int i = 0; i < U; ++i) {
    if (out.association[i] >= 0) out.served[out.association[i]].push_back(i);
  }
  const auto& pred = sc.predictions.at(hour % sc.predictions.size());
  out.caches.resize(K);
  for (int k = 0; k < K; ++k) {
    if (caching) {
      out.caches[k] = cache::plan_cache(out.served[k], pred, sc.expected_requests,
                                        sc.config.cache_size);
    }
  }
  out.cache_hit.assign(U, false);
  for (int k = 0; k < K; ++k) {
    const auto& cached = out.caches[k].contents;
    for (int i : out.served[k]) {
      if (requests[i].content < 0 || requests[i].bits <= 0.0) continue;
      ++out.requests;
      if (std::binary_search(cached.begin(), cached.end(), requests[i].content)) {
        out.cache_hit[i] = true;
        ++out.hits;
      } else {
        ++out.cloud_users;
      }
    }
  }

  out.stable.assign(U, false);
  out.delivered.assign(U, 0.0);
  out.stable_per_uav.assign(K, 0);
  out.plans.resize(K);
  for (int k = 0; k < K; ++k) {
    const double rc = sc.rates.fronthaul_max[k] / std::max(out.cloud_users, 1);
    std::vector<allocation::UserDemand> demand;
    for (int i : out.served[k]) {
      demand.push_back({requests[i].bits, sc.rates.licensed[k][i],
                        sc.rates.unlicensed[k][i],
                        out.cache_hit[i] || requests[i].bits <= 0.0});
    }
    const auto req = allocation::requirement_vectors(demand, rc);
    out.plans[k] = allocation::algorithm1_allocate(req);
    const auto& plan = out.plans[k];
    out.stable_per_uav[k] = plan.objective;
    for (std::size_t j = 0; j < out.served[k].size(); ++j) {
      const int i = out.served[k][j];
      out.stable[i] = plan.stable[j];
      const bool hit = demand[j].cache_hit;
      if (plan.u[j] > 0.0) {
        const double r = plan.u[j] * sc.rates.licensed[k][i];
        out.delivered[i] = traffic::compose_link_rate(
            hit ? traffic::LinkKind::a : traffic::LinkKind::d, r, rc);
      } else if (plan.e[j] > 0.0) {
        const double r = plan.e[j] * sc.rates.unlicensed[k][i];
        out.delivered[i] = traffic::compose_link_rate(
            hit ? traffic::LinkKind::b : traffic::LinkKind::c, r, rc);
      }
    }
  }
  return out;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::lsm: return "lsm";
    case Algorithm::q_cache: return "q_cache";
    case Algorithm::q_nocache: return "q_nocache";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "lsm") return Algorithm::lsm;
  if (name == "q_cache") return Algorithm::q_cache;
  if (name == "q_nocache") return Algorithm::q_nocache;
  throw InvalidArgument(fmt::format("unknown algorithm {}", name));
}

int settling_iteration(const std::vector<double>& trace, int window, double band) {
  require(window >= 1, "window must be positive");
  const int n = static_cast<int>(trace.size());
  if (n < window) return n;
  std::vector<double> running(n, 0.0);
  double sum = 0.0;
  for (int t = 0; t < n; ++t) {
    sum += trace[t];
    if (t >= window) sum -= trace[t - window];
    running[t] = sum / window;
  }
  const double final_value = running[n - 1];
  int settle = window - 1;
  for (int t = n - 1; t >= window - 1; --t) {
    if (std::abs(running[t] - final_value) > band) {
      settle = t + 1;
      break;
    }
  }
  return settle;
}

EpisodeResult run_episode(const Scenario& sc, Algorithm algorithm) {
  const auto& cfg = sc.config;
  const int K = sc.uav_count();
  const int U = sc.user_count();
  const int amax = sc.max_actions();
  const int T = cfg.iterations;
  const bool caching = algorithm != Algorithm::q_nocache;
  const std::uint64_t tag = static_cast<std::uint64_t>(algorithm);

  std::vector<std::vector<double>> prior(K);
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < sc.spaces[k].actions(); ++a) {
      prior[k].push_back(std::popcount(static_cast<unsigned>(a)));
    }
  }
  std::vector<agents::LsmAgent> lsm;
  std::vector<agents::QAgent> qa;
  if (algorithm == Algorithm::lsm) {
    agents::LsmAgentParams p;
    p.liquid = cfg.agent_liquid();
    p.steps_per_iteration = cfg.agent_steps;
    p.learning_rate = cfg.agent_learning_rate;
    p.optimistic_init = cfg.optimistic_init;
    for (int k = 0; k < K; ++k) {
      lsm.emplace_back(p, sc.input_width(), prior[k],
                       derive_seed(sc.seed, {stream::kAgents, std::uint64_t(k)}));
    }
  } else {
    agents::QAgentParams p;
    p.alpha = cfg.q_alpha;
    p.discount = cfg.q_discount;
    p.capacity = static_cast<std::size_t>(cfg.q_capacity);
    p.optimistic_init = cfg.optimistic_init;
    for (int k = 0; k < K; ++k) qa.emplace_back(p, prior[k]);
  }
  std::vector<Rng> explore;
  for (int k = 0; k < K; ++k) {
    explore.push_back(make_rng(sc.seed, {stream::kExploration, tag, std::uint64_t(k)}));
  }

  std::vector<std::vector<double>> pi(K);
  for (int k = 0; k < K; ++k) {
    pi[k].assign(sc.spaces[k].actions(), 1.0 / sc.spaces[k].actions());
  }
  std::vector<std::uint64_t> prev_state(K, 0);
  std::vector<int> prev_action(K, 0);
  std::vector<double> prev_reward(K, 0.0);

  traffic::ContentCatalog catalog{cfg.contents, cfg.content_bits};
  std::vector<traffic::QueueState> queues(U);
  EpisodeResult result;
  result.algorithm = algorithm;
  result.seed = sc.seed;
  const int tail_start = T - std::max(1, T / 10);
  std::vector<double> rate_sum(U, 0.0);
  std::vector<int> rate_count(U, 0);
  traffic::RequestProfile profile;
  int profile_hour = -1;

  for (int t = 0; t < T; ++t) {
    const int hour = (t / cfg.epoch_length) % 24;
    if (hour != profile_hour) {
      profile = sc.trace->profile(hour, cfg.activity, cfg.epoch_length);
      profile_hour = hour;
    }
    const double eps = agents::epsilon_schedule(
        cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_fraction, t, T);
    const auto requests = traffic::generate_requests(profile, catalog, sc.seed, t);

    std::vector<int> actions(K, 0);
    std::vector<std::vector<double>> next_pi(K);
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(sc.input_width());
      int offset = 0;
      for (int j = 0; j < K; ++j) {
        if (j == k) continue;
        for (std::size_t a = 0; a < pi[j].size(); ++a) m[offset + a] = pi[j][a];
        offset += amax;
      }
      const auto& cands = sc.spaces[k].candidates;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        m[offset + c] = requests[cands[c]].bits / cfg.content_bits;
      }
      const int na = sc.spaces[k].actions();
      int greedy = 0;
      if (algorithm == Algorithm::lsm) {
        lsm[k].observe(m);
        greedy = agents::argmax_lowest(lsm[k].estimates());
      } else {
        const auto s = agents::discretize_state(m, (K - 1) * amax, cfg.q_levels);
        if (t > 0) qa[k].update(prev_state[k], prev_action[k], prev_reward[k], s);
        greedy = qa[k].greedy(s);
        prev_state[k] = s;
      }
      actions[k] = agents::epsilon_greedy_select(greedy, na, eps, explore[k]);
      next_pi[k] = agents::epsilon_greedy_policy(na, greedy, eps);
    }

    const auto out = evaluate_joint_action(sc, actions, requests, hour, caching);
    for (int k = 0; k < K; ++k) {
      const double r = out.stable_per_uav[k];
      if (algorithm == Algorithm::lsm) {
        lsm[k].learn(actions[k], r);
      } else {
        prev_action[k] = actions[k];
        prev_reward[k] = r;
      }
    }
    pi = std::move(next_pi);

    for (int i = 0; i < U; ++i) {
      queues[i].backlog =
          std::max(queues[i].backlog - out.delivered[i], 0.0) + requests[i].bits;
      if (t >= tail_start && out.association[i] >= 0 && out.delivered[i] > 0.0) {
        rate_sum[i] += out.delivered[i];
        ++rate_count[i];
      }
    }

    IterationRecord rec;
    rec.iteration = t;
    rec.stable = out.total_stable();
    rec.actions = actions;
    rec.hit_ratio = out.requests > 0 ? double(out.hits) / out.requests : 0.0;
    rec.cloud_users = out.cloud_users;
    rec.epsilon = eps;
    result.iterations.push_back(std::move(rec));
  }

  std::vector<double> trace;
  double tail = 0.0;
  for (const auto& r : result.iterations) trace.push_back(r.stable);
  for (int t = tail_start; t < T; ++t) tail += trace[t];
  result.converged = tail / (T - tail_start);
  result.convergence_iteration =
      settling_iteration(trace, cfg.convergence_window, cfg.convergence_band);
  for (int i = 0; i < U; ++i) {
    if (rate_count[i] > 0) {
      result.delivered_rates.push_back(rate_sum[i] / rate_count[i] / cfg.slot_seconds);
    }
    result.final_backlog.push_back(queues[i].backlog);
  }
  return result;
}

void write_iterations_csv(std::ostream& out, const EpisodeResult& r, bool header) {
  if (header) {
    out << "iteration,algorithm,seed,stable_count,actions,cache_hit_ratio,"
           "cloud_users,epsilon\n";
  }
  for (const auto& it : r.iterations) {
    std::string acts;
    for (std::size_t k = 0; k < it.actions.size(); ++k) {
      acts += (k ? ";" : "") + std::to_string(it.actions[k]);
    }
    out << fmt::format("{},{},{},{},{},{},{},{}\n", it.iteration,
                       algorithm_name(r.algorithm), r.seed, it.stable, acts,
                       it.hit_ratio, it.cloud_users, it.epsilon);
  }
}

}  // namespace uavnet::sim
