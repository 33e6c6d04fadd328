#include "uavnet/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "uavnet/error.hpp"

namespace uavnet {

predictor::PredictorParams SimConfig::lsm_predictor() const {
  predictor::PredictorParams p;
  p.kind = predictor::ModelKind::lsm;
  p.liquid = liquid;
  p.liquid.w1 = predictor_w1;
  p.liquid.w2 = predictor_w2;
  p.liquid.w3 = predictor_w3;
  p.liquid.input_scale = predictor_input_scale;
  p.liquid.synaptic_gain = predictor_synaptic_gain;
  p.steps_per_input = predictor_steps;
  p.delta = predictor_delta;
  return p;
}

predictor::PredictorParams SimConfig::esn_predictor() const {
  predictor::PredictorParams p;
  p.kind = predictor::ModelKind::esn;
  p.esn = esn;
  p.steps_per_input = predictor_steps;
  p.delta = predictor_delta;
  return p;
}

reservoir::LiquidParams SimConfig::agent_liquid() const {
  reservoir::LiquidParams p = liquid;
  p.w1 = agent_w1;
  p.w2 = agent_w2;
  p.w3 = agent_w3;
  p.input_scale = agent_input_scale;
  p.synaptic_gain = agent_synaptic_gain;
  return p;
}

void visit_config(SimConfig& c,
                  const std::function<void(const std::string&, ConfigField)>& fn) {
  fn("network.uavs", &c.uavs);
  fn("network.users", &c.users);
  fn("network.radius", &c.radius);
  fn("network.uav_altitude", &c.uav_altitude);
  fn("network.cloud_x", &c.cloud.x);
  fn("network.cloud_y", &c.cloud.y);
  fn("network.cloud_z", &c.cloud.z);
  fn("network.slot_seconds", &c.slot_seconds);

  auto& ch = c.channel;
  fn("channel.f_licensed", &ch.f_licensed);
  fn("channel.f_unlicensed", &ch.f_unlicensed);
  fn("channel.eta_los_l", &ch.eta_los_l);
  fn("channel.eta_nlos_l", &ch.eta_nlos_l);
  fn("channel.eta_los_u", &ch.eta_los_u);
  fn("channel.eta_nlos_u", &ch.eta_nlos_u);
  fn("channel.X", &ch.los_x);
  fn("channel.Y", &ch.los_y);
  fn("channel.beta", &ch.fronthaul_exponent);
  fn("channel.varsigma_nlos", &ch.fronthaul_nlos_db);
  fn("channel.P_K", &ch.uav_power_dbm);
  fn("channel.P_C", &ch.cloud_power_dbm);
  fn("channel.sigma2", &ch.noise_dbm);
  fn("channel.F_l", &ch.bw_licensed);
  fn("channel.F_u", &ch.bw_unlicensed);
  fn("channel.F_C", &ch.bw_fronthaul);
  fn("channel.cloud_interference_scale", &ch.cloud_interference_scale);

  fn("wifi.N_w", &c.wifi_stations);
  fn("wifi.gamma", &c.wifi_gamma);
  fn("wifi.cw_min", &c.cw_min);
  fn("wifi.backoff_stages", &c.backoff_stages);
  fn("wifi.E_A", &c.wifi_payload_bits);
  fn("wifi.tau_override", &c.tau_override);
  fn("wifi.theta_override", &c.theta_override);
  fn("wifi.DIFS", &c.timing.difs);
  fn("wifi.SIFS", &c.timing.sifs);
  fn("wifi.RTS", &c.timing.rts);
  fn("wifi.CTS", &c.timing.cts);
  fn("wifi.ACK", &c.timing.ack);
  fn("wifi.slot", &c.timing.slot);
  fn("wifi.phy_rate", &c.timing.phy_rate);

  fn("content.N", &c.contents);
  fn("content.L", &c.content_bits);
  fn("content.C", &c.cache_size);
  fn("content.activity", &c.activity);
  fn("content.epoch_length", &c.epoch_length);
  fn("content.clusters", &c.clusters);
  fn("content.zipf_exponent", &c.zipf_exponent);
  fn("content.diurnal_depth", &c.diurnal_depth);
  fn("content.user_jitter", &c.user_jitter);
  fn("content.history_days", &c.history_days);

  auto& lq = c.liquid;
  fn("liquid.S", &lq.resting_mv);
  fn("liquid.Z", &lq.resistance_db);
  fn("liquid.rho", &lq.time_constant_ms);
  fn("liquid.threshold_offset", &lq.threshold_offset_mv);
  fn("liquid.refractory_steps", &lq.refractory_steps);
  fn("liquid.lambda", &lq.lambda);
  fn("liquid.P_IN", &lq.input_probability);
  fn("liquid.c_ee", &lq.c_ee);
  fn("liquid.c_ei", &lq.c_ei);
  fn("liquid.c_ie", &lq.c_ie);
  fn("liquid.c_ii", &lq.c_ii);
  fn("liquid.excitatory_fraction", &lq.excitatory_fraction);
  fn("liquid.spectral_radius", &lq.spectral_radius);

  fn("predictor.W1", &c.predictor_w1);
  fn("predictor.W2", &c.predictor_w2);
  fn("predictor.W3", &c.predictor_w3);
  fn("predictor.input_scale", &c.predictor_input_scale);
  fn("predictor.synaptic_gain", &c.predictor_synaptic_gain);
  fn("predictor.steps_per_input", &c.predictor_steps);
  fn("predictor.delta", &c.predictor_delta);
  fn("predictor.esn_size", &c.esn.size);
  fn("predictor.esn_density", &c.esn.density);
  fn("predictor.esn_spectral_radius", &c.esn.spectral_radius);
  fn("predictor.esn_leak", &c.esn.leak);
  fn("predictor.esn_input_scale", &c.esn.input_scale);

  fn("agent.W1", &c.agent_w1);
  fn("agent.W2", &c.agent_w2);
  fn("agent.W3", &c.agent_w3);
  fn("agent.input_scale", &c.agent_input_scale);
  fn("agent.synaptic_gain", &c.agent_synaptic_gain);
  fn("agent.steps_per_iteration", &c.agent_steps);
  fn("agent.delta_alpha", &c.agent_learning_rate);
  fn("agent.optimistic_init", &c.optimistic_init);
  fn("agent.action_cap", &c.action.cap);
  fn("agent.dominance_factor", &c.action.dominance_factor);
  fn("agent.epsilon_start", &c.epsilon_start);
  fn("agent.epsilon_end", &c.epsilon_end);
  fn("agent.epsilon_decay_fraction", &c.epsilon_decay_fraction);
  fn("agent.q_alpha", &c.q_alpha);
  fn("agent.q_discount", &c.q_discount);
  fn("agent.q_capacity", &c.q_capacity);
  fn("agent.q_levels", &c.q_levels);

  fn("run.iterations", &c.iterations);
  fn("run.convergence_window", &c.convergence_window);
  fn("run.convergence_band", &c.convergence_band);
}

namespace {

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvalidArgument(fmt::format("invalid {}: {}", field, what));
}

}  // namespace

void SimConfig::validate() const {
  check(uavs >= 1, "network.uavs", "must be at least 1");
  check(users >= 1, "network.users", "must be at least 1");
  check(radius > 0.0, "network.radius", "must be positive");
  check(uav_altitude > 0.0, "network.uav_altitude", "must be positive");
  check(cloud.z >= 0.0, "network.cloud_z", "must be non-negative");
  check(slot_seconds > 0.0, "network.slot_seconds", "must be positive");

  check(channel.f_licensed > 0.0, "channel.f_licensed", "must be positive");
  check(channel.f_unlicensed > 0.0, "channel.f_unlicensed", "must be positive");
  check(channel.eta_nlos_l > channel.eta_los_l, "channel.eta_nlos_l",
        "must exceed eta_los_l");
  check(channel.eta_nlos_u > channel.eta_los_u, "channel.eta_nlos_u",
        "must exceed eta_los_u");
  check(channel.los_x > 0.0, "channel.X", "must be positive");
  check(channel.los_y > 0.0, "channel.Y", "must be positive");
  check(channel.fronthaul_exponent > 0.0, "channel.beta", "must be positive");
  check(channel.fronthaul_nlos_db >= 0.0, "channel.varsigma_nlos",
        "must be non-negative");
  check(channel.bw_licensed > 0.0, "channel.F_l", "must be positive");
  check(channel.bw_unlicensed > 0.0, "channel.F_u", "must be positive");
  check(channel.bw_fronthaul > 0.0, "channel.F_C", "must be positive");
  check(channel.cloud_interference_scale >= 0.0,
        "channel.cloud_interference_scale", "must be non-negative");

  check(wifi_stations >= 0, "wifi.N_w", "must be non-negative");
  check(wifi_gamma >= 0.0, "wifi.gamma", "must be non-negative");
  check(cw_min >= 2, "wifi.cw_min", "must be at least 2");
  check(backoff_stages >= 0, "wifi.backoff_stages", "must be non-negative");
  check(wifi_payload_bits > 0.0, "wifi.E_A", "must be positive");
  check(tau_override < 1.0, "wifi.tau_override", "must be below 1");
  check(theta_override <= 1.0, "wifi.theta_override", "must not exceed 1");
  for (auto [v, name] : {std::pair{timing.difs, "wifi.DIFS"},
                         {timing.sifs, "wifi.SIFS"}, {timing.rts, "wifi.RTS"},
                         {timing.cts, "wifi.CTS"}, {timing.ack, "wifi.ACK"},
                         {timing.slot, "wifi.slot"},
                         {timing.phy_rate, "wifi.phy_rate"}}) {
    check(v > 0.0, name, "must be positive");
  }

  check(contents >= 1, "content.N", "must be at least 1");
  check(content_bits > 0.0, "content.L", "must be positive");
  check(cache_size >= 0 && cache_size <= contents, "content.C",
        "must lie in [0, N]");
  check(activity >= 0.0 && activity <= 1.0, "content.activity",
        "must lie in [0, 1]");
  check(epoch_length >= 1, "content.epoch_length", "must be at least 1");
  check(clusters >= 1 && clusters <= users, "content.clusters",
        "must lie in [1, users]");
  check(zipf_exponent >= 0.0, "content.zipf_exponent", "must be non-negative");
  check(diurnal_depth >= 0.0 && diurnal_depth < 1.0, "content.diurnal_depth",
        "must lie in [0, 1)");
  check(user_jitter >= 0.0, "content.user_jitter", "must be non-negative");
  check(history_days >= 1, "content.history_days", "must be at least 1");

  try {
    liquid.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(fmt::format("invalid liquid: {}", e.what()));
  }
  check(predictor_w1 > 0 && predictor_w2 > 0 && predictor_w3 > 0,
        "predictor.W1", "dimensions must be positive");
  check(predictor_steps >= 1, "predictor.steps_per_input", "must be at least 1");
  check(predictor_delta >= 0.0, "predictor.delta", "must be non-negative");
  check(esn.size >= 1, "predictor.esn_size", "must be positive");
  check(esn.density > 0.0 && esn.density <= 1.0, "predictor.esn_density",
        "must lie in (0, 1]");
  check(esn.spectral_radius >= 0.0 && esn.spectral_radius < 1.0,
        "predictor.esn_spectral_radius", "must lie in [0, 1)");
  check(esn.leak > 0.0 && esn.leak <= 1.0, "predictor.esn_leak",
        "must lie in (0, 1]");

  check(agent_w1 > 0 && agent_w2 > 0 && agent_w3 > 0, "agent.W1",
        "dimensions must be positive");
  check(agent_steps >= 1, "agent.steps_per_iteration", "must be at least 1");
  check(agent_learning_rate >= 0.0, "agent.delta_alpha", "must be non-negative");
  check(action.cap >= 0 && action.cap <= 12, "agent.action_cap",
        "must lie in [0, 12]");
  check(action.dominance_factor > 0.0, "agent.dominance_factor",
        "must be positive");
  check(epsilon_start >= 0.0 && epsilon_start <= 1.0, "agent.epsilon_start",
        "must lie in [0, 1]");
  check(epsilon_end >= 0.0 && epsilon_end <= 1.0, "agent.epsilon_end",
        "must lie in [0, 1]");
  check(epsilon_decay_fraction >= 0.0 && epsilon_decay_fraction <= 1.0,
        "agent.epsilon_decay_fraction", "must lie in [0, 1]");
  check(q_alpha >= 0.0 && q_alpha <= 1.0, "agent.q_alpha", "must lie in [0, 1]");
  check(q_discount >= 0.0 && q_discount < 1.0, "agent.q_discount",
        "must lie in [0, 1)");
  check(q_capacity >= 1, "agent.q_capacity", "must be at least 1");
  check(q_levels >= 2, "agent.q_levels", "must be at least 2");

  check(iterations >= 1, "run.iterations", "must be at least 1");
  check(convergence_window >= 1, "run.convergence_window", "must be at least 1");
  check(convergence_band > 0.0, "run.convergence_band", "must be positive");
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument(fmt::format("invalid {}: cannot parse '{}'", key, text));
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(SimConfig& config, const std::string& key,
                      const std::string& raw) {
  const std::string value = trim(raw);
  bool found = false;
  visit_config(config, [&](const std::string& name, ConfigField field) {
    if (name != key) return;
    found = true;
    if (auto* i = std::get_if<int*>(&field)) {
      **i = parse_number<int>(key, value);
    } else if (auto* d = std::get_if<double*>(&field)) {
      **d = parse_number<double>(key, value);
    } else if (auto* b = std::get_if<bool*>(&field)) {
      if (value == "true" || value == "1") {
        **b = true;
      } else if (value == "false" || value == "0") {
        **b = false;
      } else {
        throw InvalidArgument(fmt::format("invalid {}: expected a boolean", key));
      }
    }
  });
  if (!found) throw InvalidArgument(fmt::format("unknown config key {}", key));
}

SimConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(fmt::format("config parse error: {}", e.message()));
  }
  SimConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw InvalidArgument(
          fmt::format("config key {} must belong to a section", section));
    }
    for (const auto& [key, node] : body) {
      set_config_value(config, section + "." + key, node.get_value<std::string>());
    }
  }
  config.validate();
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open config file {}", path));
  return parse_config(in);
}

void write_config(std::ostream& out, const SimConfig& config) {
  SimConfig copy = config;
  std::string section;
  visit_config(copy, [&](const std::string& name, ConfigField field) {
    const auto dot = name.find('.');
    const std::string sec = name.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    out << name.substr(dot + 1) << " = ";
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, double>) {
            out << fmt::format("{:.17g}", *p);
          } else if constexpr (std::is_same_v<T, bool>) {
            out << (*p ? "true" : "false");
          } else {
            out << *p;
          }
        },
        field);
    out << '\n';
  });
}

}  // namespace uavnet
