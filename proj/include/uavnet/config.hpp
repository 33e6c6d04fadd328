#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>

#include "uavnet/allocation.hpp"
#include "uavnet/channel.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/reservoir.hpp"
#include "uavnet/traffic.hpp"
#include "uavnet/wifi.hpp"

namespace uavnet {

/// Every tunable of a simulation run. Defaults give the standard 20-user,
/// 5-UAV scenario.
struct SimConfig {
  // network
  int uavs = 5;
  int users = 20;
  double radius = 200.0;
  double uav_altitude = 50.0;
  Vec3 cloud{2000.0, 0.0, 30.0};
  double slot_seconds = 1.0;

  channel::ChannelParams channel{};

  // wifi
  int wifi_stations = 2;
  double wifi_gamma = 4e6;
  int cw_min = 32;
  int backoff_stages = 5;
  double wifi_payload_bits = 12000.0;
  double tau_override = 0.0;     // > 0 pins tau instead of the fixed point
  double theta_override = -1.0;  // >= 0 pins the duty fraction
  wifi::Timing80211 timing{};

  // content and traffic
  int contents = 25;
  double content_bits = 2e6;
  int cache_size = 3;
  double activity = 1.0;
  int epoch_length = 100;
  int clusters = 2;
  double zipf_exponent = 1.0;
  double diurnal_depth = 0.4;
  double user_jitter = 0.1;
  int history_days = 7;

  // liquid neuron and connectivity constants shared by every reservoir
  reservoir::LiquidParams liquid{};

  // request predictor
  int predictor_w1 = 5;
  int predictor_w2 = 5;
  int predictor_w3 = 20;
  double predictor_input_scale = 1.0;
  double predictor_synaptic_gain = 1.0;
  int predictor_steps = 20;
  double predictor_delta = 0.1;
  esn::EsnParams esn{.size = 500, .density = 0.05, .spectral_radius = 0.9,
                     .leak = 0.3, .input_scale = 0.1};

  // learning agents
  int agent_w1 = 5;
  int agent_w2 = 5;
  int agent_w3 = 30;
  double agent_input_scale = 10.0;
  double agent_synaptic_gain = 10.0;
  int agent_steps = 20;
  double agent_learning_rate = 0.05;
  bool optimistic_init = true;
  allocation::ActionSpaceParams action{};
  double epsilon_start = 0.1;
  double epsilon_end = 0.01;
  double epsilon_decay_fraction = 0.6;
  double q_alpha = 0.5;
  double q_discount = 0.5;
  int q_capacity = 100000;
  int q_levels = 4;

  // run
  int iterations = 1000;
  int convergence_window = 50;
  double convergence_band = 0.5;

  void validate() const;

  predictor::PredictorParams lsm_predictor() const;
  predictor::PredictorParams esn_predictor() const;
  reservoir::LiquidParams agent_liquid() const;
};

using ConfigField = std::variant<int*, double*, bool*>;

/// Calls `fn("section.key", field)` for every configurable field in a fixed
/// order.
void visit_config(SimConfig& config,
                  const std::function<void(const std::string&, ConfigField)>& fn);

/// Applies an INI document on top of the defaults. Unknown sections or keys
/// and unparsable values are rejected with the offending name.
SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::string& path);
/// Effective configuration as INI; doubles printed with 17 significant
/// digits so reloading is bit-exact.
void write_config(std::ostream& out, const SimConfig& config);
/// Sets one "section.key" from text.
void set_config_value(SimConfig& config, const std::string& key,
                      const std::string& value);

}  // namespace uavnet
