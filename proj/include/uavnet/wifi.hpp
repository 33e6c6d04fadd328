#pragma once

namespace uavnet::wifi {

/// Saturated CSMA/CA cell shared by `stations` WiFi users. Times in seconds,
/// payload in bits, gamma (per-user rate requirement) in bits/s.
struct WifiParams {
  double tau = 0.0;
  int stations = 0;
  double payload_bits = 12000.0;
  double slot_time = 9e-6;
  double t_success = 0.0;
  double t_collision = 0.0;
  double gamma = 4e6;
};

/// 802.11 timing constants used to assemble the RTS/CTS busy periods.
struct Timing80211 {
  double difs = 50e-6;
  double sifs = 16e-6;
  double rts = 352e-6;
  double cts = 304e-6;
  double ack = 304e-6;
  double slot = 9e-6;
  double phy_rate = 54e6;
};

struct BusyTimes {
  double success = 0.0;
  double collision = 0.0;
};

/// T_s = RTS+SIFS+CTS+SIFS+DATA+SIFS+ACK+DIFS, T_c = RTS+DIFS.
BusyTimes rts_cts_busy_times(const Timing80211& timing, double payload_bits);

/// Saturation throughput R(N_w) in bits/s; zero stations give zero.
double saturation_throughput(const WifiParams& params);

/// R_w = R(N_w)(1 - theta)/N_w.
double per_wifi_user_rate(double saturation, double theta, int stations);

/// Largest LTE-U airtime fraction that keeps every WiFi user at gamma,
/// clamped to [0, 1].
double max_duty_fraction(double saturation, double gamma, int stations);

/// Per-station transmission probability from the binary-exponential-backoff
/// fixed point with minimum window `cw_min` and `backoff_stages` doublings.
double bianchi_tau(int cw_min, int backoff_stages, int stations);

struct DutyCycle {
  double theta = 0.0;
  int wifi_slots_per_lte_slot = 1000;
};

}  // namespace uavnet::wifi
