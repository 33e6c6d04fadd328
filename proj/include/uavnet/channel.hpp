#pragma once

#include <vector>

namespace uavnet {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

namespace channel {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Radio parameters shared by the air-to-ground, cloud-to-user and fronthaul
/// links. Powers are in dBm, attenuations in dB, bandwidths and carriers in Hz.
struct ChannelParams {
  double f_licensed = 2.0e9;
  double f_unlicensed = 5.18e9;
  double eta_los_l = 1.0;
  double eta_nlos_l = 20.0;
  double eta_los_u = 1.2;
  double eta_nlos_u = 23.0;
  double los_x = 11.9;
  double los_y = 0.13;
  double fronthaul_exponent = 2.0;
  double fronthaul_nlos_db = 20.0;
  double uav_power_dbm = 15.0;
  double cloud_power_dbm = 20.0;
  double noise_dbm = -94.0;
  double bw_licensed = 10.0e6;
  double bw_unlicensed = 20.0e6;
  double bw_fronthaul = 100.0e6;
  // Multiplies the cloud-to-user free-space gain h_i.
  double cloud_interference_scale = 1.0;

  void validate() const;
};

/// Node placement. UAVs are airborne, users sit on the ground (z = 0).
struct Geometry {
  std::vector<Vec3> uavs;
  std::vector<Vec3> users;
  Vec3 cloud;

  void validate() const;
};

/// Elevation angle in degrees seen from a ground node at 3D distance `d`
/// from a node `height` meters above it.
double elevation_deg(double height, double d);

/// Logistic LoS probability; phi_deg must lie in (0, 90].
double los_probability(double phi_deg, double x, double y);

double free_space_pathloss_db(double d, double f);

/// Mean of the LoS and NLoS air-to-ground losses weighted by p_los, in dB.
double average_air_ground_pathloss(double d, double f, double eta_los,
                                   double eta_nlos, double p_los);

/// Linear cloud-to-UAV gain: p_los * d^-beta + (1 - p_los) * d^-beta / nlos.
double fronthaul_pathloss(double d, double beta, double varsigma_nlos_db,
                          double p_los);

/// Received powers (mW) entering a rate expression.
struct LinkBudget {
  double signal_mw = 0.0;
  double interference_mw = 0.0;
  double noise_mw = 0.0;

  double sinr() const;
};

double licensed_rate(double u, double bandwidth_hz, const LinkBudget& budget);
double unlicensed_rate(double e, double theta, double bandwidth_hz,
                       const LinkBudget& budget);
/// Per-user fronthaul rate when `cloud_users` share the fronthaul band.
double fronthaul_rate(int cloud_users, double bandwidth_hz,
                      const LinkBudget& budget);

/// Full-allocation rates in bits/s, indexed [uav][user] / [uav].
struct LinkRates {
  std::vector<std::vector<double>> licensed;
  std::vector<std::vector<double>> unlicensed;
  std::vector<double> fronthaul_max;

  int uav_count() const { return static_cast<int>(licensed.size()); }
  int user_count() const {
    return licensed.empty() ? 0 : static_cast<int>(licensed.front().size());
  }
};

/// Per-link budgets at full allocation, before bandwidth and duty factors.
struct LinkBudgets {
  std::vector<std::vector<LinkBudget>> licensed;
  std::vector<std::vector<LinkBudget>> unlicensed;
  std::vector<LinkBudget> fronthaul;
};

LinkBudgets link_budgets(const Geometry& geo, const ChannelParams& params);

/// Rates of every UAV-user pair at u = 1 / e = 1 and the fronthaul rate of
/// every UAV at U_C = 1. `theta` is the LTE-U airtime fraction.
LinkRates compute_link_rates(const Geometry& geo, const ChannelParams& params,
                             double theta);

}  // namespace channel
}  // namespace uavnet
