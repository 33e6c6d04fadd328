#include "uavnet/channel.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "uavnet/error.hpp"
#include "uavnet/units.hpp"

namespace uavnet {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace channel {

void ChannelParams::validate() const {
  require(f_licensed > 0.0, "f_licensed must be positive");
  require(f_unlicensed > 0.0, "f_unlicensed must be positive");
  require(bw_licensed > 0.0, "F_l must be positive");
  require(bw_unlicensed > 0.0, "F_u must be positive");
  require(bw_fronthaul > 0.0, "F_C must be positive");
  require(eta_nlos_l > eta_los_l, "eta_nlos_l must exceed eta_los_l");
  require(eta_nlos_u > eta_los_u, "eta_nlos_u must exceed eta_los_u");
  require(fronthaul_exponent > 0.0, "fronthaul_exponent must be positive");
  require(fronthaul_nlos_db >= 0.0, "fronthaul_nlos_db must be non-negative");
  require(cloud_interference_scale >= 0.0,
          "cloud_interference_scale must be non-negative");
}

void Geometry::validate() const {
  for (const auto& u : uavs) require(u.z > 0.0, "UAV altitude must be positive");
  for (const auto& u : users) require(u.z == 0.0, "users must be on the ground");
}

double elevation_deg(double height, double d) {
  require(d > 0.0 && height > 0.0 && height <= d * (1.0 + 1e-12),
          "elevation needs 0 < height <= distance");
  const double ratio = std::min(1.0, height / d);
  return std::asin(ratio) * 180.0 / kPi;
}

double los_probability(double phi_deg, double x, double y) {
  if (!(phi_deg > 0.0 && phi_deg <= 90.0)) {
    throw InvalidArgument(
        fmt::format("elevation angle {} outside (0, 90] degrees", phi_deg));
  }
  return 1.0 / (1.0 + x * std::exp(-y * (phi_deg - x)));
}

double free_space_pathloss_db(double d, double f) {
  require(d > 0.0, "distance must be positive");
  require(f > 0.0, "carrier frequency must be positive");
  return 20.0 * std::log10(4.0 * kPi * d * f / kSpeedOfLight);
}

double average_air_ground_pathloss(double d, double f, double eta_los,
                                   double eta_nlos, double p_los) {
  require(p_los >= 0.0 && p_los <= 1.0, "p_los must lie in [0, 1]");
  const double fspl = free_space_pathloss_db(d, f);
  return p_los * (fspl + eta_los) + (1.0 - p_los) * (fspl + eta_nlos);
}

double fronthaul_pathloss(double d, double beta, double varsigma_nlos_db,
                          double p_los) {
  // Below one meter the power law would exceed unit gain.
  require(d >= 1.0, "fronthaul distance must be at least 1 m");
  require(beta > 0.0, "fronthaul exponent must be positive");
  require(p_los >= 0.0 && p_los <= 1.0, "p_los must lie in [0, 1]");
  const double los = std::pow(d, -beta);
  return p_los * los + (1.0 - p_los) * los * loss_db_to_gain(varsigma_nlos_db);
}

double LinkBudget::sinr() const {
  const double denom = interference_mw + noise_mw;
  if (signal_mw <= 0.0) return 0.0;
  require(denom > 0.0, "SINR needs positive interference plus noise");
  return signal_mw / denom;
}

double licensed_rate(double u, double bandwidth_hz, const LinkBudget& budget) {
  require(u >= 0.0 && u <= 1.0, "licensed fraction must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  return u * bandwidth_hz * std::log2(1.0 + budget.sinr());
}

double unlicensed_rate(double e, double theta, double bandwidth_hz,
                       const LinkBudget& budget) {
  require(e >= 0.0 && e <= 1.0, "unlicensed fraction must lie in [0, 1]");
  require(theta >= 0.0 && theta <= 1.0, "duty fraction must lie in [0, 1]");
  if (e == 0.0 || theta == 0.0) return 0.0;
  return e * theta * bandwidth_hz * std::log2(1.0 + budget.sinr());
}

double fronthaul_rate(int cloud_users, double bandwidth_hz,
                      const LinkBudget& budget) {
  require(cloud_users >= 1, "fronthaul rate needs at least one cloud user");
  return bandwidth_hz / cloud_users * std::log2(1.0 + budget.sinr());
}

namespace {

double air_ground_loss(const Vec3& uav, const Vec3& user, double f,
                       double eta_los, double eta_nlos,
                       const ChannelParams& p) {
  const double d = distance(uav, user);
  const double p_los = los_probability(elevation_deg(uav.z - user.z, d),
                                       p.los_x, p.los_y);
  return average_air_ground_pathloss(d, f, eta_los, eta_nlos, p_los);
}

// UAV-to-UAV interference at the fronthaul receiver: airborne pairs are
// treated as free-space LoS links on the licensed carrier.
double air_air_gain(const Vec3& a, const Vec3& b, const ChannelParams& p) {
  const double d = std::max(1.0, distance(a, b));
  return loss_db_to_gain(free_space_pathloss_db(d, p.f_licensed) +
                         p.eta_los_l);
}

}  // namespace

LinkBudgets link_budgets(const Geometry& geo, const ChannelParams& params) {
  params.validate();
  geo.validate();
  const auto k_count = geo.uavs.size();
  const auto u_count = geo.users.size();
  const double p_uav = dbm_to_mw(params.uav_power_dbm);
  const double p_cloud = dbm_to_mw(params.cloud_power_dbm);
  const double noise = dbm_to_mw(params.noise_dbm);

  // Received UAV power at each user on both carriers.
  std::vector<std::vector<double>> rx_l(k_count, std::vector<double>(u_count));
  std::vector<std::vector<double>> rx_u(k_count, std::vector<double>(u_count));
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < u_count; ++i) {
      rx_l[k][i] = p_uav * loss_db_to_gain(air_ground_loss(
                               geo.uavs[k], geo.users[i], params.f_licensed,
                               params.eta_los_l, params.eta_nlos_l, params));
      rx_u[k][i] = p_uav * loss_db_to_gain(air_ground_loss(
                               geo.uavs[k], geo.users[i], params.f_unlicensed,
                               params.eta_los_u, params.eta_nlos_u, params));
    }
  }

  LinkBudgets out;
  out.licensed.assign(k_count, std::vector<LinkBudget>(u_count));
  out.unlicensed.assign(k_count, std::vector<LinkBudget>(u_count));
  for (std::size_t i = 0; i < u_count; ++i) {
    const double d_cloud = std::max(1.0, distance(geo.cloud, geo.users[i]));
    const double h_i =
        params.cloud_interference_scale *
        loss_db_to_gain(free_space_pathloss_db(d_cloud, params.f_licensed));
    for (std::size_t k = 0; k < k_count; ++k) {
      double other_l = 0.0;
      double other_u = 0.0;
      for (std::size_t j = 0; j < k_count; ++j) {
        if (j == k) continue;
        other_l += rx_l[j][i];
        other_u += rx_u[j][i];
      }
      out.licensed[k][i] = {rx_l[k][i], other_l + p_cloud * h_i, noise};
      out.unlicensed[k][i] = {rx_u[k][i], other_u, noise};
    }
  }

  out.fronthaul.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const Vec3& uav = geo.uavs[k];
    const double d = distance(geo.cloud, uav);
    // Absolute height difference: the UAV may fly below the cloud antenna.
    const double dz = std::max(std::abs(uav.z - geo.cloud.z), 1e-9 * d);
    const double p_los =
        los_probability(elevation_deg(dz, d), params.los_x, params.los_y);
    const double gain = fronthaul_pathloss(d, params.fronthaul_exponent,
                                           params.fronthaul_nlos_db, p_los);
    double interference = 0.0;
    for (std::size_t j = 0; j < k_count; ++j) {
      if (j != k) interference += p_uav * air_air_gain(geo.uavs[j], uav, params);
    }
    out.fronthaul[k] = {p_cloud * gain, interference, noise};
  }
  return out;
}

LinkRates compute_link_rates(const Geometry& geo, const ChannelParams& params,
                             double theta) {
  const LinkBudgets budgets = link_budgets(geo, params);
  const auto k_count = geo.uavs.size();
  const auto u_count = geo.users.size();
  LinkRates rates;
  rates.licensed.assign(k_count, std::vector<double>(u_count));
  rates.unlicensed.assign(k_count, std::vector<double>(u_count));
  rates.fronthaul_max.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < u_count; ++i) {
      rates.licensed[k][i] =
          licensed_rate(1.0, params.bw_licensed, budgets.licensed[k][i]);
      rates.unlicensed[k][i] = unlicensed_rate(
          1.0, theta, params.bw_unlicensed, budgets.unlicensed[k][i]);
    }
    rates.fronthaul_max[k] =
        fronthaul_rate(1, params.bw_fronthaul, budgets.fronthaul[k]);
  }
  return rates;
}

}  // namespace channel
}  // namespace uavnet
