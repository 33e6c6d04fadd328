#include "uavnet/wifi.hpp"

#include <algorithm>
#include <cmath>

#include "uavnet/error.hpp"

namespace uavnet::wifi {

BusyTimes rts_cts_busy_times(const Timing80211& t, double payload_bits) {
  require(payload_bits > 0.0 && t.phy_rate > 0.0,
          "payload and PHY rate must be positive");
  const double data = payload_bits / t.phy_rate;
  return {t.rts + t.sifs + t.cts + t.sifs + data + t.sifs + t.ack + t.difs,
          t.rts + t.difs};
}

double saturation_throughput(const WifiParams& p) {
  require(p.stations >= 0, "station count must be non-negative");
  if (p.stations == 0) return 0.0;
  require(p.tau > 0.0 && p.tau < 1.0, "tau must lie in (0, 1)");
  require(p.t_success > p.slot_time && p.t_collision > p.slot_time,
          "busy periods must exceed the idle slot");
  const double n = p.stations;
  const double p_tr = 1.0 - std::pow(1.0 - p.tau, n);
  const double p_s = n * p.tau * std::pow(1.0 - p.tau, n - 1.0) / p_tr;
  const double denom = (1.0 - p_tr) * p.slot_time + p_tr * p_s * p.t_success +
                       p_tr * (1.0 - p_s) * p.t_collision;
  return p_tr * p_s * p.payload_bits / denom;
}

double per_wifi_user_rate(double saturation, double theta, int stations) {
  require(stations >= 1, "per-user WiFi rate needs at least one station");
  require(theta >= 0.0 && theta <= 1.0, "duty fraction must lie in [0, 1]");
  return saturation * (1.0 - theta) / stations;
}

double max_duty_fraction(double saturation, double gamma, int stations) {
  require(saturation > 0.0, "saturation throughput must be positive");
  return std::clamp(1.0 - stations * gamma / saturation, 0.0, 1.0);
}

double bianchi_tau(int cw_min, int backoff_stages, int stations) {
  require(cw_min >= 2, "cw_min must be at least 2");
  require(backoff_stages >= 0, "backoff stages must be non-negative");
  require(stations >= 1, "at least one station is required");
  const double w = cw_min;
  // 2(1-2p)/((1-2p)(W+1) + pW(1-(2p)^m)) with the geometric sum expanded so
  // p = 1/2 needs no special case.
  auto tau_of_p = [&](double p) {
    double series = 0.0;
    double term = 1.0;
    for (int i = 0; i < backoff_stages; ++i) {
      series += term;
      term *= 2.0 * p;
    }
    return 2.0 / ((w + 1.0) + p * w * series);
  };
  auto collision = [&](double tau) {
    return 1.0 - std::pow(1.0 - tau, stations - 1);
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid - tau_of_p(collision(mid)) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-10) return 0.5 * (lo + hi);
  }
  throw ComputationError("Bianchi fixed point did not converge");
}

}  // namespace uavnet::wifi
