#include <doctest.h>

#include <cmath>
#include <random>

#include "uavnet/error.hpp"
#include "uavnet/wifi.hpp"

using namespace uavnet;
using namespace uavnet::wifi;

namespace {

WifiParams params(double tau, int n) {
  WifiParams p;
  p.tau = tau;
  p.stations = n;
  p.payload_bits = 12000.0;
  p.slot_time = 9e-6;
  const auto busy = rts_cts_busy_times(Timing80211{}, p.payload_bits);
  p.t_success = busy.success;
  p.t_collision = busy.collision;
  return p;
}

}  // namespace

TEST_SUITE("wifi") {

TEST_CASE("single station never collides") {
  const auto p = params(0.5, 1);
  const double expected = 0.5 * p.payload_bits / (0.5 * p.slot_time + 0.5 * p.t_success);
  CHECK(saturation_throughput(p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("throughput vanishes as tau goes to zero") {
  const double start = saturation_throughput(params(1e-2, 3));
  double prev = start;
  for (double tau : {1e-3, 1e-4, 1e-6, 1e-9}) {
    const double r = saturation_throughput(params(tau, 3));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-5 * start);
}

TEST_CASE("throughput bounded by airtime efficiency") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.001, 0.999);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(U(rng) * 30);
    const auto p = params(U(rng), n);
    const double r = saturation_throughput(p);
    CHECK(r > 0.0);
    CHECK(r <= p.payload_bits / p.t_success * (1.0 + 1e-12));
  }
}

TEST_CASE("zero stations and invalid tau") {
  CHECK(saturation_throughput(params(0.3, 0)) == 0.0);
  CHECK_THROWS_AS(saturation_throughput(params(0.0, 2)), InvalidArgument);
  CHECK_THROWS_AS(saturation_throughput(params(1.0, 2)), InvalidArgument);
}

TEST_CASE("RTS/CTS busy times") {
  Timing80211 t;
  const auto b = rts_cts_busy_times(t, 12000.0);
  const double data = 12000.0 / t.phy_rate;
  CHECK(b.success == doctest::Approx(t.rts + t.sifs + t.cts + t.sifs + data + t.sifs + t.ack + t.difs));
  CHECK(b.collision == doctest::Approx(t.rts + t.difs));
  CHECK(b.success > t.slot);
  CHECK(b.collision > t.slot);
}

TEST_CASE("per WiFi user rate") {
  CHECK(per_wifi_user_rate(20e6, 1.0, 2) == 0.0);
  CHECK(per_wifi_user_rate(20e6, 0.0, 1) == 20e6);
  CHECK(per_wifi_user_rate(20e6, 0.5, 2) == doctest::Approx(5e6));
  CHECK_THROWS_AS(per_wifi_user_rate(20e6, 0.5, 0), InvalidArgument);
}

TEST_CASE("max duty fraction") {
  CHECK(max_duty_fraction(8e6, 4e6, 2) == 0.0);
  CHECK(max_duty_fraction(8e6, 0.0, 2) == 1.0);
  CHECK(max_duty_fraction(16e6, 4e6, 2) == doctest::Approx(0.5));
  CHECK(max_duty_fraction(4e6, 4e6, 2) == 0.0);
}

TEST_CASE("bianchi tau") {
  for (int w : {2, 16, 32, 64}) {
    CHECK(bianchi_tau(w, 5, 1) == doctest::Approx(2.0 / (w + 1)).epsilon(1e-9));
  }
  double prev = 1.0;
  for (int n = 1; n <= 30; ++n) {
    const double tau = bianchi_tau(32, 5, n);
    CHECK(tau > 0.0);
    CHECK(tau < prev);
    prev = tau;
  }
  // Reference from an independent root finder on the same fixed point.
  CHECK(bianchi_tau(32, 5, 10) == doctest::Approx(0.03730507995456819).epsilon(1e-8));
  CHECK_THROWS_AS(bianchi_tau(1, 5, 3), InvalidArgument);
  CHECK_THROWS_AS(bianchi_tau(32, 5, 0), InvalidArgument);
}

}
