#include <doctest.h>

#include <sstream>
#include <string>

#include "uavnet/config.hpp"
#include "uavnet/error.hpp"

using namespace uavnet;

namespace {

std::string error_of(const std::string& ini) {
  std::istringstream in(ini);
  try {
    parse_config(in);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty file gives the defaults") {
  std::istringstream in("");
  const auto c = parse_config(in);
  std::ostringstream a, b;
  write_config(a, c);
  write_config(b, SimConfig{});
  CHECK(a.str() == b.str());
  CHECK(c.uavs == 5);
  CHECK(c.users == 20);
  CHECK(c.cache_size == 3);
}

TEST_CASE("zero cache is valid") {
  std::istringstream in("[content]\nC = 0\n");
  CHECK(parse_config(in).cache_size == 0);
}

TEST_CASE("errors name the offending field") {
  CHECK(error_of("[channel]\nF_l = -1\n").find("F_l") != std::string::npos);
  CHECK(error_of("[content]\nC = 30\n").find("content.C") != std::string::npos);
  CHECK(error_of("[network]\nbogus = 1\n").find("network.bogus") != std::string::npos);
  CHECK(error_of("[nowhere]\nuavs = 1\n").find("nowhere.uavs") != std::string::npos);
  CHECK(error_of("[network]\nuavs = five\n").find("network.uavs") != std::string::npos);
  CHECK(error_of("[agent]\noptimistic_init = maybe\n").find("optimistic_init") !=
        std::string::npos);
}

TEST_CASE("written configuration reloads bit for bit") {
  SimConfig c;
  c.uavs = 3;
  c.channel.bw_fronthaul = 1.0 / 3.0 * 1e8;
  c.theta_override = 0.123456789012345;
  c.optimistic_init = false;
  std::ostringstream out;
  write_config(out, c);
  std::istringstream in(out.str());
  const auto back = parse_config(in);
  CHECK(back.uavs == 3);
  CHECK(back.channel.bw_fronthaul == c.channel.bw_fronthaul);
  CHECK(back.theta_override == c.theta_override);
  CHECK_FALSE(back.optimistic_init);
  std::ostringstream again;
  write_config(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("set a single value") {
  SimConfig c;
  set_config_value(c, "wifi.N_w", "7");
  CHECK(c.wifi_stations == 7);
  CHECK_THROWS_AS(set_config_value(c, "wifi.nope", "1"), InvalidArgument);
}

}
