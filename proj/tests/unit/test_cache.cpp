#include <doctest.h>

#include <random>
#include <sstream>

#include "uavnet/cache.hpp"
#include "uavnet/error.hpp"

using namespace uavnet;
using namespace uavnet::cache;

TEST_SUITE("cache") {

TEST_CASE("single user picks the two most popular contents") {
  const auto plan = plan_cache({0}, {{0.5, 0.3, 0.2}}, {10.0}, 2);
  CHECK(plan.contents == std::vector<int>{0, 1});
  REQUIRE(plan.scores.size() == 2);
  CHECK(plan.scores[0] == doctest::Approx(5.0));
  CHECK(plan.scores[1] == doctest::Approx(3.0));
  CHECK_FALSE(plan.degenerate);
}

TEST_CASE("shared interest beats individual favourites") {
  const std::vector<std::vector<double>> p{{0.6, 0.4, 0.0}, {0.0, 0.4, 0.6}};
  const auto s = content_scores({0, 1}, p, {10.0, 10.0});
  CHECK(s[0] == doctest::Approx(6.0));
  CHECK(s[1] == doctest::Approx(8.0));
  CHECK(s[2] == doctest::Approx(6.0));
  CHECK(plan_cache({0, 1}, p, {10.0, 10.0}, 1).contents == std::vector<int>{1});
}

TEST_CASE("cache as large as the catalogue holds everything") {
  const auto plan = plan_cache({0}, {{0.1, 0.0, 0.9, 0.0}}, {3.0}, 4);
  CHECK(plan.contents == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("zero cache holds nothing") {
  CHECK(plan_cache({0}, {{0.5, 0.5}}, {1.0}, 0).contents.empty());
}

TEST_CASE("no associated users gives the lowest indices, flagged") {
  const auto plan = plan_cache({}, {{0.1, 0.2, 0.7}}, {5.0}, 2);
  CHECK(plan.degenerate);
  CHECK(plan.contents == std::vector<int>{0, 1});
}

TEST_CASE("equal scores go to the lower index") {
  const auto plan = plan_cache({0}, {{0.25, 0.25, 0.25, 0.25}}, {4.0}, 2);
  CHECK(plan.contents == std::vector<int>{0, 1});
  const auto oracle = cache_oracle({0}, {{0.25, 0.25, 0.25, 0.25}}, {4.0}, 2);
  CHECK(oracle.contents == std::vector<int>{0, 1});
}

TEST_CASE("greedy equals exhaustive search on random instances") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const int users = 1 + static_cast<int>(rng() % 6);
    const int c = static_cast<int>(rng() % (std::min(n, 4) + 1));
    std::vector<std::vector<double>> p(users, std::vector<double>(n));
    std::vector<double> req(users);
    std::vector<int> assoc;
    for (int i = 0; i < users; ++i) {
      double sum = 0.0;
      for (double& x : p[i]) sum += (x = u(rng));
      for (double& x : p[i]) x /= sum;
      req[i] = 1.0 + 20.0 * u(rng);
      if (u(rng) < 0.7) assoc.push_back(i);
    }
    if (assoc.empty()) assoc.push_back(0);
    const auto g = plan_cache(assoc, p, req, c);
    const auto o = cache_oracle(assoc, p, req, c);
    double gs = 0.0, os = 0.0;
    for (double s : g.scores) gs += s;
    for (double s : o.scores) os += s;
    CHECK(gs == doctest::Approx(os).epsilon(1e-12));
    CHECK(g.contents == o.contents);
  }
}

TEST_CASE("scaling all requests leaves the set unchanged") {
  const std::vector<std::vector<double>> p{{0.3, 0.3, 0.4}, {0.5, 0.1, 0.4}};
  const auto a = plan_cache({0, 1}, p, {2.0, 7.0}, 2);
  const auto b = plan_cache({0, 1}, p, {20.0, 70.0}, 2);
  CHECK(a.contents == b.contents);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(plan_cache({0}, {{0.5, 0.5}}, {1.0}, 3), InvalidArgument);
  CHECK_THROWS_AS(plan_cache({0}, {{0.5, 0.5}}, {1.0}, -1), InvalidArgument);
  CHECK_THROWS_AS(plan_cache({2}, {{0.5, 0.5}}, {1.0}, 1), InvalidArgument);
}

TEST_CASE("csv lists one row per cached content") {
  std::ostringstream out;
  write_cache_csv(out, 3, plan_cache({0}, {{0.5, 0.3, 0.2}}, {10.0}, 2), true);
  std::string line;
  std::istringstream in(out.str());
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

}
