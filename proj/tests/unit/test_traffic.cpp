#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "uavnet/error.hpp"
#include "uavnet/traffic.hpp"

using namespace uavnet;
using namespace uavnet::traffic;

namespace {

RequestProfile single_user(std::vector<double> p, double activity) {
  RequestProfile prof;
  prof.distribution = {std::move(p)};
  prof.activity = {activity};
  prof.expected_requests = {activity * 100.0};
  prof.context = {UserContext{}};
  return prof;
}

}  // namespace

TEST_SUITE("traffic") {

TEST_CASE("idle user never requests") {
  const auto prof = single_user({0.5, 0.5}, 0.0);
  ContentCatalog cat{2, 2e6};
  for (int t = 0; t < 1000; ++t) {
    const auto r = generate_requests(prof, cat, 4, t);
    CHECK(r[0].bits == 0.0);
    CHECK(r[0].content == -1);
  }
}

TEST_CASE("degenerate distribution always yields the first content") {
  const auto prof = single_user({1.0, 0.0, 0.0}, 1.0);
  ContentCatalog cat{3, 2e6};
  for (int t = 0; t < 1000; ++t) {
    const auto r = generate_requests(prof, cat, 4, t);
    CHECK(r[0].bits == 2e6);
    CHECK(r[0].content == 0);
  }
}

TEST_CASE("empirical content frequencies within 3 sigma") {
  const std::vector<double> p{0.4, 0.25, 0.2, 0.1, 0.05};
  const auto prof = single_user(p, 1.0);
  ContentCatalog cat{5, 2e6};
  const int slots = 100000;
  std::vector<int> counts(5, 0);
  for (int t = 0; t < slots; ++t) ++counts[generate_requests(prof, cat, 77, t)[0].content];
  for (int n = 0; n < 5; ++n) {
    const double sigma = std::sqrt(slots * p[n] * (1.0 - p[n]));
    CHECK(std::abs(counts[n] - slots * p[n]) <= 3.0 * sigma);
  }
}

TEST_CASE("request generation is a pure function of seed and slot") {
  TraceParams tp;
  SyntheticTrace trace(tp, 12);
  const auto prof = trace.profile(5, 0.7, 100);
  ContentCatalog cat{tp.contents, 2e6};
  for (int t = 0; t < 50; ++t) {
    const auto a = generate_requests(prof, cat, 9, t);
    const auto b = generate_requests(prof, cat, 9, t);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].content == b[i].content);
      CHECK(a[i].bits == b[i].bits);
    }
  }
}

TEST_CASE("synthetic trace distributions are valid and context follows clusters") {
  TraceParams tp;
  tp.users = 20;
  tp.clusters = 2;
  SyntheticTrace trace(tp, 3);
  for (int i = 0; i < tp.users; ++i) {
    for (int h = 0; h < 24; ++h) {
      const auto p = trace.distribution(i, h);
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      for (double v : p) CHECK(v >= 0.0);
    }
    for (int j = 0; j < tp.users; ++j) {
      if (trace.cluster_of(i) == trace.cluster_of(j)) {
        CHECK(trace.context(i).features == trace.context(j).features);
      } else {
        CHECK(trace.context(i).features != trace.context(j).features);
      }
    }
  }
  trace.profile(0, 1.0, 100).validate();
}

TEST_CASE("epoch histogram is a smoothed distribution") {
  SyntheticTrace trace(TraceParams{}, 8);
  const auto h = trace.epoch_histogram(3, 17, 100, 8);
  CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : h) CHECK(v > 0.0);
}

TEST_CASE("link composition") {
  CHECK(compose_link_rate(LinkKind::a, 5e6, 1.0) == 5e6);
  CHECK(compose_link_rate(LinkKind::b, 5e6, 0.0) == 5e6);
  CHECK(compose_link_rate(LinkKind::c, 4e6, 4e6) == doctest::Approx(2e6));
  CHECK(compose_link_rate(LinkKind::d, 4e6, 1e15) == doctest::Approx(4e6).epsilon(1e-8));
  CHECK(compose_link_rate(LinkKind::d, 4e6, INFINITY) == 4e6);
  CHECK(compose_link_rate(LinkKind::c, 0.0, 3e6) == 0.0);
  CHECK(compose_link_rate(LinkKind::d, 3e6, 0.0) == 0.0);
  for (double d : {1e3, 1e6, 3.3e7}) {
    for (double f : {2e3, 5e6, 1e9}) {
      const double r = compose_link_rate(LinkKind::c, d, f);
      CHECK(r <= std::min(d, f));
      CHECK(r <= compose_link_rate(LinkKind::b, d, f));
    }
  }
}

TEST_CASE("queue update") {
  const double L = 2e6;
  auto q = step_queue(QueueState{}, 0.0, 5.0);
  CHECK(q.backlog == 0.0);
  q = step_queue(QueueState{L, {}, {}}, 0.0, L);
  CHECK(q.backlog == 0.0);
  QueueState s;
  const int T = 500;
  for (int t = 0; t < T; ++t) s = step_queue(s, L, 0.0);
  CHECK(s.backlog == doctest::Approx(T * L));
  CHECK(s.backlog / T == doctest::Approx(L));
  CHECK(s.history.size() == static_cast<std::size_t>(T));
  CHECK_THROWS_AS(step_queue(s, -1.0, 0.0), InvalidArgument);
}

TEST_CASE("queue never negative under random service") {
  QueueState s;
  for (int t = 0; t < 2000; ++t) {
    s = step_queue(s, (t % 3 == 0) ? 2e6 : 0.0, (t * 7919 % 11) * 4e5);
    CHECK(s.backlog >= 0.0);
  }
}

TEST_CASE("rate stability predicate") {
  const double L = 2e6;
  CHECK(is_rate_stable(L, L));
  CHECK_FALSE(is_rate_stable(0.0, L));
  CHECK(is_rate_stable(2 * L, L));
}

TEST_CASE("empirical stability") {
  const double L = 2e6;
  std::vector<double> constant(200, 7.0);
  CHECK(empirical_stability(constant, 0.0));
  std::vector<double> growing;
  for (int t = 0; t < 200; ++t) growing.push_back(t * L);
  CHECK(backlog_slope(growing) == doctest::Approx(L));
  CHECK_FALSE(empirical_stability(growing, 0.5 * L));
  QueueState s;
  for (int t = 0; t < 10000; ++t) s = step_queue(s, L, L);
  CHECK(empirical_stability(s.backlog_trace, 0.01 * L));
  CHECK_THROWS_AS(backlog_slope(std::vector<double>(99, 0.0)), InvalidArgument);
}

TEST_CASE("constant-rate stable queues pass the empirical check") {
  for (double r : {1.0, 1.5, 3.0}) {
    QueueState s;
    for (int t = 0; t < 1000; ++t) s = step_queue(s, 1.0, r);
    CHECK(is_rate_stable(r, 1.0));
    CHECK(empirical_stability(s.backlog_trace, 1e-9));
  }
}

TEST_CASE("trace csv") {
  std::ostringstream out;
  std::vector<TraceRow> rows{{3, 1, 4, 2e6, 1e6, 1e6}};
  write_trace_csv(out, rows);
  CHECK(out.str() == "t,user,content,V,R,Q\n3,1,4,2000000,1000000,1000000\n");
}

}
