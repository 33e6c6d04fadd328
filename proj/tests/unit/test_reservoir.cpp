#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "uavnet/error.hpp"
#include "uavnet/reservoir.hpp"

using namespace uavnet;
using namespace uavnet::reservoir;

namespace {

LiquidParams small() {
  LiquidParams p;
  p.w1 = 3;
  p.w2 = 3;
  p.w3 = 4;
  return p;
}

Eigen::MatrixXd random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) for (int j = 0; j < c; ++j) m(i, j) = N(rng);
  return m;
}

}  // namespace

TEST_SUITE("reservoir") {

TEST_CASE("connection probability") {
  CHECK(connection_probability(0.3, 1.0, 2.0) == doctest::Approx(0.3 * std::exp(-0.25)));
  CHECK(connection_probability(0.3, 1.0, 2.0) == doctest::Approx(0.2336).epsilon(1e-3));
  CHECK(connection_probability(0.3, 1.0, 1e-9) == 0.0);
  CHECK(connection_probability(0.3, 1.0, 0.0) == 0.0);
  CHECK(connection_probability(0.0, 1.0, 2.0) == 0.0);
}

TEST_CASE("zero scale removes that connection type") {
  LiquidParams p = small();
  p.c_ee = 0.0;
  p.c_ii = 0.0;
  Reservoir r(p, 2, 5);
  const auto& w = r.recurrent();
  for (int src = 0; src < w.outerSize(); ++src) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(w, src); it; ++it) {
      CHECK(r.kind(src) != r.kind(static_cast<int>(it.row())));
    }
  }
}

TEST_CASE("collapsed length scale gives a disconnected liquid") {
  LiquidParams p = small();
  p.lambda = 0.0;
  Reservoir r(p, 2, 5);
  CHECK(r.recurrent().nonZeros() == 0);
}

TEST_CASE("weight signs follow the source kind and no self loops") {
  Reservoir r(LiquidParams{}, 3, 17);
  CHECK(r.size() == 500);
  const auto& w = r.recurrent();
  int excit = 0;
  for (int j = 0; j < r.size(); ++j) excit += r.kind(j) == NeuronKind::excitatory;
  CHECK(excit == 400);
  for (int src = 0; src < w.outerSize(); ++src) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(w, src); it; ++it) {
      CHECK(it.row() != src);
      if (r.kind(src) == NeuronKind::excitatory) {
        CHECK(it.value() > 0.0);
      } else {
        CHECK(it.value() < 0.0);
      }
    }
  }
  CHECK(abs_spectral_bound(w) == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("empirical connectivity of adjacent excitatory pairs") {
  LiquidParams p;
  p.w1 = 6;
  p.w2 = 6;
  p.w3 = 20;
  int pairs = 0;
  int links = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Reservoir r(p, 0, seed);
    const Eigen::MatrixXd w = Eigen::MatrixXd(r.recurrent());
    for (int a = 0; a < r.size(); ++a) {
      for (int b = 0; b < r.size(); ++b) {
        if (r.kind(a) != NeuronKind::excitatory || r.kind(b) != NeuronKind::excitatory) continue;
        const int dx = std::abs(a % 6 - b % 6);
        const int dy = std::abs((a / 6) % 6 - (b / 6) % 6);
        const int dz = std::abs(a / 36 - b / 36);
        if (dx + dy + dz != 1) continue;
        ++pairs;
        links += w(b, a) != 0.0;
      }
    }
  }
  const double expected = 0.3 * std::exp(-0.25);
  const double freq = double(links) / pairs;
  const double sigma = std::sqrt(expected * (1 - expected) / pairs);
  CHECK(std::abs(freq - expected) < 4 * sigma);
}

TEST_CASE("construction is deterministic under seed") {
  Reservoir a(small(), 4, 99);
  Reservoir b(small(), 4, 99);
  CHECK(Eigen::MatrixXd(a.recurrent()) == Eigen::MatrixXd(b.recurrent()));
  CHECK(Eigen::MatrixXd(a.input_weights()) == Eigen::MatrixXd(b.input_weights()));
  Reservoir c(small(), 4, 100);
  CHECK(Eigen::MatrixXd(a.recurrent()) != Eigen::MatrixXd(c.recurrent()));
}

TEST_CASE("resting state is a fixed point under zero input") {
  Reservoir r(LiquidParams{}, 5, 1);
  const Eigen::VectorXd rest = Eigen::VectorXd::Constant(r.size(), 13.5);
  for (int t = 0; t < 50; ++t) r.step(Eigen::VectorXd::Zero(5));
  CHECK(r.state() == rest);
}

TEST_CASE("decay toward rest follows the closed form") {
  Reservoir r(LiquidParams{}, 1, 2);
  const double s = 13.5;
  const double zr = 100.0 * 30.0;
  Eigen::VectorXd v0(r.size());
  for (int j = 0; j < r.size(); ++j) v0[j] = s + 0.01 * (j % 13) - 0.05;
  r.set_state(v0);
  for (int t = 1; t <= 10; ++t) {
    r.step_current(Eigen::VectorXd::Zero(r.size()));
    for (int j = 0; j < r.size(); ++j) {
      const double expected = s + (v0[j] - s) * std::pow(1.0 - 1.0 / zr, t);
      CHECK(std::abs(r.state()[j] - expected) <= 1e-9);
    }
  }
}

TEST_CASE("constant current charges toward S + Z I") {
  LiquidParams p = small();
  p.threshold_offset_mv = 1e9;
  Reservoir r(p, 1, 2);
  const double s = p.resting_mv;
  const double z = p.resistance();
  const double zr = z * p.time_constant_ms;
  const Eigen::VectorXd current = Eigen::VectorXd::LinSpaced(r.size(), 0.01, 0.2);
  for (int t = 1; t <= 10; ++t) {
    r.step_current(current);
    for (int j = 0; j < r.size(); ++j) {
      const double target = s + z * current[j];
      const double expected = target + (s - target) * std::pow(1.0 - 1.0 / zr, t);
      CHECK(std::abs(r.state()[j] - expected) <= 1e-9);
    }
  }
  for (int t = 0; t < 200000; ++t) r.step_current(current);
  for (int j = 0; j < r.size(); ++j) {
    CHECK(r.state()[j] == doctest::Approx(s + z * current[j]).epsilon(1e-9));
  }
}

TEST_CASE("refractory contract") {
  LiquidParams p;
  p.refractory_steps = 3;
  Reservoir r(p, 4, 8);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(4);
  std::vector<int> last(r.size(), -1000);
  int spikes = 0;
  for (int t = 0; t < 400; ++t) {
    r.step(u);
    for (int j : r.spikes()) {
      CHECK(t - last[j] > p.refractory_steps);
      last[j] = t;
      ++spikes;
    }
  }
  CHECK(spikes > 0);
}

TEST_CASE("run and collect") {
  Reservoir r(small(), 3, 4);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 6);
  const auto states = r.run_and_collect(zero, 5);
  CHECK(states.cols() == 6);
  CHECK((states.array() == 13.5).all());
  CHECK_THROWS_AS(r.run_and_collect(Eigen::MatrixXd(3, 0), 5), InvalidArgument);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd seq = random_matrix(3, 8, rng).cwiseAbs();
  Reservoir a(small(), 3, 4);
  Reservoir b(small(), 3, 4);
  CHECK(a.run_and_collect(seq, 20) == b.run_and_collect(seq, 20));
}

TEST_CASE("distinct inputs separate the liquid state") {
  Reservoir r(LiquidParams{}, 6, 21);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int separated = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd x(6, 3), y(6, 3);
    for (int i = 0; i < 6; ++i) for (int c = 0; c < 3; ++c) { x(i, c) = U(rng); y(i, c) = U(rng); }
    const Eigen::VectorXd fx = r.run_and_collect(x, 20).col(2);
    const Eigen::VectorXd fy = r.run_and_collect(y, 20).col(2);
    separated += fx != fy;
  }
  CHECK(separated == 100);
}

TEST_CASE("ridge readout recovers a planted map") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd m = random_matrix(4, 30, rng);
  const Eigen::MatrixXd v = random_matrix(30, 200, rng);
  const auto f = train_ridge_readout(v, m * v, 1e-8);
  CHECK((f.weights - m).norm() / m.norm() < 1e-6);
  // Sample-space branch.
  const Eigen::MatrixXd v2 = random_matrix(80, 40, rng);
  const Eigen::MatrixXd y2 = random_matrix(3, 40, rng);
  const auto g = train_ridge_readout(v2, y2, 1e-7);
  CHECK((g.weights * v2 - y2).norm() / y2.norm() < 1e-6);
}

TEST_CASE("ridge readout on orthonormal states and huge delta") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(12, 12, rng))
                                .householderQ();
  const Eigen::MatrixXd y = random_matrix(3, 12, rng);
  const auto f = train_ridge_readout(q, y, 0.0);
  CHECK((f.weights - y * q.transpose()).norm() < 1e-10);
  const auto big = train_ridge_readout(q, y, 1e8);
  CHECK(big.weights.norm() < 1e-12);
}

TEST_CASE("ridge solution is locally optimal") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd v = random_matrix(10, 25, rng);
  const Eigen::MatrixXd y = random_matrix(2, 25, rng);
  const double delta = 0.3;
  const auto f = train_ridge_readout(v, y, delta);
  auto loss = [&](const Eigen::MatrixXd& w) {
    return (w * v - y).squaredNorm() + delta * delta * w.squaredNorm();
  };
  const double base = loss(f.weights);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 10; ++c) {
      for (double h : {1e-3, -1e-3}) {
        Eigen::MatrixXd w = f.weights;
        w(r, c) += h;
        CHECK(loss(w) >= base);
      }
    }
  }
}

TEST_CASE("readout prediction") {
  Readout zero{Eigen::MatrixXd::Zero(3, 4), 0.1};
  CHECK(zero.predict(Eigen::VectorXd::Ones(4)).isZero());
  Readout sel{Eigen::MatrixXd::Zero(2, 4), 0.1};
  sel.weights(0, 2) = 1.0;
  sel.weights(1, 0) = 1.0;
  Eigen::VectorXd x(4);
  x << 5, 6, 7, 8;
  CHECK(sel.predict(x) == Eigen::Vector2d(7, 5));
  CHECK_THROWS_AS(sel.predict(Eigen::VectorXd::Ones(3)), InvalidArgument);
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd v = random_matrix(6, 40, rng);
  const Eigen::MatrixXd y = random_matrix(2, 40, rng);
  const auto f = train_ridge_readout(v, y, 0.1);
  const Eigen::MatrixXd resid = f.weights * v - y;
  for (int t = 0; t < 40; ++t) {
    CHECK((f.predict(v.col(t)) - y.col(t)).norm() == doctest::Approx(resid.col(t).norm()));
  }
}

TEST_CASE("LMS update") {
  Readout f{Eigen::MatrixXd::Constant(3, 4, 0.5), 0.05};
  const Eigen::MatrixXd before = f.weights;
  Eigen::VectorXd x(4);
  x << 1.0, -0.5, 0.25, 2.0;
  sgd_readout_update(f, 1, 2.0, 2.0, x, 0.05);
  CHECK(f.weights == before);
  sgd_readout_update(f, 1, 3.0, 0.0, Eigen::VectorXd::Zero(4), 0.05);
  CHECK(f.weights == before);
  sgd_readout_update(f, 1, 3.0, f.predict_row(1, x), x, 0.05);
  CHECK(f.weights.row(0) == before.row(0));
  CHECK(f.weights.row(2) == before.row(2));
  CHECK(f.weights.row(1) != before.row(1));
}

TEST_CASE("LMS converges geometrically on a frozen example") {
  Readout f{Eigen::MatrixXd::Zero(1, 5), 0.05};
  Eigen::VectorXd x(5);
  x << 1.0, 0.5, -1.0, 2.0, 0.3;
  const double rate = 0.05;
  REQUIRE(rate * x.squaredNorm() < 2.0);
  const double e = 7.0;
  double err = std::abs(e - f.predict_row(0, x));
  const double factor = std::abs(1.0 - rate * x.squaredNorm());
  for (int t = 0; t < 1000; ++t) {
    sgd_readout_update(f, 0, e, f.predict_row(0, x), x, rate);
    const double next = std::abs(e - f.predict_row(0, x));
    // Above the rounding floor the error contracts by exactly `factor`.
    if (err > 1e-10) {
      CHECK(next <= err);
      CHECK(next == doctest::Approx(factor * err).epsilon(1e-6));
    }
    err = next;
  }
  CHECK(err < 1e-9);
}

TEST_CASE("readout csv round trip") {
  std::mt19937_64 rng(12);
  Readout f{random_matrix(3, 5, rng), 0.1};
  std::stringstream s;
  write_readout_csv(s, f);
  const auto g = read_readout_csv(s);
  CHECK(g.weights == f.weights);
  CHECK(g.delta == f.delta);
}

TEST_CASE("parameter validation") {
  LiquidParams p;
  p.w1 = 0;
  CHECK_THROWS_AS(Reservoir(p, 1, 1), InvalidArgument);
  LiquidParams q;
  q.input_probability = 1.5;
  CHECK_THROWS_AS(Reservoir(q, 1, 1), InvalidArgument);
}

}
