#include "uavnet/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uavnet/error.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/units.hpp"

namespace uavnet::predictor {

int ContextEncoder::width() const {
  const auto& card = traffic::UserContext::kCardinality;
  return std::accumulate(card.begin(), card.end(), 0) + 4;
}

Eigen::VectorXd ContextEncoder::encode(const traffic::UserContext& context,
                                       int hour) const {
  require(hours >= 1, "encoder needs at least one hour bucket");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(width());
  const auto& card = traffic::UserContext::kCardinality;
  int offset = 0;
  for (std::size_t f = 0; f < card.size(); ++f) {
    require(context.features[f] >= 0 && context.features[f] < card[f],
            "context feature out of range");
    x[offset + context.features[f]] = 1.0;
    offset += card[f];
  }
  const double angle = 2.0 * kPi * (hour % hours) / hours;
  x[offset + 0] = 0.5 * (1.0 + std::cos(angle));
  x[offset + 1] = 0.5 * (1.0 + std::sin(angle));
  x[offset + 2] = 0.5 * (1.0 - std::cos(angle));
  x[offset + 3] = 0.5 * (1.0 - std::sin(angle));
  return x;
}

std::vector<double> normalize_prediction(const Eigen::VectorXd& raw) {
  std::vector<double> p(raw.size());
  double sum = 0.0;
  for (Eigen::Index n = 0; n < raw.size(); ++n) {
    p[n] = std::max(raw[n], 0.0);
    sum += p[n];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

RequestPredictor::RequestPredictor(const PredictorParams& params, int inputs,
                                   int contents, std::uint64_t seed)
    : params_(params), contents_(contents) {
  require(contents >= 1, "predictor needs at least one content");
  require(params_.steps_per_input >= 1, "need at least one step per input");
  require(params_.delta >= 0.0, "ridge parameter must be non-negative");
  int state = 0;
  if (params_.kind == ModelKind::lsm) {
    liquid_ = std::make_unique<reservoir::Reservoir>(params_.liquid, inputs, seed);
    state = liquid_->size();
  } else {
    esn_ = std::make_unique<esn::EchoStateNetwork>(params_.esn, inputs, seed);
    state = esn_->size();
  }
  readout_.weights = Eigen::MatrixXd::Zero(contents, state + 1);
  readout_.delta = params_.delta;
}

Eigen::VectorXd RequestPredictor::features(const Eigen::VectorXd& input) {
  Eigen::VectorXd f;
  if (liquid_) {
    liquid_->reset();
    const auto& v = liquid_->drive(input, params_.steps_per_input);
    const auto& lp = liquid_->params();
    f.resize(v.size() + 1);
    f.tail(v.size()) = (v.array() - lp.resting_mv) / lp.threshold_offset_mv;
  } else {
    esn_->reset();
    const auto& x = esn_->drive(input, params_.steps_per_input);
    f.resize(x.size() + 1);
    f.tail(x.size()) = x;
  }
  f[0] = 1.0;
  return f;
}

void RequestPredictor::train_features(const Eigen::MatrixXd& features,
                                      const Eigen::MatrixXd& targets) {
  require(features.cols() > 0, "predictor training data must not be empty");
  require(targets.rows() == contents_, "targets must have one row per content");
  require(features.rows() == readout_.weights.cols(),
          "feature width does not match the model");
  readout_ = reservoir::train_ridge_readout(features, targets, params_.delta);
  trained_ = true;
}

void RequestPredictor::train(const std::vector<Eigen::VectorXd>& inputs,
                             const std::vector<std::vector<double>>& targets) {
  require(!inputs.empty(), "predictor training data must not be empty");
  require(inputs.size() == targets.size(),
          "inputs and targets must have the same length");
  Eigen::MatrixXd feats(readout_.weights.cols(), inputs.size());
  Eigen::MatrixXd ys(contents_, inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    feats.col(t) = features(inputs[t]);
    require(static_cast<int>(targets[t].size()) == contents_,
            "target width does not match the catalog");
    for (int n = 0; n < contents_; ++n) ys(n, t) = targets[t][n];
  }
  train_features(feats, ys);
}

Eigen::VectorXd RequestPredictor::raw(const Eigen::VectorXd& input) {
  return readout_.predict(features(input));
}

std::vector<double> RequestPredictor::predict(const Eigen::VectorXd& input) {
  return normalize_prediction(raw(input));
}

std::vector<int> top_contents(const std::vector<double>& scores, int c) {
  require(c >= 0, "selection size must be non-negative");
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto take = std::min<std::size_t>(c, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                    [&](int a, int b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BenchResult run_prediction_benchmark(const BenchParams& bench,
                                     const PredictorParams& lsm,
                                     const PredictorParams& esn,
                                     std::uint64_t seed) {
  require(bench.days >= 2, "benchmark needs at least two days");
  require(bench.requests_per_epoch >= 1, "epochs need at least one request");
  require(bench.train_fraction > 0.0 && bench.train_fraction < 1.0,
          "train fraction must lie in (0, 1)");
  const traffic::SyntheticTrace trace(bench.trace, seed);
  const int hours = bench.trace.hours;
  const int users = bench.trace.users;
  const int contents = bench.trace.contents;
  const int epochs = bench.days * hours;
  const int train_epochs = static_cast<int>(std::floor(bench.train_fraction * epochs));
  require(train_epochs >= hours, "training window must cover every hour bucket");
  const ContextEncoder encoder{hours};

  BenchResult out;
  double se[2] = {0.0, 0.0};
  long within[2] = {0, 0};
  int topc_ok[2] = {0, 0};
  long cells = 0;
  for (int i = 0; i < users; ++i) {
    RequestPredictor models[2] = {
        RequestPredictor(lsm, encoder.width(), contents,
                         derive_seed(seed, {stream::kPredictor, 0, std::uint64_t(i)})),
        RequestPredictor(esn, encoder.width(), contents,
                         derive_seed(seed, {stream::kPredictor, 1, std::uint64_t(i)}))};
    // Each slot restarts the liquid from rest, so the state is a function of
    // the hour bucket alone.
    std::vector<Eigen::VectorXd> feats[2];
    for (int m = 0; m < 2; ++m) {
      for (int h = 0; h < hours; ++h) {
        feats[m].push_back(models[m].features(encoder.encode(trace.context(i), h)));
      }
    }
    Eigen::MatrixXd targets(contents, train_epochs);
    for (int e = 0; e < train_epochs; ++e) {
      const auto hist = trace.epoch_histogram(i, e, bench.requests_per_epoch, seed);
      for (int n = 0; n < contents; ++n) targets(n, e) = hist[n];
    }
    std::vector<double> mean_true(contents, 0.0);
    std::vector<double> mean_pred[2] = {std::vector<double>(contents, 0.0),
                                        std::vector<double>(contents, 0.0)};
    std::vector<std::vector<double>> pred[2];
    for (int m = 0; m < 2; ++m) {
      Eigen::MatrixXd fx(feats[m][0].size(), train_epochs);
      for (int e = 0; e < train_epochs; ++e) fx.col(e) = feats[m][e % hours];
      models[m].train_features(fx, targets);
      for (int h = 0; h < hours; ++h) {
        pred[m].push_back(
            normalize_prediction(models[m].readout().predict(feats[m][h])));
      }
    }
    for (int h = 0; h < hours; ++h) {
      const auto truth = trace.distribution(i, h);
      for (int n = 0; n < contents; ++n) {
        mean_true[n] += truth[n] / hours;
        for (int m = 0; m < 2; ++m) {
          const double err = pred[m][h][n] - truth[n];
          se[m] += err * err;
          within[m] += std::abs(err) < bench.cell_tolerance ? 1 : 0;
          mean_pred[m][n] += pred[m][h][n] / hours;
        }
        out.rows.push_back({i, h, n, truth[n], pred[0][h][n], pred[1][h][n]});
        ++cells;
      }
    }
    const auto want = top_contents(mean_true, bench.cache_size);
    for (int m = 0; m < 2; ++m) {
      if (top_contents(mean_pred[m], bench.cache_size) == want) ++topc_ok[m];
    }
  }
  out.lsm_mse = se[0] / cells;
  out.esn_mse = se[1] / cells;
  out.lsm_cells_within = double(within[0]) / cells;
  out.esn_cells_within = double(within[1]) / cells;
  out.lsm_topc_users = double(topc_ok[0]) / users;
  out.esn_topc_users = double(topc_ok[1]) / users;
  return out;
}

}  // namespace uavnet::predictor
