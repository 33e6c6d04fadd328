#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "uavnet/esn.hpp"
#include "uavnet/reservoir.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet::predictor {

/// One-hot context features followed by a push-pull cyclic encoding of the
/// hour bucket: (1 +- cos)/2, (1 +- sin)/2.
struct ContextEncoder {
  int hours = 24;

  int width() const;
  Eigen::VectorXd encode(const traffic::UserContext& context, int hour) const;
};

enum class ModelKind { lsm, esn };

struct PredictorParams {
  ModelKind kind = ModelKind::lsm;
  reservoir::LiquidParams liquid{};
  esn::EsnParams esn{};
  int steps_per_input = 20;
  double delta = 0.1;
};

/// Clips negatives to zero and renormalizes; all-zero input gives uniform.
std::vector<double> normalize_prediction(const Eigen::VectorXd& raw);

/// Per-user request-distribution model: a reservoir driven by the encoded
/// context for one LTE slot (state reset before each slot) and a ridge
/// readout over [1; state].
class RequestPredictor {
 public:
  RequestPredictor(const PredictorParams& params, int inputs, int contents,
                   std::uint64_t seed);

  bool trained() const { return trained_; }
  const reservoir::Readout& readout() const { return readout_; }

  Eigen::VectorXd features(const Eigen::VectorXd& input);
  /// Fits the readout; `inputs[t]` paired with the distribution `targets[t]`.
  void train(const std::vector<Eigen::VectorXd>& inputs,
             const std::vector<std::vector<double>>& targets);
  /// Same fit from precomputed feature columns.
  void train_features(const Eigen::MatrixXd& features,
                      const Eigen::MatrixXd& targets);
  Eigen::VectorXd raw(const Eigen::VectorXd& input);
  std::vector<double> predict(const Eigen::VectorXd& input);

 private:
  PredictorParams params_;
  int contents_;
  std::unique_ptr<reservoir::Reservoir> liquid_;
  std::unique_ptr<esn::EchoStateNetwork> esn_;
  reservoir::Readout readout_;
  bool trained_ = false;
};

/// Synthetic diurnal benchmark: train on the first epochs, evaluate every
/// (user, content, hour) cell against the ground truth.
struct BenchParams {
  traffic::TraceParams trace{};
  int days = 10;
  int requests_per_epoch = 100;
  double train_fraction = 0.7;
  int cache_size = 3;
  double cell_tolerance = 0.10;
};

struct BenchRow {
  int user = 0;
  int hour = 0;
  int content = 0;
  double p_true = 0.0;
  double p_lsm = 0.0;
  double p_esn = 0.0;
};

struct BenchResult {
  double lsm_mse = 0.0;
  double esn_mse = 0.0;
  double lsm_cells_within = 0.0;  // fraction of cells within cell_tolerance
  double esn_cells_within = 0.0;
  double lsm_topc_users = 0.0;    // fraction of users whose top-C set matches
  double esn_topc_users = 0.0;
  std::vector<BenchRow> rows;
};

BenchResult run_prediction_benchmark(const BenchParams& bench,
                                     const PredictorParams& lsm,
                                     const PredictorParams& esn,
                                     std::uint64_t seed);

/// Indices of the `c` largest entries, ties to the lower index, ascending.
std::vector<int> top_contents(const std::vector<double>& scores, int c);

}  // namespace uavnet::predictor
