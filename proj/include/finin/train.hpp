#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finin/embedding.hpp"
#include "finin/metrics.hpp"
#include "finin/model.hpp"

namespace finin {

using Range = WindowSplit::Range;

struct TrainConfig {
  int epochs = 50;
  int batch_size = 16;  // target days per optimizer step
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int early_stop_patience = 10;
  uint64_t seed = 0;

  void validate() const;
};

// Target days trainable inside [lo, hi): history (t-1 days) and the label's
// next-day close must both stay inside the range.
std::vector<int> train_targets(Range range, int t);

// Target days evaluable inside [lo, hi): history may reach back to floor_day
// (chronologically earlier data, no look-ahead). When allow_last is false the
// final day is excluded because its label would need the next range's close.
std::vector<int> eval_targets(Range range, int t, int floor_day, bool allow_last);

// One optimizer step's worth of target days plus the ragged-news padding
// width every day slot in the batch is padded to.
struct Batch {
  std::vector<int> target_days;
  int pad_to = 1;
};

std::vector<Batch> batch_days(std::span<const int> targets, const DataView& view, int t,
                              int batch_size, Ablation ablation);

// Mean logistic loss over one batch; backward accumulates into the params.
double batch_loss_step(FininModel& model, const DataView& view, EmbeddingCache& cache,
                       const Batch& batch, bool backward);

MetricsReport evaluate_model(FininModel& model, const DataView& view, EmbeddingCache& cache,
                             std::span<const int> targets, int floor_day);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  double val_accuracy = 0;
  double val_sharpe = 0;  // NaN when undefined
  double val_score = 0;
};

struct TrainResult {
  FininModel model;  // parameters restored from the best epoch
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_score = 0;
  MetricsReport best_val_metrics;
};

// Deterministic given seeds. Trains on train_range, selects the epoch with
// the best validation score (Sharpe, see selection_score), early-stops after
// early_stop_patience epochs without improvement, and restores the best
// snapshot. The two optional logs audit which day indices each phase read.
TrainResult train(const ModelConfig& mcfg, const TrainConfig& tcfg, Range train_range,
                  Range val_range, const AlignedDataset& dataset,
                  const EmbeddingProvider& provider, EmbeddingCache* shared_cache = nullptr,
                  AccessLog* train_access = nullptr, AccessLog* val_access = nullptr,
                  int window_floor = -1);

struct GridSpec {
  std::vector<int> mlp_layers{2, 3, 4};
  std::vector<int> mlp_hidden{16, 32, 64};
  std::vector<int> n_heads{1, 3, 6};
  std::vector<int> attn_dim{32, 64, 128};

  size_t size() const {
    return mlp_layers.size() * mlp_hidden.size() * n_heads.size() * attn_dim.size();
  }
};

struct GridRow {
  ModelConfig config;
  double val_accuracy = 0;
  double val_pnl = 0;
  double val_sharpe = 0;
  bool sharpe_defined = false;
  int best_epoch = -1;
};

struct GridResult {
  ModelConfig best_config;
  TrainResult best_run;
  std::vector<GridRow> table;  // lexicographic (layers, hidden, heads, attn)
};

// Trains one model per grid point and keeps the configuration with the best
// validation Sharpe; ties go to higher accuracy, then to the
// lexicographically smallest configuration.
GridResult grid_search(const GridSpec& grid, const ModelConfig& base, const TrainConfig& tcfg,
                       Range train_range, Range val_range, const AlignedDataset& dataset,
                       const EmbeddingProvider& provider, EmbeddingCache* shared_cache = nullptr,
                       int window_floor = -1);

void write_grid_csv(const std::string& path, const std::vector<GridRow>& table);

}  // namespace finin
