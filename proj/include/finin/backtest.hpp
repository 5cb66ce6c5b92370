#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finin/train.hpp"

namespace finin {

enum class BaselineKind { always_buy, naf, sentiment_indicator };

const char* baseline_name(BaselineKind k);
BaselineKind parse_baseline(const std::string& s);

// Evaluate one baseline on a window's test range. always_buy predicts 1
// every day; naf and sentiment_indicator build per-day news features over
// the t-day window plus standardized bar features and train the same MLP
// predictor as FININ.
MetricsReport run_baseline(BaselineKind kind, const WindowSplit& window,
                           const AlignedDataset& dataset, int t, int mlp_layers, int mlp_hidden,
                           const TrainConfig& tcfg, uint64_t seed);

struct ExperimentConfig {
  ModelConfig model;
  TrainConfig train;
  bool use_grid = false;
  GridSpec grid;
  std::optional<BaselineKind> baseline;  // runs a baseline instead of FININ
  std::string run_dir;                   // artifacts land here
  uint64_t master_seed = 0;
  std::string label;  // report row label; defaults to ablation/baseline name
};

struct WindowOutcome {
  WindowSplit split;
  ModelConfig used_config;
  int best_epoch = -1;
  MetricsReport test;
};

struct ExperimentReport {
  std::string label;
  std::vector<WindowOutcome> windows;
  int protocol_windows = kMaxWindows;  // windows the full protocol would run
  double mean_accuracy = 0;
  double mean_pnl = 0;
  double mean_sharpe = 0;  // NaN if any window's Sharpe is undefined
};

// The sliding-window protocol: per window, (grid-)train on 400 days, select
// on 50, evaluate on 50; aggregate by unweighted mean. Deterministic given
// master_seed. Persists per-window artifacts and report.csv under run_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const AlignedDataset& dataset,
                                const EmbeddingProvider& provider);

void write_report_csv(const std::string& path, const ExperimentReport& report);
void write_predictions_csv(const std::string& path, const std::vector<DayRecord>& records);
std::vector<DayRecord> load_predictions_csv(const std::string& path);

}  // namespace finin
