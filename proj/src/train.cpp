#include "finin/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finin/text_io.hpp"

namespace finin {

void TrainConfig::validate() const {
  if (epochs < 1) raise(ErrKind::ConfigError, "epochs must be >= 1");
  if (batch_size < 1) raise(ErrKind::ConfigError, "batch_size must be >= 1");
  if (lr < 0.0) raise(ErrKind::ConfigError, "learning rate must be non-negative");
  if (early_stop_patience < 1) raise(ErrKind::ConfigError, "early_stop_patience must be >= 1");
}

std::vector<int> train_targets(Range range, int t) {
  std::vector<int> out;
  // History stays inside the range and the label's d+1 close does too.
  for (int d = range.lo + t - 1; d + 1 < range.hi; ++d) out.push_back(d);
  if (out.empty()) {
    raise(ErrKind::EmptySplit, "no trainable days in [" + std::to_string(range.lo) + "," +
                                   std::to_string(range.hi) + ") with window " +
                                   std::to_string(t));
  }
  return out;
}

std::vector<int> eval_targets(Range range, int t, int floor_day, bool allow_last) {
  std::vector<int> out;
  const int lo = std::max(range.lo, floor_day + t - 1);
  const int hi = allow_last ? range.hi : range.hi - 1;
  for (int d = lo; d < hi; ++d) out.push_back(d);
  if (out.empty()) {
    raise(ErrKind::EmptySplit, "no evaluable days in [" + std::to_string(range.lo) + "," +
                                   std::to_string(range.hi) + ")");
  }
  return out;
}

std::vector<Batch> batch_days(std::span<const int> targets, const DataView& view, int t,
                              int batch_size, Ablation ablation) {
  std::vector<Batch> out;
  for (size_t at = 0; at < targets.size(); at += static_cast<size_t>(batch_size)) {
    Batch b;
    const size_t end = std::min(targets.size(), at + static_cast<size_t>(batch_size));
    b.target_days.assign(targets.begin() + at, targets.begin() + end);
    b.pad_to = 1;
    if (ablation != Ablation::no_news) {
      for (const int day : b.target_days) {
        if (day - (t - 1) < 0) {
          raise(ErrKind::InsufficientHistory,
                "target day " + std::to_string(day) + " lacks window history");
        }
        for (int d = day - t + 1; d <= day; ++d) {
          b.pad_to = std::max(b.pad_to, static_cast<int>(view.news(d).items.size()));
        }
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

double batch_loss_step(FininModel& model, const DataView& view, EmbeddingCache& cache,
                       const Batch& batch, bool backward) {
  const ModelConfig& cfg = model.config;
  const int t = cfg.window_len;
  Tape tape;
  Tape::Var total = -1;
  for (const int day : batch.target_days) {
    std::vector<DayInputs> window;
    window.reserve(t);
    for (int d = day - t + 1; d <= day; ++d) {
      window.push_back(make_day_inputs(view, model.standardizer, cache, d, batch.pad_to, cfg));
    }
    const Tape::Var logit = forward_logit(tape, model.params, cfg, window);
    const Tape::Var loss = tape.logistic_loss_node(logit, view.label(day));
    total = total < 0 ? loss : tape.add(total, loss);
  }
  const Tape::Var mean =
      tape.scale(total, 1.0 / static_cast<double>(batch.target_days.size()));
  if (backward) tape.backward(mean);
  return tape.scalar(mean);
}

MetricsReport evaluate_model(FininModel& model, const DataView& view, EmbeddingCache& cache,
                             std::span<const int> targets, int floor_day) {
  std::vector<DayRecord> records;
  records.reserve(targets.size());
  for (const int day : targets) {
    const Prediction pr = predict_day(model, view, cache, day, floor_day);
    const double c0 = view.close(day);
    const double c1 = view.close(day + 1);
    records.push_back(
        make_day_record(day, pr.day.date, pr.decision, view.label(day), (c1 - c0) / c0));
  }
  return compute_metrics(std::move(records));
}

TrainResult train(const ModelConfig& mcfg, const TrainConfig& tcfg, Range train_range,
                  Range val_range, const AlignedDataset& dataset,
                  const EmbeddingProvider& provider, EmbeddingCache* shared_cache,
                  AccessLog* train_access, AccessLog* val_access, int window_floor) {
  mcfg.validate();
  tcfg.validate();
  if (provider.dim() != mcfg.text_dim) {
    raise(ErrKind::DimensionMismatch, "provider dim " + std::to_string(provider.dim()) +
                                          " != config text_dim " +
                                          std::to_string(mcfg.text_dim));
  }
  if (!(train_range.lo < train_range.hi && train_range.hi <= val_range.lo &&
        val_range.lo < val_range.hi)) {
    raise(ErrKind::ConfigError, "train/val ranges must be chronological and disjoint");
  }
  if (val_range.hi > dataset.n_days()) {
    raise(ErrKind::InsufficientData, "validation range exceeds dataset");
  }
  const int floor = window_floor < 0 ? train_range.lo : window_floor;

  const DataView train_view(dataset, train_access);
  const DataView val_view(dataset, val_access);

  EmbeddingCache local_cache(provider);
  EmbeddingCache& cache = shared_cache != nullptr ? *shared_cache : local_cache;

  // Standardizer from training-range bars only.
  Standardizer standardizer;
  {
    std::vector<MarketBar> bars;
    bars.reserve(static_cast<size_t>(train_range.size()));
    for (int d = train_range.lo; d < train_range.hi; ++d) bars.push_back(train_view.bar(d));
    standardizer = Standardizer::fit(bars);
  }

  TrainResult result;
  result.model = init_model(mcfg, standardizer);
  FininModel& model = result.model;

  std::vector<int> targets = train_targets(train_range, mcfg.window_len);
  const std::vector<int> val_days = eval_targets(val_range, mcfg.window_len, floor, false);

  Adam adam(model.params.all(), tcfg.lr, tcfg.beta1, tcfg.beta2, tcfg.adam_eps);
  RandomStream shuffle_rng(derive_seed(tcfg.seed, "epoch-shuffle"));

  std::vector<Tensor> best_snapshot;
  result.best_val_score = -std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    shuffle_rng.shuffle(targets);
    const std::vector<Batch> batches =
        batch_days(targets, train_view, mcfg.window_len, tcfg.batch_size, mcfg.ablation);
    double loss_sum = 0.0;
    for (const Batch& b : batches) {
      const double loss = batch_loss_step(model, train_view, cache, b, true);
      loss_sum += loss * static_cast<double>(b.target_days.size());
      adam.step();
    }
    const double train_loss = loss_sum / static_cast<double>(targets.size());

    const MetricsReport val = evaluate_model(model, val_view, cache, val_days, floor);
    const double score = selection_score(val);
    result.history.push_back({epoch, train_loss, val.accuracy, val.sharpe, score});

    // Ties go to the most-trained checkpoint; patience counts epochs
    // without strict improvement.
    if (score >= result.best_val_score) {
      const bool strict = score > result.best_val_score;
      result.best_val_score = score;
      result.best_epoch = epoch;
      result.best_val_metrics = val;
      best_snapshot.clear();
      for (const Parameter* p : model.params.all()) best_snapshot.push_back(p->value);
      if (strict) {
        stall = 0;
      } else if (++stall >= tcfg.early_stop_patience) {
        break;
      }
    } else if (++stall >= tcfg.early_stop_patience) {
      break;
    }
  }

  // Restore the best epoch's parameters.
  const std::vector<Parameter*> all = model.params.all();
  for (size_t i = 0; i < all.size(); ++i) all[i]->value = best_snapshot[i];
  return result;
}

GridResult grid_search(const GridSpec& grid, const ModelConfig& base, const TrainConfig& tcfg,
                       Range train_range, Range val_range, const AlignedDataset& dataset,
                       const EmbeddingProvider& provider, EmbeddingCache* shared_cache,
                       int window_floor) {
  if (grid.mlp_layers.empty() || grid.mlp_hidden.empty() || grid.n_heads.empty() ||
      grid.attn_dim.empty()) {
    raise(ErrKind::ConfigError, "grid_search: empty grid axis");
  }
  EmbeddingCache local_cache(provider);
  EmbeddingCache& cache = shared_cache != nullptr ? *shared_cache : local_cache;

  GridResult result;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_acc = -1.0;
  bool have_best = false;
  size_t idx = 0;
  for (const int layers : grid.mlp_layers) {
    for (const int hidden : grid.mlp_hidden) {
      for (const int heads : grid.n_heads) {
        for (const int attn : grid.attn_dim) {
          ModelConfig cfg = base;
          cfg.mlp_layers = layers;
          cfg.mlp_hidden = hidden;
          cfg.n_heads = heads;
          cfg.attn_dim = attn;
          cfg.seed = derive_seed(base.seed, "grid-point", idx);
          TrainConfig tc = tcfg;
          tc.seed = derive_seed(tcfg.seed, "grid-point", idx);
          TrainResult run = train(cfg, tc, train_range, val_range, dataset, provider, &cache,
                                  nullptr, nullptr, window_floor);
          const MetricsReport& val = run.best_val_metrics;
          result.table.push_back(
              {cfg, val.accuracy, val.pnl, val.sharpe, val.sharpe_defined, run.best_epoch});
          const double score = selection_score(val);
          // Ascending lexicographic iteration makes "first wins" the
          // tie-break to the smallest configuration.
          if (!have_best || score > best_score ||
              (score == best_score && val.accuracy > best_acc)) {
            have_best = true;
            best_score = score;
            best_acc = val.accuracy;
            result.best_config = cfg;
            result.best_run = std::move(run);
          }
          ++idx;
        }
      }
    }
  }
  return result;
}

void write_grid_csv(const std::string& path, const std::vector<GridRow>& table) {
  std::ofstream out = open_out(path);
  out << "mlp_layers,mlp_hidden,n_heads,attn_dim,val_accuracy,val_pnl,val_sharpe,best_epoch\n";
  for (const GridRow& r : table) {
    out << r.config.mlp_layers << ',' << r.config.mlp_hidden << ',' << r.config.n_heads << ','
        << r.config.attn_dim << ',' << fmt_double(r.val_accuracy) << ','
        << fmt_double(r.val_pnl) << ',' << (r.sharpe_defined ? fmt_double(r.val_sharpe) : "nan")
        << ',' << r.best_epoch << "\n";
  }
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

}  // namespace finin
