#include "finin/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "finin/checkpoint.hpp"
#include "finin/text_io.hpp"

namespace finin {

using nlohmann::json;

const char* baseline_name(BaselineKind k) {
  switch (k) {
    case BaselineKind::always_buy: return "always_buy";
    case BaselineKind::naf: return "naf";
    case BaselineKind::sentiment_indicator: return "sentiment_indicator";
  }
  return "?";
}

BaselineKind parse_baseline(const std::string& s) {
  if (s == "always_buy") return BaselineKind::always_buy;
  if (s == "naf") return BaselineKind::naf;
  if (s == "sentiment_indicator") return BaselineKind::sentiment_indicator;
  raise(ErrKind::ConfigError, "unknown baseline '" + s + "'");
}

namespace {

// News-derived per-day features shared by the trainable baselines:
// naf               -> [raw count, count z-scored over the training range]
// sentiment_indicator -> [mean(pos - neg) over the day's items, item count]
// Both append the six standardized bar features.
constexpr int kBaselineNewsFeats = 2;
constexpr int kBaselineDayFeats = kBaselineNewsFeats + kBarFeatures;

struct BaselineFeaturizer {
  BaselineKind kind;
  Standardizer bars;
  double count_mean = 0;
  double count_std = 1;

  static BaselineFeaturizer fit(BaselineKind kind, const DataView& view, Range train_range) {
    BaselineFeaturizer f;
    f.kind = kind;
    std::vector<MarketBar> train_bars;
    for (int d = train_range.lo; d < train_range.hi; ++d) train_bars.push_back(view.bar(d));
    f.bars = Standardizer::fit(train_bars);
    double sum = 0.0;
    for (int d = train_range.lo; d < train_range.hi; ++d) {
      sum += static_cast<double>(view.news(d).items.size());
    }
    f.count_mean = sum / static_cast<double>(train_range.size());
    double ss = 0.0;
    for (int d = train_range.lo; d < train_range.hi; ++d) {
      const double diff = static_cast<double>(view.news(d).items.size()) - f.count_mean;
      ss += diff * diff;
    }
    f.count_std = std::sqrt(ss / static_cast<double>(train_range.size()));
    if (f.count_std < 1e-12) f.count_std = 1.0;
    return f;
  }

  void day_features(const DataView& view, int day, double* out) const {
    const DailyNewsBundle& bundle = view.news(day);
    const double count = static_cast<double>(bundle.items.size());
    if (kind == BaselineKind::naf) {
      out[0] = count;
      out[1] = (count - count_mean) / count_std;
    } else {
      double polarity = 0.0;
      for (const NewsItem& n : bundle.items) polarity += n.sent_pos - n.sent_neg;
      out[0] = bundle.items.empty() ? 0.0 : polarity / count;
      out[1] = count;
    }
    const auto bf = bars.apply(view.bar(day));
    std::copy(bf.begin(), bf.end(), out + kBaselineNewsFeats);
  }

  Tensor window_features(const DataView& view, int day, int t) const {
    Tensor x(1, t * kBaselineDayFeats);
    for (int i = 0; i < t; ++i) {
      day_features(view, day - t + 1 + i, x.data() + i * kBaselineDayFeats);
    }
    return x;
  }
};

struct BaselineModel {
  BaselineFeaturizer feats;
  MlpParams mlp;
  int t;
};

Prediction baseline_predict(BaselineModel& m, const DataView& view, int day) {
  Tape tape;
  const Tape::Var x = tape.constant(m.feats.window_features(view, day, m.t));
  const Tape::Var logit = mlp_forward(tape, m.mlp, x);
  return make_prediction(view.bar(day).day, tape.scalar(logit));
}

MetricsReport baseline_evaluate(BaselineModel& m, const DataView& view,
                                std::span<const int> targets) {
  std::vector<DayRecord> records;
  for (const int day : targets) {
    const Prediction pr = baseline_predict(m, view, day);
    const double c0 = view.close(day);
    const double c1 = view.close(day + 1);
    records.push_back(
        make_day_record(day, pr.day.date, pr.decision, view.label(day), (c1 - c0) / c0));
  }
  return compute_metrics(std::move(records));
}

MetricsReport run_trained_baseline(BaselineKind kind, const WindowSplit& w,
                                   const AlignedDataset& dataset, int t, int mlp_layers,
                                   int mlp_hidden, const TrainConfig& tcfg, uint64_t seed) {
  const DataView view(dataset);
  BaselineModel model;
  model.t = t;
  model.feats = BaselineFeaturizer::fit(kind, view, w.train_range);
  RandomStream init_rng(derive_seed(seed, "baseline-init"));
  model.mlp = make_mlp(std::string("baseline_") + baseline_name(kind), t * kBaselineDayFeats,
                       mlp_hidden, 1, mlp_layers, init_rng);

  std::vector<int> targets = train_targets(w.train_range, t);
  const std::vector<int> val_days = eval_targets(w.val_range, t, w.start_day, false);

  std::vector<Parameter*> params;
  for (LinearParams& l : model.mlp.layers) {
    params.push_back(&l.weight);
    params.push_back(&l.bias);
  }
  Adam adam(params, tcfg.lr, tcfg.beta1, tcfg.beta2, tcfg.adam_eps);
  RandomStream shuffle_rng(derive_seed(seed, "baseline-shuffle"));

  std::vector<Tensor> best_snapshot;
  double best_score = -std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    shuffle_rng.shuffle(targets);
    for (size_t at = 0; at < targets.size(); at += static_cast<size_t>(tcfg.batch_size)) {
      const size_t end = std::min(targets.size(), at + static_cast<size_t>(tcfg.batch_size));
      Tape tape;
      Tape::Var total = -1;
      for (size_t i = at; i < end; ++i) {
        const int day = targets[i];
        const Tape::Var x = tape.constant(model.feats.window_features(view, day, t));
        const Tape::Var loss =
            tape.logistic_loss_node(mlp_forward(tape, model.mlp, x), view.label(day));
        total = total < 0 ? loss : tape.add(total, loss);
      }
      tape.backward(tape.scale(total, 1.0 / static_cast<double>(end - at)));
      adam.step();
    }
    const MetricsReport val = baseline_evaluate(model, view, val_days);
    const double score = selection_score(val);
    if (score > best_score) {
      best_score = score;
      best_snapshot.clear();
      for (const Parameter* p : params) best_snapshot.push_back(p->value);
      stall = 0;
    } else if (++stall >= tcfg.early_stop_patience) {
      break;
    }
  }
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = best_snapshot[i];

  const std::vector<int> test_days = eval_targets(w.test_range, t, w.start_day, true);
  return baseline_evaluate(model, view, test_days);
}

json config_json(const ModelConfig& c) {
  json j;
  j["window_len"] = c.window_len;
  j["text_dim"] = c.text_dim;
  j["fused_dim"] = c.fused_dim;
  j["mlp_layers"] = c.mlp_layers;
  j["mlp_hidden"] = c.mlp_hidden;
  j["n_heads"] = c.n_heads;
  j["attn_dim"] = c.attn_dim;
  j["ablation"] = ablation_name(c.ablation);
  j["seed"] = c.seed;
  return j;
}

}  // namespace

MetricsReport run_baseline(BaselineKind kind, const WindowSplit& window,
                           const AlignedDataset& dataset, int t, int mlp_layers, int mlp_hidden,
                           const TrainConfig& tcfg, uint64_t seed) {
  if (window.test_range.hi + 1 > dataset.n_days()) {
    raise(ErrKind::InsufficientData, "window exceeds dataset");
  }
  if (kind == BaselineKind::always_buy) {
    const DataView view(dataset);
    const std::vector<int> test_days = eval_targets(window.test_range, t, window.start_day, true);
    std::vector<DayRecord> records;
    for (const int day : test_days) {
      const double c0 = view.close(day);
      const double c1 = view.close(day + 1);
      records.push_back(
          make_day_record(day, view.bar(day).day.date, 1, view.label(day), (c1 - c0) / c0));
    }
    return compute_metrics(std::move(records));
  }
  return run_trained_baseline(kind, window, dataset, t, mlp_layers, mlp_hidden, tcfg, seed);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const AlignedDataset& dataset,
                                const EmbeddingProvider& provider) {
  namespace fs = std::filesystem;
  cfg.model.validate();
  cfg.train.validate();
  const std::vector<WindowSplit> windows = make_windows(dataset.n_days());

  ExperimentReport report;
  report.label = !cfg.label.empty()
                     ? cfg.label
                     : (cfg.baseline ? baseline_name(*cfg.baseline)
                                     : ablation_label(cfg.model.ablation));

  const bool persist = !cfg.run_dir.empty();
  if (persist) fs::create_directories(cfg.run_dir);

  EmbeddingCache cache(provider);
  for (const WindowSplit& w : windows) {
    WindowOutcome outcome;
    outcome.split = w;
    const std::string wdir = cfg.run_dir + "/window_" + std::to_string(w.window_id);
    if (persist) fs::create_directories(wdir);

    if (cfg.baseline) {
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(cfg.master_seed, "window-train", w.window_id);
      outcome.test = run_baseline(*cfg.baseline, w, dataset, cfg.model.window_len,
                                  cfg.model.mlp_layers, cfg.model.mlp_hidden, tc,
                                  derive_seed(cfg.master_seed, "window-baseline", w.window_id));
      outcome.used_config = cfg.model;
    } else {
      ModelConfig mc = cfg.model;
      mc.seed = derive_seed(cfg.master_seed, "window-model", w.window_id);
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(cfg.master_seed, "window-train", w.window_id);

      TrainResult run;
      if (cfg.use_grid) {
        GridResult gr = grid_search(cfg.grid, mc, tc, w.train_range, w.val_range, dataset,
                                    provider, &cache, w.start_day);
        if (persist) write_grid_csv(wdir + "/grid_table.csv", gr.table);
        run = std::move(gr.best_run);
        mc = gr.best_config;
      } else {
        run = train(mc, tc, w.train_range, w.val_range, dataset, provider, &cache, nullptr,
                    nullptr, w.start_day);
      }
      outcome.used_config = run.model.config;
      outcome.best_epoch = run.best_epoch;

      const DataView view(dataset);
      const std::vector<int> test_days =
          eval_targets(w.test_range, mc.window_len, w.start_day, true);
      outcome.test = evaluate_model(run.model, view, cache, test_days, w.start_day);

      if (persist) {
        save_checkpoint(wdir + "/checkpoint.bin", run.model);
        json j;
        j["window_id"] = w.window_id;
        j["start_day"] = w.start_day;
        j["train_range"] = {w.train_range.lo, w.train_range.hi};
        j["val_range"] = {w.val_range.lo, w.val_range.hi};
        j["test_range"] = {w.test_range.lo, w.test_range.hi};
        j["config"] = config_json(outcome.used_config);
        j["best_epoch"] = run.best_epoch;
        std::ofstream out = open_out(wdir + "/config.json");
        out << j.dump(2) << "\n";
      }
    }
    if (persist) write_predictions_csv(wdir + "/predictions.csv", outcome.test.records);
    report.windows.push_back(std::move(outcome));
  }

  double acc = 0, pl = 0, sr = 0;
  bool sr_ok = true;
  for (const WindowOutcome& w : report.windows) {
    acc += w.test.accuracy;
    pl += w.test.pnl;
    sr += w.test.sharpe;
    sr_ok = sr_ok && w.test.sharpe_defined;
  }
  const double n = static_cast<double>(report.windows.size());
  report.mean_accuracy = acc / n;
  report.mean_pnl = pl / n;
  report.mean_sharpe = sr_ok ? sr / n : std::numeric_limits<double>::quiet_NaN();

  if (persist) write_report_csv(cfg.run_dir + "/report.csv", report);
  return report;
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out = open_out(path);
  out << "window,start_day,label,n_days,accuracy,pnl,sharpe\n";
  for (const WindowOutcome& w : report.windows) {
    out << w.split.window_id << ',' << w.split.start_day << ',' << report.label << ','
        << w.test.n_days << ',' << fmt_double(w.test.accuracy) << ',' << fmt_double(w.test.pnl)
        << ',' << (w.test.sharpe_defined ? fmt_double(w.test.sharpe) : "nan") << "\n";
  }
  out << "mean,," << report.label << ",," << fmt_double(report.mean_accuracy) << ','
      << fmt_double(report.mean_pnl) << ','
      << (std::isnan(report.mean_sharpe) ? "nan" : fmt_double(report.mean_sharpe)) << "\n";
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

void write_predictions_csv(const std::string& path, const std::vector<DayRecord>& records) {
  std::ofstream out = open_out(path);
  out << "day,date,decision,label,flag,return\n";
  for (const DayRecord& r : records) {
    out << r.day << ',' << format_date(r.date) << ',' << r.decision << ',' << r.label << ','
        << r.flag << ',' << fmt_double(r.market_return) << "\n";
  }
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

std::vector<DayRecord> load_predictions_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) raise(ErrKind::MalformedFile, path + ": missing header");
  std::vector<DayRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6) {
      raise(ErrKind::MalformedFile, path + ":" + std::to_string(lineno) + ": expected 6 columns");
    }
    DayRecord r;
    try {
      r.day = std::stoi(f[0]);
      if (!try_parse_date(f[1], r.date)) throw std::invalid_argument("date");
      r.decision = std::stoi(f[2]);
      r.label = std::stoi(f[3]);
      r.flag = std::stoi(f[4]);
      r.market_return = std::stod(f[5]);
    } catch (const std::exception&) {
      raise(ErrKind::MalformedFile, path + ":" + std::to_string(lineno) + ": bad field");
    }
    if (r.flag != (r.decision == r.label ? 1 : -1)) {
      raise(ErrKind::MalformedFile,
            path + ":" + std::to_string(lineno) + ": flag inconsistent with decision/label");
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace finin
