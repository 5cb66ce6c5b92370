// finin: synthesize corpora, train and backtest the news-influence market
// prediction engine, and inspect per-news influence weights.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "finin/backtest.hpp"
#include "finin/checkpoint.hpp"
#include "finin/run_config.hpp"
#include "finin/text_io.hpp"

namespace fs = std::filesystem;
using namespace finin;

namespace {

void print_report(const ExperimentReport& report) {
  std::printf("%-8s %-10s %-18s %8s %10s %10s %10s\n", "window", "start_day", "label", "days",
              "accuracy", "pnl", "sharpe");
  for (const WindowOutcome& w : report.windows) {
    std::printf("%-8d %-10d %-18s %8d %10.4f %10.4f %10.4f\n", w.split.window_id,
                w.split.start_day, report.label.c_str(), w.test.n_days, w.test.accuracy,
                w.test.pnl, w.test.sharpe);
  }
  std::printf("%-8s %-10s %-18s %8s %10.4f %10.4f %10.4f\n", "mean", "", report.label.c_str(),
              "", report.mean_accuracy, report.mean_pnl, report.mean_sharpe);
  if (static_cast<int>(report.windows.size()) < report.protocol_windows) {
    std::printf("note: dataset supports %zu of %d protocol windows\n", report.windows.size(),
                report.protocol_windows);
  }
}

struct Overrides {
  std::string ablation;
  int window_len = -1;
  uint64_t seed = 0;
  bool seed_set = false;
  bool grid = false, no_grid = false;
  std::string baseline;
  std::string out_root;
  std::string run_name;
  std::string label;
};

void apply(RunConfig& cfg, const Overrides& ov) {
  if (!ov.ablation.empty()) cfg.model.ablation = parse_ablation(ov.ablation);
  if (ov.window_len >= 0) cfg.model.window_len = ov.window_len;
  if (ov.seed_set) cfg.master_seed = ov.seed;
  if (ov.grid) cfg.grid = true;
  if (ov.no_grid) cfg.grid = false;
  if (!ov.baseline.empty()) cfg.baseline = parse_baseline(ov.baseline);
  if (!ov.out_root.empty()) cfg.out_dir = ov.out_root;
  if (!ov.run_name.empty()) cfg.run_name = ov.run_name;
  if (!ov.label.empty()) cfg.label = ov.label;
}

int cmd_synth(int days, int news_per_day, double fidelity, uint64_t seed,
              const std::string& out) {
  const SyntheticCorpus corpus = generate_synthetic_corpus(days, news_per_day, fidelity, seed);
  fs::create_directories(out);
  write_prices_csv(out + "/prices.csv", corpus.data.bars);
  write_news_jsonl(out + "/news.jsonl", corpus.data.news);
  write_market_text_json(out + "/market.json", corpus.data.market_text);
  write_signal_ids_csv(out + "/signal_ids.csv", corpus);
  std::printf("wrote %d days, %d news/day to %s\n", days, news_per_day, out.c_str());
  return 0;
}

int cmd_backtest(const std::string& config_path, const Overrides& ov) {
  RunConfig cfg = RunConfig::from_file(config_path);
  apply(cfg, ov);
  cfg.validate();
  const std::unique_ptr<EmbeddingProvider> provider = cfg.make_provider();
  cfg.model.text_dim = provider->dim();
  const AlignedDataset dataset = cfg.load_dataset();

  ExperimentConfig ec;
  ec.model = cfg.model;
  ec.train = cfg.train;
  ec.use_grid = cfg.grid;
  ec.baseline = cfg.baseline;
  ec.master_seed = cfg.master_seed;
  ec.label = cfg.label;
  ec.run_dir = cfg.resolve_run_dir();
  const ExperimentReport report = run_experiment(ec, dataset, *provider);
  print_report(report);
  std::printf("artifacts: %s\n", ec.run_dir.c_str());
  return 0;
}

int cmd_train(const std::string& config_path, int window_id, const Overrides& ov) {
  RunConfig cfg = RunConfig::from_file(config_path);
  apply(cfg, ov);
  cfg.validate();
  const std::unique_ptr<EmbeddingProvider> provider = cfg.make_provider();
  cfg.model.text_dim = provider->dim();
  const AlignedDataset dataset = cfg.load_dataset();

  const std::vector<WindowSplit> windows = make_windows(dataset.n_days());
  if (window_id < 0 || window_id >= static_cast<int>(windows.size())) {
    raise(ErrKind::ConfigError, "window " + std::to_string(window_id) + " not available (" +
                                    std::to_string(windows.size()) + " windows)");
  }
  const WindowSplit& w = windows[window_id];
  ModelConfig mc = cfg.model;
  mc.seed = derive_seed(cfg.master_seed, "window-model", w.window_id);
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.master_seed, "window-train", w.window_id);

  const std::string run_dir = cfg.resolve_run_dir();
  fs::create_directories(run_dir);
  const TrainResult result = train(mc, tc, w.train_range, w.val_range, dataset, *provider,
                                   nullptr, nullptr, nullptr, w.start_day);
  save_checkpoint(run_dir + "/checkpoint.bin", result.model);
  {
    std::ofstream out = open_out(run_dir + "/history.csv");
    out << "epoch,train_loss,val_accuracy,val_sharpe\n";
    for (const EpochStats& e : result.history) {
      out << e.epoch << ',' << fmt_double(e.train_loss) << ',' << fmt_double(e.val_accuracy)
          << ',' << fmt_double(e.val_sharpe) << "\n";
    }
  }
  std::printf("window %d: best epoch %d, val accuracy %.4f, val sharpe %.4f\n", w.window_id,
              result.best_epoch, result.best_val_metrics.accuracy,
              result.best_val_metrics.sharpe);
  std::printf("checkpoint: %s/checkpoint.bin\n", run_dir.c_str());
  return 0;
}

int cmd_explain(const std::string& checkpoint, const std::string& prices,
                const std::string& news, const std::string& market_text,
                const std::string& provider_kind, int hash_dim, uint64_t hash_seed,
                const std::string& embeddings, const std::string& date_str) {
  FininModel model = load_checkpoint(checkpoint);
  std::unique_ptr<EmbeddingProvider> provider;
  if (provider_kind == "precomputed") {
    provider = precomputed_provider(embeddings);
  } else if (provider_kind == "hashing") {
    provider = hashing_provider(hash_dim, hash_seed);
  } else {
    raise(ErrKind::ConfigError, "provider must be hashing or precomputed");
  }
  if (provider->dim() != model.config.text_dim) {
    raise(ErrKind::CheckpointMismatch,
          "provider dim " + std::to_string(provider->dim()) + " != checkpoint text_dim " +
              std::to_string(model.config.text_dim));
  }
  const AlignedDataset dataset =
      align(load_prices(prices), load_news(news), load_market_text(market_text));

  Date date;
  if (!try_parse_date(date_str, date)) raise(ErrKind::ConfigError, "bad date: " + date_str);
  int day = -1;
  for (const MarketBar& b : dataset.bars) {
    if (b.day.date == date) {
      day = b.day.index;
      break;
    }
  }
  if (day < 0) {
    std::string nearest_before = "(none)", nearest_after = "(none)";
    for (const MarketBar& b : dataset.bars) {
      if (b.day.date < date) nearest_before = format_date(b.day.date);
      if (date < b.day.date) {
        nearest_after = format_date(b.day.date);
        break;
      }
    }
    raise(ErrKind::ConfigError, date_str + " is not a trading day; nearest are " +
                                    nearest_before + " and " + nearest_after);
  }
  if (day < model.config.window_len - 1) {
    raise(ErrKind::InsufficientHistory, "day " + std::to_string(day) + " lacks window history");
  }

  EmbeddingCache cache(*provider);
  const DataView view(dataset);
  const std::vector<ExplainRow> rows = explain_day(model, view, cache, day);
  std::printf("%-12s %-12s %-60s\n", "raw", "normalized", "headline");
  for (const ExplainRow& r : rows) {
    std::printf("%-12.6f %-12.6f %-60s\n", r.raw_weight, r.normalized_weight,
                r.headline.c_str());
  }
  return 0;
}

int cmd_metrics(const std::string& predictions) {
  const std::vector<DayRecord> records = load_predictions_csv(predictions);
  const MetricsReport m = compute_metrics(records);
  std::printf("days     %d\n", m.n_days);
  std::printf("accuracy %.6f\n", m.accuracy);
  std::printf("pnl      %.6f\n", m.pnl);
  if (m.sharpe_defined) {
    std::printf("sharpe   %.6f\n", m.sharpe);
  } else {
    std::printf("sharpe   undefined (degenerate variance)\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FININ news-influence market prediction engine"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a planted-signal synthetic corpus");
  int days = 2000, news_per_day = 20;
  double fidelity = 0.9;
  uint64_t synth_seed = 1;
  std::string synth_out = "corpus";
  synth->add_option("--days", days, "trading days");
  synth->add_option("--news-per-day", news_per_day, "news items per day");
  synth->add_option("--fidelity", fidelity, "signal fidelity in [0.5, 1]");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // shared overrides for backtest/train
  std::string config_path;
  Overrides ov;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run config JSON")->required();
    cmd->add_option("--ablation", ov.ablation, "full | no_news | no_text | no_quantifier");
    cmd->add_option("--window-len", ov.window_len, "input window t (1,3,5,10,20)");
    cmd->add_option("--seed", ov.seed, "master seed")->each([&](const std::string&) {
      ov.seed_set = true;
    });
    cmd->add_flag("--grid", ov.grid, "grid-search hyperparameters per window");
    cmd->add_flag("--no-grid", ov.no_grid, "disable grid search");
    cmd->add_option("--baseline", ov.baseline, "always_buy | naf | sentiment_indicator");
    cmd->add_option("--out", ov.out_root, "output root");
    cmd->add_option("--run-name", ov.run_name, "run directory name (default run.<timestamp>)");
    cmd->add_option("--label", ov.label, "report row label");
  };

  auto* backtest = app.add_subcommand("backtest", "sliding-window protocol over the dataset");
  add_common(backtest);

  auto* trainc = app.add_subcommand("train", "train one window and save a checkpoint");
  int window_id = 0;
  add_common(trainc);
  trainc->add_option("--window", window_id, "window index (default 0)");

  auto* explain = app.add_subcommand("explain", "ranked news influence table for one day");
  std::string ck, prices, news, market_text, provider_kind = "hashing", embeddings, date_str;
  int hash_dim = 32;
  uint64_t hash_seed = 0;
  explain->add_option("--checkpoint", ck)->required();
  explain->add_option("--prices", prices)->required();
  explain->add_option("--news", news)->required();
  explain->add_option("--market-text", market_text)->required();
  explain->add_option("--provider", provider_kind, "hashing | precomputed");
  explain->add_option("--hash-dim", hash_dim);
  explain->add_option("--hash-seed", hash_seed);
  explain->add_option("--embeddings", embeddings, "precomputed embedding file");
  explain->add_option("--date", date_str, "trading day, YYYY-MM-DD")->required();

  auto* metrics = app.add_subcommand("metrics", "recompute metrics from a predictions CSV");
  std::string predictions;
  metrics->add_option("--predictions", predictions)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(days, news_per_day, fidelity, synth_seed, synth_out);
    if (backtest->parsed()) return cmd_backtest(config_path, ov);
    if (trainc->parsed()) return cmd_train(config_path, window_id, ov);
    if (explain->parsed()) {
      return cmd_explain(ck, prices, news, market_text, provider_kind, hash_dim, hash_seed,
                         embeddings, date_str);
    }
    if (metrics->parsed()) return cmd_metrics(predictions);
  } catch (const Error& e) {
    std::cerr << "error (" << err_name(e.kind()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
