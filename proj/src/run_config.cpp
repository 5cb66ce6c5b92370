#include "finin/run_config.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "finin/text_io.hpp"

namespace finin {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      raise(ErrKind::ConfigError, std::string("config field '") + key + "': " + e.what());
    }
  }
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_whole_file(path));
  } catch (const json::exception& e) {
    raise(ErrKind::ConfigError, path + ": bad JSON: " + std::string(e.what()));
  }
  RunConfig c;
  read_field(j, "prices", c.prices);
  read_field(j, "news", c.news);
  read_field(j, "market_text", c.market_text);
  read_field(j, "provider", c.provider);
  read_field(j, "embeddings", c.embeddings);
  read_field(j, "hash_dim", c.hash_dim);
  read_field(j, "hash_seed", c.hash_seed);
  if (j.contains("model")) {
    const json& m = j.at("model");
    read_field(m, "window_len", c.model.window_len);
    read_field(m, "fused_dim", c.model.fused_dim);
    read_field(m, "mlp_layers", c.model.mlp_layers);
    read_field(m, "mlp_hidden", c.model.mlp_hidden);
    read_field(m, "n_heads", c.model.n_heads);
    read_field(m, "attn_dim", c.model.attn_dim);
    std::string ablation = ablation_name(c.model.ablation);
    read_field(m, "ablation", ablation);
    c.model.ablation = parse_ablation(ablation);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    read_field(t, "epochs", c.train.epochs);
    read_field(t, "batch_size", c.train.batch_size);
    read_field(t, "lr", c.train.lr);
    read_field(t, "beta1", c.train.beta1);
    read_field(t, "beta2", c.train.beta2);
    read_field(t, "adam_eps", c.train.adam_eps);
    read_field(t, "early_stop_patience", c.train.early_stop_patience);
  }
  read_field(j, "grid", c.grid);
  if (j.contains("baseline")) {
    std::string b;
    read_field(j, "baseline", b);
    c.baseline = parse_baseline(b);
  }
  read_field(j, "out_dir", c.out_dir);
  read_field(j, "run_name", c.run_name);
  read_field(j, "master_seed", c.master_seed);
  read_field(j, "label", c.label);
  return c;
}

void RunConfig::validate() const {
  namespace fs = std::filesystem;
  auto need_file = [](const std::string& p, const char* what) {
    if (p.empty()) raise(ErrKind::ConfigError, std::string(what) + " path not set");
    if (!fs::exists(p)) raise(ErrKind::ConfigError, std::string(what) + " path missing: " + p);
  };
  need_file(prices, "prices");
  need_file(news, "news");
  need_file(market_text, "market_text");
  if (provider == "precomputed") {
    need_file(embeddings, "embeddings");
  } else if (provider != "hashing") {
    raise(ErrKind::ConfigError, "provider must be hashing or precomputed");
  }
  if (grid && baseline) raise(ErrKind::ConfigError, "grid search and baseline modes exclude each other");
  model.validate();
  train.validate();
}

std::unique_ptr<EmbeddingProvider> RunConfig::make_provider() const {
  if (provider == "precomputed") return precomputed_provider(embeddings);
  return hashing_provider(hash_dim, hash_seed);
}

AlignedDataset RunConfig::load_dataset() const {
  return align(load_prices(prices), load_news(news), load_market_text(market_text));
}

std::string RunConfig::resolve_run_dir() const {
  std::string root = out_dir;
  if (root.empty()) {
    const char* env = std::getenv("FININ_OUT_ROOT");
    root = env != nullptr ? env : ".";
  }
  std::string name = run_name;
  if (name.empty()) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    name = "run." + std::to_string(secs);
  }
  return root + "/" + name;
}

}  // namespace finin
