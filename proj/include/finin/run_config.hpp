#pragma once

#include <memory>
#include <optional>
#include <string>

#include "finin/backtest.hpp"

namespace finin {

// Everything one reproducible run needs: input paths, the embedding
// provider, model/train settings, grid toggle, output root and master seed.
// Loaded from a JSON config file; CLI flags override individual fields.
struct RunConfig {
  std::string prices;
  std::string news;
  std::string market_text;

  std::string provider = "hashing";  // hashing | precomputed
  std::string embeddings;            // precomputed file
  int hash_dim = 32;
  uint64_t hash_seed = 0;

  ModelConfig model;
  TrainConfig train;
  bool grid = false;
  std::optional<BaselineKind> baseline;

  std::string out_dir;  // default: $FININ_OUT_ROOT or "."
  std::string run_name;
  uint64_t master_seed = 0;
  std::string label;

  static RunConfig from_file(const std::string& path);

  // Path existence, provider choice, grid/baseline exclusivity, grid values.
  void validate() const;

  std::unique_ptr<EmbeddingProvider> make_provider() const;
  AlignedDataset load_dataset() const;

  // out_dir/run_name, with a timestamped name when run_name is empty.
  std::string resolve_run_dir() const;
};

}  // namespace finin
