#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "finin/embedding.hpp"
#include "finin/market_data.hpp"
#include "finin/nn.hpp"

namespace finin {

enum class Ablation { full, no_news, no_text, no_quantifier };

const char* ablation_name(Ablation a);   // full | no_news | no_text | no_quantifier
const char* ablation_label(Ablation a);  // FININ | FININ-NTP-NNP | FININ-MTP-NTP | FININ-MIQ
Ablation parse_ablation(const std::string& s);

inline constexpr int kBarFeatures = 6;  // open, high, low, close, adj_close, volume

struct ModelConfig {
  int window_len = 3;  // t
  int text_dim = 32;   // E, must match the provider
  int fused_dim = 32;
  int mlp_layers = 2;
  int mlp_hidden = 32;
  int n_heads = 1;
  int attn_dim = 32;  // per-head d_k
  Ablation ablation = Ablation::full;
  uint64_t seed = 0;

  // Enforces the hyperparameter sets: window_len in {1,3,5,10,20},
  // mlp_layers {2,3,4}, mlp_hidden {16,32,64}, n_heads {1,3,6},
  // attn_dim {32,64,128}. Throws ConfigError.
  void validate() const;

  std::string canonical() const;
  uint64_t digest() const;
};

// Per-feature affine normalization fitted on training-range bars only.
struct Standardizer {
  std::array<double, kBarFeatures> mean{};
  std::array<double, kBarFeatures> stdev{};

  static Standardizer fit(std::span<const MarketBar> bars);
  std::array<double, kBarFeatures> apply(const MarketBar& bar) const;
};

std::array<double, kBarFeatures> bar_features(const MarketBar& bar);

struct FininParams {
  LinearParams text_enc;      // e_t: E -> fused (shared market/news)
  MlpParams market_num_enc;   // e_n1: 6 -> fused
  MlpParams news_num_enc;     // e_n2: 3 -> fused
  MlpParams market_fusion;    // f1: 2*fused -> fused
  MlpParams news_fusion;      // f2: 2*fused -> fused
  AttentionParams news_attn;  // news<->news, with value/output projections
  AttentionParams market_attn;  // market query -> news keys, weights only
  Parameter news_placeholder;   // 1×fused, stands in for zero-news days
  MlpParams predictor;          // (2·t·fused or t·fused) -> 1

  std::vector<Parameter*> all();
};

FininParams init_params(const ModelConfig& cfg);

struct FininModel {
  ModelConfig config;
  FininParams params;
  Standardizer standardizer;
};

FininModel init_model(const ModelConfig& cfg, const Standardizer& standardizer);

// Numeric inputs for one trading day, embeddings resolved, news padded to a
// common width so ragged days can share a batch. Padded rows are zero and
// masked; zero-news days carry the placeholder (mask [1,0,...]).
struct DayInputs {
  Tensor market_text_emb;  // 1×E (zeroed under no_text)
  Tensor bar_feats;        // 1×6, standardized
  Tensor item_embs;        // N×E
  Tensor item_sents;       // N×3
  std::vector<uint8_t> mask;
  bool placeholder = false;
  int real_count = 0;
};

DayInputs make_day_inputs(const DataView& view, const Standardizer& standardizer,
                          EmbeddingCache& cache, int day, int pad_to, const ModelConfig& cfg);

struct MarketEncoding {
  Tape::Var m_te, m_ne, m_e;
};
struct NewsEncoding {
  Tape::Var r_te = -1, r_ne = -1;  // -1 on placeholder days
  Tape::Var r_e;
};

MarketEncoding encode_market(Tape& tape, FininParams& p, const ModelConfig& cfg,
                             const DayInputs& in);
NewsEncoding encode_news(Tape& tape, FininParams& p, const ModelConfig& cfg, const DayInputs& in);

// First attention stage: self-attention over the day's items plus residual.
Tape::Var contextualize_news(Tape& tape, FininParams& p, Tape::Var r_e,
                             const std::vector<uint8_t>& mask);

struct QuantifyOut {
  Tape::Var r_f_day;  // 1×fused
  Tape::Var weights;  // 1×N, head-averaged, zero on masked positions
};

// Second stage: market-query scores over news keys only (the market unit is
// never a key, so the softmax runs over news states alone), head-averaged
// weights, then a direct weighted sum of the context features.
QuantifyOut quantify_influence(Tape& tape, FininParams& p, Tape::Var m_e, Tape::Var r_f,
                               const std::vector<uint8_t>& mask);

struct DayEncodingVars {
  Tape::Var m_e;
  Tape::Var r_f = -1;
  Tape::Var r_f_day = -1;
  Tape::Var weights = -1;
};

DayEncodingVars encode_day(Tape& tape, FininParams& p, const ModelConfig& cfg,
                           const DayInputs& in);

// Window forward: predictor over t consecutive day encodings (oldest first).
Tape::Var forward_logit(Tape& tape, FininParams& p, const ModelConfig& cfg,
                        std::span<const DayInputs> window);

struct Prediction {
  TradingDay day;
  double logit = 0;
  double probability = 0.5;
  int decision = 0;  // 1 iff probability > 0.5
};

Prediction make_prediction(TradingDay day, double logit);

// Predict one target day from the view (reads days day-t+1..day). Throws
// InsufficientHistory when fewer than t-1 predecessors exist above floor_day.
Prediction predict_day(FininModel& model, const DataView& view, EmbeddingCache& cache, int day,
                       int floor_day = 0);

// Forward-only snapshot of one day's encodings for inspection.
struct EncodedDay {
  Tensor m_te, m_ne, m_e;
  Tensor r_te, r_ne, r_e, r_f_items;  // real rows only; empty on placeholder days except r_e
  Tensor r_f_day;
  std::vector<double> raw_weights;  // length N_d (1 on placeholder days)
};

EncodedDay inspect_day(FininModel& model, const DataView& view, EmbeddingCache& cache, int day);

// Appendix-style min-max rescale; a constant vector maps to all 0.5.
std::vector<double> normalized_weights(const std::vector<double>& raw);

struct ExplainRow {
  std::string id;
  std::string headline;
  double raw_weight = 0;
  double normalized_weight = 0;
};

// Ranked influence table for one trading day (descending normalized weight,
// ties by bundle order). Throws NoNews on zero-news days.
std::vector<ExplainRow> explain_day(FininModel& model, const DataView& view,
                                    EmbeddingCache& cache, int day);

}  // namespace finin
