#include "finin/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "finin/kernels.hpp"
#include "finin/rng.hpp"

namespace finin {

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_news: return "no_news";
    case Ablation::no_text: return "no_text";
    case Ablation::no_quantifier: return "no_quantifier";
  }
  return "?";
}

const char* ablation_label(Ablation a) {
  switch (a) {
    case Ablation::full: return "FININ";
    case Ablation::no_news: return "FININ-NTP-NNP";
    case Ablation::no_text: return "FININ-MTP-NTP";
    case Ablation::no_quantifier: return "FININ-MIQ";
  }
  return "?";
}

Ablation parse_ablation(const std::string& s) {
  if (s == "full") return Ablation::full;
  if (s == "no_news") return Ablation::no_news;
  if (s == "no_text") return Ablation::no_text;
  if (s == "no_quantifier") return Ablation::no_quantifier;
  raise(ErrKind::ConfigError, "unknown ablation '" + s + "'");
}

namespace {

bool in_set(int v, std::initializer_list<int> set) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

void ModelConfig::validate() const {
  if (!in_set(window_len, {1, 3, 5, 10, 20})) {
    raise(ErrKind::ConfigError, "window_len must be one of 1,3,5,10,20");
  }
  if (!in_set(mlp_layers, {2, 3, 4})) raise(ErrKind::ConfigError, "mlp_layers must be 2, 3 or 4");
  if (!in_set(mlp_hidden, {16, 32, 64})) {
    raise(ErrKind::ConfigError, "mlp_hidden must be 16, 32 or 64");
  }
  if (!in_set(n_heads, {1, 3, 6})) raise(ErrKind::ConfigError, "n_heads must be 1, 3 or 6");
  if (!in_set(attn_dim, {32, 64, 128})) {
    raise(ErrKind::ConfigError, "attn_dim must be 32, 64 or 128");
  }
  if (text_dim < 1) raise(ErrKind::ConfigError, "text_dim must be positive");
  if (fused_dim < 1) raise(ErrKind::ConfigError, "fused_dim must be positive");
}

std::string ModelConfig::canonical() const {
  std::string s;
  s += "window_len=" + std::to_string(window_len);
  s += ";text_dim=" + std::to_string(text_dim);
  s += ";fused_dim=" + std::to_string(fused_dim);
  s += ";mlp_layers=" + std::to_string(mlp_layers);
  s += ";mlp_hidden=" + std::to_string(mlp_hidden);
  s += ";n_heads=" + std::to_string(n_heads);
  s += ";attn_dim=" + std::to_string(attn_dim);
  s += ";ablation=" + std::string(ablation_name(ablation));
  s += ";seed=" + std::to_string(seed);
  return s;
}

uint64_t ModelConfig::digest() const { return fnv1a64(canonical()); }

std::array<double, kBarFeatures> bar_features(const MarketBar& bar) {
  return {bar.open, bar.high, bar.low, bar.close, bar.adj_close, bar.volume};
}

Standardizer Standardizer::fit(std::span<const MarketBar> bars) {
  if (bars.empty()) raise(ErrKind::EmptySplit, "Standardizer: no bars to fit");
  Standardizer s;
  for (const MarketBar& b : bars) {
    const auto f = bar_features(b);
    for (int i = 0; i < kBarFeatures; ++i) s.mean[i] += f[i];
  }
  for (int i = 0; i < kBarFeatures; ++i) s.mean[i] /= static_cast<double>(bars.size());
  for (const MarketBar& b : bars) {
    const auto f = bar_features(b);
    for (int i = 0; i < kBarFeatures; ++i) {
      const double d = f[i] - s.mean[i];
      s.stdev[i] += d * d;
    }
  }
  for (int i = 0; i < kBarFeatures; ++i) {
    s.stdev[i] = std::sqrt(s.stdev[i] / static_cast<double>(bars.size()));
    if (s.stdev[i] < 1e-12) s.stdev[i] = 1.0;
  }
  return s;
}

std::array<double, kBarFeatures> Standardizer::apply(const MarketBar& bar) const {
  auto f = bar_features(bar);
  for (int i = 0; i < kBarFeatures; ++i) f[i] = (f[i] - mean[i]) / stdev[i];
  return f;
}

std::vector<Parameter*> FininParams::all() {
  std::vector<Parameter*> out;
  auto add_linear = [&out](LinearParams& l) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  };
  auto add_mlp = [&](MlpParams& m) {
    for (LinearParams& l : m.layers) add_linear(l);
  };
  auto add_attn = [&out](AttentionParams& a) {
    out.push_back(&a.wq);
    out.push_back(&a.wk);
    if (a.wv) out.push_back(&*a.wv);
    if (a.wo) out.push_back(&*a.wo);
  };
  add_linear(text_enc);
  add_mlp(market_num_enc);
  add_mlp(news_num_enc);
  add_mlp(market_fusion);
  add_mlp(news_fusion);
  add_attn(news_attn);
  add_attn(market_attn);
  out.push_back(&news_placeholder);
  add_mlp(predictor);
  return out;
}

FininParams init_params(const ModelConfig& cfg) {
  RandomStream rng(derive_seed(cfg.seed, "finin-init"));
  const int F = cfg.fused_dim;
  FininParams p;
  p.text_enc = make_linear("e_t", cfg.text_dim, F, rng);
  // Providers emit L2-normalized vectors (per-component scale ~1/sqrt(E)),
  // so the plain fan-in bound would mute text features ~sqrt(E) below the
  // numeric paths; rescale to keep the two modalities comparable.
  kernels::active().scale(std::sqrt(static_cast<double>(cfg.text_dim)),
                          p.text_enc.weight.value.data(), p.text_enc.weight.value.size());
  p.market_num_enc = make_mlp("e_n1", kBarFeatures, cfg.mlp_hidden, F, cfg.mlp_layers, rng);
  p.news_num_enc = make_mlp("e_n2", 3, cfg.mlp_hidden, F, cfg.mlp_layers, rng);
  p.market_fusion = make_mlp("f1", 2 * F, cfg.mlp_hidden, F, cfg.mlp_layers, rng);
  p.news_fusion = make_mlp("f2", 2 * F, cfg.mlp_hidden, F, cfg.mlp_layers, rng);
  p.news_attn = make_attention("attn_news", F, cfg.n_heads, cfg.attn_dim, true, rng);
  // Contextualization opens near-uniform (small query/key scale keeps its
  // score gradients gentle) so the market-query stage leads the routing.
  kernels::active().scale(0.02, p.news_attn.wq.value.data(), p.news_attn.wq.value.size());
  kernels::active().scale(0.02, p.news_attn.wk.value.data(), p.news_attn.wk.value.size());
  p.market_attn = make_attention("attn_market", F, cfg.n_heads, cfg.attn_dim, false, rng);
  {
    Tensor ph(1, F);
    const double bound = 1.0 / std::sqrt(static_cast<double>(F));
    for (double& x : ph.values()) x = rng.uniform(-bound, bound);
    p.news_placeholder = Parameter("news_placeholder", std::move(ph));
  }
  const int pred_in =
      cfg.ablation == Ablation::no_news ? cfg.window_len * F : 2 * cfg.window_len * F;
  p.predictor = make_mlp("pred", pred_in, cfg.mlp_hidden, 1, cfg.mlp_layers, rng);
  return p;
}

FininModel init_model(const ModelConfig& cfg, const Standardizer& standardizer) {
  return FininModel{cfg, init_params(cfg), standardizer};
}

DayInputs make_day_inputs(const DataView& view, const Standardizer& standardizer,
                          EmbeddingCache& cache, int day, int pad_to, const ModelConfig& cfg) {
  DayInputs in;
  const MarketBar& bar = view.bar(day);
  in.bar_feats = Tensor(1, kBarFeatures);
  const auto f = standardizer.apply(bar);
  std::copy(f.begin(), f.end(), in.bar_feats.data());

  const bool use_text = cfg.ablation != Ablation::no_text;
  in.market_text_emb = Tensor(1, cfg.text_dim);
  if (use_text) {
    const std::vector<double>& e = cache.text(view.market_text().combined());
    if (static_cast<int>(e.size()) != cfg.text_dim) {
      raise(ErrKind::DimensionMismatch, "provider dim != config text_dim");
    }
    std::memcpy(in.market_text_emb.data(), e.data(), e.size() * sizeof(double));
  }

  if (cfg.ablation == Ablation::no_news) return in;

  const DailyNewsBundle& bundle = view.news(day);
  const int real = static_cast<int>(bundle.items.size());
  in.placeholder = real == 0;
  in.real_count = in.placeholder ? 1 : real;
  const int width = std::max(in.real_count, pad_to);
  in.mask.assign(static_cast<size_t>(width), 0);
  for (int i = 0; i < in.real_count; ++i) in.mask[i] = 1;
  in.item_embs = Tensor(width, cfg.text_dim);
  in.item_sents = Tensor(width, 3);
  for (int i = 0; i < real; ++i) {
    const NewsItem& n = bundle.items[i];
    if (use_text) {
      const std::vector<double>& e = cache.news(n.id, n.headline);
      if (static_cast<int>(e.size()) != cfg.text_dim) {
        raise(ErrKind::DimensionMismatch, "provider dim != config text_dim");
      }
      std::memcpy(in.item_embs.row(i), e.data(), e.size() * sizeof(double));
    }
    in.item_sents(i, 0) = n.sent_pos;
    in.item_sents(i, 1) = n.sent_neu;
    in.item_sents(i, 2) = n.sent_neg;
  }
  return in;
}

MarketEncoding encode_market(Tape& tape, FininParams& p, const ModelConfig& cfg,
                             const DayInputs& in) {
  MarketEncoding e;
  if (cfg.ablation == Ablation::no_text) {
    e.m_te = tape.constant(Tensor(1, cfg.fused_dim));
  } else {
    e.m_te = linear_forward(tape, p.text_enc, tape.constant(in.market_text_emb));
  }
  e.m_ne = mlp_forward(tape, p.market_num_enc, tape.constant(in.bar_feats));
  const Tape::Var both[] = {e.m_te, e.m_ne};
  e.m_e = mlp_forward(tape, p.market_fusion, tape.concat_cols(both));
  return e;
}

NewsEncoding encode_news(Tape& tape, FininParams& p, const ModelConfig& cfg,
                         const DayInputs& in) {
  NewsEncoding e;
  if (in.placeholder) {
    e.r_e = tape.pad_rows(tape.leaf(p.news_placeholder), static_cast<int>(in.mask.size()));
    return e;
  }
  if (cfg.ablation == Ablation::no_text) {
    e.r_te = tape.constant(Tensor(in.item_embs.rows(), cfg.fused_dim));
  } else {
    e.r_te = linear_forward(tape, p.text_enc, tape.constant(in.item_embs));
  }
  e.r_ne = mlp_forward(tape, p.news_num_enc, tape.constant(in.item_sents));
  const Tape::Var both[] = {e.r_te, e.r_ne};
  e.r_e = mlp_forward(tape, p.news_fusion, tape.concat_cols(both));
  return e;
}

Tape::Var contextualize_news(Tape& tape, FininParams& p, Tape::Var r_e,
                             const std::vector<uint8_t>& mask) {
  const AttentionOut attn = scaled_dot_attention(tape, p.news_attn, r_e, r_e, mask);
  return tape.add(attn.output, r_e);
}

QuantifyOut quantify_influence(Tape& tape, FininParams& p, Tape::Var m_e, Tape::Var r_f,
                               const std::vector<uint8_t>& mask) {
  const std::vector<Tape::Var> rows = attention_weight_rows(tape, p.market_attn, m_e, r_f, mask);
  Tape::Var sum = rows[0];
  for (size_t h = 1; h < rows.size(); ++h) sum = tape.add(sum, rows[h]);
  QuantifyOut out;
  out.weights = rows.size() == 1 ? sum : tape.scale(sum, 1.0 / static_cast<double>(rows.size()));
  out.r_f_day = tape.matmul(out.weights, r_f);
  return out;
}

namespace {

// Mean over unmasked rows via a constant weight row (used by no_quantifier).
Tape::Var masked_mean_rows(Tape& tape, Tape::Var rows, const std::vector<uint8_t>& mask) {
  int count = 0;
  for (const uint8_t m : mask) count += m;
  Tensor u(1, static_cast<int>(mask.size()));
  for (size_t i = 0; i < mask.size(); ++i) {
    u(0, static_cast<int>(i)) = mask[i] ? 1.0 / static_cast<double>(count) : 0.0;
  }
  return tape.matmul(tape.constant(std::move(u)), rows);
}

}  // namespace

DayEncodingVars encode_day(Tape& tape, FininParams& p, const ModelConfig& cfg,
                           const DayInputs& in) {
  DayEncodingVars out;
  out.m_e = encode_market(tape, p, cfg, in).m_e;
  if (cfg.ablation == Ablation::no_news) return out;
  const NewsEncoding news = encode_news(tape, p, cfg, in);
  out.r_f = contextualize_news(tape, p, news.r_e, in.mask);
  if (cfg.ablation == Ablation::no_quantifier) {
    out.r_f_day = masked_mean_rows(tape, out.r_f, in.mask);
  } else {
    const QuantifyOut q = quantify_influence(tape, p, out.m_e, out.r_f, in.mask);
    out.r_f_day = q.r_f_day;
    out.weights = q.weights;
  }
  return out;
}

Tape::Var forward_logit(Tape& tape, FininParams& p, const ModelConfig& cfg,
                        std::span<const DayInputs> window) {
  if (static_cast<int>(window.size()) != cfg.window_len) {
    raise(ErrKind::ShapeMismatch, "forward: window length != config window_len");
  }
  std::vector<Tape::Var> market_blocks, news_blocks;
  for (const DayInputs& in : window) {
    const DayEncodingVars enc = encode_day(tape, p, cfg, in);
    market_blocks.push_back(enc.m_e);
    if (cfg.ablation != Ablation::no_news) news_blocks.push_back(enc.r_f_day);
  }
  std::vector<Tape::Var> parts = market_blocks;
  parts.insert(parts.end(), news_blocks.begin(), news_blocks.end());
  return mlp_forward(tape, p.predictor, tape.concat_cols(parts));
}

Prediction make_prediction(TradingDay day, double logit) {
  Prediction pr;
  pr.day = day;
  pr.logit = logit;
  pr.probability = sigmoid(logit);
  pr.decision = pr.probability > 0.5 ? 1 : 0;
  return pr;
}

Prediction predict_day(FininModel& model, const DataView& view, EmbeddingCache& cache, int day,
                       int floor_day) {
  const int t = model.config.window_len;
  if (day - (t - 1) < floor_day) {
    raise(ErrKind::InsufficientHistory, "day " + std::to_string(day) + " lacks " +
                                            std::to_string(t - 1) + " predecessors above day " +
                                            std::to_string(floor_day));
  }
  Tape tape;
  std::vector<DayInputs> window;
  window.reserve(t);
  for (int d = day - t + 1; d <= day; ++d) {
    window.push_back(make_day_inputs(view, model.standardizer, cache, d, 0, model.config));
  }
  const Tape::Var logit = forward_logit(tape, model.params, model.config, window);
  return make_prediction(view.bar(day).day, tape.scalar(logit));
}

EncodedDay inspect_day(FininModel& model, const DataView& view, EmbeddingCache& cache, int day) {
  const ModelConfig& cfg = model.config;
  if (cfg.ablation == Ablation::no_news) {
    raise(ErrKind::ConfigError, "inspect_day: model was trained without news inputs");
  }
  Tape tape;
  const DayInputs in = make_day_inputs(view, model.standardizer, cache, day, 0, cfg);
  EncodedDay out;
  const MarketEncoding me = encode_market(tape, model.params, cfg, in);
  out.m_te = tape.value(me.m_te);
  out.m_ne = tape.value(me.m_ne);
  out.m_e = tape.value(me.m_e);
  const NewsEncoding ne = encode_news(tape, model.params, cfg, in);
  if (ne.r_te >= 0) out.r_te = tape.value(ne.r_te);
  if (ne.r_ne >= 0) out.r_ne = tape.value(ne.r_ne);
  out.r_e = tape.value(ne.r_e);
  const Tape::Var r_f = contextualize_news(tape, model.params, ne.r_e, in.mask);
  out.r_f_items = tape.value(r_f);
  if (cfg.ablation == Ablation::no_quantifier) {
    out.r_f_day = tape.value(masked_mean_rows(tape, r_f, in.mask));
    out.raw_weights.assign(static_cast<size_t>(in.real_count),
                           1.0 / static_cast<double>(in.real_count));
  } else {
    const QuantifyOut q = quantify_influence(tape, model.params, me.m_e, r_f, in.mask);
    out.r_f_day = tape.value(q.r_f_day);
    const Tensor& w = tape.value(q.weights);
    out.raw_weights.assign(w.data(), w.data() + in.real_count);
  }
  return out;
}

std::vector<double> normalized_weights(const std::vector<double>& raw) {
  if (raw.empty()) return {};
  const auto [mn_it, mx_it] = std::minmax_element(raw.begin(), raw.end());
  const double mn = *mn_it, mx = *mx_it;
  std::vector<double> out(raw.size());
  if (mx == mn) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  for (size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mn) / (mx - mn);
  return out;
}

std::vector<ExplainRow> explain_day(FininModel& model, const DataView& view,
                                    EmbeddingCache& cache, int day) {
  const DailyNewsBundle& bundle = view.news(day);
  if (bundle.items.empty()) {
    raise(ErrKind::NoNews, "day " + std::to_string(day) + " has no news items");
  }
  const EncodedDay enc = inspect_day(model, view, cache, day);
  const std::vector<double> norm = normalized_weights(enc.raw_weights);
  std::vector<ExplainRow> rows(bundle.items.size());
  for (size_t i = 0; i < bundle.items.size(); ++i) {
    rows[i] = {bundle.items[i].id, bundle.items[i].headline, enc.raw_weights[i], norm[i]};
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ExplainRow& a, const ExplainRow& b) {
    return a.normalized_weight > b.normalized_weight;
  });
  return rows;
}

}  // namespace finin
