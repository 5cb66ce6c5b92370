#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finin/dates.hpp"

namespace finin {

// Position d in the trading calendar plus its calendar date. Indices are
// consecutive from 0 and dates strictly increase with index.
struct TradingDay {
  int index = -1;
  Date date;

  bool operator==(const TradingDay&) const = default;
};

// One day's OHLCV bar (six numeric features).
struct MarketBar {
  TradingDay day;
  double open = 0, high = 0, low = 0, close = 0, adj_close = 0, volume = 0;

  bool operator==(const MarketBar&) const = default;
};

// Static market description plus constituent company names.
struct MarketText {
  std::string description;
  std::vector<std::string> constituents;

  // Canonical text fed to the embedding provider.
  std::string combined() const;

  bool operator==(const MarketText&) const = default;
};

struct NewsItem {
  std::string id;
  TradingDay day;  // assigned at alignment; index -1 before
  std::string headline;
  double sent_pos = 0, sent_neu = 0, sent_neg = 0;

  bool operator==(const NewsItem&) const = default;
};

struct DailyNewsBundle {
  TradingDay day;
  std::vector<NewsItem> items;

  bool operator==(const DailyNewsBundle&) const = default;
};

// Bars and news aligned on the trading calendar with next-day labels.
// labels[d] = 1 iff close_{d+1} > close_d; size = bars.size()-1.
struct AlignedDataset {
  std::vector<MarketBar> bars;
  MarketText market_text;
  std::vector<DailyNewsBundle> news;  // one per trading day, possibly empty
  std::vector<int> labels;
  int dropped_news = 0;  // items dated after the last trading day

  int n_days() const { return static_cast<int>(bars.size()); }
};

bool same_data(const AlignedDataset& a, const AlignedDataset& b);

// Price CSV: header date,open,high,low,close,adj_close,volume.
std::vector<MarketBar> load_prices(const std::string& path);

// News records, one JSON object per line:
// {"id": ..., "timestamp": ISO-8601 UTC, "headline": ..., "sent_pos": ...,
//  "sent_neu": ..., "sent_neg": ...}. Grouped by the timestamp's UTC date,
// file order preserved within a date.
std::map<Date, std::vector<NewsItem>> load_news(const std::string& path);

// JSON object {"description": str, "constituents": [str...]}.
MarketText load_market_text(const std::string& path);

// Roll-forward alignment: each item lands on the earliest trading day whose
// date is >= the item's date; items after the last trading day are dropped
// and counted. Labels from consecutive closes (ties -> 0).
AlignedDataset align(std::vector<MarketBar> bars,
                     const std::map<Date, std::vector<NewsItem>>& raw_news,
                     MarketText market_text);

void write_prices_csv(const std::string& path, const std::vector<MarketBar>& bars);
void write_news_jsonl(const std::string& path, const std::vector<DailyNewsBundle>& news);
void write_market_text_json(const std::string& path, const MarketText& text);

// Desk-scale corpus with a recoverable planted signal: every day carries one
// marker-headline item whose sentiment orientation matches the next-day
// return direction with probability signal_fidelity.
struct SyntheticCorpus {
  AlignedDataset data;
  std::vector<std::string> signal_ids;  // one per day
};

inline constexpr const char* kSignalMarkerToken = "signalmark";

SyntheticCorpus generate_synthetic_corpus(int n_days, int news_per_day, double signal_fidelity,
                                          uint64_t seed);

void write_signal_ids_csv(const std::string& path, const SyntheticCorpus& corpus);
std::vector<std::string> load_signal_ids_csv(const std::string& path);

// Records which day indices a computation touched; used to audit that the
// training phase never reads past the training range.
struct AccessLog {
  long accesses = 0;
  int max_day = -1;

  void note(int day) {
    ++accesses;
    if (day > max_day) max_day = day;
  }
};

// Read handle over an aligned dataset. All data reads in the train/eval
// paths go through one of these so tests can audit temporal hygiene.
class DataView {
 public:
  explicit DataView(const AlignedDataset& ds, AccessLog* log = nullptr) : ds_(&ds), log_(log) {}

  const MarketBar& bar(int day) const {
    note(day);
    return ds_->bars[day];
  }
  const DailyNewsBundle& news(int day) const {
    note(day);
    return ds_->news[day];
  }
  double close(int day) const {
    note(day);
    return ds_->bars[day].close;
  }
  // Label touches both closes it is derived from.
  int label(int day) const {
    note(day);
    note(day + 1);
    return ds_->labels[day];
  }
  const MarketText& market_text() const { return ds_->market_text; }
  int n_days() const { return ds_->n_days(); }
  const AlignedDataset& dataset() const { return *ds_; }

 private:
  void note(int day) const {
    if (log_ != nullptr) log_->note(day);
  }
  const AlignedDataset* ds_;
  AccessLog* log_;
};

}  // namespace finin
