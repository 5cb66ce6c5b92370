#include "finin/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "finin/rng.hpp"
#include "finin/text_io.hpp"

namespace finin {

using nlohmann::json;

std::string MarketText::combined() const {
  std::string s = description;
  for (const std::string& c : constituents) {
    s.push_back(' ');
    s += c;
  }
  return s;
}

namespace {

constexpr const char* kPriceHeader = "date,open,high,low,close,adj_close,volume";

double parse_number(const std::string& s, const std::string& where) {
  if (s.empty()) raise(ErrKind::MalformedRow, where + ": empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    raise(ErrKind::MalformedRow, where + ": not a number: '" + s + "'");
  }
  return v;
}

void check_bar(const MarketBar& b, const std::string& where) {
  if (b.open <= 0 || b.high <= 0 || b.low <= 0 || b.close <= 0 || b.adj_close <= 0) {
    raise(ErrKind::ConstraintViolation, where + ": prices must be strictly positive");
  }
  if (b.volume < 0) raise(ErrKind::ConstraintViolation, where + ": negative volume");
  if (b.low > std::min(b.open, b.close) || std::max(b.open, b.close) > b.high) {
    raise(ErrKind::ConstraintViolation, where + ": low/high do not bracket open/close");
  }
}

void check_sentiment(const NewsItem& n, const std::string& where) {
  const double comps[3] = {n.sent_pos, n.sent_neu, n.sent_neg};
  for (const double c : comps) {
    if (!(c >= 0.0 && c <= 1.0)) {
      raise(ErrKind::SentimentOutOfRange, where + ": component outside [0,1]");
    }
  }
  const double sum = n.sent_pos + n.sent_neu + n.sent_neg;
  if (std::abs(sum - 1.0) > 1e-3) {
    raise(ErrKind::SentimentOutOfRange, where + ": components sum to " + fmt_double(sum));
  }
}

}  // namespace

std::vector<MarketBar> load_prices(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) raise(ErrKind::MalformedRow, path + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPriceHeader) {
    raise(ErrKind::MalformedRow, path + ": expected header '" + std::string(kPriceHeader) + "'");
  }
  std::vector<MarketBar> bars;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7) {
      raise(ErrKind::MalformedRow, where + ": expected 7 columns, got " + std::to_string(f.size()));
    }
    MarketBar b;
    if (!try_parse_date(f[0], b.day.date)) {
      raise(ErrKind::MalformedRow, where + ": bad date '" + f[0] + "'");
    }
    b.open = parse_number(f[1], where);
    b.high = parse_number(f[2], where);
    b.low = parse_number(f[3], where);
    b.close = parse_number(f[4], where);
    b.adj_close = parse_number(f[5], where);
    b.volume = parse_number(f[6], where);
    check_bar(b, where);
    if (!bars.empty() && !(bars.back().day.date < b.day.date)) {
      raise(ErrKind::NonMonotonicDates, where + ": dates must strictly increase");
    }
    b.day.index = static_cast<int>(bars.size());
    bars.push_back(b);
  }
  return bars;
}

std::map<Date, std::vector<NewsItem>> load_news(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<Date, std::vector<NewsItem>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrKind::MalformedRecord, where + ": bad JSON: " + e.what());
    }
    NewsItem n;
    try {
      n.id = j.at("id").get<std::string>();
      n.headline = j.at("headline").get<std::string>();
      n.sent_pos = j.at("sent_pos").get<double>();
      n.sent_neu = j.at("sent_neu").get<double>();
      n.sent_neg = j.at("sent_neg").get<double>();
    } catch (const json::exception& e) {
      raise(ErrKind::MalformedRecord, where + ": " + e.what());
    }
    if (n.id.empty()) raise(ErrKind::MalformedRecord, where + ": empty id");
    if (n.headline.empty()) raise(ErrKind::MalformedRecord, where + ": empty headline");
    Date date;
    std::string ts;
    try {
      ts = j.at("timestamp").get<std::string>();
    } catch (const json::exception& e) {
      raise(ErrKind::MalformedRecord, where + ": " + e.what());
    }
    if (!try_parse_timestamp_date(ts, date)) {
      raise(ErrKind::MalformedRecord, where + ": bad timestamp '" + ts + "'");
    }
    check_sentiment(n, where);
    out[date].push_back(std::move(n));
  }
  return out;
}

MarketText load_market_text(const std::string& path) {
  json j;
  try {
    j = json::parse(read_whole_file(path));
  } catch (const json::exception& e) {
    raise(ErrKind::MalformedRecord, path + ": bad JSON: " + std::string(e.what()));
  }
  MarketText t;
  try {
    t.description = j.at("description").get<std::string>();
    t.constituents = j.at("constituents").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    raise(ErrKind::MalformedRecord, path + ": " + std::string(e.what()));
  }
  if (t.description.empty()) raise(ErrKind::MalformedRecord, path + ": empty description");
  return t;
}

AlignedDataset align(std::vector<MarketBar> bars,
                     const std::map<Date, std::vector<NewsItem>>& raw_news,
                     MarketText market_text) {
  if (bars.empty()) raise(ErrKind::EmptyCalendar, "align: no trading days");
  AlignedDataset ds;
  for (size_t i = 0; i < bars.size(); ++i) {
    bars[i].day.index = static_cast<int>(i);
    if (i > 0 && !(bars[i - 1].day.date < bars[i].day.date)) {
      raise(ErrKind::NonMonotonicDates, "align: bar dates must strictly increase");
    }
  }
  ds.bars = std::move(bars);
  ds.market_text = std::move(market_text);
  ds.news.resize(ds.bars.size());
  for (size_t i = 0; i < ds.bars.size(); ++i) ds.news[i].day = ds.bars[i].day;

  std::vector<Date> dates;
  dates.reserve(ds.bars.size());
  for (const MarketBar& b : ds.bars) dates.push_back(b.day.date);
  for (const auto& [date, items] : raw_news) {
    const auto it = std::lower_bound(dates.begin(), dates.end(), date);
    if (it == dates.end()) {
      ds.dropped_news += static_cast<int>(items.size());
      continue;
    }
    const int day = static_cast<int>(it - dates.begin());
    for (NewsItem n : items) {
      n.day = ds.bars[day].day;
      ds.news[day].items.push_back(std::move(n));
    }
  }

  ds.labels.resize(ds.bars.size() - 1);
  for (size_t d = 0; d + 1 < ds.bars.size(); ++d) {
    ds.labels[d] = ds.bars[d + 1].close > ds.bars[d].close ? 1 : 0;
  }
  return ds;
}

bool same_data(const AlignedDataset& a, const AlignedDataset& b) {
  return a.bars == b.bars && a.market_text == b.market_text && a.news == b.news &&
         a.labels == b.labels;
}

void write_prices_csv(const std::string& path, const std::vector<MarketBar>& bars) {
  std::ofstream out = open_out(path);
  out << kPriceHeader << "\n";
  for (const MarketBar& b : bars) {
    out << format_date(b.day.date) << ',' << fmt_double(b.open) << ',' << fmt_double(b.high)
        << ',' << fmt_double(b.low) << ',' << fmt_double(b.close) << ','
        << fmt_double(b.adj_close) << ',' << fmt_double(b.volume) << "\n";
  }
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

void write_news_jsonl(const std::string& path, const std::vector<DailyNewsBundle>& news) {
  std::ofstream out = open_out(path);
  for (const DailyNewsBundle& bundle : news) {
    for (const NewsItem& n : bundle.items) {
      json j;
      j["id"] = n.id;
      j["timestamp"] = format_date(bundle.day.date) + "T12:00:00Z";
      j["headline"] = n.headline;
      j["sent_pos"] = n.sent_pos;
      j["sent_neu"] = n.sent_neu;
      j["sent_neg"] = n.sent_neg;
      out << j.dump() << "\n";
    }
  }
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

void write_market_text_json(const std::string& path, const MarketText& text) {
  json j;
  j["description"] = text.description;
  j["constituents"] = text.constituents;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

SyntheticCorpus generate_synthetic_corpus(int n_days, int news_per_day, double signal_fidelity,
                                          uint64_t seed) {
  if (n_days < 3) raise(ErrKind::InvalidParameter, "synthetic corpus needs n_days >= 3");
  if (news_per_day < 1) raise(ErrKind::InvalidParameter, "synthetic corpus needs news_per_day >= 1");
  if (!(signal_fidelity >= 0.5 && signal_fidelity <= 1.0)) {
    raise(ErrKind::InvalidParameter, "signal_fidelity must lie in [0.5, 1]");
  }

  RandomStream rng(seed);
  SyntheticCorpus corpus;
  AlignedDataset& ds = corpus.data;

  // Weekday calendar.
  std::vector<Date> dates;
  Date d{2010, 1, 4};  // a Monday
  for (int i = 0; i < n_days; ++i) {
    dates.push_back(d);
    d = next_weekday(d);
  }

  // Next-day directions and the close path. The step sign is the signal's
  // intended direction, so labels equal the directions exactly.
  std::vector<int> direction(n_days);
  for (int i = 0; i < n_days; ++i) direction[i] = rng.u01() < 0.5 ? -1 : 1;
  std::vector<double> closes(n_days);
  closes[0] = 1000.0;
  for (int i = 0; i + 1 < n_days; ++i) {
    const double mag = std::clamp(0.01 * std::abs(rng.normal()), 1e-4, 0.09);
    closes[i + 1] = closes[i] * (1.0 + direction[i] * mag);
  }

  // OHLC and volume are smooth functions of the close path and the calendar.
  // Independent per-day fuzz would hand the model six fingerprint channels
  // to memorize days by, instead of reading the planted news signal.
  ds.bars.resize(n_days);
  for (int i = 0; i < n_days; ++i) {
    MarketBar& b = ds.bars[i];
    b.day = TradingDay{i, dates[i]};
    b.close = closes[i];
    b.adj_close = closes[i];
    b.open = i == 0 ? closes[0] : closes[i - 1];
    b.high = std::max(b.open, b.close) * 1.002;
    b.low = std::min(b.open, b.close) * 0.998;
    b.volume = 1.0e6 * (1.0 + 0.5 * std::sin(2.0 * 3.14159265358979 * i / 250.0));
  }

  ds.market_text.description =
      "Synthetic benchmark index tracking a basket of simulated large-cap companies";
  ds.market_text.constituents = {"Amber Logistics",   "Basalt Energy",   "Cobalt Systems",
                                 "Dune Materials",    "Ember Financial", "Flint Retail",
                                 "Granite Aerospace", "Harbor Pharma",   "Iris Networks",
                                 "Juniper Foods"};

  auto noise_word = [&rng]() { return "w" + std::to_string(rng.index(400)); };

  // Noise headlines recur from a fixed pool, the way routine wire stories
  // do; fresh word salad every day would let a model fingerprint days by
  // headline instead of reading the planted signal.
  std::vector<std::string> noise_pool(60);
  for (std::string& h : noise_pool) {
    const int words = 4 + static_cast<int>(rng.index(5));
    h = noise_word();
    for (int w = 1; w < words; ++w) h += " " + noise_word();
  }

  // All sentiment triples, signal included, come from one near-uniform
  // cloud: neutral = 1/3 + g, the rest split 50/50 shifted by h. The signal
  // is the same draw conditioned on its oriented component clearing
  // kSignalFloor, so no per-item sentiment statistic separates it from
  // confident-looking noise; only the marker headline identifies it.
  constexpr double kSignalFloor = 0.52;
  auto noise_triple = [&rng](double& pos, double& neu, double& neg) {
    const double g = rng.uniform(-0.08, 0.08);
    const double h = rng.uniform(-0.28, 0.28);
    neu = 1.0 / 3.0 + g;
    pos = (1.0 - neu) / 2.0 + h;
    neg = (1.0 - neu) / 2.0 - h;
  };

  ds.news.resize(n_days);
  corpus.signal_ids.reserve(n_days);
  for (int day = 0; day < n_days; ++day) {
    DailyNewsBundle& bundle = ds.news[day];
    bundle.day = ds.bars[day].day;
    const int signal_pos = static_cast<int>(rng.index(news_per_day));
    // Orientation follows the planted direction, flipped with prob 1-fidelity.
    int orient = direction[day];
    if (rng.u01() >= signal_fidelity) orient = -orient;
    for (int i = 0; i < news_per_day; ++i) {
      NewsItem n;
      n.day = bundle.day;
      n.id = "synth-d" + std::to_string(day) + "-i" + std::to_string(i);
      if (i == signal_pos) {
        n.headline = std::string(kSignalMarkerToken) + " " + noise_word() + " " + noise_word() +
                     " " + noise_word();
        double pos, neu, neg;
        do {
          noise_triple(pos, neu, neg);
        } while (pos < kSignalFloor);
        if (orient > 0) {
          n.sent_pos = pos;  // (s, 1-s-eps, eps) with s > 0.5
          n.sent_neu = neu;
          n.sent_neg = neg;
        } else {
          n.sent_pos = neg;  // mirrored
          n.sent_neu = neu;
          n.sent_neg = pos;
        }
        corpus.signal_ids.push_back(n.id);
      } else {
        n.headline = noise_pool[rng.index(noise_pool.size())];
        noise_triple(n.sent_pos, n.sent_neu, n.sent_neg);
      }
      bundle.items.push_back(std::move(n));
    }
  }

  ds.labels.resize(n_days - 1);
  for (int i = 0; i + 1 < n_days; ++i) ds.labels[i] = direction[i] > 0 ? 1 : 0;
  return corpus;
}

void write_signal_ids_csv(const std::string& path, const SyntheticCorpus& corpus) {
  std::ofstream out = open_out(path);
  out << "day,date,signal_id\n";
  for (size_t d = 0; d < corpus.signal_ids.size(); ++d) {
    out << d << ',' << format_date(corpus.data.bars[d].day.date) << ',' << corpus.signal_ids[d]
        << "\n";
  }
  if (!out) raise(ErrKind::IoFailure, "write failed: " + path);
}

std::vector<std::string> load_signal_ids_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) raise(ErrKind::MalformedFile, path + ": missing header");
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 3) raise(ErrKind::MalformedFile, path + ": expected 3 columns");
    ids.push_back(f[2]);
  }
  return ids;
}

}  // namespace finin
