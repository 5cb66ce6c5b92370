#pragma once

#include <span>
#include <vector>

#include "finin/market_data.hpp"

namespace finin {

inline constexpr double kRiskFreeRate = 0.02;

// One evaluated day: the model's decision, the realized label, and the
// market's simple return from d to d+1. flag = +1 on a correct call, -1
// otherwise; the strategy return for the day is flag * market_return.
struct DayRecord {
  int day = 0;
  Date date;
  int decision = 0;
  int label = 0;
  int flag = 0;
  double market_return = 0;
};

DayRecord make_day_record(int day, Date date, int decision, int label, double market_return);

// Cumulative signed simple return.
double pnl(std::span<const DayRecord> records);

// (mean strategy return - risk_free) / sample stdev of strategy returns
// (denominator D-1). Throws TooFewDays (<2) and DegenerateVariance (sigma=0).
double sharpe(std::span<const DayRecord> records, double risk_free = kRiskFreeRate);

// Fraction of days with decision == label. Throws EmptyInput.
double accuracy(std::span<const DayRecord> records);

struct MetricsReport {
  int n_days = 0;
  double accuracy = 0;
  double pnl = 0;
  double sharpe = 0;  // NaN when undefined
  bool sharpe_defined = false;
  std::vector<DayRecord> records;
};

MetricsReport compute_metrics(std::vector<DayRecord> records, double risk_free = kRiskFreeRate);

// Scalar used to rank models during validation: accuracy plus a bounded
// risk-adjusted-return tie-break (see the note in metrics.cpp for why a
// bare Sharpe score misranks checkpoints on 50-day spans).
double selection_score(const MetricsReport& m);

// One 500-day sliding window, split 400/50/50 chronologically.
struct WindowSplit {
  int window_id = 0;
  int start_day = 0;
  struct Range {
    int lo = 0, hi = 0;  // half-open [lo, hi)
    int size() const { return hi - lo; }
  };
  Range train_range, val_range, test_range;
};

inline constexpr int kWindowSpan = 500;
inline constexpr int kWindowStride = 391;
inline constexpr int kMaxWindows = 10;

// Windows at starts 0, 391, ..., 9*391. A window needs day start+500 to exist
// (the final test label), so datasets shorter than 4020 days yield fewer than
// 10 windows; the caller is told how many were dropped via the return size.
// Throws InsufficientData when not even one window fits (< 501 days).
std::vector<WindowSplit> make_windows(int total_days);

}  // namespace finin
