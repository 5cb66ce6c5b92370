#include <doctest.h>

#include <cmath>

#include "finin/errors.hpp"
#include "finin/metrics.hpp"
#include "finin/rng.hpp"

using namespace finin;

namespace {

DayRecord rec(int day, int decision, int label, double ret) {
  return make_day_record(day, Date{2016, 1, 1}, decision, label, ret);
}

// Independent straight-line evaluation of the metric formulas.
struct Oracle {
  static double pnl(const std::vector<DayRecord>& rs) {
    double total = 0.0;
    for (const DayRecord& r : rs) {
      const double flag = r.decision == r.label ? 1.0 : -1.0;
      total += flag * r.market_return;
    }
    return total;
  }
  static double sharpe(const std::vector<DayRecord>& rs, double rf) {
    std::vector<double> strat;
    for (const DayRecord& r : rs) {
      strat.push_back((r.decision == r.label ? 1.0 : -1.0) * r.market_return);
    }
    double mean = 0.0;
    for (const double x : strat) mean += x;
    mean /= static_cast<double>(strat.size());
    double ss = 0.0;
    for (const double x : strat) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(strat.size() - 1));
    return (mean - rf) / sigma;
  }
  static double accuracy(const std::vector<DayRecord>& rs) {
    double c = 0.0;
    for (const DayRecord& r : rs) c += r.decision == r.label ? 1.0 : 0.0;
    return c / static_cast<double>(rs.size());
  }
};

}  // namespace

TEST_CASE("pnl hand examples") {
  // closes [100, 101, 103.02]: returns 0.01 then 0.02.
  const std::vector<DayRecord> rs = {rec(0, 1, 1, 0.01), rec(1, 0, 1, 0.02)};
  CHECK(pnl(rs) == doctest::Approx(-0.01).epsilon(1e-12));

  const std::vector<DayRecord> flat = {rec(0, 1, 1, 0.0), rec(1, 0, 0, 0.0)};
  CHECK(pnl(flat) == 0.0);

  const std::vector<DayRecord> single = {rec(0, 0, 1, 0.05)};
  CHECK(pnl(single) == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("sharpe hand examples") {
  // Strategy returns [0.03, 0.01], R_f = 0.02: mean exactly R_f, SR = 0.
  const std::vector<DayRecord> rs = {rec(0, 1, 1, 0.03), rec(1, 1, 1, 0.01)};
  CHECK(sharpe(rs, 0.02) == doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<DayRecord> constant = {rec(0, 1, 1, 0.01), rec(1, 1, 1, 0.01)};
  CHECK_THROWS_AS(sharpe(constant), Error);

  const std::vector<DayRecord> one = {rec(0, 1, 1, 0.01)};
  CHECK_THROWS_AS(sharpe(one), Error);

  // Negating all flags maps r_bar -> (-r_bar - 2 R_f)/sigma relative to the
  // original; verified numerically on a 10-day series.
  RandomStream rng(4);
  std::vector<DayRecord> base, flipped;
  for (int d = 0; d < 10; ++d) {
    const double ret = rng.normal(0.0, 0.02);
    const int label = rng.u01() < 0.5 ? 0 : 1;
    const int decision = rng.u01() < 0.5 ? 0 : 1;
    base.push_back(rec(d, decision, label, ret));
    flipped.push_back(rec(d, 1 - decision, label, ret));
  }
  const double rf = 0.02;
  double mean = 0.0;
  for (const DayRecord& r : base) mean += r.flag * r.market_return;
  mean /= 10.0;
  double ss = 0.0;
  for (const DayRecord& r : base) {
    ss += (r.flag * r.market_return - mean) * (r.flag * r.market_return - mean);
  }
  const double sigma = std::sqrt(ss / 9.0);
  CHECK(sharpe(base, rf) == doctest::Approx((mean - rf) / sigma).epsilon(1e-12));
  CHECK(sharpe(flipped, rf) == doctest::Approx((-mean - rf) / sigma).epsilon(1e-9));
}

TEST_CASE("accuracy") {
  const std::vector<DayRecord> rs = {rec(0, 1, 1, 0), rec(1, 0, 0, 0), rec(2, 1, 1, 0),
                                     rec(3, 0, 1, 0)};
  CHECK(accuracy(rs) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(accuracy({rs.begin(), rs.begin() + 3}) == 1.0);
  const std::vector<DayRecord> wrong = {rec(0, 0, 1, 0), rec(1, 1, 0, 0)};
  CHECK(accuracy(wrong) == 0.0);
  CHECK_THROWS_AS(accuracy({}), Error);
}

TEST_CASE("metrics agree with the straight-line oracle on random series") {
  RandomStream rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DayRecord> rs;
    for (int d = 0; d < 20; ++d) {
      rs.push_back(rec(d, rng.u01() < 0.5 ? 1 : 0, rng.u01() < 0.5 ? 1 : 0,
                       rng.normal(0.0, 0.015)));
    }
    CHECK(std::abs(pnl(rs) - Oracle::pnl(rs)) < 1e-9);
    CHECK(std::abs(sharpe(rs, 0.02) - Oracle::sharpe(rs, 0.02)) < 1e-9);
    CHECK(std::abs(accuracy(rs) - Oracle::accuracy(rs)) < 1e-9);
    CHECK(std::abs(sharpe(rs, kRiskFreeRate) - Oracle::sharpe(rs, 0.02)) < 1e-9);
  }
}

TEST_CASE("flag definition") {
  CHECK(rec(0, 1, 1, 0.1).flag == 1);
  CHECK(rec(0, 0, 0, 0.1).flag == 1);
  CHECK(rec(0, 1, 0, 0.1).flag == -1);
  CHECK(rec(0, 0, 1, 0.1).flag == -1);
}

TEST_CASE("make_windows") {
  SUBCASE("4020 days: the full 10-window protocol") {
    const std::vector<WindowSplit> ws = make_windows(4020);
    REQUIRE(ws.size() == 10);
    for (int k = 0; k < 10; ++k) {
      CHECK(ws[k].window_id == k);
      CHECK(ws[k].start_day == 391 * k);
      CHECK(ws[k].train_range.size() == 400);
      CHECK(ws[k].val_range.size() == 50);
      CHECK(ws[k].test_range.size() == 50);
      CHECK(ws[k].train_range.hi == ws[k].val_range.lo);
      CHECK(ws[k].val_range.hi == ws[k].test_range.lo);
      CHECK(ws[k].test_range.hi == ws[k].start_day + 500);
    }
    CHECK(ws[9].start_day == 3519);
    CHECK(ws[9].test_range.hi == 4019);
    // Test ranges pairwise disjoint.
    for (size_t a = 0; a < ws.size(); ++a) {
      for (size_t b = a + 1; b < ws.size(); ++b) {
        const bool disjoint = ws[a].test_range.hi <= ws[b].test_range.lo ||
                              ws[b].test_range.hi <= ws[a].test_range.lo;
        CHECK(disjoint);
      }
    }
  }

  SUBCASE("4019 days: window 9 is dropped (its test label needs day 4019)") {
    CHECK(make_windows(4019).size() == 9);
  }

  SUBCASE("minimum sizes") {
    CHECK(make_windows(501).size() == 1);
    CHECK_THROWS_AS(make_windows(500), Error);
    CHECK(make_windows(1200).size() == 2);
  }
}
