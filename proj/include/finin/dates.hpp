#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace finin {

// Calendar date. Comparison is chronological.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

// Days since 1970-01-01 (proleptic Gregorian).
int64_t days_from_civil(const Date& d);
Date civil_from_days(int64_t z);

// 0 = Monday .. 6 = Sunday.
int weekday(const Date& d);

bool is_valid_date(const Date& d);

// Strict ISO-8601 YYYY-MM-DD. Throws MalformedRow/MalformedRecord callers wrap;
// here we throw MalformedRecord-flavoured errors via ErrKind passed in.
bool try_parse_date(const std::string& s, Date& out);

// Calendar date of an ISO-8601 UTC datetime such as 2016-03-01T13:45:00Z.
// The time-of-day portion is validated loosely and discarded.
bool try_parse_timestamp_date(const std::string& s, Date& out);

std::string format_date(const Date& d);

// Next weekday strictly after d (used by the synthetic trading calendar).
Date next_weekday(Date d);

}  // namespace finin
