#include "finin/dates.hpp"

#include <cctype>
#include <cstdio>

namespace finin {

namespace {

bool all_digits(const std::string& s, size_t from, size_t to) {
  if (to > s.size()) return false;
  for (size_t i = from; i < to; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return table[m - 1];
}

}  // namespace

// Howard Hinnant's civil calendar algorithms.
int64_t days_from_civil(const Date& d) {
  int y = d.year;
  const int m = d.month;
  const int dd = d.day;
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(dd) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

Date civil_from_days(int64_t z) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned dd = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(dd)};
}

int weekday(const Date& d) {
  const int64_t z = days_from_civil(d);
  // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
  return static_cast<int>(((z % 7) + 7 + 3) % 7);
}

bool is_valid_date(const Date& d) {
  if (d.month < 1 || d.month > 12) return false;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return false;
  return true;
}

bool try_parse_date(const std::string& s, Date& out) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  if (!all_digits(s, 0, 4) || !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) return false;
  Date d;
  d.year = std::stoi(s.substr(0, 4));
  d.month = std::stoi(s.substr(5, 2));
  d.day = std::stoi(s.substr(8, 2));
  if (!is_valid_date(d)) return false;
  out = d;
  return true;
}

bool try_parse_timestamp_date(const std::string& s, Date& out) {
  if (s.size() < 11 || (s[10] != 'T' && s[10] != ' ')) return false;
  // Minimal time sanity: HH:MM at least.
  if (s.size() < 16 || !all_digits(s, 11, 13) || s[13] != ':' || !all_digits(s, 14, 16)) {
    return false;
  }
  return try_parse_date(s.substr(0, 10), out);
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

Date next_weekday(Date d) {
  int64_t z = days_from_civil(d) + 1;
  Date n = civil_from_days(z);
  while (weekday(n) >= 5) {
    ++z;
    n = civil_from_days(z);
  }
  return n;
}

}  // namespace finin
