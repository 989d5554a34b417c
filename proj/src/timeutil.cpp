#include "offlist/timeutil.hpp"

#include <fmt/format.h>

#include <array>
#include <cctype>
#include <charconv>
#include <vector>

#include "offlist/error.hpp"

namespace offlist {

namespace {

using namespace std::chrono;

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  return true;
}

std::optional<Timestamp> make_time(int y, int mo, int d, int h, int mi, int s,
                                   int offset_minutes) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  // Leap seconds are folded onto the following second.
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} -
         minutes{offset_minutes};
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<int> month_from_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "jan", "feb", "mar", "apr", "may", "jun",
      "jul", "aug", "sep", "oct", "nov", "dec"};
  const std::string l = lower(name.substr(0, 3));
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (l == kMonths[i]) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::optional<int> zone_offset_minutes(std::string_view zone) {
  if (zone.empty()) return 0;
  if (zone[0] == '+' || zone[0] == '-') {
    std::string digits;
    for (char c : zone.substr(1)) {
      if (c == ':') continue;
      digits.push_back(c);
    }
    if (digits.size() != 4) return std::nullopt;
    int hh = 0;
    int mm = 0;
    if (!read_digits(digits, 0, 2, hh) || !read_digits(digits, 2, 2, mm)) return std::nullopt;
    const int total = hh * 60 + mm;
    return zone[0] == '-' ? -total : total;
  }
  const std::string z = lower(zone);
  if (z == "ut" || z == "utc" || z == "gmt" || z == "z") return 0;
  if (z == "edt") return -4 * 60;
  if (z == "est" || z == "cdt") return -5 * 60;
  if (z == "cst" || z == "mdt") return -6 * 60;
  if (z == "mst" || z == "pdt") return -7 * 60;
  if (z == "pst") return -8 * 60;
  // Military single letters and unknown alphabetic zones carry no reliable
  // information (RFC 5322 4.3); treat them as UTC.
  bool alpha = true;
  for (char c : z) alpha = alpha && std::isalpha(static_cast<unsigned char>(c));
  if (alpha) return 0;
  return std::nullopt;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  auto fail = [&]() -> InputError {
    return InputError(fmt::format("invalid RFC 3339 timestamp '{}'", text));
  };
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() < 20 || !read_digits(text, 0, 4, y) || text[4] != '-' ||
      !read_digits(text, 5, 2, mo) || text[7] != '-' || !read_digits(text, 8, 2, d) ||
      (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      !read_digits(text, 11, 2, h) || text[13] != ':' || !read_digits(text, 14, 2, mi) ||
      text[16] != ':' || !read_digits(text, 17, 2, s)) {
    throw fail();
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw fail();
  }
  const std::string_view zone = text.substr(pos);
  int offset = 0;
  if (zone == "Z" || zone == "z") {
    offset = 0;
  } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
    const auto parsed = zone_offset_minutes(zone);
    if (!parsed) throw fail();
    offset = *parsed;
  } else {
    throw fail();
  }
  const auto t = make_time(y, mo, d, h, mi, s, offset);
  if (!t) throw fail();
  return *t;
}

std::string format_rfc3339(Timestamp t) {
  const sys_days day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z",
                     static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()), hms.hours().count(),
                     hms.minutes().count(), hms.seconds().count());
}

std::optional<Timestamp> parse_mail_date(std::string_view text) {
  // Drop comments such as "(CEST)" and split on whitespace and commas.
  std::string cleaned;
  int depth = 0;
  for (char c : text) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      cleaned.push_back(c == ',' ? ' ' : c);
    }
  }
  std::vector<std::string_view> parts;
  std::string_view rest = cleaned;
  while (!rest.empty()) {
    const auto start = rest.find_first_not_of(" \t\r\n");
    if (start == std::string_view::npos) break;
    rest.remove_prefix(start);
    const auto end = rest.find_first_of(" \t\r\n");
    parts.push_back(rest.substr(0, end));
    if (end == std::string_view::npos) break;
    rest.remove_prefix(end);
  }
  std::size_t i = 0;
  if (i < parts.size() && !parts[i].empty() &&
      std::isalpha(static_cast<unsigned char>(parts[i][0]))) {
    ++i;  // day-of-week
  }
  if (parts.size() < i + 4) return std::nullopt;

  int day_value = 0;
  const auto dv = parts[i];
  if (dv.size() > 2 || std::from_chars(dv.data(), dv.data() + dv.size(), day_value).ec != std::errc{}) {
    return std::nullopt;
  }
  const auto month_value = month_from_name(parts[i + 1]);
  if (!month_value) return std::nullopt;
  int year_value = 0;
  const auto yv = parts[i + 2];
  auto [yp, yec] = std::from_chars(yv.data(), yv.data() + yv.size(), year_value);
  if (yec != std::errc{} || yp != yv.data() + yv.size()) return std::nullopt;
  if (yv.size() == 2) {
    year_value += year_value < 50 ? 2000 : 1900;
  } else if (yv.size() == 3) {
    year_value += 1900;
  }

  const auto tv = parts[i + 3];
  int h = 0, mi = 0, s = 0;
  if (tv.size() == 8) {
    if (!read_digits(tv, 0, 2, h) || tv[2] != ':' || !read_digits(tv, 3, 2, mi) ||
        tv[5] != ':' || !read_digits(tv, 6, 2, s)) {
      return std::nullopt;
    }
  } else if (tv.size() == 5) {
    if (!read_digits(tv, 0, 2, h) || tv[2] != ':' || !read_digits(tv, 3, 2, mi)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  const std::string_view zone = parts.size() > i + 4 ? parts[i + 4] : std::string_view{};
  const auto offset = zone_offset_minutes(zone);
  if (!offset) return std::nullopt;
  return make_time(year_value, *month_value, day_value, h, mi, s, *offset);
}

long long floor_days_between(Timestamp from, Timestamp to) {
  return floor<days>(to - from).count();
}

}  // namespace offlist
