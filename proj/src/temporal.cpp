#include "provlink/temporal.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <vector>

#include "provlink/profile.hpp"

namespace provlink {

namespace {

std::int64_t day_number(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  return sys_days{year{y} / month{m} / day{d}}.time_since_epoch().count();
}

bool parse_uint(std::string_view s, unsigned& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<DatePeriod> parse_date(std::string_view text) {
  // YYYY, YYYY-MM or YYYY-MM-DD; '.' and '/' are accepted as separators.
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '-' || text[i] == '.' || text[i] == '/') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.empty() || parts.size() > 3 || parts[0].size() != 4) return std::nullopt;

  unsigned y = 0, m = 0, d = 0;
  if (!parse_uint(parts[0], y)) return std::nullopt;
  if (parts.size() == 1) {
    return DatePeriod{day_number(int(y), 1, 1), day_number(int(y), 12, 31)};
  }
  if (!parse_uint(parts[1], m) || m < 1 || m > 12) return std::nullopt;
  using namespace std::chrono;
  auto last = year_month_day_last{year{int(y)}, month_day_last{month{m}}};
  if (parts.size() == 2) {
    return DatePeriod{day_number(int(y), m, 1),
                      sys_days{last}.time_since_epoch().count()};
  }
  if (!parse_uint(parts[2], d) || d < 1 || d > unsigned(last.day())) return std::nullopt;
  auto n = day_number(int(y), m, d);
  return DatePeriod{n, n};
}

bool is_temporal_pkey(std::string_view pkey) {
  return pkey == "from" || pkey == "to" || pkey == "until" || pkey == "since";
}

bool is_lower_bound_pkey(std::string_view pkey) {
  return pkey == "from" || pkey == "since";
}

bool Interval::overlaps(const Interval& other) const {
  if (empty() || other.empty()) return false;
  if (lo && other.hi && *lo > *other.hi) return false;
  if (other.lo && hi && *other.lo > *hi) return false;
  return true;
}

bool has_temporal(std::span<const ProvPair> prov) {
  return std::any_of(prov.begin(), prov.end(),
                     [](const ProvPair& p) { return is_temporal_pkey(p.pkey); });
}

Interval validity_interval(std::span<const ProvPair> prov) {
  Interval out;
  for (const auto& p : prov) {
    if (!is_temporal_pkey(p.pkey)) continue;
    auto period = parse_date(p.pvalue);
    if (!period) continue;
    if (is_lower_bound_pkey(p.pkey)) {
      out.lo = out.lo ? std::max(*out.lo, period->first_day) : period->first_day;
    } else {
      out.hi = out.hi ? std::min(*out.hi, period->last_day) : period->last_day;
    }
  }
  return out;
}

}  // namespace provlink
