#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace provlink {

struct ProvPair;

// Calendar dates are handled as day numbers (days since 1970-01-01). A
// partial date such as "1991" or "1991-05" denotes the whole period it names.
struct DatePeriod {
  std::int64_t first_day = 0;
  std::int64_t last_day = 0;
};

std::optional<DatePeriod> parse_date(std::string_view text);

bool is_temporal_pkey(std::string_view pkey);
bool is_lower_bound_pkey(std::string_view pkey);  // from, since

// Closed interval of day numbers; a missing bound is unbounded.
struct Interval {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;

  bool empty() const { return lo && hi && *lo > *hi; }
  bool overlaps(const Interval& other) const;
};

bool has_temporal(std::span<const ProvPair> prov);

// Validity interval implied by the temporal pairs of a provenance list.
// Lower bounds use the start of the named period, upper bounds its end.
// Unparseable temporal values are ignored.
Interval validity_interval(std::span<const ProvPair> prov);

}  // namespace provlink
