#ifndef WINFIT_DISTRIBUTION_HPP
#define WINFIT_DISTRIBUTION_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "winfit/trace.hpp"

namespace winfit {

/// Discrete complementary cumulative distribution over 1-second ticks.
/// values[k] is the fraction of observations larger than or equal to k, for
/// k = 0..k_max where k_max is the largest observed value. values[0] is 1
/// for any sample and the sequence is non-increasing.
struct Ccdf {
  std::vector<double> values;
  std::uint64_t count = 0;  // observations behind the curve; 0 for analytic curves

  Seconds k_max() const { return static_cast<Seconds>(values.size()) - 1; }
};

/// Builds the CCDF of a duration sample. Throws std::invalid_argument on an
/// empty sample or a negative duration.
inline Ccdf make_ccdf(std::span<const Seconds> durations) {
  if (durations.empty()) throw std::invalid_argument("ccdf: empty sample");
  Seconds max_value = 0;
  for (Seconds d : durations) {
    if (d < 0) throw std::invalid_argument("ccdf: negative duration");
    max_value = std::max(max_value, d);
  }
  std::vector<std::uint64_t> at_least(static_cast<std::size_t>(max_value) + 2, 0);
  for (Seconds d : durations) ++at_least[static_cast<std::size_t>(d)];
  for (std::size_t k = at_least.size() - 1; k-- > 0;) at_least[k] += at_least[k + 1];

  Ccdf c;
  c.count = durations.size();
  c.values.resize(static_cast<std::size_t>(max_value) + 1);
  const double n = static_cast<double>(durations.size());
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    c.values[k] = static_cast<double>(at_least[k]) / n;
  }
  return c;
}

/// Monge-Kantorovich distance between two CCDFs: the mean per-tick gap
/// (sum_k |P_k - Q_k|) / K with K = max(p.k_max, q.k_max). Beyond a curve's
/// own support the fraction of observations >= k is exactly 0, so the
/// shorter curve is extended with zeros. Returns 0 when K = 0 (both supports
/// collapse at zero).
inline double mk_distance(const Ccdf& p, const Ccdf& q) {
  if (p.values.empty() || q.values.empty()) {
    throw std::invalid_argument("mk_distance: empty distribution");
  }
  const std::size_t span = std::max(p.values.size(), q.values.size());
  if (span == 1) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < span; ++k) {
    const double a = k < p.values.size() ? p.values[k] : 0.0;
    const double b = k < q.values.size() ? q.values[k] : 0.0;
    sum += std::abs(a - b);
  }
  return sum / static_cast<double>(span - 1);
}

struct Moments {
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation
  std::uint64_t count = 0;
};

/// Arithmetic mean and population standard deviation (the observations are
/// the whole window population, not a sample). Throws on an empty input.
inline Moments compute_moments(std::span<const Seconds> durations) {
  if (durations.empty()) throw std::invalid_argument("moments: empty sample");
  double sum = 0.0;
  for (Seconds d : durations) sum += static_cast<double>(d);
  const double n = static_cast<double>(durations.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (Seconds d : durations) {
    const double dev = static_cast<double>(d) - mean;
    sq += dev * dev;
  }
  return Moments{mean, std::sqrt(sq / n), durations.size()};
}

/// Keeps the smallest ceil(quantile * count) values and drops the extreme
/// upper tail, returned in ascending order. quantile must lie in (0, 1];
/// 1 keeps everything.
inline std::vector<Seconds> trim_extremes(std::span<const Seconds> durations, double quantile) {
  if (durations.empty()) throw std::invalid_argument("trim_extremes: empty sample");
  if (!(quantile > 0.0) || quantile > 1.0) {
    throw std::invalid_argument("trim_extremes: quantile must be in (0, 1]");
  }
  std::vector<Seconds> sorted(durations.begin(), durations.end());
  std::sort(sorted.begin(), sorted.end());
  auto keep = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(sorted.size())));
  keep = std::min(std::max<std::size_t>(keep, 1), sorted.size());
  sorted.resize(keep);
  return sorted;
}

namespace detail {

// Shortest decimal form that round-trips to the same double.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, static_cast<std::size_t>(ptr - buf));
}

}  // namespace detail

/// Writes "k,p" rows, one per tick. Fractions are rendered exactly: the
/// decimal form round-trips to the stored double.
inline void write_ccdf_csv(const Ccdf& c, std::ostream& out) {
  out << "k,p\n";
  std::string row;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    row.clear();
    row += std::to_string(k);
    row += ',';
    detail::append_double(row, c.values[k]);
    row += '\n';
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace winfit

#endif  // WINFIT_DISTRIBUTION_HPP
