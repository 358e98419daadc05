#ifndef WINFIT_ENGINE_HPP
#define WINFIT_ENGINE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "winfit/distribution.hpp"
#include "winfit/session.hpp"
#include "winfit/trace.hpp"

namespace winfit {

/// Strictly increasing window lengths l_1 < ... < l_n, all positive, with at
/// least two entries so there is something to compare against the longest.
class WindowSchedule {
 public:
  static WindowSchedule from_lengths(std::vector<Seconds> lengths) {
    if (lengths.size() < 2) {
      throw std::invalid_argument("schedule: need at least 2 window lengths");
    }
    Seconds prev = 0;
    for (Seconds l : lengths) {
      if (l <= prev) {
        throw std::invalid_argument("schedule: lengths must be positive and strictly increasing");
      }
      prev = l;
    }
    WindowSchedule s;
    s.lengths_ = std::move(lengths);
    return s;
  }

  const std::vector<Seconds>& lengths() const { return lengths_; }
  std::size_t size() const { return lengths_.size(); }
  Seconds max_length() const { return lengths_.back(); }

 private:
  std::vector<Seconds> lengths_;
};

/// Geometric ladder from l_min to exactly l_max: each step multiplies by
/// `factor` (rounded up), and the ladder is capped so the final entry equals
/// l_max.
inline WindowSchedule schedule_geometric(Seconds l_min, Seconds l_max, double factor) {
  if (l_min <= 0 || l_min >= l_max) {
    throw std::invalid_argument("schedule_geometric: need 0 < l_min < l_max");
  }
  if (!(factor > 1.0)) throw std::invalid_argument("schedule_geometric: factor must be > 1");
  std::vector<Seconds> lengths{l_min};
  for (;;) {
    Seconds next = static_cast<Seconds>(std::ceil(static_cast<double>(lengths.back()) * factor));
    if (next <= lengths.back()) next = lengths.back() + 1;  // ceil can stall for factors near 1
    if (next >= l_max) break;
    lengths.push_back(next);
  }
  lengths.push_back(l_max);
  return WindowSchedule::from_lengths(std::move(lengths));
}

/// Which duration property is measured inside each window, plus the gap
/// threshold for the properties that need one.
struct PropertyExtractor {
  enum class Property : std::uint8_t { sessions, lifetimes_gap, lifetimes_span, gaps };

  Property property = Property::sessions;
  GapThreshold threshold{};

  std::vector<Seconds> operator()(std::span<const Event> events) const {
    std::vector<Seconds> durations;
    switch (property) {
      case Property::sessions: {
        auto sessions = sessionize(events, threshold);
        durations.reserve(sessions.size());
        for (const Session& s : sessions) durations.push_back(s.length());
        break;
      }
      case Property::lifetimes_gap: {
        auto lifetimes = winfit::lifetimes_gap(events, threshold);
        durations.reserve(lifetimes.size());
        for (const Lifetime& lt : lifetimes) durations.push_back(lt.length);
        break;
      }
      case Property::lifetimes_span: {
        auto lifetimes = winfit::lifetimes_span(events);
        durations.reserve(lifetimes.size());
        for (const Lifetime& lt : lifetimes) durations.push_back(lt.length);
        break;
      }
      case Property::gaps:
        durations = gap_distribution(events, GapKey::actor);
        break;
    }
    return durations;
  }

  std::string_view name() const {
    switch (property) {
      case Property::sessions: return "sessions";
      case Property::lifetimes_gap: return "lifetimes-gap";
      case Property::lifetimes_span: return "lifetimes-span";
      case Property::gaps: return "gaps";
    }
    return "sessions";
  }
};

inline std::optional<PropertyExtractor::Property> parse_property(std::string_view text) {
  if (text == "sessions") return PropertyExtractor::Property::sessions;
  if (text == "lifetimes-gap") return PropertyExtractor::Property::lifetimes_gap;
  if (text == "lifetimes-span") return PropertyExtractor::Property::lifetimes_span;
  if (text == "gaps") return PropertyExtractor::Property::gaps;
  return std::nullopt;
}

/// One schedule point. Windows where the extractor yields no observations
/// are undefined: count is 0 and mk/mean/std are NaN.
struct CurvePoint {
  Seconds length = 0;
  bool defined = false;
  double mk = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_dev = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t count = 0;
};

struct ConvergenceCurve {
  std::string property;
  std::vector<CurvePoint> points;  // one per schedule length, in schedule order
};

struct AnalysisResult {
  ConvergenceCurve curve;
  std::vector<std::optional<Ccdf>> ccdfs;  // parallel to curve.points
};

/// Thrown when even the longest window yields no observations, so there is
/// nothing to characterize.
class NoObservationsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates the property over every window W(0, l_i) of the schedule:
/// extracts durations from the events with time < l_i, optionally trims the
/// extreme upper tail, and builds the window's CCDF and moments. Each
/// point's mk is the distance from its CCDF to the longest window's, so the
/// final point has mk = 0 by construction.
inline AnalysisResult analyze_detailed(const Trace& trace, const PropertyExtractor& extractor,
                                       const WindowSchedule& schedule,
                                       std::optional<double> trim = std::nullopt) {
  if (schedule.max_length() > trace.horizon()) {
    throw std::invalid_argument("analyze: schedule exceeds the trace horizon");
  }
  AnalysisResult result;
  result.curve.property = std::string(extractor.name());
  const auto& lengths = schedule.lengths();
  result.curve.points.resize(lengths.size());
  result.ccdfs.resize(lengths.size());

  for (std::size_t i = 0; i < lengths.size(); ++i) {
    CurvePoint& pt = result.curve.points[i];
    pt.length = lengths[i];
    std::vector<Seconds> durations = extractor(trace.prefix(lengths[i]));
    if (durations.empty()) continue;
    if (trim) durations = trim_extremes(durations, *trim);
    const Moments m = compute_moments(durations);
    pt.defined = true;
    pt.mean = m.mean;
    pt.std_dev = m.std_dev;
    pt.count = m.count;
    result.ccdfs[i] = make_ccdf(durations);
  }

  const auto& final_ccdf = result.ccdfs.back();
  if (!final_ccdf) {
    throw NoObservationsError("analyze: no observations in the longest window");
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (result.ccdfs[i]) {
      result.curve.points[i].mk = mk_distance(*result.ccdfs[i], *final_ccdf);
    }
  }
  return result;
}

inline ConvergenceCurve analyze(const Trace& trace, const PropertyExtractor& extractor,
                                const WindowSchedule& schedule,
                                std::optional<double> trim = std::nullopt) {
  return analyze_detailed(trace, extractor, schedule, trim).curve;
}

/// Executable convergence rule. epsilon bounds the distance over the curve
/// tail, delta bounds the relative mean change there, and tail_fraction
/// picks how much of the schedule counts as the tail.
struct DetectionParams {
  double epsilon = 0.01;
  double delta = 0.02;
  double tail_fraction = 0.25;
};

enum class NonConvergenceReason : std::uint8_t { still_decreasing, fluctuating };

inline std::string_view to_string(NonConvergenceReason r) {
  return r == NonConvergenceReason::still_decreasing ? "still_decreasing" : "fluctuating";
}

/// Outcome of the detection rule. l_star is present iff characterized: the
/// shortest window from which the curve stays converged. A not-characterized
/// verdict deliberately does not claim non-stationarity: the data cannot
/// tell a too-short window from a property that drifts while measured.
struct Verdict {
  bool characterized = false;
  std::optional<Seconds> l_star;
  std::optional<NonConvergenceReason> reason;
  DetectionParams params;
};

/// Decides whether the curve converged. The final point compares the longest
/// window with itself and carries no information, so it is excluded
/// everywhere. Let T be the last ceil(tail_fraction * n) points before the
/// final one. The property is characterized when consecutive defined means
/// across T change by at most delta relative to the longest window's mean,
/// and some defined point exists from which every later defined point (final
/// excluded) has mk <= epsilon; l_star is the smallest such length.
/// Otherwise the verdict is still_decreasing when the least-squares slope of
/// mk over T is negative and drops by more than epsilon across T's span, and
/// fluctuating in every other case.
inline Verdict detect(const ConvergenceCurve& curve, DetectionParams params = {}) {
  if (!(params.epsilon > 0.0) || !(params.delta > 0.0)) {
    throw std::invalid_argument("detect: epsilon and delta must be > 0");
  }
  if (!(params.tail_fraction > 0.0) || !(params.tail_fraction < 1.0)) {
    throw std::invalid_argument("detect: tail_fraction must be in (0, 1)");
  }
  const auto& pts = curve.points;
  const std::size_t n = pts.size();
  std::size_t defined = 0;
  for (const CurvePoint& pt : pts) defined += pt.defined ? 1 : 0;
  if (defined < 3) throw std::invalid_argument("detect: need at least 3 defined curve points");
  if (!pts.back().defined) throw std::invalid_argument("detect: final point must be defined");

  std::size_t tail_count =
      static_cast<std::size_t>(std::ceil(params.tail_fraction * static_cast<double>(n)));
  tail_count = std::min(std::max<std::size_t>(tail_count, 1), n - 1);
  const std::size_t tail_begin = (n - 1) - tail_count;  // tail = [tail_begin, n-1)

  const double mean_ref = pts.back().mean;
  bool means_stable = true;
  const CurvePoint* prev = nullptr;
  for (std::size_t i = tail_begin; i + 1 < n; ++i) {
    if (!pts[i].defined) continue;
    if (prev) {
      const double diff = std::abs(pts[i].mean - prev->mean);
      const bool ok = diff == 0.0 || (mean_ref != 0.0 && diff / std::abs(mean_ref) <= params.delta);
      if (!ok) means_stable = false;
    }
    prev = &pts[i];
  }

  Verdict v;
  v.params = params;

  if (means_stable) {
    std::optional<std::size_t> l_star_index;
    bool suffix_ok = true;
    for (std::size_t i = n - 1; i-- > 0;) {
      if (!pts[i].defined) continue;
      suffix_ok = suffix_ok && pts[i].mk <= params.epsilon;
      if (suffix_ok) l_star_index = i;
    }
    if (l_star_index) {
      v.characterized = true;
      v.l_star = pts[*l_star_index].length;
      return v;
    }
  }

  // Not characterized; a consistent constant-rate decrease across the tail
  // means the curve was still heading down when the data ran out.
  std::vector<std::pair<double, double>> tail;  // (l, mk)
  for (std::size_t i = tail_begin; i + 1 < n; ++i) {
    if (pts[i].defined) tail.emplace_back(static_cast<double>(pts[i].length), pts[i].mk);
  }
  NonConvergenceReason reason = NonConvergenceReason::fluctuating;
  if (tail.size() >= 2) {
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (const auto& [x, y] : tail) {
      x_mean += x;
      y_mean += y;
    }
    x_mean /= static_cast<double>(tail.size());
    y_mean /= static_cast<double>(tail.size());
    double cov = 0.0;
    double var = 0.0;
    for (const auto& [x, y] : tail) {
      cov += (x - x_mean) * (y - y_mean);
      var += (x - x_mean) * (x - x_mean);
    }
    const double slope = cov / var;
    const double span = tail.back().first - tail.front().first;
    if (slope < 0.0 && -slope * span > params.epsilon) {
      reason = NonConvergenceReason::still_decreasing;
    }
  }
  v.characterized = false;
  v.reason = reason;
  return v;
}

/// Writes "l,mk,mean,std,count" rows in schedule order; undefined points
/// render their statistics as nan with count 0.
inline void write_curve_csv(const ConvergenceCurve& curve, std::ostream& out) {
  out << "l,mk,mean,std,count\n";
  std::string row;
  for (const CurvePoint& pt : curve.points) {
    row.clear();
    row += std::to_string(pt.length);
    row += ',';
    detail::append_double(row, pt.mk);
    row += ',';
    detail::append_double(row, pt.mean);
    row += ',';
    detail::append_double(row, pt.std_dev);
    row += ',';
    row += std::to_string(pt.count);
    row += '\n';
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

inline nlohmann::ordered_json verdict_to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["status"] = v.characterized ? "characterized" : "not_characterized";
  if (v.l_star) {
    j["l_star"] = *v.l_star;
  } else {
    j["l_star"] = nullptr;
  }
  if (v.reason) {
    j["reason"] = std::string(to_string(*v.reason));
  } else {
    j["reason"] = nullptr;
  }
  j["parameters"] = {{"epsilon", v.params.epsilon},
                     {"delta", v.params.delta},
                     {"tail_fraction", v.params.tail_fraction}};
  return j;
}

}  // namespace winfit

#endif  // WINFIT_ENGINE_HPP
