#ifndef WINFIT_SESSION_HPP
#define WINFIT_SESSION_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "winfit/trace.hpp"

namespace winfit {

/// Maximum inter-event gap that keeps two same-key events in one run. A gap
/// of exactly `seconds` stays in the run; only a strictly larger gap starts
/// a new one.
struct GapThreshold {
  Seconds seconds = 10800;  // 3 hours
};

struct Session {
  std::string actor;
  Seconds start = 0;
  Seconds end = 0;

  Seconds length() const { return end - start; }

  friend bool operator==(const Session&, const Session&) = default;
};

enum class LifetimeDefinition : std::uint8_t { gap, span };

inline std::string_view to_string(LifetimeDefinition d) {
  return d == LifetimeDefinition::gap ? "gap" : "span";
}

struct Lifetime {
  std::string object;
  Seconds length = 0;
  LifetimeDefinition definition = LifetimeDefinition::gap;

  friend bool operator==(const Lifetime&, const Lifetime&) = default;
};

enum class GapKey : std::uint8_t { actor, object };

namespace detail {

// Streams time-sorted events once, keeping one open run per key. A run
// closes when the gap to the key's next event exceeds the threshold; events
// with an empty key are skipped. Returns (key, start, end) sorted by
// (key, start).
template <class KeyOf>
std::vector<std::tuple<std::string, Seconds, Seconds>> keyed_runs(std::span<const Event> events,
                                                                  Seconds threshold,
                                                                  KeyOf key_of) {
  if (threshold <= 0) throw std::invalid_argument("gap threshold must be > 0");
  struct Run {
    Seconds start;
    Seconds last;
  };
  std::unordered_map<std::string_view, Run> open;
  std::vector<std::tuple<std::string, Seconds, Seconds>> runs;
  for (const Event& e : events) {
    const std::string_view key = key_of(e);
    if (key.empty()) continue;
    auto [it, inserted] = open.try_emplace(key, Run{e.time, e.time});
    if (!inserted) {
      Run& run = it->second;
      if (e.time - run.last > threshold) {
        runs.emplace_back(std::string(it->first), run.start, run.last);
        run = Run{e.time, e.time};
      } else {
        run.last = e.time;
      }
    }
  }
  for (const auto& [key, run] : open) {
    runs.emplace_back(std::string(key), run.start, run.last);
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

inline std::string_view actor_key(const Event& e) { return e.actor; }
inline std::string_view object_key(const Event& e) { return e.object; }

}  // namespace detail

/// Cuts each actor's event stream into sessions wherever the gap between
/// consecutive events exceeds the threshold. An isolated event yields a
/// zero-length session. Output is ordered by (actor, start).
inline std::vector<Session> sessionize(std::span<const Event> events, GapThreshold threshold) {
  auto runs = detail::keyed_runs(events, threshold.seconds, detail::actor_key);
  std::vector<Session> sessions;
  sessions.reserve(runs.size());
  for (auto& [actor, start, end] : runs) {
    sessions.push_back(Session{std::move(actor), start, end});
  }
  return sessions;
}

inline std::vector<Session> sessionize(const Trace& trace, GapThreshold threshold) {
  return sessionize(std::span<const Event>(trace.events()), threshold);
}

/// Every gap between consecutive events sharing the same key value, in
/// encounter order. Events without an object are skipped when keying by
/// object.
inline std::vector<Seconds> gap_distribution(std::span<const Event> events, GapKey key) {
  std::unordered_map<std::string_view, Seconds> last_seen;
  std::vector<Seconds> gaps;
  for (const Event& e : events) {
    const std::string_view k =
        key == GapKey::actor ? detail::actor_key(e) : detail::object_key(e);
    if (k.empty()) continue;
    auto [it, inserted] = last_seen.try_emplace(k, e.time);
    if (!inserted) {
      gaps.push_back(e.time - it->second);
      it->second = e.time;
    }
  }
  return gaps;
}

inline std::vector<Seconds> gap_distribution(const Trace& trace, GapKey key) {
  return gap_distribution(std::span<const Event>(trace.events()), key);
}

/// Gap-rule lifetime: the same run rule as sessions, keyed by object. Each
/// maximal run of queries for an object with no internal gap above the
/// threshold yields one lifetime. Ordered by (object, run start).
inline std::vector<Lifetime> lifetimes_gap(std::span<const Event> events, GapThreshold threshold) {
  auto runs = detail::keyed_runs(events, threshold.seconds, detail::object_key);
  std::vector<Lifetime> lifetimes;
  lifetimes.reserve(runs.size());
  for (auto& [object, start, end] : runs) {
    lifetimes.push_back(Lifetime{std::move(object), end - start, LifetimeDefinition::gap});
  }
  return lifetimes;
}

inline std::vector<Lifetime> lifetimes_gap(const Trace& trace, GapThreshold threshold) {
  return lifetimes_gap(std::span<const Event>(trace.events()), threshold);
}

/// Span lifetime: one entry per distinct object covering the interval from
/// its first to its last query. Ordered by object.
inline std::vector<Lifetime> lifetimes_span(std::span<const Event> events) {
  auto runs =
      detail::keyed_runs(events, std::numeric_limits<Seconds>::max(), detail::object_key);
  std::vector<Lifetime> lifetimes;
  lifetimes.reserve(runs.size());
  for (auto& [object, start, end] : runs) {
    lifetimes.push_back(Lifetime{std::move(object), end - start, LifetimeDefinition::span});
  }
  return lifetimes;
}

inline std::vector<Lifetime> lifetimes_span(const Trace& trace) {
  return lifetimes_span(std::span<const Event>(trace.events()));
}

}  // namespace winfit

#endif  // WINFIT_SESSION_HPP
