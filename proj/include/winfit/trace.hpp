#ifndef WINFIT_TRACE_HPP
#define WINFIT_TRACE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace winfit {

/// Timestamps and durations are integer seconds since the trace origin.
using Seconds = std::int64_t;

enum class EventKind : std::uint8_t { query, login, logout, generic };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::query: return "query";
    case EventKind::login: return "login";
    case EventKind::logout: return "logout";
    case EventKind::generic: return "generic";
  }
  return "generic";
}

inline std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "query") return EventKind::query;
  if (text == "login") return EventKind::login;
  if (text == "logout") return EventKind::logout;
  if (text == "generic") return EventKind::generic;
  return std::nullopt;
}

/// One timestamped action by an actor, optionally about an object.
/// An empty object string means the event is not about any object.
struct Event {
  Seconds time = 0;
  std::string actor;
  std::string object;
  EventKind kind = EventKind::generic;

  friend bool operator==(const Event&, const Event&) = default;
};

/// The half-open interval [start, start + length). Events at the right
/// boundary fall outside, so adjacent windows partition a trace with no
/// double counting.
struct ObservationWindow {
  Seconds start = 0;
  Seconds length = 0;
};

/// Time-ordered event sequence, immutable after construction. Events with
/// equal times keep their input order.
class Trace {
 public:
  Trace() = default;

  /// Builds a trace from raw events, stable-sorting by time when the input
  /// is out of order. Throws std::invalid_argument on a negative time or an
  /// empty actor.
  static Trace from_events(std::vector<Event> events) {
    for (const Event& e : events) {
      if (e.time < 0) throw std::invalid_argument("trace: event time must be >= 0");
      if (e.actor.empty()) throw std::invalid_argument("trace: event actor must be non-empty");
    }
    if (!std::is_sorted(events.begin(), events.end(), by_time)) {
      std::stable_sort(events.begin(), events.end(), by_time);
    }
    Trace t;
    t.events_ = std::move(events);
    return t;
  }

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  /// Largest event time, 0 for an empty trace.
  Seconds horizon() const { return events_.empty() ? 0 : events_.back().time; }

  /// Events with time < length, i.e. the window starting at the origin, as a
  /// cheap view into the trace.
  std::span<const Event> prefix(Seconds length) const {
    auto last = std::lower_bound(events_.begin(), events_.end(), length,
                                 [](const Event& e, Seconds t) { return e.time < t; });
    return {events_.data(), static_cast<std::size_t>(last - events_.begin())};
  }

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  static bool by_time(const Event& a, const Event& b) { return a.time < b.time; }

  std::vector<Event> events_;
};

/// Restriction of a trace to the events inside [window.start,
/// window.start + window.length). Order is preserved; an empty result is
/// valid. Throws std::invalid_argument when the length is not positive.
inline Trace slice(const Trace& trace, ObservationWindow window) {
  if (window.length <= 0) throw std::invalid_argument("slice: window length must be > 0");
  const auto& ev = trace.events();
  auto cmp = [](const Event& e, Seconds t) { return e.time < t; };
  auto first = std::lower_bound(ev.begin(), ev.end(), window.start, cmp);
  auto last = std::lower_bound(first, ev.end(), window.start + window.length, cmp);
  return Trace::from_events(std::vector<Event>(first, last));
}

struct ValidationReport {
  std::uint64_t events = 0;
  std::uint64_t actors = 0;
  std::uint64_t objects = 0;
  Seconds horizon = 0;
  bool resorted = false;  // input was out of order and had to be re-sorted

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Counts events, distinct actors and distinct objects, and reports whether
/// the sequence violated time order (in which case building a Trace from it
/// repairs the order by a stable re-sort).
inline ValidationReport validate(std::span<const Event> events) {
  ValidationReport r;
  r.events = events.size();
  std::unordered_set<std::string_view> actors;
  std::unordered_set<std::string_view> objects;
  Seconds prev = 0;
  Seconds max_time = 0;
  for (const Event& e : events) {
    actors.insert(e.actor);
    if (!e.object.empty()) objects.insert(e.object);
    if (e.time < prev) r.resorted = true;
    prev = e.time;
    max_time = std::max(max_time, e.time);
  }
  r.actors = actors.size();
  r.objects = objects.size();
  r.horizon = events.empty() ? 0 : max_time;
  return r;
}

inline ValidationReport validate(const Trace& trace) {
  return validate(std::span<const Event>(trace.events()));
}

}  // namespace winfit

#endif  // WINFIT_TRACE_HPP
