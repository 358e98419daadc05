#ifndef WINFIT_TESTS_HELPERS_HPP
#define WINFIT_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "winfit/session.hpp"
#include "winfit/trace.hpp"

namespace testutil {

using winfit::Event;
using winfit::EventKind;
using winfit::Seconds;
using winfit::Session;
using winfit::Trace;

inline Event ev(Seconds time, std::string actor, std::string object = "",
                EventKind kind = EventKind::query) {
  return Event{time, std::move(actor), std::move(object), kind};
}

struct RandomTraceParams {
  std::size_t min_events = 0;
  std::size_t max_events = 200;
  Seconds max_time = 5000;
  int max_actors = 10;
  int max_objects = 6;
  double object_probability = 0.5;
};

inline Trace random_trace(std::mt19937& rng, const RandomTraceParams& p = {}) {
  std::uniform_int_distribution<std::size_t> n_dist(p.min_events, p.max_events);
  std::uniform_int_distribution<Seconds> time_dist(0, p.max_time);
  std::uniform_int_distribution<int> actor_dist(0, p.max_actors - 1);
  std::uniform_int_distribution<int> object_dist(0, p.max_objects - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const std::size_t n = n_dist(rng);
  std::vector<Event> events;
  events.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string object;
    if (coin(rng) < p.object_probability) object = "f" + std::to_string(object_dist(rng));
    events.push_back(ev(time_dist(rng), "a" + std::to_string(actor_dist(rng)), object));
  }
  return Trace::from_events(std::move(events));
}

inline std::vector<Seconds> random_durations(std::mt19937& rng, std::size_t min_n,
                                             std::size_t max_n, Seconds max_value) {
  std::uniform_int_distribution<std::size_t> n_dist(min_n, max_n);
  std::uniform_int_distribution<Seconds> v_dist(0, max_value);
  std::vector<Seconds> out(n_dist(rng));
  for (Seconds& d : out) d = v_dist(rng);
  return out;
}

// Brute-force distance oracle: recounts the fraction of observations >= k
// directly from the multisets at every tick, independent of the Ccdf
// representation.
inline double mk_brute(const std::vector<Seconds>& a, const std::vector<Seconds>& b) {
  const Seconds k_max = std::max(*std::max_element(a.begin(), a.end()),
                                 *std::max_element(b.begin(), b.end()));
  if (k_max == 0) return 0.0;
  const auto fraction_ge = [](const std::vector<Seconds>& v, Seconds k) {
    std::size_t c = 0;
    for (Seconds d : v) c += d >= k ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(v.size());
  };
  double sum = 0.0;
  for (Seconds k = 0; k <= k_max; ++k) {
    sum += std::abs(fraction_ge(a, k) - fraction_ge(b, k));
  }
  return sum / static_cast<double>(k_max);
}

// Per-actor sessionization oracle: collects each actor's events by
// rescanning the whole trace, then cuts between consecutive events exactly
// where the gap exceeds the threshold. Quadratic on purpose.
inline std::vector<Session> sessionize_oracle(const Trace& trace, Seconds threshold) {
  std::set<std::string> actors;
  for (const Event& e : trace.events()) actors.insert(e.actor);

  std::vector<Session> out;
  for (const std::string& actor : actors) {
    std::vector<Seconds> times;
    for (const Event& e : trace.events()) {
      if (e.actor == actor) times.push_back(e.time);
    }
    std::size_t i = 0;
    while (i < times.size()) {
      std::size_t j = i;
      while (j + 1 < times.size() && times[j + 1] - times[j] <= threshold) ++j;
      out.push_back(Session{actor, times[i], times[j]});
      i = j + 1;
    }
  }
  return out;
}

}  // namespace testutil

#endif  // WINFIT_TESTS_HELPERS_HPP
