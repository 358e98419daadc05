#ifndef WINFIT_SYNTH_HPP
#define WINFIT_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "winfit/distribution.hpp"
#include "winfit/trace.hpp"

namespace winfit {

struct ExponentialLaw {
  double mean = 3600.0;  // seconds
};

struct ParetoLaw {
  double shape = 2.0;  // must exceed 1 so the mean exists
  double scale = 60.0  /* seconds */;
};

using SessionLengthLaw = std::variant<ExponentialLaw, ParetoLaw>;

/// Recipe for a reproducible trace with a known session-length law.
///
/// Session starts form a Poisson process on [0, horizon); every session gets
/// a fresh actor and emits one query at its start, one every
/// intra_session_gap seconds, and one at its exact end. Sessionizing with
/// any threshold larger than intra_session_gap therefore recovers exactly
/// the drawn length wherever the window covers the whole session.
///
/// Generation is reproducible bit for bit across platforms: all draws come
/// from one std::mt19937_64 stream seeded with `seed`, mapped to [0, 1) by
/// the top 53 bits of each output, with inter-arrival times and session
/// lengths obtained by inverse CDF (one arrival draw then one length draw
/// per session). Lengths are drawn continuously and rounded to whole
/// seconds; the rounding bias is negligible for means well above a second.
struct GeneratorSpec {
  Seconds horizon = 0;
  double arrival_rate = 0.0;  // expected session starts per second
  SessionLengthLaw length_law = ExponentialLaw{};
  std::optional<double> drift_factor;  // scales the law's mean linearly from 1 at t=0 to this at the horizon
  Seconds intra_session_gap = 60;
  std::uint64_t seed = 0;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline double draw_length(const SessionLengthLaw& law, double u) {
  return std::visit(
      [u](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>) {
          return -l.mean * std::log1p(-u);
        } else {
          return l.scale * std::pow(1.0 - u, -1.0 / l.shape);
        }
      },
      law);
}

inline void check_spec(const GeneratorSpec& spec) {
  if (spec.horizon <= 0) throw std::invalid_argument("generator: horizon must be > 0");
  if (!(spec.arrival_rate > 0.0)) {
    throw std::invalid_argument("generator: arrival_rate must be > 0");
  }
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>) {
          if (!(l.mean > 0.0)) throw std::invalid_argument("generator: exponential mean must be > 0");
        } else {
          if (!(l.shape > 1.0)) throw std::invalid_argument("generator: pareto shape must be > 1");
          if (!(l.scale > 0.0)) throw std::invalid_argument("generator: pareto scale must be > 0");
        }
      },
      spec.length_law);
  if (spec.drift_factor && !(*spec.drift_factor > 0.0)) {
    throw std::invalid_argument("generator: drift_factor must be > 0");
  }
  if (spec.intra_session_gap < 1) {
    throw std::invalid_argument("generator: intra_session_gap must be >= 1");
  }
}

}  // namespace detail

/// Generates the trace described by the spec. Deterministic given the seed.
/// Sessions that start before the horizon may end after it; the events past
/// the horizon are kept, window slicing is what truncates them.
inline Trace generate(const GeneratorSpec& spec) {
  detail::check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const double horizon = static_cast<double>(spec.horizon);
  const double est_sessions = spec.arrival_rate * horizon;

  std::vector<Event> events;
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        double mean = 0.0;
        if constexpr (std::is_same_v<T, ExponentialLaw>) {
          mean = l.mean;
        } else {
          mean = l.scale * l.shape / (l.shape - 1.0);
        }
        const double per_session = mean / static_cast<double>(spec.intra_session_gap) + 2.0;
        events.reserve(static_cast<std::size_t>(est_sessions * per_session * 1.1) + 16);
      },
      spec.length_law);

  double t = 0.0;
  std::uint64_t next_session = 0;
  for (;;) {
    t += -std::log1p(-detail::unit_uniform(rng)) / spec.arrival_rate;
    if (!(t < horizon)) break;
    double scale = 1.0;
    if (spec.drift_factor) scale = 1.0 + (*spec.drift_factor - 1.0) * (t / horizon);
    const double raw = detail::draw_length(spec.length_law, detail::unit_uniform(rng)) * scale;
    const Seconds length = std::max<Seconds>(0, std::llround(raw));
    const Seconds start = static_cast<Seconds>(t);
    const Seconds end = start + length;
    const std::string actor = "s" + std::to_string(next_session++);
    for (Seconds q = start; q < end; q += spec.intra_session_gap) {
      events.push_back(Event{q, actor, std::string(), EventKind::query});
    }
    events.push_back(Event{end, actor, std::string(), EventKind::query});
  }
  return Trace::from_events(std::move(events));
}

/// Analytic CCDF of the stationary law at integer ticks 0..k_max:
/// exp(-k / mean) for the exponential law, and 1 up to the scale then
/// (scale / k)^shape for the Pareto law. Undefined for drifting specs.
inline Ccdf ground_truth_ccdf(const GeneratorSpec& spec, Seconds k_max) {
  detail::check_spec(spec);
  if (spec.drift_factor) {
    throw std::invalid_argument("ground_truth_ccdf: undefined for a drifting law");
  }
  if (k_max < 0) throw std::invalid_argument("ground_truth_ccdf: k_max must be >= 0");

  Ccdf c;
  c.count = 0;
  c.values.resize(static_cast<std::size_t>(k_max) + 1);
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        for (std::size_t k = 0; k < c.values.size(); ++k) {
          const double x = static_cast<double>(k);
          if constexpr (std::is_same_v<T, ExponentialLaw>) {
            c.values[k] = std::exp(-x / l.mean);
          } else {
            c.values[k] = x <= l.scale ? 1.0 : std::pow(l.scale / x, l.shape);
          }
        }
      },
      spec.length_law);
  return c;
}

inline GeneratorSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec: expected a JSON object");
  GeneratorSpec spec;
  const auto require = [&](const char* key) -> const nlohmann::json& {
    const auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("spec: missing key '") + key + "'");
    return *it;
  };

  const auto& horizon = require("horizon");
  if (!horizon.is_number_integer()) throw std::invalid_argument("spec: 'horizon' must be an integer");
  spec.horizon = horizon.get<Seconds>();

  const auto& rate = require("arrival_rate");
  if (!rate.is_number()) throw std::invalid_argument("spec: 'arrival_rate' must be a number");
  spec.arrival_rate = rate.get<double>();

  const auto& law = require("length_law");
  if (!law.is_object() || !law.contains("type") || !law["type"].is_string()) {
    throw std::invalid_argument("spec: 'length_law' must be an object with a 'type'");
  }
  const std::string type = law["type"].get<std::string>();
  if (type == "exponential") {
    if (!law.contains("mean") || !law["mean"].is_number()) {
      throw std::invalid_argument("spec: exponential law requires a numeric 'mean'");
    }
    spec.length_law = ExponentialLaw{law["mean"].get<double>()};
  } else if (type == "pareto") {
    if (!law.contains("shape") || !law["shape"].is_number() || !law.contains("scale") ||
        !law["scale"].is_number()) {
      throw std::invalid_argument("spec: pareto law requires numeric 'shape' and 'scale'");
    }
    spec.length_law = ParetoLaw{law["shape"].get<double>(), law["scale"].get<double>()};
  } else {
    throw std::invalid_argument("spec: unknown length_law type '" + type + "'");
  }

  if (const auto it = j.find("drift_factor"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw std::invalid_argument("spec: 'drift_factor' must be a number");
    spec.drift_factor = it->get<double>();
  }
  if (const auto it = j.find("intra_session_gap"); it != j.end()) {
    if (!it->is_number_integer()) {
      throw std::invalid_argument("spec: 'intra_session_gap' must be an integer");
    }
    spec.intra_session_gap = it->get<Seconds>();
  }
  if (const auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_integer()) throw std::invalid_argument("spec: 'seed' must be an integer");
    spec.seed = it->get<std::uint64_t>();
  }
  detail::check_spec(spec);
  return spec;
}

inline nlohmann::ordered_json spec_to_json(const GeneratorSpec& spec) {
  nlohmann::ordered_json j;
  j["horizon"] = spec.horizon;
  j["arrival_rate"] = spec.arrival_rate;
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>) {
          j["length_law"] = {{"type", "exponential"}, {"mean", l.mean}};
        } else {
          j["length_law"] = {{"type", "pareto"}, {"shape", l.shape}, {"scale", l.scale}};
        }
      },
      spec.length_law);
  if (spec.drift_factor) j["drift_factor"] = *spec.drift_factor;
  j["intra_session_gap"] = spec.intra_session_gap;
  j["seed"] = spec.seed;
  return j;
}

}  // namespace winfit

#endif  // WINFIT_SYNTH_HPP
