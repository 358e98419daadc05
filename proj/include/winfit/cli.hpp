#ifndef WINFIT_CLI_HPP
#define WINFIT_CLI_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "winfit/engine.hpp"
#include "winfit/synth.hpp"
#include "winfit/trace_io.hpp"

namespace winfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDirty = 1;  // validate: repaired or rejected input
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNotCharacterized = 3;
inline constexpr int kExitNoObservations = 4;

/// Writes the whole file or nothing: content goes to a sibling temp file
/// that is renamed over the target.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct ValidateOptions {
  std::filesystem::path input;
  TraceFormat format = TraceFormat::csv;
};

inline int run_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err) {
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) {
    err << "error: cannot open " << opt.input.string() << "\n";
    return kExitConfigError;
  }
  std::vector<Event> events;
  try {
    events = read_events(in, opt.format);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDirty;
  }
  const ValidationReport report = validate(std::span<const Event>(events));
  nlohmann::ordered_json j;
  j["events"] = report.events;
  j["actors"] = report.actors;
  j["objects"] = report.objects;
  j["horizon"] = report.horizon;
  j["resorted"] = report.resorted;
  out << j.dump(2) << "\n";
  return report.resorted ? kExitDirty : kExitOk;
}

struct AnalyzeOptions {
  std::filesystem::path input;
  TraceFormat format = TraceFormat::csv;
  PropertyExtractor::Property property = PropertyExtractor::Property::sessions;
  Seconds threshold = 10800;
  std::vector<Seconds> schedule;  // explicit lengths; when empty, the geometric knobs apply
  Seconds l_min = 0;
  Seconds l_max = 0;
  double factor = 2.0;
  DetectionParams detection{};
  std::optional<double> trim;
  std::filesystem::path out_dir;
};

inline int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  Trace trace;
  {
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) {
      err << "error: cannot open " << opt.input.string() << "\n";
      return kExitConfigError;
    }
    try {
      trace = ingest(in, opt.format);
    } catch (const ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfigError;
    }
  }

  try {
    const WindowSchedule schedule = opt.schedule.empty()
                                        ? schedule_geometric(opt.l_min, opt.l_max, opt.factor)
                                        : WindowSchedule::from_lengths(opt.schedule);
    const PropertyExtractor extractor{opt.property, GapThreshold{opt.threshold}};
    const AnalysisResult result = analyze_detailed(trace, extractor, schedule, opt.trim);
    const Verdict verdict = detect(result.curve, opt.detection);

    std::filesystem::create_directories(opt.out_dir);
    for (std::size_t i = 0; i < result.ccdfs.size(); ++i) {
      if (!result.ccdfs[i]) continue;
      std::ostringstream buf;
      write_ccdf_csv(*result.ccdfs[i], buf);
      const std::string name = "ccdf_" + std::to_string(result.curve.points[i].length) + ".csv";
      atomic_write_file(opt.out_dir / name, buf.str());
    }
    {
      std::ostringstream buf;
      write_curve_csv(result.curve, buf);
      atomic_write_file(opt.out_dir / "curve.csv", buf.str());
    }
    atomic_write_file(opt.out_dir / "verdict.json", verdict_to_json(verdict).dump(2) + "\n");

    out << "property: " << result.curve.property << ", windows: " << schedule.size() << " ("
        << schedule.lengths().front() << " .. " << schedule.max_length() << ")\n";
    if (verdict.characterized) {
      out << "status: characterized, l_star: " << *verdict.l_star << "\n";
    } else {
      out << "status: not_characterized, reason: " << to_string(*verdict.reason) << "\n";
    }
    out << "wrote " << (opt.out_dir / "curve.csv").string() << ", "
        << (opt.out_dir / "verdict.json").string() << "\n";
    return verdict.characterized ? kExitOk : kExitNotCharacterized;
  } catch (const NoObservationsError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoObservations;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

struct SynthOptions {
  std::filesystem::path spec_path;
  std::filesystem::path out_dir;
  TraceFormat format = TraceFormat::csv;
};

namespace detail {

// Support of the analytic CCDF written next to a generated trace: ticks are
// emitted until the curve falls below 1e-12, capped at the horizon.
inline Seconds ground_truth_k_max(const GeneratorSpec& spec) {
  const double cutoff = 1e-12;
  const double k = std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>) {
          return l.mean * -std::log(cutoff);
        } else {
          return l.scale * std::pow(cutoff, -1.0 / l.shape);
        }
      },
      spec.length_law);
  const double capped = std::min(k, static_cast<double>(spec.horizon));
  return std::max<Seconds>(1, static_cast<Seconds>(std::ceil(capped)));
}

}  // namespace detail

inline int run_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
  nlohmann::json spec_json;
  {
    std::ifstream in(opt.spec_path, std::ios::binary);
    if (!in) {
      err << "error: cannot open " << opt.spec_path.string() << "\n";
      return kExitConfigError;
    }
    spec_json = nlohmann::json::parse(in, nullptr, false);
    if (spec_json.is_discarded()) {
      err << "error: spec is not valid JSON\n";
      return kExitConfigError;
    }
  }
  GeneratorSpec spec;
  try {
    spec = spec_from_json(spec_json);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const Trace trace = generate(spec);
  std::filesystem::create_directories(opt.out_dir);
  const std::string trace_name =
      opt.format == TraceFormat::csv ? "trace.csv" : "trace.ndjson";
  {
    std::ostringstream buf;
    write_trace(trace, buf, opt.format);
    atomic_write_file(opt.out_dir / trace_name, buf.str());
  }
  out << "trace: " << (opt.out_dir / trace_name).string() << " (" << trace.size()
      << " events, horizon " << trace.horizon() << ")\n";

  if (!spec.drift_factor) {
    const Ccdf truth = ground_truth_ccdf(spec, detail::ground_truth_k_max(spec));
    std::ostringstream buf;
    write_ccdf_csv(truth, buf);
    atomic_write_file(opt.out_dir / "ground_truth.csv", buf.str());
    out << "ground truth: " << (opt.out_dir / "ground_truth.csv").string() << "\n";
  } else {
    out << "drifting law: no analytic ground truth written\n";
  }
  return kExitOk;
}

}  // namespace winfit::cli

#endif  // WINFIT_CLI_HPP
