#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "winfit/cli.hpp"

namespace {

const std::map<std::string, winfit::TraceFormat> kFormats{
    {"csv", winfit::TraceFormat::csv},
    {"ndjson", winfit::TraceFormat::ndjson},
};

const std::map<std::string, winfit::PropertyExtractor::Property> kProperties{
    {"sessions", winfit::PropertyExtractor::Property::sessions},
    {"lifetimes-gap", winfit::PropertyExtractor::Property::lifetimes_gap},
    {"lifetimes-span", winfit::PropertyExtractor::Property::lifetimes_span},
    {"gaps", winfit::PropertyExtractor::Property::gaps},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Decides whether an observation window over an event trace is long enough "
      "to characterize a duration property (session lengths, object lifetimes)."};
  app.require_subcommand(1);

  winfit::cli::ValidateOptions validate_opt;
  auto* validate = app.add_subcommand("validate", "Check a trace file and report basic statistics");
  validate->add_option("--input", validate_opt.input, "Trace file")->required();
  validate->add_option("--format", validate_opt.format, "Input format")
      ->transform(CLI::CheckedTransformer(kFormats))
      ->default_str("csv");

  winfit::cli::AnalyzeOptions analyze_opt;
  auto* analyze =
      app.add_subcommand("analyze", "Nested-window convergence analysis of a duration property");
  analyze->add_option("--input", analyze_opt.input, "Trace file")->required();
  analyze->add_option("--format", analyze_opt.format, "Input format")
      ->transform(CLI::CheckedTransformer(kFormats))
      ->default_str("csv");
  analyze->add_option("--property", analyze_opt.property, "Duration property to analyze")
      ->transform(CLI::CheckedTransformer(kProperties))
      ->default_str("sessions");
  analyze->add_option("--threshold", analyze_opt.threshold,
                      "Gap threshold in seconds for sessions and gap lifetimes");
  auto* schedule_opt =
      analyze->add_option("--schedule", analyze_opt.schedule, "Explicit window lengths in seconds")
          ->delimiter(',');
  auto* lmin_opt = analyze->add_option("--lmin", analyze_opt.l_min, "Shortest window in seconds");
  auto* lmax_opt = analyze->add_option("--lmax", analyze_opt.l_max, "Longest window in seconds");
  analyze->add_option("--factor", analyze_opt.factor, "Geometric schedule growth factor");
  schedule_opt->excludes(lmin_opt)->excludes(lmax_opt);
  analyze->add_option("--epsilon", analyze_opt.detection.epsilon,
                      "Convergence bound on the distance curve tail");
  analyze->add_option("--delta", analyze_opt.detection.delta,
                      "Relative mean-change tolerance across the tail");
  analyze->add_option("--tail-fraction", analyze_opt.detection.tail_fraction,
                      "Fraction of schedule points treated as the tail");
  double trim_value = 1.0;
  auto* trim_opt = analyze->add_option(
      "--trim", trim_value, "Keep only the smallest ceil(q*count) durations per window, q in (0,1]");
  analyze->add_option("--out", analyze_opt.out_dir, "Output directory")->required();

  winfit::cli::SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic trace from a JSON spec");
  synth->add_option("--spec", synth_opt.spec_path, "Generator spec JSON file")->required();
  synth->add_option("--out", synth_opt.out_dir, "Output directory")->required();
  synth->add_option("--format", synth_opt.format, "Trace output format")
      ->transform(CLI::CheckedTransformer(kFormats))
      ->default_str("csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : winfit::cli::kExitConfigError;
  }

  if (*validate) return winfit::cli::run_validate(validate_opt, std::cout, std::cerr);
  if (*analyze) {
    if (*trim_opt) analyze_opt.trim = trim_value;
    return winfit::cli::run_analyze(analyze_opt, std::cout, std::cerr);
  }
  return winfit::cli::run_synth(synth_opt, std::cout, std::cerr);
}
