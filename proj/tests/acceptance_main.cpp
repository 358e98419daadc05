// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exits non-zero when any fails.
//
// Usage: winfit_acceptance [path-to-winfit-cli] [scratch-dir]

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "winfit/cli.hpp"
#include "winfit/winfit.hpp"

namespace fs = std::filesystem;
using namespace winfit;
using testutil::ev;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path g_cli_path;
fs::path g_scratch;

// --- criterion 1: MK hand oracle ------------------------------------------

void mk_hand_oracle() {
  const std::vector<Seconds> a{2, 5, 5, 9};
  const std::vector<Seconds> b{2, 9};
  const Ccdf p = make_ccdf(a);
  const Ccdf q = make_ccdf(b);

  const double d = mk_distance(p, q);
  require(std::abs(d - 7.0 / 36.0) <= 1e-12, "hand value 7/36 missed: got " + std::to_string(d));
  const double brute = testutil::mk_brute(a, b);
  require(std::abs(d - brute) <= 1e-12, "disagrees with per-tick brute force");
  require(mk_distance(p, p) == 0.0, "self distance must be exactly 0");

  std::mt19937 rng(1001);
  for (int i = 0; i < 100; ++i) {
    const auto x = testutil::random_durations(rng, 1, 150, 400);
    const auto y = testutil::random_durations(rng, 1, 150, 400);
    const Ccdf cx = make_ccdf(x);
    const Ccdf cy = make_ccdf(y);
    require(std::abs(mk_distance(cx, cy) - mk_distance(cy, cx)) <= 1e-12,
            "symmetry violated on random pair " + std::to_string(i));
    require(std::abs(mk_distance(cx, cy) - testutil::mk_brute(x, y)) <= 1e-12,
            "brute-force mismatch on random pair " + std::to_string(i));
  }
}

// --- criterion 2: sessionizer oracle equivalence ---------------------------

void sessionizer_oracle_equivalence() {
  std::mt19937 rng(2002);
  std::uniform_int_distribution<Seconds> theta_dist(1, 30000);
  testutil::RandomTraceParams params;
  params.min_events = 0;
  params.max_events = 1000;
  params.max_time = 20000;
  params.max_actors = 40;
  for (int i = 0; i < 500; ++i) {
    const Trace trace = testutil::random_trace(rng, params);
    const Seconds theta = theta_dist(rng);
    const auto streamed = sessionize(trace, GapThreshold{theta});
    const auto oracle = testutil::sessionize_oracle(trace, theta);
    require(streamed == oracle, "oracle mismatch on trace " + std::to_string(i));
  }
}

// --- criterion 3: tail-sum identity ----------------------------------------

void tail_sum_identity() {
  std::mt19937 rng(3003);
  for (int i = 0; i < 200; ++i) {
    const auto durations = testutil::random_durations(rng, 1, 500, 3000);
    const Ccdf c = make_ccdf(durations);
    double tail_sum = 0.0;
    for (std::size_t k = 1; k < c.values.size(); ++k) tail_sum += c.values[k];
    const double mean = compute_moments(durations).mean;
    require(std::abs(tail_sum - mean) <= 1e-9,
            "identity missed on multiset " + std::to_string(i) + ": |" +
                std::to_string(tail_sum) + " - " + std::to_string(mean) + "|");
  }
}

// --- criteria 4 and 5: synthetic reproduction ------------------------------

GeneratorSpec acceptance_spec() {
  return GeneratorSpec{.horizon = 5184000,  // 60 days
                       .arrival_rate = 0.01,
                       .length_law = ExponentialLaw{3600.0},
                       .intra_session_gap = 600,
                       .seed = 20260809};
}

void stationary_synthetic_reproduction() {
  const GeneratorSpec spec = acceptance_spec();
  const Trace trace = generate(spec);
  const auto schedule = schedule_geometric(21600, spec.horizon, 2.0);
  const PropertyExtractor extractor{PropertyExtractor::Property::sessions, GapThreshold{10800}};
  const AnalysisResult result = analyze_detailed(trace, extractor, schedule);

  const CurvePoint& final_pt = result.curve.points.back();
  require(final_pt.count >= 50000, "need >= 50000 sessions, got " + std::to_string(final_pt.count));

  const Verdict verdict = detect(result.curve);  // defaults: eps 0.01, delta 0.02
  require(verdict.characterized, "expected characterized verdict");
  require(std::abs(final_pt.mean - 3600.0) <= 0.05 * 3600.0,
          "final mean " + std::to_string(final_pt.mean) + " not within 5% of 3600");

  const Ccdf& empirical = *result.ccdfs.back();
  const Ccdf analytic = ground_truth_ccdf(spec, empirical.k_max());
  const double d = mk_distance(empirical, analytic);
  require(d <= 0.02, "distance to analytic CCDF " + std::to_string(d) + " > 0.02");
}

void nonstationary_detection() {
  GeneratorSpec spec = acceptance_spec();
  spec.drift_factor = 3.0;
  const Trace trace = generate(spec);
  const auto schedule = schedule_geometric(21600, spec.horizon, 2.0);
  const PropertyExtractor extractor{PropertyExtractor::Property::sessions, GapThreshold{10800}};
  const ConvergenceCurve curve = analyze(trace, extractor, schedule);
  const Verdict verdict = detect(curve);
  require(!verdict.characterized, "drifting law must not be characterized");
  require(verdict.reason.has_value(), "missing non-convergence reason");
}

// --- criterion 6: degenerate-threshold laws ---------------------------------

void degenerate_threshold_laws() {
  std::mt19937 rng(6006);
  testutil::RandomTraceParams params;
  params.min_events = 1;
  params.max_events = 400;
  params.max_time = 8000;
  params.object_probability = 0.7;
  for (int i = 0; i < 100; ++i) {
    const Trace trace = testutil::random_trace(rng, params);
    const Seconds theta = std::max<Seconds>(1, trace.horizon());

    const auto sessions = sessionize(trace, GapThreshold{theta});
    std::set<std::string> actors;
    for (const Event& e : trace.events()) actors.insert(e.actor);
    require(sessions.size() == actors.size(),
            "expected one session per actor on trace " + std::to_string(i));

    const auto gap = lifetimes_gap(trace, GapThreshold{theta});
    const auto span = lifetimes_span(trace);
    require(gap.size() == span.size(), "lifetime counts differ on trace " + std::to_string(i));
    for (std::size_t k = 0; k < gap.size(); ++k) {
      require(gap[k].object == span[k].object && gap[k].length == span[k].length,
              "lifetime mismatch on trace " + std::to_string(i));
    }
  }
}

// --- criterion 7: CLI determinism -------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = g_cli_path.string() + " " + args + " >> " +
                          (g_scratch / "cli.log").string() + " 2>&1";
  return std::system(cmd.c_str());
}

void cli_determinism() {
  require(!g_cli_path.empty() && fs::exists(g_cli_path),
          "CLI binary not found (pass its path as argv[1])");
  const fs::path dir = g_scratch / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  GeneratorSpec spec{.horizon = 300000,
                     .arrival_rate = 0.02,
                     .length_law = ExponentialLaw{1800.0},
                     .intra_session_gap = 300,
                     .seed = 7007};
  {
    std::ofstream out(dir / "spec.json");
    out << spec_to_json(spec).dump(2) << "\n";
  }
  require(run_cli("synth --spec " + (dir / "spec.json").string() + " --out " + dir.string()) == 0,
          "synth run failed");

  // the generator is deterministic, so the in-process horizon matches the file
  const Seconds horizon = generate(spec).horizon();
  const std::string analyze_args = "analyze --input " + (dir / "trace.csv").string() +
                                   " --format csv --property sessions --lmin " +
                                   std::to_string(horizon / 16) + " --lmax " +
                                   std::to_string(horizon) + " --factor 2 --out ";
  const int code_a = run_cli(analyze_args + (dir / "out_a").string());
  const int code_b = run_cli(analyze_args + (dir / "out_b").string());
  require(code_a == code_b, "exit codes differ between reruns");
  require(read_file(dir / "out_a" / "curve.csv") == read_file(dir / "out_b" / "curve.csv"),
          "curve.csv differs between reruns");
  require(read_file(dir / "out_a" / "verdict.json") == read_file(dir / "out_b" / "verdict.json"),
          "verdict.json differs between reruns");
}

// --- criterion 8: ingestion throughput --------------------------------------

void ingestion_throughput() {
  const fs::path dir = g_scratch / "throughput";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path trace_path = dir / "big.csv";

  GeneratorSpec spec{.horizon = 2000000,
                     .arrival_rate = 0.085,
                     .length_law = ExponentialLaw{3600.0},
                     .intra_session_gap = 60,
                     .seed = 8008};
  std::size_t generated = 0;
  {
    const Trace trace = generate(spec);
    generated = trace.size();
    require(generated >= 10000000,
            "generator produced only " + std::to_string(generated) + " events");
    std::ofstream out(trace_path, std::ios::binary);
    write_csv(trace, out);
  }

  const auto start = std::chrono::steady_clock::now();

  Trace trace;
  {
    std::ifstream in(trace_path, std::ios::binary);
    trace = ingest(in, TraceFormat::csv);
  }
  require(trace.size() == generated, "ingest lost events");

  const auto sessions = sessionize(trace, GapThreshold{10800});
  require(!sessions.empty(), "no sessions recovered");

  const auto schedule = schedule_geometric(15625, 2000000, 2.0);
  require(schedule.size() == 8, "expected an 8-point schedule");
  const PropertyExtractor extractor{PropertyExtractor::Property::sessions, GapThreshold{10800}};
  const ConvergenceCurve curve = analyze(trace, extractor, schedule);
  const Verdict verdict = detect(curve);
  require(verdict.characterized || verdict.reason.has_value(), "verdict missing");

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "         " << generated << " events: ingest + sessionize + 8-window analysis in "
            << elapsed << " s\n";
  require(elapsed < 300.0, "took " + std::to_string(elapsed) + " s, budget is 300 s");

  fs::remove(trace_path);  // ~300 MB, do not leave it around
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];
  g_scratch = argc > 2 ? fs::path(argv[2]) : fs::path("acceptance_scratch");
  fs::create_directories(g_scratch);

  const std::vector<std::pair<std::string, std::function<void()>>> criteria{
      {"mk_hand_oracle", mk_hand_oracle},
      {"sessionizer_oracle_equivalence", sessionizer_oracle_equivalence},
      {"tail_sum_identity", tail_sum_identity},
      {"stationary_synthetic_reproduction", stationary_synthetic_reproduction},
      {"nonstationary_detection", nonstationary_detection},
      {"degenerate_threshold_laws", degenerate_threshold_laws},
      {"cli_determinism", cli_determinism},
      {"ingestion_throughput", ingestion_throughput},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      std::cout << "[PASS] " << name << " (" << ms << " ms)\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] " << name << ": " << e.what() << "\n";
    }
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " acceptance criteria passed\n";
  return failures == 0 ? 0 : 1;
}
