// daf: analytical curves, Monte-Carlo sweeps and channel validation for
// differential amplify-and-forward relaying.
//
// Exit codes: 0 success, 1 runtime failure, 2 bad config or arguments,
// 3 truncated simulation points (unless --allow-truncation), 4 channel
// validation failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "daf/channel.hpp"
#include "daf/config.hpp"
#include "daf/fading_dump.hpp"
#include "daf/harness.hpp"
#include "daf/report.hpp"

#ifndef DAF_VERSION
#define DAF_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kTruncated = 3, kValidationFailed = 4 };

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --workers wins, then DAF_WORKERS, then the hardware thread count.
unsigned resolve_workers(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("DAF_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw daf::ArgumentError("DAF_WORKERS must be a positive integer");
  }
  return daf::default_worker_count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// The manifest keeps one entry per command run; re-running a command into the
// same directory replaces the entry that owned the CSV.
void update_manifest(const fs::path& out_dir, json entry) {
  const fs::path path = out_dir / "manifest.json";
  json manifest = {{"tool", "daf"}, {"runs", json::array()}};
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      manifest = json::parse(in);
    } catch (const json::exception&) {
      std::cerr << "warning: replacing unreadable " << path.string() << '\n';
    }
  }
  manifest["tool"] = "daf";
  manifest["versions"] = {{"daf", DAF_VERSION},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                          {"cli11", CLI11_VERSION}};
  json runs = json::array();
  if (manifest.contains("runs") && manifest["runs"].is_array()) {
    for (auto& r : manifest["runs"]) {
      if (!(r.contains("csv") && r["csv"] == entry["csv"])) runs.push_back(r);
    }
  }
  runs.push_back(std::move(entry));
  manifest["runs"] = std::move(runs);
  write_text(path, manifest.dump(2) + "\n");
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

std::vector<daf::SweepConfig> load_sweeps(const CommonOptions& opt) {
  auto sweeps = daf::load_config(opt.config_path);
  if (opt.seed) {
    for (auto& s : sweeps) s.master_seed = *opt.seed;
  }
  return sweeps;
}

json run_entry(const std::string& command, const CommonOptions& opt, const std::string& started,
               const std::string& csv, const std::string& plot) {
  return {{"command", command},
          {"config_path", fs::absolute(opt.config_path).string()},
          {"output_dir", fs::absolute(opt.out_dir).string()},
          {"started", started},
          {"finished", utc_now()},
          {"csv", csv},
          {"plot_script", plot}};
}

int cmd_analyze(const CommonOptions& opt) {
  const auto started = utc_now();
  const auto sweeps = load_sweeps(opt);
  std::vector<daf::AnalysisCurve> curves;
  std::vector<daf::PlotCurve> plot;
  for (const auto& s : sweeps) {
    curves.push_back(daf::analyze_curve(s));
    plot.push_back(daf::PlotCurve::of(s));
  }
  fs::create_directories(opt.out_dir);
  std::ostringstream csv, gp;
  daf::write_analysis_csv(csv, curves);
  daf::write_plot_script(gp, "analyze.csv", plot, false);
  write_text(fs::path(opt.out_dir) / "analyze.csv", csv.str());
  write_text(fs::path(opt.out_dir) / "analyze.gp", gp.str());
  update_manifest(opt.out_dir, run_entry("analyze", opt, started, "analyze.csv", "analyze.gp"));
  std::cerr << "wrote " << (fs::path(opt.out_dir) / "analyze.csv").string() << '\n';
  return kOk;
}

int cmd_simulate(const CommonOptions& opt, int workers_flag, bool allow_truncation) {
  const auto started = utc_now();
  const auto sweeps = load_sweeps(opt);
  const unsigned workers = resolve_workers(workers_flag);
  std::vector<daf::SweepResult> results;
  std::vector<daf::PlotCurve> plot;
  std::size_t truncated = 0;
  for (const auto& s : sweeps) {
    std::cerr << daf::PlotCurve::of(s).title() << " (q=" << s.power_split_q << ", " << workers << " workers)\n";
    daf::SweepResult r;
    r.config = s;
    const auto t0 = std::chrono::steady_clock::now();
    for (double snr : s.snr_grid_db) {
      r.points.push_back(daf::simulate_point(s, snr, workers));
      const auto& p = r.points.back();
      std::fprintf(stderr, "  %6.2f dB  sim %.4e  ana %.4e  errors %llu / %llu%s\n", p.snr_db,
                   p.ber_simulated, p.ber_analytical, static_cast<unsigned long long>(p.bit_errors),
                   static_cast<unsigned long long>(p.bits_simulated), p.truncated ? "  (truncated)" : "");
      truncated += p.truncated;
    }
    r.error_floor = daf::error_floor(s.model());
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    plot.push_back(daf::PlotCurve::of(s));
    results.push_back(std::move(r));
  }
  fs::create_directories(opt.out_dir);
  std::ostringstream csv, gp;
  daf::write_simulation_csv(csv, results);
  daf::write_plot_script(gp, "simulate.csv", plot, true);
  write_text(fs::path(opt.out_dir) / "simulate.csv", csv.str());
  write_text(fs::path(opt.out_dir) / "simulate.gp", gp.str());
  auto entry = run_entry("simulate", opt, started, "simulate.csv", "simulate.gp");
  entry["workers"] = workers;
  entry["truncated_points"] = truncated;
  update_manifest(opt.out_dir, std::move(entry));
  std::cerr << "wrote " << (fs::path(opt.out_dir) / "simulate.csv").string() << '\n';
  if (truncated > 0 && !allow_truncation) {
    std::cerr << "error: " << truncated
              << " point(s) stopped at max_symbols before reaching min_bit_errors "
                 "(pass --allow-truncation to accept)\n";
    return kTruncated;
  }
  return kOk;
}

struct ChannelOptions {
  std::string fading_case;
  std::string link = "SD";
  std::vector<double> dopplers;
  double variance = 1.0;
  std::uint64_t length = 2'000'000;
  std::uint64_t seed = 1;
  double tolerance = 0.01;
  int max_lag = 20;
  std::string dump_path;
};

int cmd_validate_channel(const ChannelOptions& opt) {
  if (opt.length < 100'000) throw daf::ArgumentError("--length must be at least 100000");
  if (!(opt.tolerance > 0.0)) throw daf::ArgumentError("--tolerance must be positive");
  if (opt.max_lag < 0) throw daf::ArgumentError("--max-lag must be non-negative");
  const auto id = daf::parse_link_id(opt.link);
  if (!id) throw daf::ArgumentError("--link must be SD, SR or RD");

  daf::LinkSpec link;
  if (!opt.dopplers.empty()) {
    if (!opt.fading_case.empty()) throw daf::ArgumentError("--case and --dopplers are exclusive");
    link = {*id, opt.variance, {opt.dopplers.at(0), opt.dopplers.at(1)}};
    link.validate();
  } else {
    const auto c = daf::parse_fading_case(opt.fading_case.empty() ? "CaseI" : opt.fading_case);
    if (!c) throw daf::ArgumentError("--case must be CaseI, CaseII or CaseIII");
    link = daf::LinkSpec::from_nodes(*id, opt.variance, daf::dopplers_for(*c));
  }

  const auto process = daf::generate_fading(link, opt.length, opt.seed);
  if (!opt.dump_path.empty()) {
    std::ofstream out(opt.dump_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + opt.dump_path);
    daf::write_fading_dump(out, process);
  }
  const auto acf = daf::empirical_acf(process.samples, opt.max_lag);

  std::printf("link %s  dopplers (%g, %g)  variance %g  length %llu  seed %llu\n",
              std::string(daf::to_string(link.id)).c_str(), link.dopplers.first, link.dopplers.second,
              link.variance, static_cast<unsigned long long>(opt.length),
              static_cast<unsigned long long>(opt.seed));
  std::printf("%4s %14s %14s %14s %12s\n", "lag", "theory", "theory/var", "empirical", "abs_diff");
  bool pass = true;
  double worst = 0.0;
  for (int lag = 0; lag <= opt.max_lag; ++lag) {
    const double theory = daf::theoretical_acf(link, lag);
    const double normalized = theory / link.variance;
    const double diff = std::abs(acf[static_cast<std::size_t>(lag)] - normalized);
    worst = std::max(worst, diff);
    pass = pass && diff <= opt.tolerance;
    std::printf("%4d %14.8f %14.8f %14.8f %12.3e\n", lag, theory, normalized,
                acf[static_cast<std::size_t>(lag)], diff);
  }
  std::printf("%s: max |empirical - theory| = %.3e, tolerance %.3e\n", pass ? "PASS" : "FAIL", worst,
              opt.tolerance);
  return pass ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential amplify-and-forward BER analysis and simulation"};
  app.set_version_flag("--version", DAF_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "Override the config's master seed");
  };

  auto* analyze = app.add_subcommand("analyze", "Closed-form BER curves and error floors");
  add_common(analyze);

  int workers = 0;
  bool allow_truncation = false;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo BER next to the closed form");
  add_common(simulate);
  simulate->add_option("--workers", workers, "Worker threads (default: DAF_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--allow-truncation", allow_truncation,
                     "Exit 0 even if a point hit max_symbols before min_bit_errors");

  ChannelOptions chan;
  auto* validate = app.add_subcommand("validate-channel", "Check generated fading against the theoretical ACF");
  validate->add_option("--case", chan.fading_case, "Fading case supplying node Dopplers (default CaseI)");
  validate->add_option("--link", chan.link, "Link: SD, SR or RD")->capture_default_str();
  validate->add_option("--dopplers", chan.dopplers, "Explicit Doppler pair of the link")->expected(2);
  validate->add_option("--variance", chan.variance, "Link variance")->capture_default_str();
  validate->add_option("--length", chan.length, "Number of samples (>= 100000)")->capture_default_str();
  validate->add_option("--seed", chan.seed, "Realization seed")->capture_default_str();
  validate->add_option("--tolerance", chan.tolerance, "Allowed |ACF error| per lag")->capture_default_str();
  validate->add_option("--max-lag", chan.max_lag, "Largest lag checked")->capture_default_str();
  validate->add_option("--dump", chan.dump_path, "Write the realization as a binary dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (*analyze) return cmd_analyze(common);
    if (*simulate) return cmd_simulate(common, workers, allow_truncation);
    if (*validate) return cmd_validate_channel(chan);
  } catch (const daf::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
