#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "embedsim/errors.hpp"
#include "embedsim/hypervisor.hpp"
#include "embedsim/plot.hpp"
#include "embedsim/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace embedsim;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string default_out_dir() {
  const char* env = std::getenv("EMBEDSIM_OUT_DIR");
  return env && *env ? env : "out";
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt6(*v) : std::string("absent");
}

// Writes metrics.csv, events.log and summary.txt; charts are rendered
// from the csv just written so that `plot` reproduces them exactly.
Summary write_run_artifacts(const Scenario& sc, std::uint64_t seed,
                            const fs::path& dir, bool plots) {
  const SimResult result = run(sc, seed);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "metrics.csv", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "metrics.csv").string());
    write_metrics_csv(out, result.rounds, sc);
  }
  {
    std::ofstream out(dir / "events.log", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "events.log").string());
    write_events_log(out, result.events, sc);
  }
  {
    std::ofstream out(dir / "summary.txt", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "summary.txt").string());
    write_summary_text(out, result.summary, sc);
  }
  if (plots) {
    std::ifstream in(dir / "metrics.csv", std::ios::binary);
    const MetricsTable table = read_metrics_csv(in);
    write_plots(dir.string(), table, sc.smoothing_window);
  }
  return result.summary;
}

struct CommonArgs {
  std::string config;
  std::string out_dir = default_out_dir();
  std::string algorithm;
  int smoothing = 0;  // 0 = keep scenario value
};

// Scenario loading and overrides; throws ValidationError/ParseError,
// which the caller maps to a usage/config exit.
Scenario prepare_scenario(const CommonArgs& args) {
  Scenario sc = load_scenario_file(args.config);
  if (!args.algorithm.empty()) {
    const auto engine = engine_from_string(args.algorithm);
    if (!engine)
      throw ValidationError("algorithm",
                            "unknown engine '" + args.algorithm + "'");
    sc.algorithm = *engine;
  }
  if (args.smoothing > 0) sc.smoothing_window = args.smoothing;
  validate_scenario(sc);
  return sc;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("seeds", std::string("bad ") + what + " '" + text +
                                       "'");
  }
  if (used != text.size())
    throw ValidationError("seeds",
                          std::string("bad ") + what + " '" + text + "'");
  return value;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  if (spec.find(',') == std::string::npos) {
    const std::uint64_t count = parse_u64(spec, "seed count");
    if (count < 1)
      throw ValidationError("seeds", "expected a count or a comma list");
    for (std::uint64_t s = 1; s <= count; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    seeds.push_back(parse_u64(item, "seed"));
  if (seeds.empty()) throw ValidationError("seeds", "no seeds given");
  return seeds;
}

int run_command(const CommonArgs& args, std::uint64_t seed, bool no_plots) {
  Scenario sc;
  try {
    sc = prepare_scenario(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    write_run_artifacts(sc, seed, args.out_dir, !no_plots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

struct Cell {
  std::string algorithm;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Summary summary;
};

struct MetricDef {
  const char* name;
  std::function<std::optional<double>(const PhaseSummary&)> get;
};

const std::vector<MetricDef>& aggregate_metrics() {
  static const std::vector<MetricDef> defs = {
      {"occupancy_mean",
       [](const PhaseSummary& p) {
         return std::optional<double>(p.mean_occupancy());
       }},
      {"rejection_rate",
       [](const PhaseSummary& p) { return p.grand_total().rejection(); }},
      {"ps_rejection_rate",
       [](const PhaseSummary& p) {
         return p.operator_total(Operator::ps).rejection();
       }},
      {"commercial_rejection_rate",
       [](const PhaseSummary& p) {
         return p.operator_total(Operator::commercial).rejection();
       }},
      {"commercial_video_rejection_rate",
       [](const PhaseSummary& p) {
         return p.at(Operator::commercial, ServiceKind::video).rejection();
       }},
      {"voice_rejection_rate",
       [](const PhaseSummary& p) {
         return p.service_total(ServiceKind::voice).rejection();
       }},
      {"ps_served_share",
       [](const PhaseSummary& p) { return p.served_share(Operator::ps); }},
      {"ps_requested_share",
       [](const PhaseSummary& p) { return p.requested_share(Operator::ps); }},
      {"voice_capacity_share",
       [](const PhaseSummary& p) {
         return p.capacity_share(ServiceKind::voice);
       }},
      {"video_capacity_share",
       [](const PhaseSummary& p) {
         return p.capacity_share(ServiceKind::video);
       }},
      {"preempted_mass",
       [](const PhaseSummary& p) {
         return std::optional<double>(static_cast<double>(p.preempted_mass));
       }},
  };
  return defs;
}

void write_aggregate_csv(std::ostream& os,
                         const std::vector<std::string>& algorithms,
                         const std::vector<Cell>& cells) {
  os << "algorithm,phase,metric,mean,stddev,count\n";
  for (const std::string& algo : algorithms) {
    for (Phase phase : all_phases) {
      for (const MetricDef& metric : aggregate_metrics()) {
        double sum = 0, sumsq = 0;
        int count = 0;
        for (const Cell& cell : cells) {
          if (!cell.ok || cell.algorithm != algo) continue;
          const auto v = metric.get(cell.summary.phase(phase));
          if (!v) continue;
          sum += *v;
          sumsq += *v * *v;
          ++count;
        }
        os << algo << ',' << to_string(phase) << ',' << metric.name << ',';
        if (count == 0) {
          os << "absent,absent,0\n";
          continue;
        }
        const double mean = sum / count;
        const double var =
            count > 1 ? (sumsq - count * mean * mean) / (count - 1) : 0.0;
        os << fmt6(mean) << ',' << fmt6(std::sqrt(std::max(0.0, var))) << ','
           << count << '\n';
      }
    }
    double sum = 0, sumsq = 0;
    int count = 0;
    for (const Cell& cell : cells) {
      if (!cell.ok || cell.algorithm != algo) continue;
      const double v = static_cast<double>(cell.summary.accepted_weighted_area);
      sum += v;
      sumsq += v * v;
      ++count;
    }
    os << algo << ",run,accepted_weighted_area,";
    if (count == 0) {
      os << "absent,absent,0\n";
    } else {
      const double mean = sum / count;
      const double var =
          count > 1 ? (sumsq - count * mean * mean) / (count - 1) : 0.0;
      os << fmt6(mean) << ',' << fmt6(std::sqrt(std::max(0.0, var))) << ','
         << count << '\n';
    }
  }
}

void write_paired_csv(std::ostream& os, const std::vector<std::uint64_t>& seeds,
                      const std::vector<Cell>& cells) {
  os << "seed,emergency_ps_rejection_static,emergency_ps_rejection_dynamic,"
        "emergency_occupancy_static,emergency_occupancy_dynamic,"
        "accepted_weighted_area_static,accepted_weighted_area_dynamic\n";
  auto find_cell = [&](const char* algo, std::uint64_t seed) -> const Cell* {
    for (const Cell& cell : cells)
      if (cell.ok && cell.algorithm == algo && cell.seed == seed) return &cell;
    return nullptr;
  };
  for (std::uint64_t seed : seeds) {
    const Cell* st = find_cell("static", seed);
    const Cell* dy = find_cell("dynamic", seed);
    if (!st || !dy) continue;
    const PhaseSummary& se = st->summary.phase(Phase::emergency);
    const PhaseSummary& de = dy->summary.phase(Phase::emergency);
    os << seed << ','
       << fmt_opt(se.operator_total(Operator::ps).rejection()) << ','
       << fmt_opt(de.operator_total(Operator::ps).rejection()) << ','
       << fmt6(se.mean_occupancy()) << ',' << fmt6(de.mean_occupancy()) << ','
       << st->summary.accepted_weighted_area << ','
       << dy->summary.accepted_weighted_area << '\n';
  }
}

int replicate_command(const CommonArgs& args, const std::string& seeds_spec,
                      std::vector<std::string> algorithms, int jobs) {
  Scenario base;
  std::vector<std::uint64_t> seeds;
  try {
    base = load_scenario_file(args.config);
    if (args.smoothing > 0) base.smoothing_window = args.smoothing;
    seeds = parse_seeds(seeds_spec);
    if (algorithms.empty()) algorithms = {"static", "dynamic"};
    for (const std::string& algo : algorithms) {
      Scenario sc = base;
      const auto engine = engine_from_string(algo);
      if (!engine)
        throw ValidationError("algorithm", "unknown engine '" + algo + "'");
      sc.algorithm = *engine;
      validate_scenario(sc);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<Cell> cells;
  for (const std::string& algo : algorithms)
    for (std::uint64_t seed : seeds) cells.push_back({algo, seed});

  const fs::path out_root = args.out_dir;
  try {
    fs::create_directories(out_root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (jobs < 1) jobs = 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      Cell& cell = cells[i];
      try {
        Scenario sc = base;
        sc.algorithm = *engine_from_string(cell.algorithm);
        const fs::path dir =
            out_root /
            (cell.algorithm + "_seed" + std::to_string(cell.seed));
        cell.summary = write_run_artifacts(sc, cell.seed, dir, false);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
  for (std::size_t i = 0; i + 1 < thread_count; ++i)
    pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  int failures = 0;
  for (const Cell& cell : cells)
    if (!cell.ok) {
      ++failures;
      std::cerr << "FAILED " << cell.algorithm << " seed " << cell.seed
                << ": " << cell.error << "\n";
    }

  try {
    std::ofstream agg(out_root / "aggregate.csv", std::ios::binary);
    if (!agg) throw Error("cannot write aggregate.csv");
    write_aggregate_csv(agg, algorithms, cells);

    const bool has_static =
        std::find(algorithms.begin(), algorithms.end(), "static") !=
        algorithms.end();
    const bool has_dynamic =
        std::find(algorithms.begin(), algorithms.end(), "dynamic") !=
        algorithms.end();
    if (has_static && has_dynamic) {
      std::ofstream paired(out_root / "paired.csv", std::ios::binary);
      if (!paired) throw Error("cannot write paired.csv");
      write_paired_csv(paired, seeds, cells);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (failures > 0) {
    std::cerr << failures << " of " << cells.size() << " cells failed\n";
    return kExitRuntime;
  }
  return 0;
}

int plot_command(const std::string& out_dir, int smoothing) {
  const fs::path dir = out_dir;
  try {
    std::ifstream in(dir / "metrics.csv", std::ios::binary);
    if (!in)
      throw Error("cannot open " + (dir / "metrics.csv").string());
    const MetricsTable table = read_metrics_csv(in);
    write_plots(dir.string(), table, smoothing);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "embedsim: prioritized embedding of rectangular resource requests on "
      "a shared PRB substrate"};
  app.require_subcommand(1);
  std::function<int()> action;

  CommonArgs run_args;
  std::uint64_t run_seed = 1;
  bool run_no_plots = false;
  CLI::App* cmd_run = app.add_subcommand("run", "Simulate one (scenario, seed)");
  cmd_run->add_option("--config", run_args.config, "Scenario file")
      ->required();
  cmd_run->add_option("--seed", run_seed, "RNG seed");
  cmd_run->add_option("--algorithm", run_args.algorithm,
                      "Engine override: static, dynamic or oracle");
  cmd_run->add_option("--out-dir", run_args.out_dir,
                      "Output directory (or $EMBEDSIM_OUT_DIR)");
  cmd_run->add_option("--smoothing", run_args.smoothing,
                      "Smoothing window override");
  cmd_run->add_flag("--no-plots", run_no_plots, "Skip SVG rendering");
  cmd_run->callback(
      [&]() { action = [&]() { return run_command(run_args, run_seed, run_no_plots); }; });

  CommonArgs rep_args;
  std::string rep_seeds = "20";
  std::vector<std::string> rep_algorithms;
  int rep_jobs = static_cast<int>(std::thread::hardware_concurrency());
  CLI::App* cmd_rep = app.add_subcommand(
      "replicate", "Run a seed sweep and aggregate across seeds");
  cmd_rep->add_option("--config", rep_args.config, "Scenario file")
      ->required();
  cmd_rep->add_option("--seeds", rep_seeds,
                      "Seed count N (runs 1..N) or comma list");
  cmd_rep->add_option("--algorithm", rep_algorithms,
                      "Engine (repeatable; default static and dynamic)");
  cmd_rep->add_option("--out-dir", rep_args.out_dir,
                      "Output directory (or $EMBEDSIM_OUT_DIR)");
  cmd_rep->add_option("--jobs", rep_jobs, "Parallel cells");
  cmd_rep->add_option("--smoothing", rep_args.smoothing,
                      "Smoothing window override");
  cmd_rep->callback([&]() {
    action = [&]() {
      return replicate_command(rep_args, rep_seeds, rep_algorithms, rep_jobs);
    };
  });

  std::string plot_dir = default_out_dir();
  int plot_smoothing = 25;
  CLI::App* cmd_plot = app.add_subcommand(
      "plot", "Re-render SVG charts from an existing metrics.csv");
  cmd_plot->add_option("--out-dir", plot_dir,
                       "Directory holding metrics.csv (or $EMBEDSIM_OUT_DIR)");
  cmd_plot->add_option("--smoothing", plot_smoothing, "Smoothing window");
  cmd_plot->callback([&]() {
    action = [&]() { return plot_command(plot_dir, plot_smoothing); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  return action ? action() : kExitUsage;
}
