// skm: streaming K-means toolkit CLI (gen | run | bound | report).
#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "skm/bench.hpp"
#include "skm/bound.hpp"
#include "skm/csvio.hpp"
#include "skm/driftgen.hpp"
#include "skm/streaming.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Seed precedence: explicit flag > SKM_SEED environment variable > default.
std::uint64_t effective_seed(std::uint64_t flag_value, bool flag_given) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("SKM_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument("SKM_SEED is not an unsigned integer: " + s);
    return v;
  }
  return flag_value;
}

std::vector<skm::Algo> parse_algorithms(const std::string& list,
                                        std::vector<std::string>& problems) {
  std::vector<skm::Algo> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto a = skm::algo_from_id(item);
    if (!a)
      problems.push_back("unknown algorithm id '" + item +
                         "' (expected pskm, fskm-upc, fskm-icb, fskm-wki, fskm-hi)");
    else
      out.push_back(*a);
  }
  if (out.empty()) problems.push_back("algorithm list is empty");
  return out;
}

std::set<int> parse_indices(const std::string& list) {
  std::set<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.insert(std::stoi(item));
  }
  return out;
}

struct RunOptions {
  skm::ExperimentConfig cfg;
  std::string config_path;
  std::string stream_path;
  std::string records_path = "records.csv";
  std::string summary_path = "summary.csv";
  std::string algorithms = "pskm,fskm-upc,fskm-icb,fskm-wki,fskm-hi";
};

// Flat key = value config file mirroring the ExperimentConfig fields.
// Unknown keys are errors; every problem is reported before exiting.
void apply_config_file(const std::string& path, RunOptions& opt,
                       std::vector<std::string>& problems) {
  std::ifstream in(path);
  if (!in) {
    problems.push_back("cannot open config file " + path);
    return;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string all = strip(line);
    if (all.empty()) continue;
    if (eq == std::string::npos) {
      problems.push_back("config line " + std::to_string(line_no) +
                         ": expected key = value");
      continue;
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "d") opt.cfg.d = std::stoul(value);
      else if (key == "pool_n") opt.cfg.pool_n = std::stoul(value);
      else if (key == "k_true") opt.cfg.k_true = std::stoul(value);
      else if (key == "epsilon") opt.cfg.epsilon = skm::parse_double(value);
      else if (key == "batch_size") opt.cfg.batch_size = std::stoul(value);
      else if (key == "tau") opt.cfg.tau = std::stoi(value);
      else if (key == "k") opt.cfg.k = std::stoul(value);
      else if (key == "m") opt.cfg.m = std::stoi(value);
      else if (key == "t_max") opt.cfg.t_max = std::stoul(value);
      else if (key == "max_iterations") opt.cfg.solver.max_iterations = std::stoi(value);
      else if (key == "repetitions") opt.cfg.repetitions = std::stoi(value);
      else if (key == "seed") opt.cfg.seed = std::stoull(value);
      else if (key == "measured_batches") opt.cfg.measured_batches = std::stoi(value);
      else if (key == "jobs") opt.cfg.jobs = std::stoi(value);
      else if (key == "algorithms") opt.algorithms = value;
      else
        problems.push_back("config line " + std::to_string(line_no) +
                           ": unknown key '" + key + "'");
    } catch (const std::exception&) {
      problems.push_back("config line " + std::to_string(line_no) +
                         ": bad value for '" + key + "'");
    }
  }
}

int cmd_gen(const skm::DriftStreamSpec& spec, int batches,
            const std::string& out_path) {
  skm::DriftStream stream(spec);
  skm::StreamDump dump;
  dump.d = 0;
  dump.batch_n = spec.batch_size;
  dump.period = spec.drift_period;
  dump.epsilon = spec.epsilon;
  dump.seed = spec.seed;
  for (int i = 0; i < batches; ++i) {
    auto [batch, concept_id] = stream.next();
    if (dump.d == 0) dump.d = batch.points.dim();
    dump.batches.push_back(std::move(batch));
    dump.concept_ids.push_back(concept_id);
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  skm::write_stream_dump(out, dump);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + out_path);

  const auto& ratios = stream.drift_ratios();
  for (std::size_t i = 0; i < ratios.size(); ++i)
    std::cout << "drift " << (i + 1)
              << ": achieved ratio = " << skm::format_double(ratios[i])
              << " (target " << skm::format_double(1.0 + spec.epsilon) << ")\n";
  std::cout << "wrote " << dump.batches.size() << " batches to " << out_path
            << "\n";
  return 0;
}

int cmd_run(RunOptions& opt, bool seed_given) {
  std::vector<std::string> problems;
  if (!opt.config_path.empty()) apply_config_file(opt.config_path, opt, problems);
  opt.cfg.algorithms = parse_algorithms(opt.algorithms, problems);
  opt.cfg.seed = effective_seed(opt.cfg.seed, seed_given);

  skm::StreamDump dump;
  const bool use_stream = !opt.stream_path.empty();
  if (use_stream) {
    std::ifstream in(opt.stream_path);
    if (!in) {
      problems.push_back("cannot open stream file " + opt.stream_path);
    } else {
      try {
        dump = skm::read_stream_dump(in);
        opt.cfg.d = dump.d;
        opt.cfg.batch_size = dump.batch_n;
      } catch (const std::exception& e) {
        problems.push_back(std::string("stream file: ") + e.what());
      }
    }
  }

  // Exhaustive config validation before any work starts.
  if (!(opt.cfg.epsilon > 0.01))
    problems.push_back("epsilon must exceed 0.01 (rho would be >= 1)");
  if (opt.cfg.m < 1) problems.push_back("m must be >= 1");
  if (opt.cfg.tau < 1) problems.push_back("tau must be >= 1");
  if (opt.cfg.k < 1) problems.push_back("k must be >= 1");
  if (opt.cfg.batch_size < opt.cfg.k)
    problems.push_back("batch_size must be >= k");
  if (opt.cfg.repetitions < 1) problems.push_back("repetitions must be >= 1");
  if (opt.cfg.measured_batches < 1)
    problems.push_back("measured_batches must be >= 1");
  if (!use_stream && opt.cfg.pool_n < opt.cfg.batch_size)
    problems.push_back("pool_n must be >= batch_size");
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "config error: " << p << "\n";
    return kExitUsage;
  }

  std::vector<skm::ExperimentRecord> records;
  std::vector<skm::ExperimentRecord> partial;
  try {
    records = use_stream
                  ? skm::run_experiment_on_stream(opt.cfg, dump.batches,
                                                  dump.concept_ids, &partial)
                  : skm::run_experiment(opt.cfg, &partial);
  } catch (const std::exception& e) {
    if (!partial.empty()) {
      std::ofstream rec(opt.records_path, std::ios::binary);
      skm::write_records_csv(rec, partial);
      std::cerr << "run failed: " << e.what() << " (partial records for "
                << partial.size() << " rows flushed to " << opt.records_path
                << ")\n";
    } else {
      std::cerr << "run failed: " << e.what() << "\n";
    }
    return kExitRuntime;
  }

  std::ofstream rec(opt.records_path, std::ios::binary);
  if (!rec) throw std::runtime_error("cannot open " + opt.records_path);
  skm::write_records_csv(rec, records);

  const auto rows = skm::aggregate(records, {1, 2, 4, 10});
  std::ofstream sum(opt.summary_path, std::ios::binary);
  if (!sum) throw std::runtime_error("cannot open " + opt.summary_path);
  skm::write_summary_csv(sum, rows);

  std::cout << "wrote " << records.size() << " records to " << opt.records_path
            << " and " << rows.size() << " summary rows to " << opt.summary_path
            << "\n";
  return 0;
}

int cmd_bound(const skm::Theorem1Config& cfg, const std::string& out_path) {
  const skm::CoverageReport report = skm::verify_theorem1(cfg);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  skm::write_coverage_csv(out, report);
  std::cout << "empirical epsilon = " << skm::format_double(report.empirical_epsilon)
            << ", E = " << skm::format_double(report.empirical_e)
            << ", b = " << skm::format_double(report.b) << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& indices,
               bool gnuplot) {
  std::vector<skm::ExperimentRecord> records;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file " + path);
    auto part = skm::read_records_csv(in);
    records.insert(records.end(), part.begin(), part.end());
  }
  const auto rows = skm::aggregate(records, parse_indices(indices));
  if (gnuplot) {
    std::cout << "# algo eps K m batch_index metric median q1 q3\n";
    for (const auto& r : rows)
      std::cout << skm::algo_id(r.algo) << ' ' << skm::format_double(r.eps) << ' '
                << r.k << ' ' << r.m << ' ' << r.batch_index << ' ' << r.metric
                << ' ' << skm::format_double(r.median) << ' '
                << skm::format_double(r.q1) << ' ' << skm::format_double(r.q3)
                << "\n";
  } else {
    skm::write_summary_csv(std::cout, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming K-means toolkit: drift streams, FSKM/PSKM runs, "
               "confidence-bound checks and report aggregation"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a (1+eps)-drift stream dump");
  skm::DriftStreamSpec gen_spec;
  int gen_batches = 30;
  std::string gen_out = "stream.csv";
  std::string gen_csv;
  bool gen_csv_header = false;
  gen->add_option("--d", gen_spec.base.d, "dimension of the synthetic base data");
  gen->add_option("--n", gen_spec.base.n, "base pool size");
  gen->add_option("--k-true", gen_spec.base.k_true, "mixture components");
  auto* gen_eps = gen->add_option("--eps", gen_spec.epsilon, "drift magnitude (> 0)");
  gen->add_option("--batch-size", gen_spec.batch_size, "points per batch");
  gen->add_option("--period", gen_spec.drift_period, "batches per concept");
  gen->add_option("--warmup", gen_spec.warmup,
                  "batches before the first drift (default: period)");
  gen->add_option("--k-cluster", gen_spec.k_cluster,
                  "clusters for the drift calibration");
  gen->add_option("--batches", gen_batches, "batches to emit");
  auto* gen_seed = gen->add_option("--seed", gen_spec.seed, "generator seed");
  gen->add_option("--out", gen_out, "output stream file");
  gen->add_option("--from-csv", gen_csv, "use CSV rows as base data");
  gen->add_flag("--header", gen_csv_header, "skip one CSV header line");

  // run
  auto* run = app.add_subcommand("run", "Run the streamed FSKM/PSKM benchmark");
  RunOptions run_opt;
  run->add_option("--config", run_opt.config_path, "flat key=value config file");
  run->add_option("--stream", run_opt.stream_path, "replay a stream dump");
  run->add_option("--d", run_opt.cfg.d, "dimension");
  run->add_option("--pool-n", run_opt.cfg.pool_n, "concept pool size");
  run->add_option("--k-true", run_opt.cfg.k_true, "mixture components (0 = k)");
  run->add_option("--eps", run_opt.cfg.epsilon, "drift magnitude");
  run->add_option("--batch-size", run_opt.cfg.batch_size, "points per batch");
  run->add_option("--tau", run_opt.cfg.tau, "drift period");
  run->add_option("--k", run_opt.cfg.k, "clusters");
  run->add_option("--m", run_opt.cfg.m, "rho rule fraction");
  run->add_option("--t-max", run_opt.cfg.t_max, "retained batches (0 = derive)");
  run->add_option("--max-iter", run_opt.cfg.solver.max_iterations,
                  "Lloyd iteration cap");
  run->add_option("--reps", run_opt.cfg.repetitions, "repetitions");
  auto* run_seed = run->add_option("--seed", run_opt.cfg.seed, "base seed");
  run->add_option("--measured", run_opt.cfg.measured_batches,
                  "measured batches after burn-in");
  run->add_option("--jobs", run_opt.cfg.jobs, "parallel repetition cap");
  run->add_option("--algorithms", run_opt.algorithms, "comma-separated ids");
  run->add_option("--records", run_opt.records_path, "records CSV path");
  run->add_option("--summary", run_opt.summary_path, "summary CSV path");

  // bound
  auto* bound = app.add_subcommand("bound", "Monte-Carlo check of the drift bound");
  skm::Theorem1Config bound_cfg;
  std::string bound_out = "coverage.csv";
  bound->add_option("--rho", bound_cfg.rho, "forgetting parameter");
  bound->add_option("--eps", bound_cfg.epsilon, "drift magnitude");
  bound->add_option("--n", bound_cfg.batch_n, "batch size");
  bound->add_option("--delta", bound_cfg.delta, "confidence delta (0.05 or 0.32)");
  bound->add_option("--reps", bound_cfg.repetitions, "repetitions");
  auto* bound_seed = bound->add_option("--seed", bound_cfg.seed, "seed");
  bound->add_option("--d", bound_cfg.base.d, "dimension");
  bound->add_option("--pool-n", bound_cfg.base.n, "pool size per concept");
  bound->add_option("--k-true", bound_cfg.base.k_true, "mixture components");
  bound->add_option("--k", bound_cfg.k_cluster, "drift calibration clusters");
  bound->add_option("--old-batches", bound_cfg.old_batches, "pre-drift batches");
  bound->add_option("--new-batches", bound_cfg.new_batches, "post-drift batches");
  bound->add_option("--out", bound_out, "coverage CSV path");

  // report
  auto* report = app.add_subcommand("report", "Aggregate records CSVs");
  std::vector<std::string> report_files;
  std::string report_indices = "1,2,4,10";
  bool report_gnuplot = false;
  report->add_option("files", report_files, "records CSV files")->required();
  report->add_option("--indices", report_indices, "batch indices to report");
  report->add_flag("--gnuplot", report_gnuplot, "emit plot-ready columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (!(gen_spec.epsilon > 0.0)) {
        std::cerr << "usage error: --eps must be > 0\n";
        return kExitUsage;
      }
      if (gen_batches < 1) {
        std::cerr << "usage error: --batches must be >= 1\n";
        return kExitUsage;
      }
      (void)gen_eps;
      if (!gen_csv.empty()) {
        gen_spec.base.kind = skm::BaseDataSpec::Kind::CsvFile;
        gen_spec.base.csv_path = gen_csv;
        gen_spec.base.csv_header = gen_csv_header;
      }
      gen_spec.seed = effective_seed(gen_spec.seed, gen_seed->count() > 0);
      return cmd_gen(gen_spec, gen_batches, gen_out);
    }
    if (run->parsed()) return cmd_run(run_opt, run_seed->count() > 0);
    if (bound->parsed()) {
      bound_cfg.seed = effective_seed(bound_cfg.seed, bound_seed->count() > 0);
      return cmd_bound(bound_cfg, bound_out);
    }
    if (report->parsed())
      return cmd_report(report_files, report_indices, report_gnuplot);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
