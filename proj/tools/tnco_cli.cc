// Copyright 2026 The tnco Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: network generation, solving, training, benchmarks
// and result analysis.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tnco/bench.h"
#include "tnco/config.h"
#include "tnco/generator.h"
#include "tnco/gnn.h"
#include "tnco/io.h"
#include "tnco/solvers.h"
#include "tnco/trainer.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolverGuard = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::map<char, tnco::Extent> ParseSizes(const std::string& text) {
  std::map<char, tnco::Extent> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() < 3 || item[1] != '=') {
      throw UsageError("bad size '" + item + "', expected <symbol>=<extent>");
    }
    sizes[item[0]] = std::stoll(item.substr(2));
  }
  return sizes;
}

struct NetSource {
  std::string file;
  std::string einsum;
  std::string sizes;
};

tnco::TensorNetwork LoadNet(const NetSource& src) {
  if (!src.einsum.empty()) {
    return tnco::ParseEinsum(
        tnco::ParseEquation(src.einsum, ParseSizes(src.sizes)));
  }
  if (src.file.empty()) throw UsageError("give --net or --einsum");
  return tnco::LoadNetwork(src.file);
}

tnco::SolverOptions SolverOptionsFrom(const std::string& checkpoint, int paths,
                                      int k, double time_limit) {
  tnco::SolverOptions opts;
  opts.paths = paths;
  opts.hybrid_k = k;
  opts.time_limit_s = time_limit;
  if (!checkpoint.empty()) {
    std::string meta;
    opts.policy = tnco::LoadCheckpoint(checkpoint, &meta);
    opts.features = tnco::FeaturesFromMeta(meta);
  }
  return opts;
}

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (auto dash = item.find('-'); dash != std::string::npos && dash > 0) {
      const auto lo = std::stoull(item.substr(0, dash));
      const auto hi = std::stoull(item.substr(dash + 1));
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(std::stoull(item));
    }
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Suite: a directory of *.tn files, or "gen:n=10,count=5,seed=0[,degree=3]".
std::vector<tnco::BenchInstance> LoadSuite(const std::string& suite) {
  std::vector<tnco::BenchInstance> out;
  if (suite.rfind("gen:", 0) == 0) {
    tnco::GeneratorConfig g;
    int count = 1;
    for (const auto& kv : SplitList(suite.substr(4))) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("bad suite item " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "n") g.n = std::stoi(val);
      else if (key == "count") count = std::stoi(val);
      else if (key == "seed") g.seed = std::stoull(val);
      else if (key == "degree") g.mean_degree = std::stod(val);
      else throw UsageError("unknown suite key " + key);
    }
    const std::uint64_t base = g.seed;
    for (int i = 0; i < count; ++i) {
      g.seed = base + i;
      out.push_back({"n" + std::to_string(g.n) + "_s" + std::to_string(g.seed),
                     tnco::RandomNetwork(g)});
    }
    return out;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(suite)) {
    if (entry.path().extension() == ".tn") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    out.push_back({f.stem().string(), tnco::LoadNetwork(f)});
  }
  if (out.empty()) throw UsageError("suite " + suite + " has no .tn files");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network contraction ordering tools"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write random networks");
  tnco::GeneratorConfig gcfg;
  int gen_count = 1;
  std::string gen_out = ".";
  gen->add_option("--n", gcfg.n, "Nodes per network")->required();
  gen->add_option("--seed", gcfg.seed, "Seed of the first network");
  gen->add_option("--count", gen_count, "Number of networks")
      ->check(CLI::PositiveNumber);
  gen->add_option("--degree", gcfg.mean_degree, "Mean node degree");
  gen->add_option("--extent-low", gcfg.extent_low, "Smallest extent");
  gen->add_option("--extent-high", gcfg.extent_high, "Largest extent");
  gen->add_option("--out", gen_out, "Output directory");

  // solve
  auto* solve = app.add_subcommand("solve", "Find a contraction path");
  std::string solver = "greedy", solve_out, checkpoint;
  NetSource solve_net;
  int hybrid_k = 8, paths = 50;
  std::uint64_t solve_seed = 0;
  double time_limit = 0;
  solve->add_option("--solver", solver, "Solver")
      ->check(CLI::IsMember(tnco::SolverNames()));
  solve->add_option("--net", solve_net.file, "Network file");
  solve->add_option("--einsum", solve_net.einsum, "Einsum equation");
  solve->add_option("--sizes", solve_net.sizes, "Extents, e.g. i=2,j=10");
  solve->add_option("--out", solve_out, "Path file to write");
  solve->add_option("--k", hybrid_k, "Hybrid tail steps");
  solve->add_option("--checkpoint", checkpoint, "Policy checkpoint (rl)");
  solve->add_option("--paths", paths, "Sampled paths (rl)");
  solve->add_option("--seed", solve_seed, "Seed");
  solve->add_option("--time-limit", time_limit, "Seconds (anneal)");

  // train
  auto* train = app.add_subcommand("train", "Train a policy");
  std::string mode = "single", config_file, out_checkpoint, log_file,
              best_path_file;
  std::vector<std::string> train_nets;
  bool no_robust = false, no_solver = false, no_buffer = false,
       no_pruning = false;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::int64_t> total_samples;
  std::optional<double> train_limit;
  train->add_option("--mode", mode, "single, multi or fixed")
      ->check(CLI::IsMember({"single", "multi", "fixed"}));
  train->add_option("--config", config_file, "JSON run config");
  train->add_option("--net", train_nets, "Training network file(s)");
  train->add_option("--out-checkpoint", out_checkpoint, "Checkpoint to write")
      ->required();
  train->add_option("--log", log_file, "JSON-lines training log");
  train->add_option("--best-path", best_path_file,
                    "Best path file (single mode)");
  train->add_option("--seed", train_seed, "Override train.seed");
  train->add_option("--total-samples", total_samples,
                    "Override train.total_samples");
  train->add_option("--time-limit", train_limit, "Override train.time_limit_s");
  train->add_flag("--no-robust-features", no_robust);
  train->add_flag("--no-solver-features", no_solver);
  train->add_flag("--no-optimistic-buffer", no_buffer);
  train->add_flag("--no-path-pruning", no_pruning);

  // bench
  auto* bench = app.add_subcommand("bench", "Run a solver comparison");
  std::string suite, solvers = "greedy", seeds = "0", bench_out, path_dir,
              bench_checkpoint;
  int threads = 1, bench_paths = 50, bench_k = 8;
  double bench_limit = 0;
  bool no_fallback = false;
  bench->add_option("--suite", suite, "Directory of .tn files or gen:...")
      ->required();
  bench->add_option("--solvers", solvers, "Comma-separated solvers");
  bench->add_option("--seeds", seeds, "Seeds, e.g. 0,1,2 or 0-9");
  bench->add_option("--time-limit", bench_limit, "Seconds per run (anneal)");
  bench->add_option("--checkpoint", bench_checkpoint, "Policy checkpoint (rl)");
  bench->add_option("--paths", bench_paths, "Sampled paths (rl)");
  bench->add_option("--k", bench_k, "Hybrid tail steps");
  bench->add_option("--threads", threads, "Worker threads");
  bench->add_option("--out", bench_out, "CSV output file");
  bench->add_option("--path-dir", path_dir, "Directory for path files");
  bench->add_flag("--no-fallback", no_fallback,
                  "Keep results worse than greedy");

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "Best-of-k bootstrap medians");
  std::string boot_csv, boot_values, boot_solver, boot_instance;
  int boot_k = 10, resamples = 10000;
  std::uint64_t boot_seed = 0;
  boot->add_option("--csv", boot_csv, "Bench CSV providing the pool");
  boot->add_option("--values", boot_values, "Comma-separated pool");
  boot->add_option("--solver", boot_solver, "Filter CSV rows by solver");
  boot->add_option("--instance", boot_instance, "Filter CSV rows by instance");
  boot->add_option("--k", boot_k, "Largest tuple size")
      ->check(CLI::PositiveNumber);
  boot->add_option("--resamples", resamples, "Tuples per k")
      ->check(CLI::PositiveNumber);
  boot->add_option("--seed", boot_seed, "Seed");

  // hist
  auto* hist = app.add_subcommand("hist", "Log10 per-step cost histogram");
  std::string paths_from = "random", hist_out;
  tnco::GeneratorConfig hcfg;
  int hist_count = 10, hist_paths = 10;
  double bin_width = 0.5;
  hist->add_option("--paths-from", paths_from, "random or a solver name");
  hist->add_option("--n", hcfg.n, "Nodes per network");
  hist->add_option("--count", hist_count, "Networks")
      ->check(CLI::PositiveNumber);
  hist->add_option("--paths-per-net", hist_paths, "Random paths per network")
      ->check(CLI::PositiveNumber);
  hist->add_option("--seed", hcfg.seed, "Seed");
  hist->add_option("--bin-width", bin_width, "Bin width in decades");
  hist->add_option("--out", hist_out, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      tnco::CheckGeneratorConfig(gcfg);
      fs::create_directories(gen_out);
      const std::uint64_t base = gcfg.seed;
      for (int i = 0; i < gen_count; ++i) {
        gcfg.seed = base + i;
        const fs::path file =
            fs::path(gen_out) / ("n" + std::to_string(gcfg.n) + "_s" +
                                 std::to_string(gcfg.seed) + ".tn");
        tnco::SaveNetwork(file, tnco::RandomNetwork(gcfg));
        std::cout << file.string() << '\n';
      }
    } else if (*solve) {
      const tnco::TensorNetwork net = LoadNet(solve_net);
      const auto opts = SolverOptionsFrom(checkpoint, paths, hybrid_k,
                                          time_limit);
      const tnco::ContractionPath path =
          tnco::RunSolver(solver, net, solve_seed, opts);
      if (!solve_out.empty()) tnco::SavePath(solve_out, net, path);
      std::cout << std::setprecision(17) << path.total_cost << '\n';
    } else if (*train) {
      tnco::RunConfig cfg = config_file.empty()
                                ? tnco::DefaultRunConfig(
                                      tnco::ParseTrainMode(mode))
                                : tnco::LoadRunConfig(config_file);
      if (train->count("--mode")) cfg.mode = tnco::ParseTrainMode(mode);
      if (train_seed) cfg.train.seed = *train_seed;
      if (total_samples) cfg.train.total_samples = *total_samples;
      if (train_limit) cfg.train.time_limit_s = *train_limit;
      if (no_robust) cfg.train.features.robust = false;
      if (no_solver) cfg.train.features.solver_features = false;
      if (no_buffer) cfg.train.optimistic_buffer = false;
      if (no_pruning) cfg.train.path_pruning = false;
      cfg.gnn.edge_features = tnco::EdgeFeatureWidth(cfg.train.features);

      tnco::TrainInputs inputs;
      inputs.mode = cfg.mode;
      inputs.generator = cfg.generator;
      for (const auto& f : train_nets) {
        inputs.nets.push_back(tnco::LoadNetwork(f));
      }
      if (cfg.mode != tnco::TrainMode::kMulti && inputs.nets.empty()) {
        throw UsageError("single and fixed modes need --net");
      }
      std::ofstream log;
      if (!log_file.empty()) {
        log.open(log_file);
        if (!log) throw tnco::Error(tnco::ErrorCode::kIoError,
                                    "cannot write " + log_file);
      }
      tnco::TrainResult result = tnco::Train(
          inputs, cfg.gnn, cfg.train, log_file.empty() ? &std::cout : &log);
      tnco::SaveCheckpoint(out_checkpoint, result.params,
                           tnco::TrainMetaJson(cfg, result.reward_scale));
      if (result.best_path) {
        if (!best_path_file.empty()) {
          tnco::SavePath(best_path_file, inputs.nets.front(),
                         *result.best_path);
        }
        std::cerr << "best cost " << std::setprecision(17)
                  << result.best_path->total_cost << '\n';
      }
    } else if (*bench) {
      const auto instances = LoadSuite(suite);
      tnco::BenchOptions opts;
      opts.solvers = SplitList(solvers);
      opts.seeds = ParseSeeds(seeds);
      opts.solver = SolverOptionsFrom(bench_checkpoint, bench_paths, bench_k,
                                      bench_limit);
      opts.threads = threads;
      opts.fallback = !no_fallback;
      if (!path_dir.empty()) {
        fs::create_directories(path_dir);
        opts.path_dir = path_dir;
      }
      const auto rows = tnco::RunBench(instances, opts);
      if (!bench_out.empty()) {
        std::ofstream out(bench_out);
        if (!out) throw tnco::Error(tnco::ErrorCode::kIoError,
                                    "cannot write " + bench_out);
        tnco::WriteBenchCsv(out, rows);
      } else {
        tnco::WriteBenchCsv(std::cout, rows);
      }
      std::cout << tnco::FormatSummary(rows);
    } else if (*boot) {
      std::vector<double> pool;
      if (!boot_values.empty()) {
        for (const auto& v : SplitList(boot_values)) pool.push_back(std::stod(v));
      } else if (!boot_csv.empty()) {
        std::ifstream in(boot_csv);
        if (!in) throw tnco::Error(tnco::ErrorCode::kIoError,
                                   "cannot read " + boot_csv);
        for (const auto& r : tnco::ReadBenchCsv(in)) {
          if (!boot_solver.empty() && r.solver != boot_solver) continue;
          if (!boot_instance.empty() && r.instance != boot_instance) continue;
          pool.push_back(r.flops);
        }
      } else {
        throw UsageError("give --values or --csv");
      }
      std::cout << "k,median\n" << std::setprecision(17);
      for (int k = 1; k <= boot_k; ++k) {
        const auto est = tnco::BootstrapBestOfK(pool, k, resamples, boot_seed);
        std::cout << k << ',' << est.median << '\n';
      }
    } else if (*hist) {
      std::vector<double> costs;
      const std::uint64_t base = hcfg.seed;
      for (int i = 0; i < hist_count; ++i) {
        hcfg.seed = base + i;
        const tnco::TensorNetwork net = tnco::RandomNetwork(hcfg);
        const int reps = paths_from == "random" ? hist_paths : 1;
        for (int r = 0; r < reps; ++r) {
          const auto path =
              paths_from == "random"
                  ? tnco::RandomSolve(net, tnco::MixSeed(hcfg.seed, r))
                  : tnco::RunSolver(paths_from, net, hcfg.seed, {});
          costs.insert(costs.end(), path.step_costs.begin(),
                       path.step_costs.end());
        }
      }
      std::ofstream file;
      if (!hist_out.empty()) {
        file.open(hist_out);
        if (!file) throw tnco::Error(tnco::ErrorCode::kIoError,
                                     "cannot write " + hist_out);
      }
      std::ostream& out = hist_out.empty() ? std::cout : file;
      out << "log10_lo,log10_hi,count\n";
      for (const auto& b : tnco::Log10Histogram(costs, bin_width)) {
        out << b.lo << ',' << b.hi << ',' << b.count << '\n';
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tnco::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == tnco::ErrorCode::kTooLarge ? kExitSolverGuard
                                                  : kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
