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

#ifndef TNCO_BENCH_H_
#define TNCO_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tnco/features.h"
#include "tnco/gnn.h"
#include "tnco/network.h"

namespace tnco {

struct BootstrapEstimate {
  int k = 1;
  int n_resamples = 0;
  double median = 0;
};

// Draws n_resamples tuples of k results with replacement, keeps each tuple's
// minimum and returns the median of those minima. Tuple i is the length-k
// prefix of a fixed per-tuple index stream, so for one seed the estimate is
// non-increasing in k. Throws std::invalid_argument for an empty pool, k < 1
// or n_resamples < 1.
BootstrapEstimate BootstrapBestOfK(std::span<const double> pool, int k,
                                   int n_resamples, std::uint64_t seed);

double Median(std::vector<double> values);

struct Summary {
  std::size_t count = 0;
  double mean = 0;
  double stddev = 0;  // sample standard deviation, 0 for a single value
  double median = 0;
  double mad = 0;     // median absolute deviation from the median
};

Summary Summarize(std::span<const double> values);

struct SolverOptions {
  // Tail length for the hybrid solver.
  int hybrid_k = 8;
  // Anneal stops at this deadline and reports its best so far (0: none).
  double time_limit_s = 0;
  int anneal_iterations = 20000;
  // Required by the rl solver.
  std::optional<PolicyParams> policy;
  FeatureOptions features;
  int paths = 50;
};

const std::vector<std::string>& SolverNames();
bool IsKnownSolver(const std::string& name);

// Runs a named solver: greedy, optimal, random, anneal, rl or hybrid (greedy
// prefix, optimal tail). Throws std::invalid_argument for an unknown name or
// a missing policy, and kTooLarge when an exhaustive search is out of range.
ContractionPath RunSolver(const std::string& name, const TensorNetwork& net,
                          std::uint64_t seed, const SolverOptions& opts);

struct BenchResult {
  std::string instance;
  std::string solver;
  std::uint64_t seed = 0;
  Flops flops = 0;      // after greedy fallback
  Flops raw_flops = 0;  // as returned by the solver
  bool fallback = false;
  double wall_ms = 0;
  std::string path_file;

  bool operator==(const BenchResult&) const = default;
};

void WriteBenchCsv(std::ostream& out, std::span<const BenchResult> rows);
// Throws kFormatError on a malformed header or row.
std::vector<BenchResult> ReadBenchCsv(std::istream& in);

struct BenchInstance {
  std::string id;
  TensorNetwork net;
};

struct BenchOptions {
  std::vector<std::string> solvers;
  std::vector<std::uint64_t> seeds{0};
  SolverOptions solver;
  int threads = 1;
  // Replace a result with the greedy path when greedy is cheaper.
  bool fallback = true;
  // Path files are written here when set.
  std::optional<std::filesystem::path> path_dir;
};

// One row per (instance, solver, seed), in that nesting order. Every row's
// cost is recomputed from its path (read back from disk when path_dir is
// set) before it is returned; a mismatch throws std::logic_error.
std::vector<BenchResult> RunBench(std::span<const BenchInstance> instances,
                                  const BenchOptions& opts);

// Per-solver "mean +- std" and "median +- MAD" of flops, one line each.
std::string FormatSummary(std::span<const BenchResult> rows);

struct HistogramBin {
  double lo = 0;
  double hi = 0;
  std::int64_t count = 0;
};

// Histogram of log10(value) over positive values with bins aligned to
// multiples of bin_width. Non-positive values are skipped.
std::vector<HistogramBin> Log10Histogram(std::span<const double> values,
                                         double bin_width);

}  // namespace tnco

#endif  // TNCO_BENCH_H_
