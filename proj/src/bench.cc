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

#include "tnco/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tnco/io.h"
#include "tnco/solvers.h"
#include "tnco/trainer.h"

namespace tnco {

BootstrapEstimate BootstrapBestOfK(std::span<const double> pool, int k,
                                   int n_resamples, std::uint64_t seed) {
  if (pool.empty()) throw std::invalid_argument("bootstrap pool is empty");
  if (k < 1) throw std::invalid_argument("bootstrap needs k >= 1");
  if (n_resamples < 1) {
    throw std::invalid_argument("bootstrap needs n_resamples >= 1");
  }
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<double> minima(n_resamples);
  for (int i = 0; i < n_resamples; ++i) {
    std::mt19937_64 rng(MixSeed(seed, i));
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) best = std::min(best, pool[pick(rng)]);
    minima[i] = best;
  }
  return {k, n_resamples, Median(std::move(minima))};
}

double Median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

Summary Summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  if (values.size() > 1) {
    double sq = 0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (values.size() - 1));
  }
  s.median = Median({values.begin(), values.end()});
  std::vector<double> dev;
  for (double v : values) dev.push_back(std::abs(v - s.median));
  s.mad = Median(std::move(dev));
  return s;
}

const std::vector<std::string>& SolverNames() {
  static const std::vector<std::string> names = {
      "greedy", "optimal", "random", "anneal", "rl", "hybrid"};
  return names;
}

bool IsKnownSolver(const std::string& name) {
  const auto& names = SolverNames();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ContractionPath RunSolver(const std::string& name, const TensorNetwork& net,
                          std::uint64_t seed, const SolverOptions& opts) {
  if (name == "greedy") return GreedySolve(net);
  if (name == "optimal") return OptimalSolve(net);
  if (name == "random") return RandomSolve(net, seed);
  if (name == "anneal") {
    AnnealSchedule schedule;
    schedule.iterations = opts.anneal_iterations;
    schedule.time_limit_s = opts.time_limit_s;
    return AnnealSolve(net, GreedySolve(net), schedule, seed);
  }
  if (name == "rl") {
    if (!opts.policy) throw std::invalid_argument("rl solver needs a policy");
    InferOptions io;
    io.paths = opts.paths;
    io.seed = seed;
    io.features = opts.features;
    return Infer(*opts.policy, net, io);
  }
  if (name == "hybrid") {
    const int n = static_cast<int>(net.num_nodes());
    return HybridSolve(net, std::min(opts.hybrid_k, n - 1),
                       [](const TensorNetwork& rest) {
                         return OptimalSolve(rest);
                       });
  }
  throw std::invalid_argument("unknown solver '" + name + "'");
}

namespace {

constexpr char kCsvHeader[] =
    "instance,solver,seed,flops,raw_flops,fallback,wall_ms,path_file";

void CheckCsvField(const std::string& field) {
  if (field.find_first_of(",\n\r\"") != std::string::npos) {
    throw std::invalid_argument("csv field contains a separator: " + field);
  }
}

[[noreturn]] void CsvFail(const std::string& what) {
  throw Error(ErrorCode::kFormatError, "bench csv: " + what);
}

double ParseDouble(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    CsvFail("bad number '" + s + "'");
  }
  if (used != s.size()) CsvFail("bad number '" + s + "'");
  return v;
}

std::uint64_t FieldHash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void WriteBenchCsv(std::ostream& out, std::span<const BenchResult> rows) {
  out << kCsvHeader << '\n';
  std::ostringstream line;
  line << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const BenchResult& r : rows) {
    CheckCsvField(r.instance);
    CheckCsvField(r.solver);
    CheckCsvField(r.path_file);
    line.str("");
    line << r.instance << ',' << r.solver << ',' << r.seed << ',' << r.flops
         << ',' << r.raw_flops << ',' << (r.fallback ? 1 : 0) << ','
         << r.wall_ms << ',' << r.path_file;
    out << line.str() << '\n';
  }
}

std::vector<BenchResult> ReadBenchCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) CsvFail("bad header");
  std::vector<BenchResult> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) CsvFail("expected 8 fields in '" + line + "'");
    BenchResult r;
    r.instance = f[0];
    r.solver = f[1];
    try {
      std::size_t used = 0;
      r.seed = std::stoull(f[2], &used);
      if (used != f[2].size()) CsvFail("bad seed '" + f[2] + "'");
    } catch (const std::logic_error&) {
      CsvFail("bad seed '" + f[2] + "'");
    }
    r.flops = ParseDouble(f[3]);
    r.raw_flops = ParseDouble(f[4]);
    if (f[5] != "0" && f[5] != "1") CsvFail("bad fallback flag '" + f[5] + "'");
    r.fallback = f[5] == "1";
    r.wall_ms = ParseDouble(f[6]);
    r.path_file = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<BenchResult> RunBench(std::span<const BenchInstance> instances,
                                  const BenchOptions& opts) {
  for (const auto& s : opts.solvers) {
    if (!IsKnownSolver(s)) {
      throw std::invalid_argument("unknown solver '" + s + "'");
    }
  }
  struct Job {
    std::size_t instance;
    std::string solver;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const auto& s : opts.solvers) {
      for (std::uint64_t seed : opts.seeds) jobs.push_back({i, s, seed});
    }
  }

  // Greedy is deterministic, so one fallback path per instance suffices.
  std::vector<ContractionPath> greedy(instances.size());
  if (opts.fallback) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      greedy[i] = GreedySolve(instances[i].net);
    }
  }

  std::vector<BenchResult> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const Job& job = jobs[j];
        const BenchInstance& inst = instances[job.instance];
        const std::uint64_t seed = MixSeed(
            MixSeed(FieldHash(inst.id), FieldHash(job.solver)), job.seed);
        const auto start = std::chrono::steady_clock::now();
        ContractionPath path = RunSolver(job.solver, inst.net, seed,
                                         opts.solver);
        const auto stop = std::chrono::steady_clock::now();

        BenchResult r;
        r.instance = inst.id;
        r.solver = job.solver;
        r.seed = job.seed;
        r.raw_flops = path.total_cost;
        r.wall_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        if (opts.fallback) {
          const ContractionPath candidates[] = {path, greedy[job.instance]};
          const ContractionPath& chosen = FallbackSelect(candidates);
          r.fallback = &chosen != &candidates[0];
          path = chosen;
        }
        r.flops = path.total_cost;

        Flops replayed = PathCost(inst.net, path);
        if (opts.path_dir) {
          const auto file = *opts.path_dir /
                            (inst.id + "." + job.solver + "." +
                             std::to_string(job.seed) + ".path");
          SavePath(file, inst.net, path);
          replayed = PathCost(inst.net, LoadPath(file, inst.net));
          r.path_file = file.string();
        }
        if (replayed != r.flops) {
          throw std::logic_error("replayed cost differs for " + inst.id +
                                 " / " + job.solver);
        }
        rows[j] = std::move(r);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, opts.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string FormatSummary(std::span<const BenchResult> rows) {
  std::map<std::string, std::vector<double>> by_solver;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!by_solver.count(r.solver)) order.push_back(r.solver);
    by_solver[r.solver].push_back(r.flops);
  }
  std::ostringstream out;
  out << std::setprecision(6);
  for (const auto& name : order) {
    const Summary s = Summarize(by_solver[name]);
    out << name << ": n=" << s.count << " mean " << s.mean << " +- "
        << s.stddev << ", median " << s.median << " +- " << s.mad << '\n';
  }
  return out.str();
}

std::vector<HistogramBin> Log10Histogram(std::span<const double> values,
                                         double bin_width) {
  if (!(bin_width > 0)) {
    throw std::invalid_argument("histogram bin width must be positive");
  }
  std::map<long, std::int64_t> counts;
  for (double v : values) {
    if (!(v > 0)) continue;
    counts[static_cast<long>(std::floor(std::log10(v) / bin_width))]++;
  }
  std::vector<HistogramBin> bins;
  if (counts.empty()) return bins;
  const long first = counts.begin()->first;
  const long last = counts.rbegin()->first;
  for (long b = first; b <= last; ++b) {
    auto it = counts.find(b);
    bins.push_back({b * bin_width, (b + 1) * bin_width,
                    it == counts.end() ? 0 : it->second});
  }
  return bins;
}

}  // namespace tnco
