#pragma once

#include "qlab/core.hpp"
#include "qlab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qlab {

/// One experiment: kind selects the pipeline, the rest are shared knobs.
/// Kinds: tomo (uniform-POVM tomography), test (identity testing),
/// attack-demo (adversary impact on the naive estimator / tester),
/// moments (Haar moment oracle vs Monte Carlo; the order is taken from r),
/// lb (lower-bound calculators: chi-square check and critical epsilon).
struct ExperimentConfig {
  std::string kind = "tomo";
  int d = 4;
  int r = 0;  // 0 means full rank (or order 2 for kind = moments)
  std::size_t n = 10000;
  double gamma = 0.0;
  double epsilon = 0.0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string estimator = "naive";  // naive | naive+rank | filter | subset-oracle
  std::string attack = "none";      // none | replace | coupling | spam | state-swap
  std::string output_path;          // empty: CSV to stdout, no metadata file

  int effective_rank() const;
  /// Throws std::invalid_argument with a descriptive message before any work.
  void validate() const;
};

struct ResultRow {
  std::size_t trial = 0;
  std::string kind;
  int d = 0;
  int r = 0;
  std::size_t n = 0;
  double gamma = 0.0;
  double epsilon = 0.0;
  std::string estimator;
  std::string attack;
  double trace_error = 0.0;
  double hs_error = 0.0;
  bool accept = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t budget_used = 0;
  double wall_time_ms = 0.0;  // excluded from the CSV to keep reruns byte-identical
  std::uint64_t derived_seed = 0;
};

/// Runs cfg.trials independent trials with per-trial seed Rng::mix(seed, trial).
/// Rows come back sorted by trial index; reruns are bit-identical.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "trial,kind,d,r,n,gamma,epsilon,estimator,attack,trace_error,hs_error,accept,"
    "statistic,threshold,budget_used,wall_time_ms,derived_seed";

/// 17-significant-digit float formatting shared by the CSV and JSON writers.
std::string format_double(double x);

/// CSV text: header plus one line per row. wall_time_ms prints as 0 so that
/// identical configs produce byte-identical files; measured timings live in
/// the JSON metadata side file.
std::string format_csv(const std::vector<ResultRow>& rows);

/// Parses format_csv output back into rows (round-trip exact).
std::vector<ResultRow> parse_csv(const std::string& text);

/// JSON with the full config, code version, and per-trial wall times.
std::string format_metadata(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);

/// Writes the CSV to cfg.output_path and metadata to cfg.output_path + ".meta.json";
/// with an empty output_path the CSV goes to stdout and no metadata is written.
void write_outputs(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);

/// Random rank-r state: normalized Ginibre Gram matrix A A^dag / Tr, A in C^{d x r}.
DensityMatrix sample_random_state(int d, int r, Rng& rng);

inline constexpr const char* kCodeVersion = "qlab 1.0.0";

}  // namespace qlab
