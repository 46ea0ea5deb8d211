#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualmix/asymptotics.hpp"
#include "dualmix/constraints.hpp"
#include "dualmix/divergence.hpp"
#include "dualmix/estimator.hpp"
#include "dualmix/families.hpp"

namespace dualmix {

// Ground truth of a two-component mixture: draw from f1(theta1) with
// probability lambda, otherwise from f0(theta0).
struct MixtureTruth {
  double lambda;
  Family f1;
  Vec theta1;
  Family f0;
  Vec theta0;
};

// Deterministic mixture sampler: one component coin and one inverse-CDF (or
// Box-Muller) draw per point from a counter-based stream, so identical
// (seed, stream) reproduce the sample bit-for-bit on any platform.
Dataset sample_mixture(const MixtureTruth& truth, std::size_t n, std::uint64_t seed,
                       std::uint64_t stream = 0);

struct ExperimentConfig {
  std::string scenario;  // label carried into reports and manifests
  MixtureTruth truth;
  ConstraintSet cs;
  Divergence div = Divergence::chi2();
  std::size_t n = 0;
  int runs = 1;
  std::uint64_t seed = 0;
  EstimateOptions est;
  std::vector<std::string> param_names;  // lambda, theta..., alpha...
};

struct RunResult {
  int run = 0;
  bool converged = false;
  bool failed = false;  // threw (for example no feasible start)
  double objective = 0.0;
  Vec params;  // flattened (lambda, theta, alpha)
  Vec se;      // plug-in standard errors, empty when unavailable
  std::string message;
};

struct ExperimentReport {
  std::string scenario;
  std::string divergence;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> param_names;
  std::vector<RunResult> runs;
  int converged_runs = 0;
  bool degenerate_sd = false;  // fewer than two converged runs
  Vec mean;     // over converged runs
  Vec sd;       // sample standard deviation (n-1), zeros when degenerate
  Vec se_mean;  // average plug-in standard error over runs that had one
};

// Runs `config.runs` independent replications. Run r draws its sample and
// its optimizer starts from master seed + r, so reports are bit-identical
// for a fixed config regardless of the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config, int threads = 1);

// Paper-style summary table (parameter, mean, sd, mean plug-in se) and the
// full per-run table.
void write_summary_csv(const ExperimentReport& report, const std::string& path);
void write_runs_csv(const ExperimentReport& report, const std::string& path);

// Classification of the working feasible set in the (lambda, theta[0]) plane
// against the population distribution of a mixture truth:
//   sylvester  - Omega(phi) is positive definite (the working set),
//   pointwise  - the plug-in signed density is nonnegative on a dense grid
//                (the strict set, a subset of the working set).
struct ScanConfig {
  MixtureTruth truth;
  ConstraintSet cs;
  double lambda_lo = 0.02, lambda_hi = 0.98;
  int lambda_steps = 50;
  double theta_lo = 0.5, theta_hi = 4.0;
  int theta_steps = 50;
  int support_points = 2000;
};

struct ScanCell {
  double lambda = 0.0;
  double theta = 0.0;
  bool sylvester = false;
  bool pointwise = false;
};

struct ScanResult {
  std::vector<ScanCell> cells;
  int count_sylvester = 0;
  int count_pointwise = 0;
  // Cells in the strict set but outside the working set; the containment
  // theorem says this must be zero.
  int inclusion_violations = 0;
};

ScanResult scan_feasible_region(const ScanConfig& config);

void write_region_csv(const ScanResult& result, const std::string& path);

}  // namespace dualmix
