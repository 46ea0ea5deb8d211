#include "dualmix/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "dualmix/errors.hpp"
#include "dualmix/rng.hpp"

namespace dualmix {

Dataset sample_mixture(const MixtureTruth& truth, std::size_t n, std::uint64_t seed,
                       std::uint64_t stream) {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  if (!(truth.lambda >= 0.0 && truth.lambda <= 1.0)) {
    throw std::invalid_argument("mixture weight must lie in [0, 1]");
  }
  if (truth.f1.dim() != truth.f0.dim()) {
    throw std::invalid_argument("mixture components must share a dimension");
  }
  Dataset data;
  data.dim = truth.f1.dim();
  data.values.resize(n * static_cast<std::size_t>(data.dim));
  CounterRng rng(seed, stream);
  for (std::size_t i = 0; i < n; ++i) {
    double* out = data.values.data() + i * static_cast<std::size_t>(data.dim);
    if (rng.next_unit() < truth.lambda) {
      truth.f1.draw(rng, truth.theta1, out);
    } else {
      truth.f0.draw(rng, truth.theta0, out);
    }
  }
  return data;
}

namespace {

RunResult execute_run(const ExperimentConfig& config, int r) {
  RunResult out;
  out.run = r;
  const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(r);
  try {
    const Dataset data = sample_mixture(config.truth, config.n, run_seed);
    const SampleStats stats = compute_stats(data, config.cs, !config.div.is_chi2());
    EstimateOptions opts = config.est;
    opts.seed = run_seed;
    const EstimateResult est =
        estimate(stats, config.truth.f1, config.cs, config.div, opts);
    out.converged = est.converged;
    out.objective = est.objective;
    out.params = est.phi.flatten();
    const AsymptoticReport rep =
        asymptotic_report(est.phi, stats, config.truth.f1, config.cs);
    if (rep.available) out.se = rep.se;
    for (const std::string& w : est.warnings) {
      if (!out.message.empty()) out.message += "; ";
      out.message += w;
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.converged = false;
    out.message = e.what();
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, int threads) {
  if (config.runs < 1) throw std::invalid_argument("experiment needs at least one run");
  ExperimentReport rep;
  rep.scenario = config.scenario;
  rep.divergence = config.div.name();
  rep.n = config.n;
  rep.seed = config.seed;
  rep.param_names = config.param_names;

  rep.runs.resize(config.runs);
  const int workers = std::max(1, std::min(threads, config.runs));
  if (workers == 1) {
    for (int r = 0; r < config.runs; ++r) rep.runs[r] = execute_run(config, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int r = next.fetch_add(1);
          if (r >= config.runs) return;
          rep.runs[r] = execute_run(config, r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Reduce in run order over converged runs only.
  const std::size_t dim = rep.param_names.size();
  rep.mean.assign(dim, 0.0);
  rep.sd.assign(dim, 0.0);
  rep.se_mean.assign(dim, 0.0);
  int se_count = 0;
  for (const RunResult& r : rep.runs) {
    if (!r.converged) continue;
    ++rep.converged_runs;
    for (std::size_t k = 0; k < dim; ++k) rep.mean[k] += r.params[k];
    if (r.se.size() == dim) {
      ++se_count;
      for (std::size_t k = 0; k < dim; ++k) rep.se_mean[k] += r.se[k];
    }
  }
  if (rep.converged_runs > 0) {
    for (double& v : rep.mean) v /= rep.converged_runs;
  }
  if (se_count > 0) {
    for (double& v : rep.se_mean) v /= se_count;
  } else {
    rep.se_mean.clear();
  }
  if (rep.converged_runs >= 2) {
    for (const RunResult& r : rep.runs) {
      if (!r.converged) continue;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = r.params[k] - rep.mean[k];
        rep.sd[k] += d * d;
      }
    }
    for (double& v : rep.sd) v = std::sqrt(v / (rep.converged_runs - 1));
  } else {
    rep.degenerate_sd = true;
  }
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void write_summary_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "parameter,mean,sd,mean_se\n";
  for (std::size_t k = 0; k < report.param_names.size(); ++k) {
    out << report.param_names[k] << ',' << fmt(report.mean[k]) << ','
        << fmt(report.sd[k]) << ','
        << (report.se_mean.empty() ? "" : fmt(report.se_mean[k])) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_runs_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "run,converged,objective";
  for (const std::string& p : report.param_names) out << ',' << p;
  for (const std::string& p : report.param_names) out << ",se_" << p;
  out << ",message\n";
  for (const RunResult& r : report.runs) {
    out << r.run << ',' << (r.converged ? 1 : 0) << ','
        << (r.failed ? "" : fmt(r.objective));
    for (std::size_t k = 0; k < report.param_names.size(); ++k) {
      out << ',' << (k < r.params.size() ? fmt(r.params[k]) : "");
    }
    for (std::size_t k = 0; k < report.param_names.size(); ++k) {
      out << ',' << (k < r.se.size() ? fmt(r.se[k]) : "");
    }
    std::string msg = r.message;
    for (char& c : msg) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << ',' << msg << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

ScanResult scan_feasible_region(const ScanConfig& config) {
  if (config.lambda_steps < 2 || config.theta_steps < 2) {
    throw std::invalid_argument("scan grid needs at least 2 steps per axis");
  }
  if (config.truth.f1.dim() != 1) {
    throw std::invalid_argument("feasible-region scan supports univariate mixtures");
  }
  if (config.truth.f1.theta_dim() != 1) {
    throw std::invalid_argument("scan varies exactly one parametric coordinate");
  }

  // Population statistics of the sampling mixture; lambda in the stats is
  // the truth, the scanned lambda enters through Omega(phi).
  const SampleStats pop =
      population_stats(config.truth.lambda, config.truth.f1, config.truth.theta1,
                       config.truth.f0, config.truth.theta0, config.cs);

  ScanResult res;
  res.cells.reserve(static_cast<std::size_t>(config.lambda_steps) * config.theta_steps);
  for (int il = 0; il < config.lambda_steps; ++il) {
    const double lam = config.lambda_lo + (config.lambda_hi - config.lambda_lo) * il /
                                              (config.lambda_steps - 1);
    for (int it = 0; it < config.theta_steps; ++it) {
      const double th = config.theta_lo + (config.theta_hi - config.theta_lo) * it /
                                              (config.theta_steps - 1);
      ScanCell cell;
      cell.lambda = lam;
      cell.theta = th;

      MixtureParams phi;
      phi.lambda = lam;
      phi.theta = {th};
      try {
        cell.sylvester = is_spd_sylvester(omega_n(phi, pop, config.truth.f1, config.cs));
      } catch (const std::exception&) {
        cell.sylvester = false;
      }

      // Strict feasibility: (p_T(x) - lambda p_1(x | theta)) / (1 - lambda)
      // nonnegative on a dense grid covering both supports.
      auto range1 = config.truth.f1.integration_range(phi.theta);
      auto range_t1 = config.truth.f1.integration_range(config.truth.theta1);
      auto range_t0 = config.truth.f0.integration_range(config.truth.theta0);
      const double lo = std::min({range1.first, range_t1.first, range_t0.first});
      const double hi = std::max({range1.second, range_t1.second, range_t0.second});
      bool nonneg = true;
      for (int k = 0; k < config.support_points && nonneg; ++k) {
        const double x = lo + (hi - lo) * k / (config.support_points - 1);
        const double pt[1] = {x};
        const std::span<const double> xs(pt, 1);
        const double p_t =
            config.truth.lambda * config.truth.f1.density(config.truth.theta1, xs) +
            (1.0 - config.truth.lambda) * config.truth.f0.density(config.truth.theta0, xs);
        const double p_1 = config.truth.f1.density(phi.theta, xs);
        if (p_t - lam * p_1 < 0.0) nonneg = false;
      }
      cell.pointwise = nonneg;

      if (cell.sylvester) ++res.count_sylvester;
      if (cell.pointwise) ++res.count_pointwise;
      if (cell.pointwise && !cell.sylvester) ++res.inclusion_violations;
      res.cells.push_back(cell);
    }
  }
  return res;
}

void write_region_csv(const ScanResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "lambda,theta,feasible_sylvester,feasible_pointwise\n";
  for (const ScanCell& c : result.cells) {
    out << fmt(c.lambda) << ',' << fmt(c.theta) << ',' << (c.sylvester ? 1 : 0) << ','
        << (c.pointwise ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dualmix
