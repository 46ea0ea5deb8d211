// Command-line front end: simulate draws mixture samples, estimate fits one
// dataset, experiment replicates the full Monte Carlo loop (or a feasibility
// scan when the config says mode = "scan"). Every output directory receives
// a manifest.json recording the resolved configuration.
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dualmix/asymptotics.hpp"
#include "dualmix/config.hpp"
#include "dualmix/errors.hpp"
#include "dualmix/kernels.hpp"
#include "dualmix/montecarlo.hpp"
#include "dualmix/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoFeasibleStart = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> divergence;
  std::optional<int> starts;
  int threads = 1;
};

// Applies command-line overrides onto the loaded config so one object is the
// single source of truth for both execution and the manifest.
json load_config(const CommonFlags& flags) {
  json j = dualmix::load_json_file(flags.config_path);
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.divergence) j["divergence"] = *flags.divergence;
  if (flags.starts) j["starts"] = *flags.starts;
  return j;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw dualmix::IoError("cannot create output directory: " + dir);
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const json& resolved_config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double elapsed_seconds,
                    int threads) {
  json m;
  m["tool"] = "dualmix";
  m["version"] = dualmix::kVersion;
  m["subcommand"] = subcommand;
  m["created_unix"] = static_cast<long long>(std::time(nullptr));
  m["elapsed_seconds"] = elapsed_seconds;
  m["threads"] = threads;
  m["kernel_backend"] = dualmix::kernels::active_backend();
  m["config"] = resolved_config;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  dualmix::write_json_file(m, (fs::path(out_dir) / "manifest.json").string());
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int cmd_simulate(const CommonFlags& flags) {
  const Timer timer;
  const json j = load_config(flags);
  const dualmix::ExperimentConfig cfg = dualmix::experiment_from_json(j);
  const dualmix::Dataset data = dualmix::sample_mixture(cfg.truth, cfg.n, cfg.seed);
  ensure_out_dir(flags.out_dir);
  const std::string sample_path = (fs::path(flags.out_dir) / "sample.csv").string();
  dualmix::write_csv(data, sample_path);
  write_manifest(flags.out_dir, "simulate", dualmix::experiment_to_json(cfg),
                 {flags.config_path}, {"sample.csv"}, timer.seconds(), 1);
  std::cout << "wrote " << data.size() << " samples to " << sample_path << "\n";
  return kExitOk;
}

json report_asymptotics(const dualmix::AsymptoticReport& rep,
                        const std::vector<std::string>& names) {
  json a;
  a["available"] = rep.available;
  a["note"] = rep.note;
  if (rep.available && !rep.se.empty()) {
    json se;
    for (std::size_t k = 0; k < names.size() && k < rep.se.size(); ++k) {
      se[names[k]] = rep.se[k];
    }
    a["se"] = se;
    json rows = json::array();
    for (int i = 0; i < rep.sandwich.rows; ++i) {
      json row = json::array();
      for (int c = 0; c < rep.sandwich.cols; ++c) row.push_back(rep.sandwich(i, c));
      rows.push_back(row);
    }
    a["sandwich"] = rows;
  }
  return a;
}

int cmd_estimate(const CommonFlags& flags, const std::string& data_path) {
  const Timer timer;
  const json j = load_config(flags);
  const dualmix::EstimateSetup setup = dualmix::estimate_setup_from_json(j);
  const dualmix::Dataset data = dualmix::read_csv(data_path);
  const dualmix::SampleStats stats =
      dualmix::compute_stats(data, setup.cs, !setup.div.is_chi2());

  dualmix::EstimateOptions opts = setup.est;
  const dualmix::EstimateResult est =
      dualmix::estimate(stats, setup.fam, setup.cs, setup.div, opts);
  const std::vector<std::string> names =
      dualmix::default_param_names(setup.fam, setup.cs);
  const dualmix::AsymptoticReport rep =
      dualmix::asymptotic_report(est.phi, stats, setup.fam, setup.cs);

  json out;
  out["divergence"] = setup.div.name();
  out["n"] = stats.n;
  out["objective"] = est.objective;
  out["converged"] = est.converged;
  out["lambda"] = est.phi.lambda;
  out["theta"] = est.phi.theta;
  out["alpha"] = est.phi.alpha;
  out["xi"] = est.xi;
  out["feasible_starts"] = est.feasible_starts;
  out["rejected_draws"] = est.rejected_draws;
  out["best_start"] = est.best_start;
  out["warnings"] = est.warnings;
  out["param_names"] = names;
  out["asymptotics"] = report_asymptotics(rep, names);

  ensure_out_dir(flags.out_dir);
  dualmix::write_json_file(out, (fs::path(flags.out_dir) / "estimate.json").string());
  write_manifest(flags.out_dir, "estimate", dualmix::estimate_setup_to_json(setup),
                 {flags.config_path, data_path}, {"estimate.json"}, timer.seconds(), 1);
  std::cout << "estimate: lambda = " << est.phi.lambda
            << ", objective = " << est.objective
            << (est.converged ? "" : " (not converged)") << "\n";
  return kExitOk;
}

int cmd_experiment(const CommonFlags& flags) {
  const Timer timer;
  const json j = load_config(flags);
  ensure_out_dir(flags.out_dir);

  if (dualmix::config_mode(j) == "scan") {
    const dualmix::ScanConfig cfg = dualmix::scan_from_json(j);
    const dualmix::ScanResult res = dualmix::scan_feasible_region(cfg);
    dualmix::write_region_csv(res, (fs::path(flags.out_dir) / "region.csv").string());
    write_manifest(flags.out_dir, "experiment", dualmix::scan_to_json(cfg),
                   {flags.config_path}, {"region.csv"}, timer.seconds(), 1);
    std::cout << "scanned " << res.cells.size() << " cells: " << res.count_sylvester
              << " in the working set, " << res.count_pointwise << " strict, "
              << res.inclusion_violations << " containment violations\n";
    return kExitOk;
  }

  const dualmix::ExperimentConfig cfg = dualmix::experiment_from_json(j);
  const dualmix::ExperimentReport rep = dualmix::run_experiment(cfg, flags.threads);
  dualmix::write_summary_csv(rep, (fs::path(flags.out_dir) / "summary.csv").string());
  dualmix::write_runs_csv(rep, (fs::path(flags.out_dir) / "runs.csv").string());
  write_manifest(flags.out_dir, "experiment", dualmix::experiment_to_json(cfg),
                 {flags.config_path}, {"summary.csv", "runs.csv"}, timer.seconds(),
                 flags.threads);
  std::cout << "experiment " << cfg.scenario << ": " << rep.converged_runs << "/"
            << cfg.runs << " runs converged\n";
  for (std::size_t k = 0; k < rep.param_names.size(); ++k) {
    std::cout << "  " << rep.param_names[k] << ": mean = " << rep.mean[k]
              << ", sd = " << rep.sd[k] << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiparametric two-component mixture estimation by divergence duality"};
  app.set_version_flag("--version", dualmix::kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  std::string data_path;

  auto add_common = [&](CLI::App* cmd, bool with_estimator_flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file")->required();
    cmd->add_option("--out", flags.out_dir, "output directory")->required();
    cmd->add_option("--seed", flags.seed, "override the config seed");
    if (with_estimator_flags) {
      cmd->add_option("--divergence", flags.divergence,
                      "override divergence (chi2, kl, mkl, hellinger, neyman_chi2)");
      cmd->add_option("--starts", flags.starts, "override the number of starts");
    }
  };

  CLI::App* sim = app.add_subcommand("simulate", "draw one sample from a mixture truth");
  add_common(sim, false);

  CLI::App* est = app.add_subcommand("estimate", "fit one dataset");
  add_common(est, true);
  est->add_option("--data", data_path, "headerless CSV sample")->required();

  CLI::App* exp =
      app.add_subcommand("experiment", "replicated runs or a feasibility scan");
  add_common(exp, true);
  exp->add_option("--threads", flags.threads, "worker threads for replications")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(flags);
    if (est->parsed()) return cmd_estimate(flags, data_path);
    return cmd_experiment(flags);
  } catch (const dualmix::NoFeasibleStartError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoFeasibleStart;
  } catch (const dualmix::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
