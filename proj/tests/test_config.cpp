#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "dualmix/config.hpp"
#include "dualmix/errors.hpp"

using dualmix::ConstraintSet;
using dualmix::Divergence;
using dualmix::Family;
using nlohmann::json;

namespace {

json parse(const char* text) { return json::parse(text); }

// Shipped scenario configs, compiled in as a directory path.
const char* config_dir() { return DUALMIX_CONFIG_DIR; }

}  // namespace

TEST_SUITE("config") {

TEST_CASE("families survive a json round-trip") {
  const std::vector<Family> fams = {
      Family::gaussian(0.5),
      Family::weibull(1.5),
      Family::two_sided_weibull(2.0),
      Family::lognormal(0.8),
      Family::bivariate_gaussian_fixed(0.5, 0.25, 3.0, 3.0),
      Family::bivariate_gaussian_line(1.0, 0.0, 0.0, -1.0, 1.0, 1.0),
      Family::bivariate_gaussian_free(1.0, 0.1),
  };
  for (const Family& fam : fams) {
    CAPTURE(fam.name());
    const Family back = dualmix::family_from_json(dualmix::family_to_json(fam));
    CHECK(back.name() == fam.name());
    CHECK(back.kind() == fam.kind());
    CHECK(back.dim() == fam.dim());
    CHECK(back.theta_dim() == fam.theta_dim());
    // Same distribution: compare a density probe.
    dualmix::Vec theta(fam.theta_dim(), 0.8);
    std::vector<double> pt(fam.dim(), 0.9);
    const std::span<const double> xs(pt.data(), pt.size());
    CHECK(back.density(theta, xs) == fam.density(theta, xs));
  }
}

TEST_CASE("constraint sets survive a json round-trip") {
  const std::vector<ConstraintSet> sets = {
      ConstraintSet::weibull_moments({1, 2, 3, 4}, 1.0),
      ConstraintSet::two_sided_weibull_moments({2, 3, 4}, 1.5),
      ConstraintSet::bivariate_mean(),
      ConstraintSet::bivariate_mean_cross(0.25),
      ConstraintSet::fixed_targets({{{1, 0}}, {{2, 0}}}, {0.5, 1.25}, 1),
      ConstraintSet::custom(
          {{{1, 0}}, {{2, 0}}},
          {{dualmix::MomentTerm::power(1.0, 0, 1.0)},
           {dualmix::MomentTerm::constant(0.5),
            dualmix::MomentTerm::gamma_affine(2.0, 0, 1.0, 1.0, true)}},
          1, 1, {0.2}, {5.0}),
  };
  for (const ConstraintSet& cs : sets) {
    CAPTURE(cs.tag());
    const ConstraintSet back =
        dualmix::constraints_from_json(dualmix::constraints_to_json(cs));
    CHECK(back.tag() == cs.tag());
    CHECK(back.point_dim() == cs.point_dim());
    CHECK(back.ell() == cs.ell());
    CHECK(back.alpha_dim() == cs.alpha_dim());
    CHECK(back.exponents() == cs.exponents());
    // Same moment map: probe eval_m and eval_g.
    const dualmix::Vec alpha(cs.alpha_dim(), 1.3);
    CHECK(back.eval_m(alpha) == cs.eval_m(alpha));
    std::vector<double> pt(cs.point_dim(), 1.7);
    const std::span<const double> xs(pt.data(), pt.size());
    CHECK(back.eval_g(xs) == cs.eval_g(xs));
  }
}

TEST_CASE("estimator setups parse divergence and optimizer options") {
  const json j = parse(R"({
    "parametric": {"family": "weibull", "scale": 0.5},
    "constraints": {"type": "weibull_moments", "orders": [1, 2, 3], "sigma0": 1.0},
    "divergence": "hellinger",
    "starts": 17,
    "max_start_draws": 222,
    "penalty": 42.0,
    "max_evals": 1234,
    "diam_tol": 1e-6,
    "start_box": {"lo": [0.1, 0.5, 0.5], "hi": [0.9, 4.0, 4.0]}
  })");
  const auto setup = dualmix::estimate_setup_from_json(j);
  CHECK(setup.fam.name() == "weibull");
  CHECK(setup.cs.tag() == "weibull_moments");
  CHECK(setup.div.name() == "hellinger");
  CHECK(setup.est.starts == 17);
  CHECK(setup.est.max_start_draws == 222);
  CHECK(setup.est.penalty == 42.0);
  CHECK(setup.est.nm.max_evals == 1234);
  CHECK(setup.est.nm.diam_tol == 1e-6);
  REQUIRE(setup.est.start_lo.size() == 3);
  CHECK(setup.est.start_hi[1] == 4.0);

  const json back = dualmix::estimate_setup_to_json(setup);
  const auto again = dualmix::estimate_setup_from_json(back);
  CHECK(again.div.name() == "hellinger");
  CHECK(again.est.starts == 17);
  CHECK(again.est.start_lo == setup.est.start_lo);

  // Divergence defaults to the quadratic case when absent.
  json no_div = j;
  no_div.erase("divergence");
  CHECK(dualmix::estimate_setup_from_json(no_div).div.is_chi2());
}

TEST_CASE("experiment configs parse truth, sizes, and parameter names") {
  const json j = parse(R"({
    "scenario": "demo",
    "n": 500,
    "runs": 3,
    "seed": 99,
    "parametric": {"family": "weibull", "scale": 0.5},
    "unknown": {"family": "weibull", "scale": 1.0},
    "truth": {"lambda": 0.7, "theta1": [2.0], "theta0": [1.0]},
    "constraints": {"type": "weibull_moments", "orders": [1, 2, 3], "sigma0": 1.0}
  })");
  const auto cfg = dualmix::experiment_from_json(j);
  CHECK(cfg.scenario == "demo");
  CHECK(cfg.n == 500);
  CHECK(cfg.runs == 3);
  CHECK(cfg.seed == 99);
  CHECK(cfg.truth.lambda == 0.7);
  CHECK(cfg.truth.theta1 == dualmix::Vec{2.0});
  CHECK(cfg.truth.theta0 == dualmix::Vec{1.0});
  CHECK(cfg.div.is_chi2());
  CHECK(cfg.param_names == std::vector<std::string>{"lambda", "nu", "nu0"});

  const auto back = dualmix::experiment_from_json(dualmix::experiment_to_json(cfg));
  CHECK(back.scenario == cfg.scenario);
  CHECK(back.n == cfg.n);
  CHECK(back.seed == cfg.seed);
  CHECK(back.truth.lambda == cfg.truth.lambda);
  CHECK(back.param_names == cfg.param_names);
}

TEST_CASE("parameter names reflect family and constraint vocabulary") {
  CHECK(dualmix::default_param_names(
            Family::gaussian(0.5),
            ConstraintSet::two_sided_weibull_moments({2, 3, 4}, 1.5)) ==
        std::vector<std::string>{"lambda", "mu", "nu0"});
  CHECK(dualmix::default_param_names(
            Family::bivariate_gaussian_line(1.0, 0.0, 0.0, -1.0, 1.0, 1.0),
            ConstraintSet::bivariate_mean_cross(0.0)) ==
        std::vector<std::string>{"lambda", "mu", "theta_c"});
  CHECK(dualmix::default_param_names(Family::bivariate_gaussian_fixed(1.0, 0.0, 0.0, 0.0),
                                     ConstraintSet::bivariate_mean()) ==
        std::vector<std::string>{"lambda", "theta_c"});
}

TEST_CASE("scan configs parse the grid block") {
  const json j = parse(R"({
    "mode": "scan",
    "parametric": {"family": "weibull", "scale": 1.0},
    "unknown": {"family": "lognormal", "sdlog": 0.5},
    "truth": {"lambda": 0.35, "theta1": [2.0], "theta0": [0.0]},
    "constraints": {"type": "weibull_moments", "orders": [1, 2, 3], "sigma0": 1.0},
    "grid": {"lambda": [0.02, 0.98, 50], "theta": [0.6, 4.0, 50]},
    "support_points": 777
  })");
  const auto cfg = dualmix::scan_from_json(j);
  CHECK(cfg.lambda_lo == 0.02);
  CHECK(cfg.lambda_hi == 0.98);
  CHECK(cfg.lambda_steps == 50);
  CHECK(cfg.theta_steps == 50);
  CHECK(cfg.support_points == 777);
  const auto back = dualmix::scan_from_json(dualmix::scan_to_json(cfg));
  CHECK(back.lambda_steps == cfg.lambda_steps);
  CHECK(back.support_points == cfg.support_points);

  json bad_grid = j;
  bad_grid["grid"]["lambda"] = {0.02, 0.98};
  CHECK_THROWS_AS(dualmix::scan_from_json(bad_grid), std::invalid_argument);
}

TEST_CASE("config mode defaults to experiment") {
  CHECK(dualmix::config_mode(parse(R"({})")) == "experiment");
  CHECK(dualmix::config_mode(parse(R"({"mode": "scan"})")) == "scan");
  CHECK(dualmix::config_mode(parse(R"({"mode": "experiment"})")) == "experiment");
}

TEST_CASE("malformed configs fail with field-level messages") {
  CHECK_THROWS_WITH_AS(dualmix::family_from_json(parse(R"({"family": "cauchy"})")),
                       doctest::Contains("unknown family"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(dualmix::family_from_json(parse(R"({"family": "weibull"})")),
                       doctest::Contains("scale"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      dualmix::family_from_json(parse(R"({"family": "weibull", "scale": "x"})")),
      doctest::Contains("must be a number"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      dualmix::constraints_from_json(parse(R"({"type": "moments"})")),
      doctest::Contains("unknown constraint type"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      dualmix::constraints_from_json(
          parse(R"({"type": "weibull_moments", "orders": [1.5], "sigma0": 1.0})")),
      doctest::Contains("integers"), std::invalid_argument);

  json exp = parse(R"({
    "scenario": "demo",
    "n": 500,
    "parametric": {"family": "weibull", "scale": 0.5},
    "unknown": {"family": "weibull", "scale": 1.0},
    "truth": {"lambda": 0.7, "theta1": [2.0], "theta0": [1.0]},
    "constraints": {"type": "weibull_moments", "orders": [1, 2], "sigma0": 1.0}
  })");
  {
    json j = exp;
    j.erase("scenario");
    CHECK_THROWS_WITH_AS(dualmix::experiment_from_json(j),
                         doctest::Contains("scenario"), std::invalid_argument);
  }
  {
    json j = exp;
    j["n"] = 0;
    CHECK_THROWS_WITH_AS(dualmix::experiment_from_json(j), doctest::Contains("positive"),
                         std::invalid_argument);
  }
  {
    json j = exp;
    j["runs"] = 0;
    CHECK_THROWS_AS(dualmix::experiment_from_json(j), std::invalid_argument);
  }
  {
    json j = exp;
    j["truth"]["lambda"] = 1.2;
    CHECK_THROWS_AS(dualmix::experiment_from_json(j), std::invalid_argument);
  }
  {
    json j = exp;
    j["truth"]["theta1"] = {2.0, 3.0};
    CHECK_THROWS_WITH_AS(dualmix::experiment_from_json(j), doctest::Contains("theta1"),
                         std::invalid_argument);
  }
  {
    // Bivariate model with a divergence that needs per-point conjugates.
    json j = exp;
    j["parametric"] = {{"family", "bivariate_gaussian"},
                       {"sigma2", 1.0},
                       {"mean", {{"mode", "free"}}}};
    j["unknown"] = j["parametric"];
    j["truth"] = {{"lambda", 0.5}, {"theta1", {0.0, 0.0}}, {"theta0", {3.0, 3.0}}};
    j["constraints"] = {{"type", "bivariate_mean"}};
    j["divergence"] = "kl";
    CHECK_THROWS_WITH_AS(dualmix::experiment_from_json(j),
                         doctest::Contains("univariate"), std::invalid_argument);
  }
  {
    // Dimension mismatch between the model and the constraints.
    json j = exp;
    j["constraints"] = {{"type", "bivariate_mean"}};
    CHECK_THROWS_WITH_AS(dualmix::experiment_from_json(j),
                         doctest::Contains("dimension"), std::invalid_argument);
  }
}

TEST_CASE("json files load, save, and report io failures") {
  CHECK_THROWS_AS(dualmix::load_json_file("/nonexistent/config.json"), dualmix::IoError);
  const std::string path = "./tmp_config_roundtrip.json";
  const json j = {{"alpha", 1.5}, {"names", {"a", "b"}}};
  dualmix::write_json_file(j, path);
  CHECK(dualmix::load_json_file(path) == j);
  std::remove(path.c_str());

  const std::string broken = "./tmp_config_broken.json";
  {
    std::FILE* f = std::fopen(broken.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("{not json", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(dualmix::load_json_file(broken), std::invalid_argument);
  std::remove(broken.c_str());
  CHECK_THROWS_AS(dualmix::write_json_file(j, "/nonexistent/dir/out.json"),
                  dualmix::IoError);
}

TEST_CASE("every shipped scenario config parses") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir())) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    CAPTURE(entry.path().filename().string());
    const json j = dualmix::load_json_file(entry.path().string());
    if (dualmix::config_mode(j) == "scan") {
      CHECK_NOTHROW(dualmix::scan_from_json(j));
    } else {
      const auto cfg = dualmix::experiment_from_json(j);
      CHECK(cfg.runs >= 1);
      CHECK(!cfg.param_names.empty());
    }
  }
  CHECK(seen >= 9);
}

}  // TEST_SUITE
