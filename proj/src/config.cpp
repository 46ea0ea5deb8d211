#include "dualmix/config.hpp"

#include <fstream>

#include "dualmix/errors.hpp"

namespace dualmix {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

const json& need(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("config is missing required key '") + key + "'");
  return *it;
}

double num(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number()) bad(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) bad(std::string("config key '") + key + "' must be a number");
  return it->get<double>();
}

Vec vec(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_array()) bad(std::string("config key '") + key + "' must be an array");
  Vec out;
  for (const auto& e : v) {
    if (!e.is_number()) bad(std::string("config key '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    bad("config file " + path + " is not valid JSON: " + e.what());
  }
  return j;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

Family family_from_json(const json& j) {
  const std::string kind = need(j, "family").get<std::string>();
  if (kind == "gaussian") return Family::gaussian(num(j, "sigma"));
  if (kind == "weibull") return Family::weibull(num(j, "scale"));
  if (kind == "two_sided_weibull") return Family::two_sided_weibull(num(j, "scale"));
  if (kind == "lognormal") return Family::lognormal(num(j, "sdlog"));
  if (kind == "bivariate_gaussian") {
    const double sigma2 = num(j, "sigma2");
    const double rho = num_or(j, "rho", 0.0);
    const json& mean = need(j, "mean");
    const std::string mode = need(mean, "mode").get<std::string>();
    if (mode == "fixed") {
      return Family::bivariate_gaussian_fixed(sigma2, rho, num(mean, "x"),
                                              num(mean, "y"));
    }
    if (mode == "line") {
      return Family::bivariate_gaussian_line(sigma2, rho, num(mean, "base_x"),
                                             num(mean, "base_y"), num(mean, "dir_x"),
                                             num(mean, "dir_y"));
    }
    if (mode == "free") return Family::bivariate_gaussian_free(sigma2, rho);
    bad("unknown bivariate mean mode '" + mode + "'");
  }
  bad("unknown family '" + kind + "'");
}

json family_to_json(const Family& fam) {
  const Family::Spec& s = fam.spec();
  json j;
  j["family"] = fam.name();
  switch (s.kind) {
    case FamilyKind::gaussian:
      j["sigma"] = s.sigma;
      break;
    case FamilyKind::weibull:
    case FamilyKind::two_sided_weibull:
      j["scale"] = s.scale;
      break;
    case FamilyKind::lognormal:
      j["sdlog"] = s.sdlog;
      break;
    case FamilyKind::bivariate_gaussian: {
      j["sigma2"] = s.sigma2;
      j["rho"] = s.rho;
      json mean;
      switch (s.mean_mode) {
        case MeanMode::fixed:
          mean["mode"] = "fixed";
          mean["x"] = s.mean_x;
          mean["y"] = s.mean_y;
          break;
        case MeanMode::line:
          mean["mode"] = "line";
          mean["base_x"] = s.mean_x;
          mean["base_y"] = s.mean_y;
          mean["dir_x"] = s.dir_x;
          mean["dir_y"] = s.dir_y;
          break;
        case MeanMode::free2:
          mean["mode"] = "free";
          break;
      }
      j["mean"] = mean;
      break;
    }
  }
  return j;
}

namespace {

std::vector<int> int_list(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_array()) bad(std::string("config key '") + key + "' must be an array");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) {
      bad(std::string("config key '") + key + "' must hold integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

MomentTerm term_from_json(const json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "constant") return MomentTerm::constant(num(j, "coeff"));
  if (kind == "power") {
    return MomentTerm::power(num(j, "coeff"), static_cast<int>(num_or(j, "index", 0)),
                             num(j, "exponent"));
  }
  if (kind == "gamma_affine") {
    return MomentTerm::gamma_affine(
        num(j, "coeff"), static_cast<int>(num_or(j, "index", 0)), num(j, "shift"),
        num(j, "slope"), need(j, "reciprocal").get<bool>());
  }
  bad("unknown moment term kind '" + kind + "'");
}

json term_to_json(const MomentTerm& t) {
  json j;
  switch (t.kind) {
    case MomentTerm::Kind::constant:
      j["kind"] = "constant";
      j["coeff"] = t.coeff;
      break;
    case MomentTerm::Kind::power:
      j["kind"] = "power";
      j["coeff"] = t.coeff;
      j["index"] = t.index;
      j["exponent"] = t.exponent;
      break;
    case MomentTerm::Kind::gamma_affine:
      j["kind"] = "gamma_affine";
      j["coeff"] = t.coeff;
      j["index"] = t.index;
      j["shift"] = t.shift;
      j["slope"] = t.slope;
      j["reciprocal"] = t.reciprocal;
      break;
  }
  return j;
}

std::vector<std::array<int, 2>> exps_from_json(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_array()) bad("exponents must be an array of [a, b] pairs");
  std::vector<std::array<int, 2>> out;
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2) bad("each exponent must be an [a, b] pair");
    out.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return out;
}

}  // namespace

ConstraintSet constraints_from_json(const json& j) {
  const std::string type = need(j, "type").get<std::string>();
  if (type == "weibull_moments") {
    return ConstraintSet::weibull_moments(int_list(j, "orders"), num(j, "sigma0"));
  }
  if (type == "two_sided_weibull_moments") {
    return ConstraintSet::two_sided_weibull_moments(int_list(j, "orders"),
                                                    num(j, "sigma0"));
  }
  if (type == "bivariate_mean") return ConstraintSet::bivariate_mean();
  if (type == "bivariate_mean_cross") {
    return ConstraintSet::bivariate_mean_cross(num(j, "rho0"));
  }
  if (type == "fixed_targets") {
    return ConstraintSet::fixed_targets(exps_from_json(j, "exponents"),
                                        vec(j, "targets"),
                                        static_cast<int>(num_or(j, "point_dim", 1)));
  }
  if (type == "custom") {
    const json& mj = need(j, "m");
    if (!mj.is_array()) bad("custom constraint key 'm' must be an array of term lists");
    std::vector<std::vector<MomentTerm>> terms;
    for (const auto& comp : mj) {
      std::vector<MomentTerm> list;
      for (const auto& t : comp) list.push_back(term_from_json(t));
      terms.push_back(std::move(list));
    }
    return ConstraintSet::custom(exps_from_json(j, "exponents"), terms,
                                 static_cast<int>(num_or(j, "point_dim", 1)),
                                 static_cast<int>(num(j, "alpha_dim")),
                                 vec(j, "alpha_lo"), vec(j, "alpha_hi"));
  }
  bad("unknown constraint type '" + type + "'");
}

json constraints_to_json(const ConstraintSet& cs) {
  json j;
  j["type"] = cs.tag();
  if (cs.tag() == "weibull_moments" || cs.tag() == "two_sided_weibull_moments") {
    j["orders"] = cs.orders();
    j["sigma0"] = cs.sigma0();
  } else if (cs.tag() == "bivariate_mean_cross") {
    j["rho0"] = cs.rho0();
  } else if (cs.tag() == "fixed_targets") {
    j["exponents"] = cs.exponents();
    j["targets"] = cs.targets();
    j["point_dim"] = cs.point_dim();
  } else if (cs.tag() == "custom") {
    j["exponents"] = cs.exponents();
    j["point_dim"] = cs.point_dim();
    j["alpha_dim"] = cs.alpha_dim();
    Vec lo, hi;
    cs.alpha_bounds(lo, hi);
    j["alpha_lo"] = lo;
    j["alpha_hi"] = hi;
    json m = json::array();
    for (const auto& comp : cs.terms()) {
      json list = json::array();
      for (const auto& t : comp) list.push_back(term_to_json(t));
      m.push_back(list);
    }
    j["m"] = m;
  }
  return j;
}

namespace {

EstimateOptions options_from_json(const json& j) {
  EstimateOptions est;
  est.starts = static_cast<int>(num_or(j, "starts", 10));
  est.max_start_draws = static_cast<int>(num_or(j, "max_start_draws", 1000));
  est.seed = static_cast<std::uint64_t>(num_or(j, "seed", 0));
  est.penalty = num_or(j, "penalty", 100.0);
  est.nm.max_evals = static_cast<int>(num_or(j, "max_evals", 2000));
  est.nm.diam_tol = num_or(j, "diam_tol", 1e-8);
  if (j.contains("start_box")) {
    const json& b = j.at("start_box");
    est.start_lo = vec(b, "lo");
    est.start_hi = vec(b, "hi");
  }
  return est;
}

json options_to_json(const EstimateOptions& est) {
  json j;
  j["starts"] = est.starts;
  j["max_start_draws"] = est.max_start_draws;
  j["penalty"] = est.penalty;
  j["max_evals"] = est.nm.max_evals;
  j["diam_tol"] = est.nm.diam_tol;
  if (!est.start_lo.empty()) {
    j["start_box"] = {{"lo", est.start_lo}, {"hi", est.start_hi}};
  }
  return j;
}

MixtureTruth truth_from_json(const json& j) {
  const json& t = need(j, "truth");
  Family f1 = family_from_json(need(j, "parametric"));
  Family f0 = family_from_json(need(j, "unknown"));
  MixtureTruth truth{num(t, "lambda"), f1, vec(t, "theta1"), f0, vec(t, "theta0")};
  if (!(truth.lambda >= 0.0 && truth.lambda <= 1.0)) {
    bad("truth.lambda must lie in [0, 1]");
  }
  if (static_cast<int>(truth.theta1.size()) != f1.theta_dim()) {
    bad("truth.theta1 size does not match the parametric family");
  }
  if (static_cast<int>(truth.theta0.size()) != f0.theta_dim()) {
    bad("truth.theta0 size does not match the unknown-component family");
  }
  return truth;
}

}  // namespace

std::vector<std::string> default_param_names(const Family& fam,
                                             const ConstraintSet& cs) {
  std::vector<std::string> names{"lambda"};
  switch (fam.kind()) {
    case FamilyKind::gaussian:
      names.push_back("mu");
      break;
    case FamilyKind::weibull:
    case FamilyKind::two_sided_weibull:
      names.push_back("nu");
      break;
    case FamilyKind::lognormal:
      names.push_back("mulog");
      break;
    case FamilyKind::bivariate_gaussian:
      if (fam.theta_dim() == 1) names.push_back("mu");
      if (fam.theta_dim() == 2) {
        names.push_back("mu_x");
        names.push_back("mu_y");
      }
      break;
  }
  for (int k = 0; k < cs.alpha_dim(); ++k) {
    if (cs.tag() == "weibull_moments" || cs.tag() == "two_sided_weibull_moments") {
      names.push_back("nu0");
    } else if (cs.tag() == "bivariate_mean" || cs.tag() == "bivariate_mean_cross") {
      names.push_back("theta_c");
    } else {
      names.push_back("alpha" + std::to_string(k + 1));
    }
  }
  return names;
}

EstimateSetup estimate_setup_from_json(const json& j) {
  Family fam = family_from_json(need(j, "parametric"));
  ConstraintSet cs = constraints_from_json(need(j, "constraints"));
  Divergence div = Divergence::from_name(
      j.contains("divergence") ? j.at("divergence").get<std::string>() : "chi2");
  EstimateOptions est = options_from_json(j);
  if (fam.dim() != cs.point_dim()) {
    bad("parametric family dimension does not match the constraint set");
  }
  if (!div.is_chi2() && fam.dim() != 1) {
    bad("divergence " + div.name() + " supports univariate families only");
  }
  return EstimateSetup{std::move(fam), std::move(cs), div, est};
}

json estimate_setup_to_json(const EstimateSetup& setup) {
  json j;
  j["parametric"] = family_to_json(setup.fam);
  j["constraints"] = constraints_to_json(setup.cs);
  j["divergence"] = setup.div.name();
  j.update(options_to_json(setup.est));
  return j;
}

ExperimentConfig experiment_from_json(const json& j) {
  EstimateSetup setup = estimate_setup_from_json(j);
  // The truth's parametric component and the fitted model are parsed from
  // the same "parametric" block, so they agree by construction.
  MixtureTruth truth = truth_from_json(j);
  ExperimentConfig cfg{need(j, "scenario").get<std::string>(),
                       std::move(truth),
                       std::move(setup.cs),
                       setup.div,
                       static_cast<std::size_t>(num(j, "n")),
                       static_cast<int>(num_or(j, "runs", 1)),
                       static_cast<std::uint64_t>(num_or(j, "seed", 0)),
                       setup.est,
                       {}};
  if (cfg.n == 0) bad("config key 'n' must be positive");
  if (cfg.runs < 1) bad("config key 'runs' must be at least 1");
  cfg.param_names = default_param_names(cfg.truth.f1, cfg.cs);
  return cfg;
}

json experiment_to_json(const ExperimentConfig& config) {
  json j;
  j["scenario"] = config.scenario;
  j["mode"] = "experiment";
  j["divergence"] = config.div.name();
  j["n"] = config.n;
  j["runs"] = config.runs;
  j["seed"] = config.seed;
  j["parametric"] = family_to_json(config.truth.f1);
  j["unknown"] = family_to_json(config.truth.f0);
  j["truth"] = {{"lambda", config.truth.lambda},
                {"theta1", config.truth.theta1},
                {"theta0", config.truth.theta0}};
  j["constraints"] = constraints_to_json(config.cs);
  j.update(options_to_json(config.est));
  return j;
}

ScanConfig scan_from_json(const json& j) {
  MixtureTruth truth = truth_from_json(j);
  ConstraintSet cs = constraints_from_json(need(j, "constraints"));
  ScanConfig cfg{std::move(truth), std::move(cs)};
  const json& grid = need(j, "grid");
  const Vec lg = vec(grid, "lambda");
  const Vec tg = vec(grid, "theta");
  if (lg.size() != 3 || tg.size() != 3) {
    bad("grid axes must be [lo, hi, steps] triples");
  }
  cfg.lambda_lo = lg[0];
  cfg.lambda_hi = lg[1];
  cfg.lambda_steps = static_cast<int>(lg[2]);
  cfg.theta_lo = tg[0];
  cfg.theta_hi = tg[1];
  cfg.theta_steps = static_cast<int>(tg[2]);
  cfg.support_points = static_cast<int>(num_or(j, "support_points", 2000));
  return cfg;
}

json scan_to_json(const ScanConfig& config) {
  json j;
  j["mode"] = "scan";
  j["parametric"] = family_to_json(config.truth.f1);
  j["unknown"] = family_to_json(config.truth.f0);
  j["truth"] = {{"lambda", config.truth.lambda},
                {"theta1", config.truth.theta1},
                {"theta0", config.truth.theta0}};
  j["constraints"] = constraints_to_json(config.cs);
  j["grid"] = {{"lambda", {config.lambda_lo, config.lambda_hi,
                           static_cast<double>(config.lambda_steps)}},
               {"theta", {config.theta_lo, config.theta_hi,
                          static_cast<double>(config.theta_steps)}}};
  j["support_points"] = config.support_points;
  return j;
}

std::string config_mode(const json& j) {
  if (!j.contains("mode")) return "experiment";
  return j.at("mode").get<std::string>();
}

}  // namespace dualmix
