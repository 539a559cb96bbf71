#include "fdcate/config_io.hpp"

#include <fstream>
#include <stdexcept>

namespace fdcate {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void to_json(nlohmann::json& j, const GbtParams& p) {
  j = {{"trees", p.trees},     {"max_depth", p.max_depth}, {"learning_rate", p.learning_rate},
       {"subsample", p.subsample}, {"colsample", p.colsample}, {"l2", p.l2},
       {"min_child_weight", p.min_child_weight}, {"max_bins", p.max_bins}};
}

void from_json(const nlohmann::json& j, GbtParams& p) {
  read_if(j, "trees", p.trees);
  read_if(j, "max_depth", p.max_depth);
  read_if(j, "learning_rate", p.learning_rate);
  read_if(j, "subsample", p.subsample);
  read_if(j, "colsample", p.colsample);
  read_if(j, "l2", p.l2);
  read_if(j, "min_child_weight", p.min_child_weight);
  read_if(j, "max_bins", p.max_bins);
}

void to_json(nlohmann::json& j, const LearnerConfig& c) {
  j = {{"kind", to_string(c.kind)}, {"ridge_penalty", c.ridge_penalty}, {"gbt", c.gbt},
       {"max_iters", c.max_iters},  {"tolerance", c.tolerance},         {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, LearnerConfig& c) {
  if (j.contains("kind")) c.kind = learner_kind_from_string(j.at("kind").get<std::string>());
  read_if(j, "ridge_penalty", c.ridge_penalty);
  read_if(j, "gbt", c.gbt);
  read_if(j, "max_iters", c.max_iters);
  read_if(j, "tolerance", c.tolerance);
  read_if(j, "seed", c.seed);
  c.validate();
}

void to_json(nlohmann::json& j, const DgpSpec& s) {
  j = {{"d", s.d},
       {"n", s.n},
       {"beta0", s.beta0},
       {"beta_u", s.beta_u},
       {"alpha0", s.alpha0},
       {"alpha_x", s.alpha_x},
       {"theta0", s.theta0},
       {"theta_z", s.theta_z},
       {"theta_u", s.theta_u},
       {"scale", s.scale},
       {"w_x", s.w_x},
       {"w_z", s.w_z},
       {"w_y", s.w_y},
       {"kappa", s.kappa},
       {"rho", s.rho},
       {"noise_variance_reading", s.noise_variance_reading},
       {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, DgpSpec& s) {
  read_if(j, "d", s.d);
  read_if(j, "n", s.n);
  read_if(j, "beta0", s.beta0);
  read_if(j, "beta_u", s.beta_u);
  read_if(j, "alpha0", s.alpha0);
  read_if(j, "alpha_x", s.alpha_x);
  read_if(j, "theta0", s.theta0);
  read_if(j, "theta_z", s.theta_z);
  read_if(j, "theta_u", s.theta_u);
  read_if(j, "scale", s.scale);
  read_if(j, "w_x", s.w_x);
  read_if(j, "w_z", s.w_z);
  read_if(j, "w_y", s.w_y);
  read_if(j, "kappa", s.kappa);
  read_if(j, "rho", s.rho);
  read_if(j, "noise_variance_reading", s.noise_variance_reading);
  read_if(j, "seed", s.seed);
}

void to_json(nlohmann::json& j, const ExperimentGrid& g) {
  std::vector<std::string> est;
  for (EstimatorKind k : g.estimators) est.push_back(to_string(k));
  nlohmann::json dgp = g.dgp;
  for (const char* key : {"w_x", "w_z", "w_y", "n", "kappa", "rho", "seed"}) dgp.erase(key);
  j = {{"panel", to_string(g.panel)},
       {"n_values", g.n_values},
       {"rho_values", g.rho_values},
       {"kappa_values", g.kappa_values},
       {"fixed_n", g.fixed_n},
       {"replications", g.replications},
       {"estimators", est},
       {"base_seed", g.base_seed},
       {"probe_size", g.probe_size},
       {"dgp", dgp},
       {"nuisance_config", g.nuisance_config},
       {"floor", g.floor},
       {"final_penalty", g.final_penalty}};
}

void from_json(const nlohmann::json& j, ExperimentGrid& g) {
  if (j.contains("panel")) g.panel = panel_from_string(j.at("panel").get<std::string>());
  read_if(j, "n_values", g.n_values);
  read_if(j, "rho_values", g.rho_values);
  read_if(j, "kappa_values", g.kappa_values);
  read_if(j, "fixed_n", g.fixed_n);
  read_if(j, "replications", g.replications);
  if (j.contains("estimators")) {
    g.estimators.clear();
    for (const auto& name : j.at("estimators")) g.estimators.push_back(estimator_kind_from_string(name.get<std::string>()));
  }
  read_if(j, "base_seed", g.base_seed);
  read_if(j, "probe_size", g.probe_size);
  if (j.contains("dgp")) from_json(j.at("dgp"), g.dgp);
  read_if(j, "nuisance_config", g.nuisance_config);
  read_if(j, "floor", g.floor);
  read_if(j, "final_penalty", g.final_penalty);
  g.validate();
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace fdcate
