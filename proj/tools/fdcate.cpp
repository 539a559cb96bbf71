// Command-line front end: simulate Monte Carlo panels, estimate effects on a
// CSV panel, run the exact identity suites, or generate synthetic data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdcate/config_io.hpp"
#include "fdcate/dgp.hpp"
#include "fdcate/estimate.hpp"
#include "fdcate/harness.hpp"
#include "fdcate/verify.hpp"

namespace {

using namespace fdcate;

int run_simulate(const std::string& panel, const std::string& out, const std::string& summary,
                 const std::string& config, int reps, const std::vector<std::size_t>& n_values, long long seed,
                 int workers, const std::string& learner) {
  ExperimentGrid grid;
  if (!config.empty()) from_json(read_json_file(config), grid);
  if (!panel.empty()) grid.panel = panel_from_string(panel);
  if (reps > 0) grid.replications = reps;
  if (!n_values.empty()) {
    grid.n_values = n_values;
    if (n_values.size() == 1) grid.fixed_n = n_values.front();
  }
  if (seed >= 0) grid.base_seed = static_cast<std::uint64_t>(seed);
  if (!learner.empty()) grid.nuisance_config.kind = learner_kind_from_string(learner);
  grid.validate();

  const ExperimentResult result = run_grid(grid, workers > 0 ? workers : default_workers());
  write_records_csv(result, out);
  const std::string summary_path = summary.empty() ? out + ".summary.json" : summary;
  write_summary_json(result, summary_path);

  std::printf("%-10s %-8s %-6s %-6s %-10s %-10s %s\n", "n", "rho", "kappa", "est", "mean_rmse", "ci_half", "failures");
  for (const auto& s : result.summaries) {
    std::printf("%-10zu %-8.2f %-6.1f %-6s %-10.5f %-10.5f %d\n", s.grid.n, s.grid.rho, s.grid.kappa,
                to_string(s.estimator).c_str(), s.mean, s.ci_half_width, s.failures);
  }
  std::printf("records: %s\nsummary: %s\n", out.c_str(), summary_path.c_str());
  if (result.failures > 0) {
    std::fprintf(stderr, "%d replication(s) failed; see the status column\n", result.failures);
    return 1;
  }
  return 0;
}

int run_estimate(const std::string& input, const std::string& estimator, const std::string& x_col,
                 const std::string& z_col, const std::string& y_col, const std::vector<std::string>& c_cols,
                 const std::string& out, const std::string& learner, double floor, long long seed) {
  CsvSchema schema;
  schema.x_col = x_col;
  schema.z_col = z_col;
  schema.y_col = y_col;
  schema.c_cols = c_cols;
  EstimateOptions opts;
  opts.estimator = estimator_kind_from_string(estimator);
  opts.config.kind = learner_kind_from_string(learner);
  opts.floor = floor;
  opts.seed = static_cast<std::uint64_t>(seed);
  const EstimateOutput result = estimate_csv(input, schema, opts, out);
  std::printf("estimated %zu rows with %s; wrote %s.csv, %s_histogram.csv, %s_concentration.csv\n", result.tau.size(),
              estimator.c_str(), out.c_str(), out.c_str(), out.c_str());
  return 0;
}

int run_verify(const std::string& suite, long long seed) {
  VerifyOptions opts;
  if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
  const VerifyReport report = verify(suite, opts);
  for (const auto& c : report.checks) {
    std::printf("[%s] %-15s %-70s %.3e (%s)\n", c.passed ? "PASS" : "FAIL", c.suite.c_str(), c.name.c_str(), c.value,
                c.detail.c_str());
  }
  std::printf("%s\n", report.passed() ? "all checks passed" : "some checks FAILED");
  return report.passed() ? 0 : 1;
}

int run_generate(std::size_t n, std::size_t d, long long seed, double kappa, double theta_z, const std::string& out,
                 const std::string& u_out, const std::string& spec_out) {
  DgpSpec spec = DgpSpec::with_random_directions(d, n, static_cast<std::uint64_t>(seed));
  spec.kappa = kappa;
  spec.theta_z = theta_z;
  const DgpSample s = sample(spec);
  write_csv(s.table, out);
  if (!u_out.empty()) {
    std::ofstream f(u_out);
    f << "u\n";
    char buf[40];
    for (double u : s.u) {
      std::snprintf(buf, sizeof buf, "%.17g", u);
      f << buf << '\n';
    }
  }
  if (!spec_out.empty()) {
    std::ofstream f(spec_out);
    f << nlohmann::json(spec).dump(2) << '\n';
  }
  std::printf("wrote %zu rows with %zu covariates to %s\n", n, d, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous front-door effect estimation: plug-in, FD-DR and FD-R learners"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo panel and write RMSE records and summaries");
  std::string panel, out = "results.csv", summary, config, learner;
  int reps = 0, workers = 0;
  std::vector<std::size_t> n_values;
  long long seed = -1;
  sim->add_option("--panel", panel, "a (RMSE vs n), b (vs n with rho=1 noise), c (vs rho), d (vs kappa)");
  sim->add_option("--out", out, "Per-replication records CSV");
  sim->add_option("--summary", summary, "Aggregate JSON (default: <out>.summary.json)");
  sim->add_option("--config", config, "Grid JSON file");
  sim->add_option("--reps", reps, "Replications per grid point");
  sim->add_option("--n", n_values, "Sample sizes (panels a/b) or the fixed n (panels c/d)");
  sim->add_option("--seed", seed, "Base seed");
  sim->add_option("--workers", workers, "Worker threads (default: FDCATE_WORKERS or all cores)");
  sim->add_option("--learner", learner, "Nuisance learner: ridge, logistic or gbt");

  auto* est = app.add_subcommand("estimate", "Estimate tau(C) for every row of a CSV panel");
  std::string input, estimator = "dr", x_col = "x", z_col = "z", y_col = "y", est_out = "estimates",
                     est_learner = "gbt";
  std::vector<std::string> c_cols;
  double floor = 0.05;
  long long est_seed = 0;
  est->add_option("--input", input, "Input CSV with a header row")->required();
  est->add_option("--estimator", estimator, "pi, dr or r")->check(CLI::IsMember({"pi", "dr", "r"}));
  est->add_option("--x-col", x_col, "Treatment column");
  est->add_option("--z-col", z_col, "Mediator column");
  est->add_option("--y-col", y_col, "Outcome column");
  est->add_option("--c-cols", c_cols, "Covariate columns")->delimiter(',')->required();
  est->add_option("--out", est_out, "Output prefix");
  est->add_option("--learner", est_learner, "Nuisance learner: ridge, logistic or gbt");
  est->add_option("--floor", floor, "Denominator floor");
  est->add_option("--seed", est_seed, "Fold and learner seed");

  auto* ver = app.add_subcommand("verify", "Run the exact-enumeration identity suites");
  std::string suite = "all";
  long long ver_seed = -1;
  ver->add_option("--suite", suite, "all, fdpo, pseudo-g, ple or expressiveness")
      ->check(CLI::IsMember({"all", "fdpo", "pseudo-g", "ple", "expressiveness"}));
  ver->add_option("--seed", ver_seed, "Instance seed");

  auto* gen = app.add_subcommand("generate", "Write a synthetic sample to CSV");
  std::size_t gen_n = 1000, gen_d = 10;
  long long gen_seed = 1;
  double kappa = 1.0, theta_z = 1.4;
  std::string gen_out = "data.csv", u_out, spec_out;
  gen->add_option("--n", gen_n, "Rows");
  gen->add_option("--d", gen_d, "Covariates");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--kappa", kappa, "Overlap knob (>= 1)");
  gen->add_option("--theta-z", theta_z, "Mediator effect on the outcome");
  gen->add_option("--out", gen_out, "Output CSV");
  gen->add_option("--u-out", u_out, "Optional CSV for the hidden confounder (diagnostics only)");
  gen->add_option("--spec-out", spec_out, "Optional JSON dump of the generator parameters");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return run_simulate(panel, out, summary, config, reps, n_values, seed, workers, learner);
    if (*est) return run_estimate(input, estimator, x_col, z_col, y_col, c_cols, est_out, est_learner, floor, est_seed);
    if (*ver) return run_verify(suite, ver_seed);
    if (*gen) return run_generate(gen_n, gen_d, gen_seed, kappa, theta_z, gen_out, u_out, spec_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
