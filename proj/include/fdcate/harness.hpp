#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fdcate/cate_model.hpp"
#include "fdcate/dgp.hpp"
#include "fdcate/learners.hpp"

namespace fdcate {

/// The four Monte Carlo panels:
///   a: RMSE vs n, clean nuisances;        b: RMSE vs n, rho = 1 nuisance noise;
///   c: RMSE vs rho at fixed n;            d: RMSE vs kappa at fixed n.
enum class Panel { sample_size_clean, sample_size_slow, noise_sweep, overlap_sweep };

std::string to_string(Panel panel);
Panel panel_from_string(const std::string& name);  // accepts a/b/c/d or the long names

struct GridPoint {
  std::size_t n = 0;
  double rho = 0.0;
  double kappa = 1.0;
};

struct ExperimentGrid {
  Panel panel = Panel::sample_size_clean;
  std::vector<std::size_t> n_values{1000, 2500, 5000, 10000, 20000, 50000};
  std::vector<double> rho_values{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> kappa_values{2, 4, 6, 8, 10};
  /// Sample size used by the panels that sweep rho or kappa.
  std::size_t fixed_n = 20000;
  int replications = 100;
  std::vector<EstimatorKind> estimators{EstimatorKind::plugin, EstimatorKind::dr, EstimatorKind::r};
  std::uint64_t base_seed = 20240601;
  std::size_t probe_size = 2000;
  /// Coefficients of the generator; directions, n, kappa, rho and seed are set per replication.
  DgpSpec dgp;
  LearnerConfig nuisance_config = LearnerConfig::boosted();
  double floor = 0.05;
  double final_penalty = 1e-6;

  /// Grid points implied by the panel.
  std::vector<GridPoint> points() const;
  void validate() const;
};

struct RmseRecord {
  std::size_t point = 0;
  GridPoint grid;
  EstimatorKind estimator = EstimatorKind::plugin;
  int replication = 0;
  double rmse = 0.0;
  bool ok = true;
  std::string error;
};

struct CellSummary {
  std::size_t point = 0;
  GridPoint grid;
  EstimatorKind estimator = EstimatorKind::plugin;
  int count = 0;
  int failures = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci_half_width = 0.0;  // 1.96 sd / sqrt(count)
};

struct ExperimentResult {
  ExperimentGrid grid;
  std::vector<RmseRecord> records;  // ordered by (point, replication, estimator)
  std::vector<CellSummary> summaries;
  int failures = 0;
};

/// Seed of replication `rep` at sample size n. It does not depend on rho,
/// kappa or the panel, so a rho = 0 point reproduces the clean panel.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t n, int rep);

/// Worker count from FDCATE_WORKERS, else the hardware concurrency (at least 1).
int default_workers();

/// Runs every replication of every grid point. Within a replication all
/// estimators share the sample and, where applicable, the cross-fitted
/// nuisances; failures are recorded, counted and excluded from summaries.
ExperimentResult run_grid(const ExperimentGrid& grid, int workers = default_workers());

/// Mean, sample SD and 1.96 SD / sqrt(count) of each (point, estimator) cell over successful records.
std::vector<CellSummary> summarize(const std::vector<RmseRecord>& records);

void write_records_csv(const ExperimentResult& result, const std::filesystem::path& path);
void write_summary_json(const ExperimentResult& result, const std::filesystem::path& path);

}  // namespace fdcate
