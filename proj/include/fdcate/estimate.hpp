#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fdcate/cate_model.hpp"
#include "fdcate/learners.hpp"
#include "fdcate/nuisance.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

struct EstimateOptions {
  EstimatorKind estimator = EstimatorKind::dr;
  LearnerConfig config = LearnerConfig::boosted();
  double floor = kDefaultFloor;
  double penalty = 1e-6;
  std::uint64_t seed = 0;
  int histogram_bins = 20;
  std::vector<double> alphas{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5,
                             0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0};
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct ConcentrationPoint {
  double alpha = 0.0;
  std::size_t top_k = 0;
  double mean = 0.0;
};

struct EstimateOutput {
  std::vector<double> tau;
  std::vector<HistogramBin> histogram;
  std::vector<ConcentrationPoint> concentration;
};

/// Equal-width bins over [min, max]; one bin when all values coincide.
std::vector<HistogramBin> histogram(std::span<const double> values, int bins);

/// Mean of the k = max(1, ceil(alpha n)) largest values, for each alpha in (0, 1].
std::vector<ConcentrationPoint> concentration_curve(std::span<const double> values, std::span<const double> alphas);

/// Fits the selected estimator on the table and returns tau_hat for every row.
CateModel fit_estimator(const SampleTable& data, const EstimateOptions& options);
EstimateOutput estimate_table(const SampleTable& data, const EstimateOptions& options);

/// Loads the CSV, estimates, and writes `<prefix>.csv` (row_id, tau_hat),
/// `<prefix>_histogram.csv` and `<prefix>_concentration.csv`.
EstimateOutput estimate_csv(const std::filesystem::path& input, const CsvSchema& schema,
                            const EstimateOptions& options, const std::filesystem::path& output_prefix);

void write_estimate_outputs(const EstimateOutput& out, const std::filesystem::path& output_prefix);

}  // namespace fdcate
