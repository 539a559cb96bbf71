#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fdcate/sample_table.hpp"

namespace fdcate {

/// Raised when a learner cannot produce a fit (singular system, non-convergence).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LearnerKind { ridge, logistic, gbt };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

/// Boosted-tree hyperparameters. Defaults follow the synthetic-study setup
/// (50 trees, depth 3, rate 0.1, 0.9 row and column subsampling, l2 = 1).
struct GbtParams {
  int trees = 50;
  int max_depth = 3;
  double learning_rate = 0.1;
  double subsample = 0.9;
  double colsample = 0.9;
  double l2 = 1.0;
  double min_child_weight = 1.0;
  int max_bins = 256;
};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::ridge;
  double ridge_penalty = 1e-6;
  GbtParams gbt;
  int max_iters = 100;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;

  static LearnerConfig ridge(double penalty = 1e-6);
  static LearnerConfig logistic(double penalty = 0.0);
  static LearnerConfig boosted(GbtParams params = {});

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  // ridge and logistic form one linear family: regression targets use ridge,
  // binary targets use logistic. gbt serves both.
  LearnerConfig for_regression() const;
  LearnerConfig for_classification() const;
  LearnerConfig with_seed(std::uint64_t s) const;
};

/// Linear predictor with an unpenalized intercept. With `logistic` the output
/// is passed through the logistic function.
struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  bool logistic = false;

  double raw(std::span<const double> features) const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when value <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct GbtEnsemble {
  double base_score = 0.0;
  bool logistic = false;
  std::vector<std::vector<TreeNode>> trees;

  double raw(std::span<const double> features) const;
};

struct ConstantModel {
  double value = 0.0;
};

struct FitInfo {
  LearnerConfig config;
  std::size_t feature_dim = 0;
  bool classifier = false;
  /// Single-class classifier input; the fit is a clamped constant.
  bool degenerate = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  /// Objective value after each accepted iterate (logistic only), starting at the initial point.
  std::vector<double> objective_trace;
};

/// Immutable fitted predictor; classifiers return Pr(label = 1).
class FittedLearner {
 public:
  using Model = std::variant<LinearModel, GbtEnsemble, ConstantModel>;

  FittedLearner(Model model, FitInfo info);

  double predict(std::span<const double> features) const;
  std::vector<double> predict_rows(const RowMatrix& features) const;

  const FitInfo& info() const { return info_; }
  const Model& model() const { return model_; }

 private:
  Model model_;
  FitInfo info_;
};

/// Least-squares fit. Ridge: exact minimizer of sum_i w_i (y_i - b0 - b.x_i)^2 + penalty * |b|^2.
FittedLearner fit_regressor(const RowMatrix& features, std::span<const double> targets,
                            std::optional<std::span<const double>> weights, const LearnerConfig& config);

/// Probability model for binary labels. Single-class input yields a constant
/// clamped to [1e-6, 1 - 1e-6] with info().degenerate set.
FittedLearner fit_classifier(const RowMatrix& features, std::span<const int> labels, const LearnerConfig& config);

/// Boosted-tree fit on squared error (logistic = false) or logistic deviance.
GbtEnsemble fit_gbt(const RowMatrix& features, std::span<const double> targets,
                    std::optional<std::span<const double>> weights, const GbtParams& params, bool logistic,
                    std::uint64_t seed);

}  // namespace fdcate
