#pragma once

#include <optional>
#include <vector>

#include "fdcate/cate_model.hpp"
#include "fdcate/nuisance.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

/// Inputs of the residual-on-residual loss
///   sum_i ((Y_i - m_i) - (T_i - e_i) tau(W_i))^2 + penalty * |beta|^2,
/// with residualizers m_i, e_i already evaluated on the minimization rows.
struct RProblem {
  std::vector<double> outcome;
  std::vector<double> treatment;
  RowMatrix inputs;  // arguments W of tau, before basis expansion
  std::vector<double> outcome_fit;
  std::vector<double> treatment_fit;
  double penalty = 1e-6;

  std::size_t rows() const { return outcome.size(); }
  void validate() const;
};

/// Weighted-ridge form of the loss: target (Y - m)/(T - e) with weight (T - e)^2.
/// Rows with T - e = 0 get target 0 and weight 0.
struct WeightedTargets {
  std::vector<double> targets;
  std::vector<double> weights;
};
WeightedTargets r_loss_weights(const RProblem& problem);

/// Closed-form minimizer over linear-in-basis tau (intercept unpenalized).
/// Throws FitError when every weight is zero.
LinearCate bdr_fit(const RProblem& problem, BasisKind basis);

/// b(C): outcome Z, treatment X, inputs C, residualizers (m_Z, e_X).
RProblem b_problem(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty);
/// g(X,C): outcome Y, treatment Z, inputs (X, C), residualizers (m_Y, e_Z).
RProblem g_problem(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty);

LinearCate bdr_fit_b(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty = 1e-6);
LinearCate bdr_fit_g(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty = 1e-6);

enum class BdrTarget { b, g };

struct BdrCrossFitOptions {
  bool swap = true;
  double penalty = 1e-6;
  std::optional<NoiseSpec> noise;
};

/// Two-fold BD-R fit of b or g: nuisances on one fold, minimization on the
/// other, and (by default) the same with roles swapped, averaged.
LinearCate bdr_cross_fit(const SampleTable& data, BdrTarget target, const LearnerConfig& config, std::uint64_t seed,
                         const BdrCrossFitOptions& options = {});

}  // namespace fdcate
