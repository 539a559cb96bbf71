#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdcate/learners.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

/// Feature map for linear-in-basis final stages. An intercept is always added
/// by the ridge solver and is not part of the basis.
enum class BasisKind {
  linear,           // input c -> c
  arm_interaction,  // input (x, c) -> (x, c, x*c)
};

std::size_t basis_size(BasisKind kind, std::size_t input_dim);
void expand_basis(BasisKind kind, std::span<const double> input, std::vector<double>& out);
RowMatrix basis_matrix(BasisKind kind, const RowMatrix& inputs);

/// intercept + coefficients . basis(input).
struct LinearCate {
  BasisKind basis = BasisKind::linear;
  double intercept = 0.0;
  std::vector<double> coefficients;

  double operator()(std::span<const double> input) const;

  /// Pointwise average of models sharing one basis (exact: the map is linear
  /// in the parameters).
  static LinearCate average(std::span<const LinearCate> models);
};

/// Fits a ridge final stage on the expanded basis.
LinearCate fit_linear_cate(BasisKind basis, const RowMatrix& inputs, std::span<const double> targets,
                           std::optional<std::span<const double>> weights, double penalty);

enum class EstimatorKind { plugin, dr, r, bdr_component };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

/// Where a fitted CATE came from.
struct Provenance {
  LearnerConfig nuisance_config;
  double final_penalty = 1e-6;
  double floor = 0.05;
  int folds = 0;
  std::uint64_t fold_seed = 0;
  bool cross_fit_averaged = true;
};

/// Fitted map c -> tau_hat(c) with an estimator tag and provenance.
class CateModel {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  CateModel(EstimatorKind kind, Evaluator evaluate, Provenance provenance = {});

  double operator()(std::span<const double> c) const { return evaluate_(c); }
  std::vector<double> predict_rows(const RowMatrix& c) const;

  EstimatorKind kind() const { return kind_; }
  const Provenance& provenance() const { return provenance_; }

 private:
  EstimatorKind kind_;
  Evaluator evaluate_;
  Provenance provenance_;
};

}  // namespace fdcate
