#include "fdcate/cate_model.hpp"

#include <stdexcept>

namespace fdcate {

std::size_t basis_size(BasisKind kind, std::size_t input_dim) {
  switch (kind) {
    case BasisKind::linear:
      return input_dim;
    case BasisKind::arm_interaction:
      if (input_dim < 1) throw std::invalid_argument("arm basis needs the treatment column");
      return 1 + 2 * (input_dim - 1);
  }
  return 0;
}

void expand_basis(BasisKind kind, std::span<const double> input, std::vector<double>& out) {
  out.clear();
  if (kind == BasisKind::linear) {
    out.assign(input.begin(), input.end());
    return;
  }
  const double x = input[0];
  const auto c = input.subspan(1);
  out.reserve(1 + 2 * c.size());
  out.push_back(x);
  out.insert(out.end(), c.begin(), c.end());
  for (double v : c) out.push_back(x * v);
}

RowMatrix basis_matrix(BasisKind kind, const RowMatrix& inputs) {
  const std::size_t d = static_cast<std::size_t>(inputs.cols());
  RowMatrix out(inputs.rows(), static_cast<Eigen::Index>(basis_size(kind, d)));
  std::vector<double> buf;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    expand_basis(kind, {inputs.data() + i * inputs.cols(), d}, buf);
    for (std::size_t j = 0; j < buf.size(); ++j) out(i, static_cast<Eigen::Index>(j)) = buf[j];
  }
  return out;
}

double LinearCate::operator()(std::span<const double> input) const {
  double s = intercept;
  if (basis == BasisKind::linear) {
    for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * input[j];
    return s;
  }
  const double x = input[0];
  const std::size_t d = input.size() - 1;
  s += coefficients[0] * x;
  for (std::size_t j = 0; j < d; ++j) s += (coefficients[1 + j] + coefficients[1 + d + j] * x) * input[1 + j];
  return s;
}

LinearCate LinearCate::average(std::span<const LinearCate> models) {
  if (models.empty()) throw std::invalid_argument("nothing to average");
  LinearCate out = models[0];
  for (std::size_t k = 1; k < models.size(); ++k) {
    if (models[k].basis != out.basis || models[k].coefficients.size() != out.coefficients.size()) {
      throw std::invalid_argument("cannot average models with different bases");
    }
    out.intercept += models[k].intercept;
    for (std::size_t j = 0; j < out.coefficients.size(); ++j) out.coefficients[j] += models[k].coefficients[j];
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  out.intercept *= inv;
  for (double& v : out.coefficients) v *= inv;
  return out;
}

LinearCate fit_linear_cate(BasisKind basis, const RowMatrix& inputs, std::span<const double> targets,
                           std::optional<std::span<const double>> weights, double penalty) {
  const FittedLearner fit = fit_regressor(basis_matrix(basis, inputs), targets, weights, LearnerConfig::ridge(penalty));
  const auto& lin = std::get<LinearModel>(fit.model());
  return LinearCate{basis, lin.intercept, lin.coefficients};
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::plugin:
      return "pi";
    case EstimatorKind::dr:
      return "dr";
    case EstimatorKind::r:
      return "r";
    case EstimatorKind::bdr_component:
      return "bdr";
  }
  return "?";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "pi" || name == "plugin") return EstimatorKind::plugin;
  if (name == "dr") return EstimatorKind::dr;
  if (name == "r") return EstimatorKind::r;
  if (name == "bdr") return EstimatorKind::bdr_component;
  throw std::invalid_argument("unknown estimator '" + name + "' (expected pi, dr or r)");
}

CateModel::CateModel(EstimatorKind kind, Evaluator evaluate, Provenance provenance)
    : kind_(kind), evaluate_(std::move(evaluate)), provenance_(std::move(provenance)) {}

std::vector<double> CateModel::predict_rows(const RowMatrix& c) const {
  std::vector<double> out(static_cast<std::size_t>(c.rows()));
  const std::size_t d = static_cast<std::size_t>(c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) out[static_cast<std::size_t>(i)] = evaluate_({c.data() + i * c.cols(), d});
  return out;
}

}  // namespace fdcate
