#include "fdcate/learners.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fdcate/math.hpp"

namespace fdcate {

namespace {

constexpr double kClassClamp = 1e-6;

void check_weights(std::optional<std::span<const double>> weights, std::size_t n) {
  if (!weights) return;
  if (weights->size() != n) throw std::invalid_argument("weights length does not match targets");
  for (double w : *weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
  }
}

Eigen::MatrixXd with_intercept(const RowMatrix& features) {
  Eigen::MatrixXd a(features.rows(), features.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(features.cols()) = features;
  return a;
}

LinearModel fit_ridge(const RowMatrix& features, std::span<const double> targets,
                      std::optional<std::span<const double>> weights, double penalty) {
  const Eigen::Index p = features.cols() + 1;
  const Eigen::MatrixXd a = with_intercept(features);
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(targets.size()));

  Eigen::MatrixXd normal(p, p);
  Eigen::VectorXd rhs(p);
  if (weights) {
    const Eigen::Map<const Eigen::VectorXd> w(weights->data(), static_cast<Eigen::Index>(weights->size()));
    const Eigen::MatrixXd wa = a.array().colwise() * w.array();
    normal.noalias() = wa.transpose() * a;
    rhs.noalias() = wa.transpose() * y;
  } else {
    normal.noalias() = a.transpose() * a;
    rhs.noalias() = a.transpose() * y;
  }
  for (Eigen::Index j = 1; j < p; ++j) normal(j, j) += penalty;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
  if (qr.rank() < p) {
    std::ostringstream os;
    os << "singular normal equations (rank " << qr.rank() << " of " << p << ", penalty " << penalty << ")";
    throw FitError(os.str());
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  Eigen::VectorXd beta = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !beta.allFinite()) beta = qr.solve(rhs);

  LinearModel model;
  model.intercept = beta(0);
  model.coefficients.assign(beta.data() + 1, beta.data() + p);
  return model;
}

// Penalized negative log-likelihood, accumulated with compensated long-double
// summation: near the optimum the Newton decrease is far below the rounding
// error of a plain double sum over tens of thousands of rows.
long double logistic_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                               double penalty) {
  const Eigen::VectorXd eta = a * beta;
  long double sum = 0.0L, carry = 0.0L;
  auto add = [&](long double v) {
    const long double t = sum + (v - carry);
    carry = (t - sum) - (v - carry);
    sum = t;
  };
  for (Eigen::Index i = 0; i < eta.size(); ++i) add(static_cast<long double>(softplus(eta(i))) - y(i) * eta(i));
  add(0.5L * penalty * beta.tail(beta.size() - 1).squaredNorm());
  return sum;
}

LinearModel fit_logistic(const RowMatrix& features, std::span<const int> labels, const LearnerConfig& config,
                         FitInfo& info) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols() + 1;
  const Eigen::MatrixXd a = with_intercept(features);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta(0) = logit(y.mean());
  const double penalty = config.ridge_penalty;
  long double f = logistic_objective(a, y, beta, penalty);
  info.objective_trace.push_back(static_cast<double>(f));

  double grad_norm = 0.0;
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd eta = a * beta;
    Eigen::VectorXd prob(n), curv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob(i) = sigmoid(eta(i));
      curv(i) = prob(i) * (1.0 - prob(i));
    }
    Eigen::VectorXd grad = a.transpose() * (prob - y);
    grad.tail(p - 1) += penalty * beta.tail(p - 1);
    grad_norm = grad.norm() / static_cast<double>(n);
    info.iterations = iter;
    info.final_gradient_norm = grad_norm;
    if (grad_norm <= config.tolerance) break;
    if (iter >= config.max_iters) {
      std::ostringstream os;
      os << "logistic fit did not converge in " << config.max_iters << " iterations (gradient norm " << grad_norm
         << ")";
      throw FitError(os.str());
    }

    Eigen::MatrixXd hess = a.transpose() * (a.array().colwise() * curv.array()).matrix();
    for (Eigen::Index j = 1; j < p; ++j) hess(j, j) += penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) step = grad;

    // Damped Newton: halve the step until the objective does not increase.
    double t = 1.0;
    Eigen::VectorXd trial = beta - step;
    long double f_trial = logistic_objective(a, y, trial, penalty);
    int halvings = 0;
    while (!(f_trial <= f) && halvings < 50) {
      t *= 0.5;
      trial = beta - t * step;
      f_trial = logistic_objective(a, y, trial, penalty);
      ++halvings;
    }
    if (!(f_trial <= f)) {
      std::ostringstream os;
      os << "logistic line search stalled at iteration " << iter << " (gradient norm " << grad_norm << ")";
      throw FitError(os.str());
    }
    beta = trial;
    f = f_trial;
    info.objective_trace.push_back(static_cast<double>(f));
  }

  LinearModel model;
  model.intercept = beta(0);
  model.coefficients.assign(beta.data() + 1, beta.data() + p);
  model.logistic = true;
  return model;
}

}  // namespace

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::ridge: return "ridge";
    case LearnerKind::logistic: return "logistic";
    case LearnerKind::gbt: return "gbt";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "ridge") return LearnerKind::ridge;
  if (name == "logistic") return LearnerKind::logistic;
  if (name == "gbt") return LearnerKind::gbt;
  throw std::invalid_argument("unknown learner kind '" + name + "'");
}

LearnerConfig LearnerConfig::ridge(double penalty) {
  LearnerConfig c;
  c.kind = LearnerKind::ridge;
  c.ridge_penalty = penalty;
  return c;
}

LearnerConfig LearnerConfig::logistic(double penalty) {
  LearnerConfig c;
  c.kind = LearnerKind::logistic;
  c.ridge_penalty = penalty;
  return c;
}

LearnerConfig LearnerConfig::boosted(GbtParams params) {
  LearnerConfig c;
  c.kind = LearnerKind::gbt;
  c.gbt = params;
  return c;
}

void LearnerConfig::validate() const {
  if (!(ridge_penalty >= 0.0) || !std::isfinite(ridge_penalty)) throw std::invalid_argument("ridge_penalty must be >= 0");
  if (gbt.trees < 1) throw std::invalid_argument("gbt tree count must be >= 1");
  if (gbt.max_depth < 1) throw std::invalid_argument("gbt max depth must be >= 1");
  if (!(gbt.learning_rate > 0.0 && gbt.learning_rate <= 1.0)) throw std::invalid_argument("learning rate must be in (0,1]");
  if (!(gbt.subsample > 0.0 && gbt.subsample <= 1.0)) throw std::invalid_argument("subsample must be in (0,1]");
  if (!(gbt.colsample > 0.0 && gbt.colsample <= 1.0)) throw std::invalid_argument("colsample must be in (0,1]");
  if (!(gbt.l2 >= 0.0)) throw std::invalid_argument("gbt l2 penalty must be >= 0");
  if (!(gbt.min_child_weight >= 0.0)) throw std::invalid_argument("min_child_weight must be >= 0");
  if (gbt.max_bins < 2 || gbt.max_bins > 256) throw std::invalid_argument("max_bins must be in [2,256]");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
}

LearnerConfig LearnerConfig::for_regression() const {
  LearnerConfig c = *this;
  if (c.kind == LearnerKind::logistic) c.kind = LearnerKind::ridge;
  return c;
}

LearnerConfig LearnerConfig::for_classification() const {
  LearnerConfig c = *this;
  if (c.kind == LearnerKind::ridge) c.kind = LearnerKind::logistic;
  return c;
}

LearnerConfig LearnerConfig::with_seed(std::uint64_t s) const {
  LearnerConfig c = *this;
  c.seed = s;
  return c;
}

double LinearModel::raw(std::span<const double> features) const {
  double acc = intercept;
  for (std::size_t j = 0; j < coefficients.size(); ++j) acc += coefficients[j] * features[j];
  return acc;
}

double GbtEnsemble::raw(std::span<const double> features) const {
  double acc = base_score;
  for (const auto& tree : trees) {
    int node = 0;
    while (tree[static_cast<std::size_t>(node)].feature >= 0) {
      const TreeNode& t = tree[static_cast<std::size_t>(node)];
      node = features[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right;
    }
    acc += tree[static_cast<std::size_t>(node)].value;
  }
  return acc;
}

FittedLearner::FittedLearner(Model model, FitInfo info) : model_(std::move(model)), info_(std::move(info)) {}

double FittedLearner::predict(std::span<const double> features) const {
  if (features.size() != info_.feature_dim) {
    throw std::invalid_argument("feature dimension " + std::to_string(features.size()) + " does not match fitted " +
                                std::to_string(info_.feature_dim));
  }
  if (const auto* lin = std::get_if<LinearModel>(&model_)) {
    const double r = lin->raw(features);
    return lin->logistic ? sigmoid(r) : r;
  }
  if (const auto* ens = std::get_if<GbtEnsemble>(&model_)) {
    const double r = ens->raw(features);
    return ens->logistic ? sigmoid(r) : r;
  }
  return std::get<ConstantModel>(model_).value;
}

std::vector<double> FittedLearner::predict_rows(const RowMatrix& features) const {
  std::vector<double> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        predict({features.data() + i * features.cols(), static_cast<std::size_t>(features.cols())});
  }
  return out;
}

FittedLearner fit_regressor(const RowMatrix& features, std::span<const double> targets,
                            std::optional<std::span<const double>> weights, const LearnerConfig& config) {
  config.validate();
  const std::size_t n = targets.size();
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw std::invalid_argument("feature rows (" + std::to_string(features.rows()) + ") do not match targets (" +
                                std::to_string(n) + ")");
  }
  if (n == 0) throw std::invalid_argument("cannot fit on zero rows");
  check_weights(weights, n);
  for (double t : targets) {
    if (!std::isfinite(t)) throw std::invalid_argument("targets must be finite");
  }

  FitInfo info;
  info.config = config;
  info.feature_dim = static_cast<std::size_t>(features.cols());
  if (config.kind == LearnerKind::gbt) {
    return FittedLearner(fit_gbt(features, targets, weights, config.gbt, false, config.seed), std::move(info));
  }
  return FittedLearner(fit_ridge(features, targets, weights, config.ridge_penalty), std::move(info));
}

FittedLearner fit_classifier(const RowMatrix& features, std::span<const int> labels, const LearnerConfig& config) {
  config.validate();
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw std::invalid_argument("feature rows (" + std::to_string(features.rows()) + ") do not match labels (" +
                                std::to_string(n) + ")");
  }
  if (n == 0) throw std::invalid_argument("cannot fit on zero rows");
  std::size_t ones = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("classifier labels must be 0 or 1");
    ones += static_cast<std::size_t>(l);
  }

  FitInfo info;
  info.config = config;
  info.feature_dim = static_cast<std::size_t>(features.cols());
  info.classifier = true;
  if (ones == 0 || ones == n) {
    info.degenerate = true;
    return FittedLearner(ConstantModel{ones == n ? 1.0 - kClassClamp : kClassClamp}, std::move(info));
  }
  if (config.kind == LearnerKind::gbt) {
    std::vector<double> targets(labels.begin(), labels.end());
    return FittedLearner(fit_gbt(features, targets, std::nullopt, config.gbt, true, config.seed), std::move(info));
  }
  LinearModel model = fit_logistic(features, labels, config.for_classification(), info);
  return FittedLearner(std::move(model), std::move(info));
}

}  // namespace fdcate
