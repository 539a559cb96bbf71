#include "fdcate/bd_r_learner.hpp"

#include <stdexcept>

#include "fdcate/random.hpp"

namespace fdcate {

void RProblem::validate() const {
  const std::size_t n = outcome.size();
  if (n == 0) throw std::invalid_argument("R-loss problem has no rows");
  if (treatment.size() != n || outcome_fit.size() != n || treatment_fit.size() != n ||
      static_cast<std::size_t>(inputs.rows()) != n) {
    throw std::invalid_argument("R-loss problem columns differ in length");
  }
  if (!(penalty >= 0.0)) throw std::invalid_argument("R-loss penalty must be nonnegative");
}

WeightedTargets r_loss_weights(const RProblem& problem) {
  problem.validate();
  WeightedTargets out;
  out.targets.resize(problem.rows());
  out.weights.resize(problem.rows());
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    const double rt = problem.treatment[i] - problem.treatment_fit[i];
    const double ry = problem.outcome[i] - problem.outcome_fit[i];
    if (rt == 0.0) {
      out.targets[i] = 0.0;
      out.weights[i] = 0.0;
    } else {
      out.targets[i] = ry / rt;
      out.weights[i] = rt * rt;
    }
  }
  return out;
}

LinearCate bdr_fit(const RProblem& problem, BasisKind basis) {
  const WeightedTargets wt = r_loss_weights(problem);
  bool any = false;
  for (double w : wt.weights) any = any || w > 0.0;
  if (!any) throw FitError("all R-loss weights are zero: the treatment residualizer reproduces the treatment exactly");
  return fit_linear_cate(basis, problem.inputs, wt.targets, std::span<const double>(wt.weights), problem.penalty);
}

RProblem b_problem(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty) {
  RProblem p;
  const std::size_t n = rows.rows();
  p.inputs = rows.c();
  p.penalty = penalty;
  p.outcome.resize(n);
  p.treatment.resize(n);
  p.outcome_fit.resize(n);
  p.treatment_fit.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = rows.covariates(i);
    p.outcome[i] = rows.z()[i];
    p.treatment[i] = rows.x()[i];
    p.outcome_fit[i] = nuisances.m_z(c);
    p.treatment_fit[i] = nuisances.e_x(c);
  }
  return p;
}

RProblem g_problem(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty) {
  RProblem p;
  const std::size_t n = rows.rows();
  p.inputs = arm_features(rows.x(), rows.c());
  p.penalty = penalty;
  p.outcome.resize(n);
  p.treatment.resize(n);
  p.outcome_fit.resize(n);
  p.treatment_fit.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = rows.covariates(i);
    const int x = rows.x()[i];
    p.outcome[i] = rows.y()[i];
    p.treatment[i] = rows.z()[i];
    p.outcome_fit[i] = nuisances.m_y(x, c);
    p.treatment_fit[i] = nuisances.e_z(x, c);
  }
  return p;
}

LinearCate bdr_fit_b(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty) {
  return bdr_fit(b_problem(rows, nuisances, penalty), BasisKind::linear);
}

LinearCate bdr_fit_g(const SampleTable& rows, const RNuisanceSet& nuisances, double penalty) {
  return bdr_fit(g_problem(rows, nuisances, penalty), BasisKind::arm_interaction);
}

LinearCate bdr_cross_fit(const SampleTable& data, BdrTarget target, const LearnerConfig& config, std::uint64_t seed,
                         const BdrCrossFitOptions& options) {
  const FoldPlan plan = make_folds(data.rows(), 2, seed);
  std::vector<LinearCate> fits;
  for (int k = 0; k < (options.swap ? 2 : 1); ++k) {
    const SampleTable nuisance_rows = data.subset(plan.rows_in(k));
    const SampleTable fit_rows = data.subset(plan.rows_in(1 - k));
    RNuisanceSet rn = fit_r_nuisances(nuisance_rows, config.with_seed(derive_seed(config.seed, {seed, std::uint64_t(k)})));
    if (options.noise) {
      NoiseSpec spec = *options.noise;
      spec.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(k)});
      rn = rn.with_noise(spec);
    }
    fits.push_back(target == BdrTarget::b ? bdr_fit_b(fit_rows, rn, options.penalty)
                                          : bdr_fit_g(fit_rows, rn, options.penalty));
  }
  return LinearCate::average(fits);
}

}  // namespace fdcate
