#include "fdcate/fd_dr.hpp"

#include <stdexcept>

#include "fdcate/random.hpp"

namespace fdcate {

double fdpo(const NuisancePoint& p, int x, int z, double y, int xbar) {
  return xi(p, z, x, xbar) * (y - p.m[z][x]) + pi(p, x, xbar) * (r_me(p, z) - nu_meq(p, x)) + s_mq(p, x, xbar);
}

double fdpo(const Observation& row, const NuisanceSet& ns, int xbar) {
  return fdpo(ns.at(row.c), row.x, row.z, row.y, xbar);
}

std::vector<FdpoRecord> fdpo_records(const SampleTable& data, const CrossFitNuisances& cross) {
  if (cross.sets.size() != 2 || cross.plan.assignments.size() != data.rows()) {
    throw std::invalid_argument("cross-fit nuisances do not match the data");
  }
  std::vector<FdpoRecord> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const int fold = 1 - cross.plan.assignments[i];
    const Observation obs = data.row(i);
    const NuisancePoint p = cross.sets[static_cast<std::size_t>(fold)].at(obs.c);
    out[i] = {i, fold, fdpo(p, obs.x, obs.z, obs.y, 1), fdpo(p, obs.x, obs.z, obs.y, 0)};
  }
  return out;
}

CateModel fd_dr_fit(const SampleTable& data, const CrossFitNuisances& cross, const FdDrOptions& options) {
  const std::vector<FdpoRecord> records = fdpo_records(data, cross);
  std::vector<LinearCate> fits;
  for (int k = 0; k < (options.swap ? 2 : 1); ++k) {
    // Rows of fold 1-k carry pseudo-outcomes built from set k.
    const std::vector<std::size_t> rows = cross.plan.rows_in(1 - k);
    RowMatrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.covariate_dim()));
    std::vector<double> target(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      c.row(static_cast<Eigen::Index>(j)) = data.c().row(static_cast<Eigen::Index>(rows[j]));
      target[j] = records[rows[j]].difference();
    }
    fits.push_back(fit_linear_cate(BasisKind::linear, c, target, std::nullopt, options.penalty));
  }
  LinearCate model = LinearCate::average(fits);
  Provenance prov;
  prov.final_penalty = options.penalty;
  prov.floor = cross.sets.front().floor();
  prov.folds = 2;
  prov.fold_seed = cross.plan.seed;
  prov.cross_fit_averaged = options.swap;
  return CateModel(
      EstimatorKind::dr, [model](std::span<const double> c) { return model(c); }, prov);
}

CateModel fd_dr_fit(const SampleTable& data, const LearnerConfig& config, const NuisanceOptions& nuisance,
                    std::uint64_t seed, const FdDrOptions& options) {
  if (data.rows() < 4) throw std::invalid_argument("FD-DR needs at least 4 rows");
  const CrossFitNuisances cross = fit_cross_nuisances(data, config, nuisance, seed);
  CateModel fitted = fd_dr_fit(data, cross, options);
  Provenance prov = fitted.provenance();
  prov.nuisance_config = config;
  return CateModel(EstimatorKind::dr, [fitted](std::span<const double> c) { return fitted(c); }, prov);
}

BiasTerms dr_bias_decomposition(const NuisancePoint& truth, const NuisancePoint& hat, int xbar) {
  BiasTerms t;
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) {
      const double w = truth.e(x) * truth.q(z, x);
      const double y = truth.m[z][x];
      t.direct += w * (fdpo(hat, x, z, y, xbar) - fdpo(truth, x, z, y, xbar));
      t.mediator += w * (hat.m[z][x] - truth.m[z][x]) * (xi(truth, z, x, xbar) - xi(hat, z, x, xbar));
    }
  }
  // nu evaluated with the estimated m and e but the true or estimated q.
  NuisancePoint mixed = hat;
  mixed.q1 = truth.q1;
  for (int x = 0; x < 2; ++x) {
    t.treatment += truth.e(x) * (pi(hat, x, xbar) - pi(truth, x, xbar)) * (nu_meq(mixed, x) - nu_meq(hat, x));
  }
  for (int z = 0; z < 2; ++z) {
    for (int x = 0; x < 2; ++x) {
      t.cross += hat.m[z][x] * (truth.q(z, xbar) - hat.q(z, xbar)) * (hat.e(x) - truth.e(x));
    }
  }
  return t;
}

BiasTerms dr_bias_decomposition(const DiscreteInstance& inst, const std::vector<NuisancePoint>& hat, int xbar,
                                double floor) {
  if (hat.size() != inst.support()) throw std::invalid_argument("one estimated point per support value is required");
  BiasTerms total;
  for (std::size_t c = 0; c < inst.support(); ++c) {
    const BiasTerms t = dr_bias_decomposition(instance_point(inst, c, floor), hat[c], xbar);
    total.mediator += inst.mass[c] * t.mediator;
    total.treatment += inst.mass[c] * t.treatment;
    total.cross += inst.mass[c] * t.cross;
    total.direct += inst.mass[c] * t.direct;
  }
  return total;
}

}  // namespace fdcate
