#include "fdcate/plugin.hpp"

#include <stdexcept>

namespace fdcate {

double plugin_tau(const NuisancePoint& p) {
  double s = 0.0;
  for (int z = 0; z < 2; ++z) {
    const double dq = p.q(z, 1) - p.q(z, 0);
    for (int x = 0; x < 2; ++x) s += dq * p.e(x) * p.m[z][x];
  }
  return s;
}

CateModel plugin_fit(const CrossFitNuisances& cross, bool swap) {
  if (cross.sets.empty()) throw std::invalid_argument("plug-in needs at least one nuisance set");
  std::vector<NuisanceSet> sets(cross.sets.begin(), swap ? cross.sets.end() : cross.sets.begin() + 1);
  Provenance prov;
  prov.floor = sets.front().floor();
  prov.folds = static_cast<int>(cross.sets.size());
  prov.fold_seed = cross.plan.seed;
  prov.cross_fit_averaged = swap;
  return CateModel(
      EstimatorKind::plugin,
      [sets](std::span<const double> c) {
        double s = 0.0;
        for (const auto& ns : sets) s += plugin_tau(ns.at(c));
        return s / static_cast<double>(sets.size());
      },
      prov);
}

CateModel plugin_fit(const SampleTable& data, const LearnerConfig& config, const NuisanceOptions& nuisance,
                     std::uint64_t seed, bool swap) {
  if (data.rows() < 2) throw std::invalid_argument("plug-in needs at least 2 rows");
  const CrossFitNuisances cross = fit_cross_nuisances(data, config, nuisance, seed);
  CateModel fitted = plugin_fit(cross, swap);
  Provenance prov = fitted.provenance();
  prov.nuisance_config = config;
  return CateModel(EstimatorKind::plugin, [fitted](std::span<const double> c) { return fitted(c); }, prov);
}

}  // namespace fdcate
