#include <doctest.h>

#include <cmath>

#include "fdcate/dgp.hpp"
#include "fdcate/discrete.hpp"
#include "fdcate/oracle.hpp"
#include "fdcate/plugin.hpp"
#include "test_support.hpp"

using namespace fdcate;

TEST_CASE("plug-in of the true nuisances is the effect") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DiscreteInstance inst = make_discrete_instance(seed, 1 + seed % 8);
    const auto tau = oracle::enum_tau(inst);
    for (std::size_t c = 0; c < inst.support(); ++c)
      CHECK(std::abs(plugin_tau(instance_point(inst, c, 0.05)) - tau[c]) < 1e-12);
  }
}

TEST_CASE("plug-in is zero without a mediator contrast") {
  const NuisancePoint p = NuisancePoint::make({{{1.0, -3.0}, {2.0, 5.0}}}, 0.3, {0.6, 0.6}, 0.05);
  CHECK(plugin_tau(p) == 0.0);
}

TEST_CASE("plug-in matches the literal four-term expansion") {
  const DiscreteInstance inst = make_discrete_instance(77, 8);
  for (std::size_t c = 0; c < inst.support(); ++c) {
    const NuisancePoint p = instance_point(inst, c, 0.05);
    const double q11 = p.q1[1], q10 = p.q1[0], e1 = p.e1;
    const double literal = ((1 - q11) - (1 - q10)) * (1 - e1) * p.m[0][0] + ((1 - q11) - (1 - q10)) * e1 * p.m[0][1] +
                           (q11 - q10) * (1 - e1) * p.m[1][0] + (q11 - q10) * e1 * p.m[1][1];
    CHECK(std::abs(plugin_tau(p) - literal) < 1e-14);
  }
}

TEST_CASE("plug-in does not depend on which class the propensity models") {
  const SampleTable data = sample(test::default_spec(4000, 3)).table;
  const LearnerConfig cfg = LearnerConfig::logistic();
  const NuisanceSet direct = fit_fd_nuisances(data, cfg);
  // Refit the propensity for Pr(X = 0 | c) and take its complement.
  std::vector<int> flipped(data.x());
  for (int& v : flipped) v = 1 - v;
  const FittedLearner e0 = fit_classifier(data.c(), flipped, cfg.for_classification());
  const NuisanceSet complement(
      [&](int z, int x, std::span<const double> c) { return direct.at(c).m[z][x]; },
      [&](std::span<const double> c) { return 1.0 - e0.predict(c); },
      [&](int x, std::span<const double> c) { return direct.at(c).q1[x]; });
  const RowMatrix probe = draw_covariates(10, 100, 4);
  for (Eigen::Index i = 0; i < probe.rows(); ++i) {
    const std::span<const double> c(probe.row(i).data(), 10);
    CHECK(std::abs(plugin_tau(direct.at(c)) - plugin_tau(complement.at(c))) < 1e-12);
  }
}

TEST_CASE("cross-fitted plug-in averages the fold sets") {
  const SampleTable data = sample(test::default_spec(2000, 5)).table;
  const CrossFitNuisances cross = fit_cross_nuisances(data, LearnerConfig::logistic(), {}, 6);
  const CateModel both = plugin_fit(cross);
  const CateModel first = plugin_fit(cross, false);
  const auto c = data.covariates(0);
  CHECK(both(c) == doctest::Approx(0.5 * (plugin_tau(cross.sets[0].at(c)) + plugin_tau(cross.sets[1].at(c)))).epsilon(1e-14));
  CHECK(first(c) == plugin_tau(cross.sets[0].at(c)));
  CHECK(both.kind() == EstimatorKind::plugin);
}

TEST_CASE("plug-in uses noisy numerators") {
  const SampleTable data = sample(test::default_spec(2000, 7)).table;
  const CrossFitNuisances cross = fit_cross_nuisances(data, LearnerConfig::logistic(), {}, 6);
  NoiseSpec spec;
  spec.rho = 1.0;
  spec.n = 2000;
  spec.seed = 3;
  const CrossFitNuisances noisy = with_noise(cross, spec);
  const auto c = data.covariates(0);
  CHECK(plugin_fit(noisy)(c) != plugin_fit(cross)(c));
  spec.rho = 0.0;
  CHECK(plugin_fit(with_noise(cross, spec))(c) == plugin_fit(cross)(c));
}
