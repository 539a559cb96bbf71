#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fdcate/dgp.hpp"
#include "fdcate/discrete.hpp"
#include "fdcate/fd_dr.hpp"
#include "fdcate/oracle.hpp"
#include "test_support.hpp"

using namespace fdcate;

namespace {

constexpr double kFloor = 0.01;

/// E[phi_xbar | C = c] for the library pseudo-outcome under the instance law, with Y = m.
double conditional_mean_phi(const DiscreteInstance& truth, std::size_t c, const NuisancePoint& hat, int xbar) {
  return oracle::enum_conditional_mean(truth, c, [&](int x, int z, double y) { return fdpo(hat, x, z, y, xbar); });
}

std::vector<NuisancePoint> shifted_points(const std::vector<NuisancePoint>& pts, double delta, Corruption which) {
  std::vector<NuisancePoint> out = pts;
  for (NuisancePoint& p : out) {
    if (which.m)
      for (auto& row : p.m)
        for (double& v : row) v += delta;
    if (which.e) p.e1 = std::clamp(p.e1 + delta, 0.02, 0.98);
    if (which.q)
      for (double& v : p.q1) v = std::clamp(v + delta, 0.02, 0.98);
    p.e1_frozen = p.e1;
    p.q1_frozen = p.q1;
  }
  return out;
}

}  // namespace

TEST_CASE("pseudo-outcome reduces to s_mq off-arm when Y equals m") {
  const NuisancePoint p = NuisancePoint::make({{{1.0, -0.5}, {2.0, 0.25}}}, 0.3, {0.4, 0.8}, 0.05);
  for (int z = 0; z < 2; ++z) {
    CHECK(fdpo(p, 0, z, p.m[z][0], 1) == doctest::Approx(s_mq(p, 0, 1)).epsilon(1e-15));
    CHECK(fdpo(p, 1, z, p.m[z][1], 0) == doctest::Approx(s_mq(p, 1, 0)).epsilon(1e-15));
  }
}

TEST_CASE("pseudo-outcome stays finite at extreme nuisances") {
  const NuisancePoint p = NuisancePoint::make({{{5.0, -5.0}, {3.0, 1.0}}}, 1e-6, {1e-6, 1 - 1e-6}, 0.05);
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z)
      for (int xbar = 0; xbar < 2; ++xbar) {
        const double v = fdpo(p, x, z, 100.0, xbar);
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) <= (100.0 + 5.0) / 0.05 + 4 * 5.0 / 0.05 + 10.0);
      }
}

TEST_CASE("consistency: conditional mean of the pseudo-outcome is the arm functional") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DiscreteInstance inst = make_discrete_instance(seed, 1 + seed % 8);
    const auto pts = instance_points(inst, kFloor);
    for (int xbar = 0; xbar < 2; ++xbar) {
      const auto tau = oracle::enum_tau_arm(inst, xbar);
      for (std::size_t c = 0; c < inst.support(); ++c)
        CHECK(std::abs(conditional_mean_phi(inst, c, pts[c], xbar) - tau[c]) < 1e-12);
    }
  }
}

TEST_CASE("marginal pseudo-outcome mean matches the three expressiveness expressions") {
  for (std::uint64_t seed = 200; seed < 203; ++seed) {
    const DiscreteInstance inst = make_discrete_instance(seed, 5);
    const auto pts = instance_points(inst, kFloor);
    for (int xbar = 0; xbar < 2; ++xbar) {
      std::vector<double> per_c;
      for (std::size_t c = 0; c < inst.support(); ++c) per_c.push_back(conditional_mean_phi(inst, c, pts[c], xbar));
      const double mean_phi = oracle::marginal(inst, per_c);
      const oracle::Expressiveness ex = oracle::enum_expressiveness(inst, xbar);
      CHECK(std::abs(mean_phi - ex.xi_y) < 1e-12);
      CHECK(std::abs(mean_phi - ex.pi_r) < 1e-12);
      CHECK(std::abs(mean_phi - ex.s_mq) < 1e-12);
      CHECK(std::abs(mean_phi - ex.tau) < 1e-12);
    }
  }
}

TEST_CASE("bias decomposition") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DiscreteInstance inst = make_discrete_instance(seed + 500, 4);
    const auto truth = instance_points(inst, kFloor);
    for (int xbar = 0; xbar < 2; ++xbar) {
      SUBCASE("q correct: every term vanishes") {
        const auto hat = corrupt_points(truth, 0.3, {true, true, false}, seed);
        const BiasTerms t = dr_bias_decomposition(inst, hat, xbar, kFloor);
        CHECK(std::abs(t.mediator) < 1e-12);
        CHECK(std::abs(t.treatment) < 1e-12);
        CHECK(std::abs(t.cross) < 1e-12);
        CHECK(std::abs(t.direct) < 1e-12);
      }
      SUBCASE("m and e correct: every term vanishes") {
        const auto hat = corrupt_points(truth, 0.3, {false, false, true}, seed);
        const BiasTerms t = dr_bias_decomposition(inst, hat, xbar, kFloor);
        CHECK(std::abs(t.mediator) < 1e-12);
        CHECK(std::abs(t.treatment) < 1e-12);
        CHECK(std::abs(t.cross) < 1e-12);
        CHECK(std::abs(t.direct) < 1e-12);
      }
      SUBCASE("all corrupted by +0.1: terms sum to the direct and the independently enumerated bias") {
        const auto hat = shifted_points(truth, 0.1, {true, true, true});
        const BiasTerms t = dr_bias_decomposition(inst, hat, xbar, kFloor);
        const auto oracle_bias = oracle::enum_fdpo_bias(inst, instance_from_points(inst, hat), xbar, kFloor);
        CHECK(std::abs(t.sum() - t.direct) < 1e-12);
        CHECK(std::abs(t.sum() - oracle::marginal(inst, oracle_bias)) < 1e-12);
        CHECK(std::abs(t.direct) > 1e-6);  // the check is not vacuous
        for (std::size_t c = 0; c < inst.support(); ++c) {
          const BiasTerms pc = dr_bias_decomposition(truth[c], hat[c], xbar);
          CHECK(std::abs(pc.sum() - oracle_bias[c]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("pseudo-outcome records use the other fold's nuisances") {
  const SampleTable data = sample(test::default_spec(300, 8)).table;
  const CrossFitNuisances cross = fit_cross_nuisances(data, LearnerConfig::logistic(), {}, 4);
  const auto records = fdpo_records(data, cross);
  REQUIRE(records.size() == data.rows());
  for (const FdpoRecord& r : records) {
    CHECK(r.fold != cross.plan.assignments[r.row]);
    CHECK(std::isfinite(r.difference()));
  }
  const FdpoRecord& r = records[17];
  const auto& set = cross.sets[static_cast<std::size_t>(r.fold)];
  CHECK(r.phi1 == fdpo(data.row(r.row), set, 1));
  CHECK(r.phi0 == fdpo(data.row(r.row), set, 0));
}

TEST_CASE("FD-DR fit") {
  SUBCASE("null effect at n=20000") {
    DgpSpec spec = test::default_spec(20000, 9);
    spec.theta_z = 0.0;
    const CateModel model = fd_dr_fit(sample(spec).table, LearnerConfig::logistic(), {}, 3);
    const RowMatrix probe = draw_covariates(10, 2000, 10);
    const auto pred = model.predict_rows(probe);
    const std::vector<double> zero(pred.size(), 0.0);
    MESSAGE("RMS(tau_hat_DR) under theta_z = 0: " << test::rms(pred, zero));
    CHECK(test::rms(pred, zero) <= 0.05);
    CHECK(model.kind() == EstimatorKind::dr);
    CHECK(model.provenance().folds == 2);
  }
  SUBCASE("swap averaging is the average of the two directions") {
    const SampleTable data = sample(test::default_spec(2000, 11)).table;
    const CrossFitNuisances cross = fit_cross_nuisances(data, LearnerConfig::logistic(), {}, 5);
    FdDrOptions single;
    single.swap = false;
    const CateModel both = fd_dr_fit(data, cross, {});
    const CateModel one = fd_dr_fit(data, cross, single);
    CrossFitNuisances reversed = cross;
    std::swap(reversed.sets[0], reversed.sets[1]);
    for (int& a : reversed.plan.assignments) a = 1 - a;
    const CateModel other = fd_dr_fit(data, reversed, single);
    const auto c = data.covariates(3);
    CHECK(both(c) == doctest::Approx(0.5 * (one(c) + other(c))).epsilon(1e-12));
  }
  SUBCASE("too few rows") {
    const SampleTable data = sample(test::default_spec(3, 1)).table;
    CHECK_THROWS(fd_dr_fit(data, LearnerConfig::logistic(), {}, 1));
  }
}
