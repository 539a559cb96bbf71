#include <doctest.h>

#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fdcate/dgp.hpp"
#include "fdcate/discrete.hpp"
#include "fdcate/oracle.hpp"
#include "test_support.hpp"

using namespace fdcate;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

Big big_sigmoid(const Big& t) { return Big(1) / (Big(1) + exp(-t)); }

double plain_sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

TEST_CASE("true_tau closed form") {
  DgpSpec spec = test::default_spec(10, 1);
  SUBCASE("alpha_c . c = 0") {
    const std::vector<double> c(10, 0.0);
    const Big ref = Big("1.4") * (big_sigmoid(Big("1.3")) - big_sigmoid(Big("0.1")));
    CHECK(std::abs(true_tau(spec, c) - ref.convert_to<double>()) < 1e-12);
    CHECK(std::abs(true_tau(spec, c) - 0.3652) < 5e-5);
  }
  SUBCASE("no mediator response") {
    spec.alpha_x = 0.0;
    const RowMatrix c = draw_covariates(10, 5, 3);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(true_tau(spec, std::span<const double>(c.row(i).data(), 10)) == 0.0);
  }
  SUBCASE("logistic saturation") {
    std::vector<double> c(spec.w_z);
    for (double& v : c) v *= 30.0 / spec.scale;  // alpha_c . c = 30
    CHECK(std::abs(spec.mediator_index(c) - 30.0) < 1e-9);
    CHECK(std::abs(true_tau(spec, c)) <= 1e-10);
  }
  SUBCASE("tau = theta_z * b") {
    const RowMatrix c = draw_covariates(10, 5, 4);
    for (Eigen::Index i = 0; i < 5; ++i) {
      const std::span<const double> ci(c.row(i).data(), 10);
      CHECK(true_tau(spec, ci) == doctest::Approx(1.4 * true_b(spec, ci)).epsilon(1e-14));
    }
  }
}

TEST_CASE("sampled data match the generator") {
  DgpSpec spec = test::default_spec(1000000, 2);
  const DgpSample s = sample(spec);
  const SampleTable& t = s.table;
  const double n = static_cast<double>(t.rows());

  // Average effect from an independently coded sigmoid vs true_tau.
  std::vector<double> direct(t.rows()), lib(t.rows());
  double z_resid = 0.0, z_var = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const auto c = t.covariates(i);
    double a = spec.alpha0;
    for (std::size_t j = 0; j < 10; ++j) a += spec.scale * spec.w_z[j] * c[j];
    direct[i] = spec.theta_z * (plain_sigmoid(a + spec.alpha_x) - plain_sigmoid(a));
    lib[i] = true_tau(spec, c);
    const double qz = plain_sigmoid(a + spec.alpha_x * t.x()[i]);
    z_resid += t.z()[i] - qz;
    z_var += qz * (1 - qz);
  }
  const double mean_direct = std::accumulate(direct.begin(), direct.end(), 0.0) / n;
  const double mean_lib = std::accumulate(lib.begin(), lib.end(), 0.0) / n;
  double var = 0.0;
  for (double v : direct) var += (v - mean_direct) * (v - mean_direct);
  const double se = std::sqrt(var / (n - 1) / n);
  CHECK(std::abs(mean_direct - mean_lib) <= 3 * se);
  // The mediator follows its model: mean residual within 3 standard errors.
  CHECK(std::abs(z_resid / n) <= 3 * std::sqrt(z_var) / n);
  // The hidden confounder is standard normal.
  const double mu = std::accumulate(s.u.begin(), s.u.end(), 0.0) / n;
  CHECK(std::abs(mu) <= 3 / std::sqrt(n));
}

TEST_CASE("steeper treatment logit widens the propensity tails") {
  DgpSpec spec = test::default_spec(100000, 3);
  auto tail_fraction = [](const DgpSpec& s) {
    const DgpSample d = sample(s);
    std::size_t count = 0;
    for (std::size_t i = 0; i < d.table.rows(); ++i) {
      const double p = treatment_probability(s, d.table.covariates(i), d.u[i]);
      if (p < 0.05 || p > 0.95) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(d.table.rows());
  };
  const double base = tail_fraction(spec);
  spec.kappa = 10.0;
  CHECK(tail_fraction(spec) > base);
}

TEST_CASE("sampling is deterministic under the seed") {
  const DgpSpec spec = test::default_spec(500, 4);
  const DgpSample a = sample(spec), b = sample(spec);
  CHECK(a.table.y() == b.table.y());
  CHECK(a.table.x() == b.table.x());
  CHECK(a.u == b.u);
  DgpSpec other = spec;
  other.seed += 1;
  CHECK(sample(other).table.y() != a.table.y());
}

TEST_CASE("spec validation") {
  DgpSpec spec = test::default_spec(10, 1);
  CHECK_NOTHROW(spec.validate());
  for (double v : spec.w_x) CHECK(std::isfinite(v));
  DgpSpec bad = spec;
  bad.w_x[0] += 0.5;
  CHECK_THROWS(bad.validate());
  bad = spec;
  bad.kappa = 0.5;
  CHECK_THROWS(bad.validate());
  bad = spec;
  bad.rho = 1.5;
  CHECK_THROWS(bad.validate());
  bad = spec;
  bad.w_y.pop_back();
  CHECK_THROWS(bad.validate());
}

TEST_CASE("Gauss-Hermite rule integrates normal moments") {
  const Quadrature& q = gauss_hermite_32();
  REQUIRE(q.nodes.size() == 32);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    const double u = q.nodes[i], w = q.weights[i];
    m0 += w;
    m2 += w * u * u;
    m4 += w * std::pow(u, 4);
    m6 += w * std::pow(u, 6);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-11));
}

TEST_CASE("oracle nuisances agree with Monte Carlo at a fixed covariate") {
  const DgpSpec spec = test::default_spec(400000, 6);
  const RowMatrix c0 = draw_covariates(10, 1, 9);
  const std::span<const double> c(c0.row(0).data(), 10);
  std::mt19937_64 rng(10);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  double sx = 0, su1 = 0, n1 = 0;
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) {
    const double u = nd(rng);
    const double p = treatment_probability(spec, c, u);
    sx += p;
    if (ud(rng) < p) {
      su1 += u;
      n1 += 1;
    }
  }
  CHECK(std::abs(sx / draws - oracle_e1(spec, c)) < 3e-3);
  CHECK(std::abs(su1 / n1 - oracle_u_mean(spec, 1, c)) < 1e-2);
  // E[Y | z, x, c] is additive in z with slope theta_z.
  CHECK(oracle_m(spec, 1, 0, c) - oracle_m(spec, 0, 0, c) == doctest::Approx(spec.theta_z).epsilon(1e-12));
  const double qz = mediator_probability(spec, 1, c);
  CHECK(oracle_m_y(spec, 1, c) ==
        doctest::Approx(qz * oracle_m(spec, 1, 1, c) + (1 - qz) * oracle_m(spec, 0, 1, c)).epsilon(1e-12));
}

TEST_CASE("injected noise: identity at rho = 0, mean n^(-1/4) at rho = 1, frozen denominators") {
  const NuisanceSet base([](int z, int x, std::span<const double> c) { return z + 0.5 * x + c[0]; },
                         [](std::span<const double>) { return 0.5; },
                         [](int, std::span<const double>) { return 0.5; });
  const RowMatrix c = draw_covariates(2, 100000, 12);

  const NuisanceSet same = inject_nuisance_noise(base, 0.0, 10000, 3);
  for (Eigen::Index i = 0; i < 100; ++i) {
    const std::span<const double> ci(c.row(i).data(), 2);
    const NuisancePoint a = base.at(ci), b = same.at(ci);
    CHECK(a.m == b.m);
    CHECK(a.e1 == b.e1);
    CHECK(a.q1 == b.q1);
  }

  const NuisanceSet noisy = inject_nuisance_noise(base, 1.0, 10000, 3);
  double sum = 0.0, abs_sum = 0.0, sq = 0.0;
  bool frozen_ok = true;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const NuisancePoint p = noisy.at(std::span<const double>(c.row(i).data(), 2));
    const double d = p.q1[1] - 0.5;
    sum += d;
    abs_sum += std::abs(d);
    sq += d * d;
    frozen_ok = frozen_ok && p.q_denominator(1, 1) == 0.5 && p.e_denominator(1) == 0.5 && p.q1_frozen[0] == 0.5;
  }
  const double n = static_cast<double>(c.rows());
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  // eps ~ N(0.1, 0.1): E[eps] = 0.1, E|eps| = 0.1 (sqrt(2/pi) e^(-1/2) + erf(1/sqrt 2)).
  const double abs_mean = 0.1 * (std::sqrt(2.0 / M_PI) * std::exp(-0.5) + std::erf(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(mean - 0.1) <= 4 * 0.1 / std::sqrt(n));
  CHECK(std::abs(abs_sum / n - abs_mean) <= 4 * 0.1 / std::sqrt(n));
  CHECK(std::abs(sd - 0.1) <= 0.002);
  CHECK(frozen_ok);

  // The xi denominator after injection is the pre-noise value, floored.
  const NuisanceSet low([](int, int, std::span<const double>) { return 0.0; }, [](std::span<const double>) { return 0.5; },
                        [](int x, std::span<const double>) { return x == 1 ? 0.97 : 0.5; }, 0.05);
  const NuisancePoint p = inject_nuisance_noise(low, 1.0, 10000, 4).at(std::span<const double>(c.row(0).data(), 2));
  CHECK(p.q_denominator(0, 1) == 0.05);
  CHECK(p.q_denominator(1, 1) == 0.97);
  CHECK(xi(p, 0, 1, 0) == (1.0 - p.q1[0]) / 0.05);

  // Variance reading widens the spread to n^(-1/8).
  const NuisanceSet wide = inject_nuisance_noise(base, 1.0, 10000, 3, true);
  double wsq = 0.0, wsum = 0.0;
  for (Eigen::Index i = 0; i < 20000; ++i) {
    const double d = wide.at(std::span<const double>(c.row(i).data(), 2)).m[0][0] - c(i, 0);
    wsum += d;
    wsq += d * d;
  }
  const double wmean = wsum / 20000;
  CHECK(std::abs(std::sqrt(wsq / 20000 - wmean * wmean) - std::pow(10000.0, -0.125)) < 0.01);
}

TEST_CASE("noise on the residualizing nuisances") {
  const RNuisanceSet base([](std::span<const double>) { return 0.3; }, [](std::span<const double>) { return 0.6; },
                          [](int, std::span<const double>) { return 0.4; },
                          [](int x, std::span<const double>) { return 1.0 + x; });
  const double c = 0.25;
  const std::span<const double> cs(&c, 1);
  const RNuisanceSet same = inject_nuisance_noise(base, 0.0, 1000, 1);
  CHECK(same.e_x(cs) == 0.3);
  CHECK(same.m_y(1, cs) == 2.0);
  const RNuisanceSet noisy = inject_nuisance_noise(base, 1.0, 1000, 1);
  CHECK(noisy.e_x(cs) != 0.3);
  CHECK(noisy.e_x(cs) == inject_nuisance_noise(base, 1.0, 1000, 1).e_x(cs));
  CHECK_THROWS(inject_nuisance_noise(base, 1.5, 1000, 1));
}

TEST_CASE("discrete instances") {
  SUBCASE("support one is constant in c") {
    const DiscreteInstance inst = make_discrete_instance(3, 1);
    CHECK(inst.support() == 1);
    CHECK(inst.mass[0] == 1.0);
  }
  SUBCASE("tables are valid conditional laws inside [0.1, 0.9]") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const DiscreteInstance inst = make_discrete_instance(seed, 1 + seed % 8);
      CHECK_NOTHROW(inst.validate());
      CHECK(std::accumulate(inst.mass.begin(), inst.mass.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
      for (std::size_t c = 0; c < inst.support(); ++c) {
        CHECK(inst.e1[c] >= 0.1);
        CHECK(inst.e1[c] <= 0.9);
        for (int x = 0; x < 2; ++x) {
          const NuisancePoint p = instance_point(inst, c, 0.05);
          CHECK(p.q(0, x) + p.q(1, x) == 1.0);
        }
      }
    }
  }
  SUBCASE("tau = b * gamma on 50 random instances") {
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
      const DiscreteInstance inst = make_discrete_instance(seed, 6);
      const auto tau = oracle::enum_tau(inst);
      for (std::size_t c = 0; c < inst.support(); ++c) {
        const double b = inst.q1[c][1] - inst.q1[c][0];
        CHECK(std::abs(tau[c] - b * oracle::enum_gamma(inst, c)) < 1e-12);
      }
    }
  }
  SUBCASE("invalid instances are rejected") {
    DiscreteInstance inst = make_discrete_instance(1, 3);
    inst.e1[1] = 1.0;
    CHECK_THROWS(inst.validate());
    CHECK_THROWS(make_discrete_instance(1, 0));
  }
}
