#include <doctest.h>

#include <cmath>
#include <random>

#include "fdcate/discrete.hpp"
#include "fdcate/oracle.hpp"

using namespace fdcate;

namespace {

DiscreteInstance single_point(double e1, std::array<double, 2> q1, std::array<std::array<double, 2>, 2> m) {
  DiscreteInstance inst;
  inst.mass = {1.0};
  inst.e1 = {e1};
  inst.q1 = {q1};
  inst.m = {m};
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("effect of a constant outcome mean is zero") {
  const DiscreteInstance inst = single_point(0.3, {0.2, 0.7}, {{{4.0, 4.0}, {4.0, 4.0}}});
  for (int xbar = 0; xbar < 2; ++xbar) CHECK(std::abs(oracle::enum_tau_arm(inst, xbar)[0] - 4.0) < 1e-15);
  CHECK(std::abs(oracle::enum_tau(inst)[0]) < 1e-15);
}

TEST_CASE("effect without a mediator contrast is zero") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DiscreteInstance inst = make_discrete_instance(seed, 6);
    for (auto& q : inst.q1) q[1] = q[0];
    for (double t : oracle::enum_tau(inst)) CHECK(std::abs(t) < 1e-15);
  }
}

TEST_CASE("effect of a hand-computed instance") {
  // tau = (0.7 - 0.2) * [(1 - 0.3)(m10 - m00) + 0.3 (m11 - m01)]
  const DiscreteInstance inst = single_point(0.3, {0.2, 0.7}, {{{1.0, 2.0}, {3.0, 7.0}}});
  CHECK(oracle::enum_tau(inst)[0] == doctest::Approx(0.5 * (0.7 * 2.0 + 0.3 * 5.0)).epsilon(1e-14));
}

TEST_CASE("arm functional agrees with forward sampling of the intervened mediator") {
  const DiscreteInstance inst = make_discrete_instance(11, 3);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int kDraws = 10'000'000;
  for (int xbar = 0; xbar < 2; ++xbar) {
    const auto tau = oracle::enum_tau_arm(inst, xbar);
    for (std::size_t c = 0; c < inst.support(); ++c) {
      // Z drawn as if treatment were set to xbar, X drawn independently from its own law.
      double s = 0.0, s2 = 0.0;
      for (int i = 0; i < kDraws / static_cast<int>(inst.support()) / 2; ++i) {
        const int z = u(rng) < inst.q1[c][static_cast<std::size_t>(xbar)] ? 1 : 0;
        const int x = u(rng) < inst.e1[c] ? 1 : 0;
        const double v = inst.m[c][static_cast<std::size_t>(z)][static_cast<std::size_t>(x)];
        s += v;
        s2 += v * v;
      }
      const double k = kDraws / static_cast<int>(inst.support()) / 2;
      const double mean = s / k;
      const double se = std::sqrt((s2 / k - mean * mean) / k);
      CHECK(std::abs(mean - tau[c]) < 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("expressiveness: the four expectations coincide") {
  for (std::uint64_t seed = 30; seed < 33; ++seed) {
    const DiscreteInstance inst = make_discrete_instance(seed, 6);
    for (int xbar = 0; xbar < 2; ++xbar) CHECK(oracle::enum_expressiveness(inst, xbar).max_deviation() < 1e-12);
  }
  const DiscreteInstance one = single_point(0.5, {0.25, 0.75}, {{{0.0, 1.0}, {2.0, 4.0}}});
  const oracle::Expressiveness ex = oracle::enum_expressiveness(one, 1);
  // tau_1 = 0.25 * (0.5 * 0 + 0.5 * 1) + 0.75 * (0.5 * 2 + 0.5 * 4)
  CHECK(ex.tau == doctest::Approx(0.25 * 0.5 + 0.75 * 3.0).epsilon(1e-14));
  CHECK(ex.max_deviation() < 1e-14);
}

TEST_CASE("partial-linear components") {
  SUBCASE("random instances satisfy the residual moments and the product form") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const oracle::PleReport r = oracle::enum_ple(make_discrete_instance(seed, 1 + seed % 8));
      CHECK(r.max_moment() < 1e-12);
      CHECK(r.max_tau_gap < 1e-12);
    }
  }
  SUBCASE("hand-computed components") {
    const DiscreteInstance inst = single_point(0.4, {0.2, 0.6}, {{{1.0, 2.0}, {4.0, 3.0}}});
    const oracle::PleReport r = oracle::enum_ple(inst);
    CHECK(r.a[0] == doctest::Approx(0.2));
    CHECK(r.b[0] == doctest::Approx(0.4));
    CHECK(r.g[0][0] == doctest::Approx(3.0));
    CHECK(r.g[0][1] == doctest::Approx(1.0));
    CHECK(r.gamma[0] == doctest::Approx(0.6 * 3.0 + 0.4 * 1.0));
  }
  SUBCASE("g constant in x: gamma equals g") {
    DiscreteInstance inst = make_discrete_instance(4, 5);
    for (auto& m : inst.m) m[1][1] = m[0][1] + (m[1][0] - m[0][0]);
    const oracle::PleReport r = oracle::enum_ple(inst);
    for (std::size_t c = 0; c < inst.support(); ++c) {
      CHECK(std::abs(r.gamma[c] - r.g[c][0]) < 1e-14);
      CHECK(std::abs(r.g[c][1] - r.g[c][0]) < 1e-14);
    }
    CHECK(r.max_tau_gap < 1e-12);
  }
  SUBCASE("b identically zero: tau is zero") {
    DiscreteInstance inst = make_discrete_instance(5, 5);
    for (auto& q : inst.q1) q[1] = q[0];
    const oracle::PleReport r = oracle::enum_ple(inst);
    for (std::size_t c = 0; c < inst.support(); ++c) CHECK(std::abs(r.b[c]) < 1e-15);
    for (double t : oracle::enum_tau(inst)) CHECK(std::abs(t) < 1e-15);
  }
}

TEST_CASE("plug-in gamma error decomposition") {
  const DiscreteInstance inst = make_discrete_instance(9, 6);
  std::vector<double> e_hat;
  std::vector<std::array<double, 2>> g_hat;
  SUBCASE("true nuisances give no error") {
    for (std::size_t c = 0; c < inst.support(); ++c) {
      e_hat.push_back(inst.e1[c]);
      g_hat.push_back(oracle::enum_g(inst, c));
    }
    const auto dec = oracle::enum_gamma_decomposition(inst, e_hat, g_hat);
    for (double d : dec.direct) CHECK(std::abs(d) < 1e-15);
  }
  SUBCASE("perturbed nuisances: terms sum to the direct error") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (std::size_t c = 0; c < inst.support(); ++c) {
      e_hat.push_back(std::clamp(inst.e1[c] + u(rng), 0.0, 1.0));
      const auto g = oracle::enum_g(inst, c);
      g_hat.push_back({g[0] + u(rng), g[1] + u(rng)});
    }
    const auto dec = oracle::enum_gamma_decomposition(inst, e_hat, g_hat);
    CHECK(dec.max_deviation() < 1e-12);
    for (std::size_t c = 0; c < inst.support(); ++c) {
      const auto g = oracle::enum_g(inst, c);
      const double gamma = inst.e1[c] * g[1] + (1 - inst.e1[c]) * g[0];
      const double direct = e_hat[c] * g_hat[c][1] + (1 - e_hat[c]) * g_hat[c][0] - gamma;
      CHECK(std::abs(dec.direct[c] - direct) < 1e-14);
    }
  }
}

TEST_CASE("pseudo-outcome bias vanishes at the truth") {
  const DiscreteInstance inst = make_discrete_instance(12, 4);
  for (int xbar = 0; xbar < 2; ++xbar)
    for (double b : oracle::enum_fdpo_bias(inst, inst, xbar, 0.01)) CHECK(std::abs(b) < 1e-14);
}
