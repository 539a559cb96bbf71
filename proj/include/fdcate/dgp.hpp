#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdcate/nuisance.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

/// Synthetic front-door law with a hidden confounder U:
///   C ~ N(0, I_d), U ~ N(0, 1)
///   X | C, U ~ Bernoulli(sigmoid(beta0 + kappa (beta_c.C + beta_u U)))
///   Z | X, C ~ Bernoulli(sigmoid(alpha0 + alpha_c.C + alpha_x X))
///   Y = theta0 + theta_c.C + theta_z Z + theta_u U + N(0, 1)
/// with beta_c = scale w_x, alpha_c = scale w_z, theta_c = scale w_y.
struct DgpSpec {
  std::size_t d = 10;
  std::size_t n = 1000;
  double beta0 = 0.1;
  double beta_u = 0.7;
  double alpha0 = 0.1;
  double alpha_x = 1.2;
  double theta0 = 0.0;
  double theta_z = 1.4;
  double theta_u = -2.4;
  double scale = 0.7;
  std::vector<double> w_x;
  std::vector<double> w_z;
  std::vector<double> w_y;
  double kappa = 1.0;
  double rho = 0.0;
  bool noise_variance_reading = false;
  std::uint64_t seed = 0;

  /// Defaults with unit directions drawn from N(0, I_d) using `seed`.
  static DgpSpec with_random_directions(std::size_t d, std::size_t n, std::uint64_t seed);

  /// Throws std::invalid_argument on inconsistent dimensions, non-unit
  /// directions, kappa < 1, or rho outside [0, 1].
  void validate() const;

  double treatment_index(std::span<const double> c) const;  // beta_c . c
  double mediator_index(std::span<const double> c) const;   // alpha_c . c
  double outcome_index(std::span<const double> c) const;    // theta_c . c
};

/// A generated sample. `u` is the hidden confounder, kept apart from the
/// table so estimators cannot see it.
struct DgpSample {
  SampleTable table;
  std::vector<double> u;
};

DgpSample sample(const DgpSpec& spec);

/// `count` i.i.d. draws of C ~ N(0, I_d).
RowMatrix draw_covariates(std::size_t d, std::size_t count, std::uint64_t seed);

/// Pr(X=1 | c, u) under the model, including the overlap knob.
double treatment_probability(const DgpSpec& spec, std::span<const double> c, double u);
/// Pr(Z=1 | x, c).
double mediator_probability(const DgpSpec& spec, int x, std::span<const double> c);

/// theta_z (sigmoid(alpha0 + alpha_c.c + alpha_x) - sigmoid(alpha0 + alpha_c.c)).
double true_tau(const DgpSpec& spec, std::span<const double> c);
/// b(c) = Pr(Z=1 | x=1, c) - Pr(Z=1 | x=0, c).
double true_b(const DgpSpec& spec, std::span<const double> c);

/// Nodes and weights with sum_i w_i f(x_i) ~ E[f(U)], U ~ N(0, 1).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_hermite_32();
Quadrature gauss_hermite(int points);

/// Oracle nuisances with U integrated out by quadrature.
double oracle_e1(const DgpSpec& spec, std::span<const double> c);                 // Pr(X=1 | c)
double oracle_u_mean(const DgpSpec& spec, int x, std::span<const double> c);      // E[U | x, c]
double oracle_m(const DgpSpec& spec, int z, int x, std::span<const double> c);    // E[Y | z, x, c]
double oracle_m_y(const DgpSpec& spec, int x, std::span<const double> c);         // E[Y | x, c]

NuisanceSet oracle_nuisances(const DgpSpec& spec, double floor = kDefaultFloor);
RNuisanceSet oracle_r_nuisances(const DgpSpec& spec);

/// Structural noise with eps ~ N(n^(-1/4), n^(-1/4)); rho = 0 is the identity.
NuisanceSet inject_nuisance_noise(const NuisanceSet& ns, double rho, std::size_t n, std::uint64_t seed,
                                  bool variance_reading = false);
RNuisanceSet inject_nuisance_noise(const RNuisanceSet& ns, double rho, std::size_t n, std::uint64_t seed,
                                   bool variance_reading = false);

}  // namespace fdcate
