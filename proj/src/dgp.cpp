#include "fdcate/dgp.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fdcate/math.hpp"
#include "fdcate/random.hpp"

namespace fdcate {

namespace {

double dot(const std::vector<double>& w, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * c[j];
  return s;
}

std::vector<double> unit_direction(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> w(d);
  double norm = 0.0;
  do {
    for (double& v : w) v = normal(rng);
    norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
  } while (norm == 0.0);
  for (double& v : w) v /= norm;
  return w;
}

}  // namespace

DgpSpec DgpSpec::with_random_directions(std::size_t d, std::size_t n, std::uint64_t seed) {
  DgpSpec spec;
  spec.d = d;
  spec.n = n;
  spec.seed = seed;
  std::mt19937_64 rng(derive_seed(seed, {0xd1ec}));
  spec.w_x = unit_direction(d, rng);
  spec.w_z = unit_direction(d, rng);
  spec.w_y = unit_direction(d, rng);
  return spec;
}

void DgpSpec::validate() const {
  if (d < 1) throw std::invalid_argument("covariate dimension must be at least 1");
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  for (const auto* w : {&w_x, &w_z, &w_y}) {
    if (w->size() != d) throw std::invalid_argument("direction length does not match covariate dimension");
    const double norm = std::sqrt(std::inner_product(w->begin(), w->end(), w->begin(), 0.0));
    if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("direction vectors must have unit norm");
  }
  if (!(kappa >= 1.0)) throw std::invalid_argument("overlap knob kappa must be at least 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("noise knob rho must lie in [0, 1]");
}

double DgpSpec::treatment_index(std::span<const double> c) const { return scale * dot(w_x, c); }
double DgpSpec::mediator_index(std::span<const double> c) const { return scale * dot(w_z, c); }
double DgpSpec::outcome_index(std::span<const double> c) const { return scale * dot(w_y, c); }

double treatment_probability(const DgpSpec& spec, std::span<const double> c, double u) {
  return sigmoid(spec.beta0 + spec.kappa * (spec.treatment_index(c) + spec.beta_u * u));
}

double mediator_probability(const DgpSpec& spec, int x, std::span<const double> c) {
  return sigmoid(spec.alpha0 + spec.mediator_index(c) + spec.alpha_x * x);
}

double true_b(const DgpSpec& spec, std::span<const double> c) {
  return mediator_probability(spec, 1, c) - mediator_probability(spec, 0, c);
}

double true_tau(const DgpSpec& spec, std::span<const double> c) { return spec.theta_z * true_b(spec, c); }

RowMatrix draw_covariates(std::size_t d, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RowMatrix c(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = normal(rng);
  }
  return c;
}

DgpSample sample(const DgpSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, {0x5a3b}));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = spec.n;
  RowMatrix c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.d));
  std::vector<int> x(n), z(n);
  std::vector<double> y(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < spec.d; ++j) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = normal(rng);
    const std::span<const double> ci(c.data() + i * spec.d, spec.d);
    u[i] = normal(rng);
    x[i] = unif(rng) < treatment_probability(spec, ci, u[i]) ? 1 : 0;
    z[i] = unif(rng) < mediator_probability(spec, x[i], ci) ? 1 : 0;
    y[i] = spec.theta0 + spec.outcome_index(ci) + spec.theta_z * z[i] + spec.theta_u * u[i] + normal(rng);
  }
  return {SampleTable(std::move(c), std::move(x), std::move(z), std::move(y)), std::move(u)};
}

Quadrature gauss_hermite(int points) {
  if (points < 1) throw std::invalid_argument("quadrature needs at least one node");
  // Golub-Welsch for the probabilists' Hermite weight exp(-u^2/2)/sqrt(2 pi).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Quadrature q;
  for (int k = 0; k < points; ++k) {
    q.nodes.push_back(eig.eigenvalues()(k));
    const double v0 = eig.eigenvectors()(0, k);
    q.weights.push_back(v0 * v0);
  }
  return q;
}

const Quadrature& gauss_hermite_32() {
  static const Quadrature q = gauss_hermite(32);
  return q;
}

double oracle_e1(const DgpSpec& spec, std::span<const double> c) {
  const Quadrature& q = gauss_hermite_32();
  double s = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * treatment_probability(spec, c, q.nodes[k]);
  return s;
}

double oracle_u_mean(const DgpSpec& spec, int x, std::span<const double> c) {
  const Quadrature& q = gauss_hermite_32();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double p1 = treatment_probability(spec, c, q.nodes[k]);
    const double px = x == 1 ? p1 : 1.0 - p1;
    num += q.weights[k] * q.nodes[k] * px;
    den += q.weights[k] * px;
  }
  return num / den;
}

double oracle_m(const DgpSpec& spec, int z, int x, std::span<const double> c) {
  // Z is independent of U given (X, C), so E[U | z, x, c] = E[U | x, c].
  return spec.theta0 + spec.outcome_index(c) + spec.theta_z * z + spec.theta_u * oracle_u_mean(spec, x, c);
}

double oracle_m_y(const DgpSpec& spec, int x, std::span<const double> c) {
  const double q1 = mediator_probability(spec, x, c);
  return (1.0 - q1) * oracle_m(spec, 0, x, c) + q1 * oracle_m(spec, 1, x, c);
}

NuisanceSet oracle_nuisances(const DgpSpec& spec, double floor) {
  return NuisanceSet([spec](int z, int x, std::span<const double> c) { return oracle_m(spec, z, x, c); },
                     [spec](std::span<const double> c) { return oracle_e1(spec, c); },
                     [spec](int x, std::span<const double> c) { return mediator_probability(spec, x, c); }, floor);
}

RNuisanceSet oracle_r_nuisances(const DgpSpec& spec) {
  return RNuisanceSet(
      [spec](std::span<const double> c) { return oracle_e1(spec, c); },
      [spec](std::span<const double> c) {
        const double e1 = oracle_e1(spec, c);
        return (1.0 - e1) * mediator_probability(spec, 0, c) + e1 * mediator_probability(spec, 1, c);
      },
      [spec](int x, std::span<const double> c) { return mediator_probability(spec, x, c); },
      [spec](int x, std::span<const double> c) { return oracle_m_y(spec, x, c); });
}

NuisanceSet inject_nuisance_noise(const NuisanceSet& ns, double rho, std::size_t n, std::uint64_t seed,
                                  bool variance_reading) {
  return ns.with_noise(NoiseSpec{rho, n, seed, variance_reading});
}

RNuisanceSet inject_nuisance_noise(const RNuisanceSet& ns, double rho, std::size_t n, std::uint64_t seed,
                                   bool variance_reading) {
  return ns.with_noise(NoiseSpec{rho, n, seed, variance_reading});
}

}  // namespace fdcate
