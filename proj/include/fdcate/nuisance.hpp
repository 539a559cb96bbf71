#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "fdcate/learners.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

inline constexpr double kDefaultFloor = 0.05;

/// Additive structural noise applied to fitted nuisances:
/// probabilities p -> clip(p + rho*eps, [1e-6, 1-1e-6]), means mu -> mu + rho*eps,
/// with eps ~ N(n^(-1/4), s) and s = n^(-1/4) (standard-deviation reading) or
/// s = n^(-1/8) (variance reading). Draws are a pure function of the seed, the
/// nuisance component, its discrete arguments, and the covariate bits, so each
/// query point gets one fixed i.i.d. perturbation.
struct NoiseSpec {
  double rho = 0.0;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  bool variance_reading = false;

  double mean() const;
  double sd() const;
  bool active() const { return rho != 0.0; }
  void validate() const;

  /// rho * eps for one query.
  double perturbation(std::uint64_t component, int a, int b, std::span<const double> c) const;
  double perturb_probability(double p, std::uint64_t component, int a, int b, std::span<const double> c) const;
  double perturb_mean(double mu, std::uint64_t component, int a, int b, std::span<const double> c) const;
};

inline constexpr double kNoiseClip = 1e-6;

/// All front-door nuisance values at one covariate point.
///
/// `e1` and `q1` are the values used as numerators and weights (possibly
/// noisy); `e1_frozen` and `q1_frozen` are the pre-noise values, which feed
/// every denominator after flooring. Complements are always 1 - p.
struct NuisancePoint {
  std::array<std::array<double, 2>, 2> m{};  // m[z][x] = E[Y | z, x, c]
  double e1 = 0.5;                           // Pr(X=1 | c)
  std::array<double, 2> q1{0.5, 0.5};        // q1[x] = Pr(Z=1 | x, c)
  double e1_frozen = 0.5;
  std::array<double, 2> q1_frozen{0.5, 0.5};
  double floor = kDefaultFloor;

  double e(int x) const { return x == 1 ? e1 : 1.0 - e1; }
  double q(int z, int x) const { return z == 1 ? q1[x] : 1.0 - q1[x]; }
  double e_denominator(int x) const;
  double q_denominator(int z, int x) const;

  /// Point with frozen copies equal to the given values.
  static NuisancePoint make(const std::array<std::array<double, 2>, 2>& m, double e1, const std::array<double, 2>& q1,
                            double floor);
};

// Derived functionals at one point.
double xi(const NuisancePoint& p, int z, int x, int xbar);   // q(z|xbar,c) / q(z|x,c)
double pi(const NuisancePoint& p, int x, int xbar);          // 1(x=xbar) / e(x|c)
double r_me(const NuisancePoint& p, int z);                  // sum_x m(z,x,c) e(x|c)
double nu_meq(const NuisancePoint& p, int x);                // sum_z r_me(z,c) q(z|x,c)
double s_mq(const NuisancePoint& p, int x, int xbar);        // sum_z m(z,x,c) q(z|xbar,c)

/// Front-door nuisances (m, e, q) as deterministic maps, with flooring and
/// optional structural noise.
class NuisanceSet {
 public:
  using OutcomeFn = std::function<double(int z, int x, std::span<const double> c)>;
  using PropensityFn = std::function<double(std::span<const double> c)>;
  using MediatorFn = std::function<double(int x, std::span<const double> c)>;

  /// `e1` returns Pr(X=1|c); `q1` returns Pr(Z=1|x,c).
  NuisanceSet(OutcomeFn m, PropensityFn e1, MediatorFn q1, double floor = kDefaultFloor);

  NuisancePoint at(std::span<const double> c) const;
  double floor() const { return floor_; }
  const std::optional<NoiseSpec>& noise() const { return noise_; }

  /// Copy whose numerator values carry the given noise; denominators keep the
  /// pre-noise values. rho = 0 returns an identical copy.
  NuisanceSet with_noise(const NoiseSpec& spec) const;
  NuisanceSet with_floor(double floor) const;

 private:
  OutcomeFn m_;
  PropensityFn e1_;
  MediatorFn q1_;
  double floor_;
  std::optional<NoiseSpec> noise_;
};

/// Nuisances of the residualized (partial linear) formulation: e_X(c), m_Z(c),
/// e_Z(x,c) = Pr(Z=1|x,c), m_Y(x,c) = E[Y|x,c]. They enter only additively,
/// so no flooring is applied.
class RNuisanceSet {
 public:
  using CovariateFn = std::function<double(std::span<const double> c)>;
  using ArmFn = std::function<double(int x, std::span<const double> c)>;

  RNuisanceSet(CovariateFn e_x, CovariateFn m_z, ArmFn e_z, ArmFn m_y);

  double e_x(std::span<const double> c) const;
  double m_z(std::span<const double> c) const;
  double e_z(int x, std::span<const double> c) const;
  double m_y(int x, std::span<const double> c) const;

  RNuisanceSet with_noise(const NoiseSpec& spec) const;
  const std::optional<NoiseSpec>& noise() const { return noise_; }

 private:
  CovariateFn e_x_;
  CovariateFn m_z_;
  ArmFn e_z_;
  ArmFn m_y_;
  std::optional<NoiseSpec> noise_;
};

struct NuisanceOptions {
  double floor = kDefaultFloor;
  /// Fit q with one classifier per treatment arm instead of one stacked fit on (X, C).
  bool per_arm_q = false;
};

/// m: regress Y on (Z, X, C); e: classify X on C; q: classify Z on (X, C).
/// Learner failures are rethrown as FitError naming the nuisance.
NuisanceSet fit_fd_nuisances(const SampleTable& train, const LearnerConfig& config, const NuisanceOptions& options = {});

/// e_X: classify X on C; m_Z: Pr(Z=1|C) via the classifier; e_Z: classify Z on
/// (X, C); m_Y: regress Y on (X, C).
RNuisanceSet fit_r_nuisances(const SampleTable& train, const LearnerConfig& config);

/// Feature matrices used by the nuisance fits; exposed for tests.
RowMatrix arm_features(std::span<const int> x, const RowMatrix& c);                       // (x, c)
RowMatrix outcome_features(std::span<const int> z, std::span<const int> x, const RowMatrix& c);  // (z, x, c)

/// Two-fold cross-fitted nuisances: sets[k] is fit on fold k of `plan` and is
/// meant to be evaluated on the other fold.
struct CrossFitNuisances {
  FoldPlan plan;
  std::vector<NuisanceSet> sets;
};

CrossFitNuisances fit_cross_nuisances(const SampleTable& data, const LearnerConfig& config,
                                      const NuisanceOptions& options, std::uint64_t fold_seed);

/// Applies noise to every set, with an independent stream per fold.
CrossFitNuisances with_noise(const CrossFitNuisances& cross, const NoiseSpec& spec);

}  // namespace fdcate
