#include "fdcate/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fdcate/random.hpp"

namespace fdcate {

namespace {

enum Component : std::uint64_t {
  kM = 1,
  kE = 2,
  kQ = 3,
  kEX = 11,
  kMZ = 12,
  kEZ = 13,
  kMY = 14,
};

std::vector<double> prepend(std::initializer_list<double> head, std::span<const double> c) {
  std::vector<double> v;
  v.reserve(head.size() + c.size());
  v.insert(v.end(), head.begin(), head.end());
  v.insert(v.end(), c.begin(), c.end());
  return v;
}

template <typename Fn>
auto with_name(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw FitError(std::string("nuisance ") + name + ": " + e.what());
  }
}

}  // namespace

double NoiseSpec::mean() const { return std::pow(static_cast<double>(n), -0.25); }

double NoiseSpec::sd() const { return variance_reading ? std::sqrt(mean()) : mean(); }

void NoiseSpec::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("noise rho must lie in [0, 1]");
  if (n < 1) throw std::invalid_argument("noise sample size must be positive");
}

double NoiseSpec::perturbation(std::uint64_t component, int a, int b, std::span<const double> c) const {
  const std::uint64_t key = hash_doubles(
      derive_seed(seed, {component, static_cast<std::uint64_t>(a + 2), static_cast<std::uint64_t>(b + 2)}), c);
  return rho * (mean() + sd() * keyed_standard_normal(key));
}

double NoiseSpec::perturb_probability(double p, std::uint64_t component, int a, int b,
                                      std::span<const double> c) const {
  return std::clamp(p + perturbation(component, a, b, c), kNoiseClip, 1.0 - kNoiseClip);
}

double NoiseSpec::perturb_mean(double mu, std::uint64_t component, int a, int b, std::span<const double> c) const {
  return mu + perturbation(component, a, b, c);
}

double NuisancePoint::e_denominator(int x) const {
  return std::max(floor, x == 1 ? e1_frozen : 1.0 - e1_frozen);
}

double NuisancePoint::q_denominator(int z, int x) const {
  return std::max(floor, z == 1 ? q1_frozen[x] : 1.0 - q1_frozen[x]);
}

NuisancePoint NuisancePoint::make(const std::array<std::array<double, 2>, 2>& m, double e1,
                                  const std::array<double, 2>& q1, double floor) {
  NuisancePoint p;
  p.m = m;
  p.e1 = p.e1_frozen = e1;
  p.q1 = p.q1_frozen = q1;
  p.floor = floor;
  return p;
}

double xi(const NuisancePoint& p, int z, int x, int xbar) { return p.q(z, xbar) / p.q_denominator(z, x); }

double pi(const NuisancePoint& p, int x, int xbar) { return x == xbar ? 1.0 / p.e_denominator(x) : 0.0; }

double r_me(const NuisancePoint& p, int z) { return p.m[z][0] * p.e(0) + p.m[z][1] * p.e(1); }

double nu_meq(const NuisancePoint& p, int x) { return r_me(p, 0) * p.q(0, x) + r_me(p, 1) * p.q(1, x); }

double s_mq(const NuisancePoint& p, int x, int xbar) {
  return p.m[0][x] * p.q(0, xbar) + p.m[1][x] * p.q(1, xbar);
}

NuisanceSet::NuisanceSet(OutcomeFn m, PropensityFn e1, MediatorFn q1, double floor)
    : m_(std::move(m)), e1_(std::move(e1)), q1_(std::move(q1)), floor_(floor) {
  if (!(floor > 0.0 && floor < 0.5)) throw std::invalid_argument("floor must lie in (0, 0.5)");
}

NuisancePoint NuisanceSet::at(std::span<const double> c) const {
  NuisancePoint p;
  p.floor = floor_;
  for (int z = 0; z < 2; ++z) {
    for (int x = 0; x < 2; ++x) p.m[z][x] = m_(z, x, c);
  }
  p.e1 = p.e1_frozen = e1_(c);
  for (int x = 0; x < 2; ++x) p.q1[x] = p.q1_frozen[x] = q1_(x, c);
  if (noise_ && noise_->active()) {
    for (int z = 0; z < 2; ++z) {
      for (int x = 0; x < 2; ++x) p.m[z][x] = noise_->perturb_mean(p.m[z][x], kM, z, x, c);
    }
    p.e1 = noise_->perturb_probability(p.e1, kE, 1, 0, c);
    for (int x = 0; x < 2; ++x) p.q1[x] = noise_->perturb_probability(p.q1[x], kQ, 1, x, c);
  }
  return p;
}

NuisanceSet NuisanceSet::with_noise(const NoiseSpec& spec) const {
  spec.validate();
  NuisanceSet out = *this;
  if (spec.active()) out.noise_ = spec;
  return out;
}

NuisanceSet NuisanceSet::with_floor(double floor) const {
  NuisanceSet out(m_, e1_, q1_, floor);
  out.noise_ = noise_;
  return out;
}

RNuisanceSet::RNuisanceSet(CovariateFn e_x, CovariateFn m_z, ArmFn e_z, ArmFn m_y)
    : e_x_(std::move(e_x)), m_z_(std::move(m_z)), e_z_(std::move(e_z)), m_y_(std::move(m_y)) {}

double RNuisanceSet::e_x(std::span<const double> c) const {
  const double v = e_x_(c);
  return noise_ ? noise_->perturb_probability(v, kEX, 1, 0, c) : v;
}

double RNuisanceSet::m_z(std::span<const double> c) const {
  const double v = m_z_(c);
  return noise_ ? noise_->perturb_mean(v, kMZ, 0, 0, c) : v;
}

double RNuisanceSet::e_z(int x, std::span<const double> c) const {
  const double v = e_z_(x, c);
  return noise_ ? noise_->perturb_probability(v, kEZ, 1, x, c) : v;
}

double RNuisanceSet::m_y(int x, std::span<const double> c) const {
  const double v = m_y_(x, c);
  return noise_ ? noise_->perturb_mean(v, kMY, 0, x, c) : v;
}

RNuisanceSet RNuisanceSet::with_noise(const NoiseSpec& spec) const {
  spec.validate();
  RNuisanceSet out = *this;
  if (spec.active()) out.noise_ = spec;
  return out;
}

RowMatrix arm_features(std::span<const int> x, const RowMatrix& c) {
  RowMatrix f(c.rows(), c.cols() + 1);
  for (Eigen::Index i = 0; i < c.rows(); ++i) f(i, 0) = x[static_cast<std::size_t>(i)];
  f.rightCols(c.cols()) = c;
  return f;
}

RowMatrix outcome_features(std::span<const int> z, std::span<const int> x, const RowMatrix& c) {
  RowMatrix f(c.rows(), c.cols() + 2);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    f(i, 0) = z[static_cast<std::size_t>(i)];
    f(i, 1) = x[static_cast<std::size_t>(i)];
  }
  f.rightCols(c.cols()) = c;
  return f;
}

NuisanceSet fit_fd_nuisances(const SampleTable& train, const LearnerConfig& config, const NuisanceOptions& options) {
  config.validate();
  auto m = std::make_shared<const FittedLearner>(with_name("m", [&] {
    return fit_regressor(outcome_features(train.z(), train.x(), train.c()), train.y(), std::nullopt,
                         config.for_regression().with_seed(derive_seed(config.seed, {kM})));
  }));
  auto e = std::make_shared<const FittedLearner>(with_name("e", [&] {
    return fit_classifier(train.c(), train.x(), config.for_classification().with_seed(derive_seed(config.seed, {kE})));
  }));

  NuisanceSet::MediatorFn q1;
  if (options.per_arm_q) {
    std::array<std::shared_ptr<const FittedLearner>, 2> arms;
    for (int arm = 0; arm < 2; ++arm) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < train.rows(); ++i) {
        if (train.x()[i] == arm) rows.push_back(i);
      }
      const std::string name = "q(.|x=" + std::to_string(arm) + ")";
      arms[static_cast<std::size_t>(arm)] = std::make_shared<const FittedLearner>(with_name(name.c_str(), [&] {
        if (rows.empty()) throw FitError("no rows in treatment arm");
        const SampleTable part = train.subset(rows);
        return fit_classifier(part.c(), part.z(),
                              config.for_classification().with_seed(
                                  derive_seed(config.seed, {kQ, static_cast<std::uint64_t>(arm)})));
      }));
    }
    q1 = [arms](int x, std::span<const double> c) { return arms[static_cast<std::size_t>(x)]->predict(c); };
  } else {
    auto q = std::make_shared<const FittedLearner>(with_name("q", [&] {
      return fit_classifier(arm_features(train.x(), train.c()), train.z(),
                            config.for_classification().with_seed(derive_seed(config.seed, {kQ})));
    }));
    q1 = [q](int x, std::span<const double> c) { return q->predict(prepend({static_cast<double>(x)}, c)); };
  }

  return NuisanceSet(
      [m](int z, int x, std::span<const double> c) {
        return m->predict(prepend({static_cast<double>(z), static_cast<double>(x)}, c));
      },
      [e](std::span<const double> c) { return e->predict(c); }, std::move(q1), options.floor);
}

RNuisanceSet fit_r_nuisances(const SampleTable& train, const LearnerConfig& config) {
  config.validate();
  const LearnerConfig cls = config.for_classification();
  const LearnerConfig reg = config.for_regression();

  auto e_x = std::make_shared<const FittedLearner>(with_name("e_X", [&] {
    return fit_classifier(train.c(), train.x(), cls.with_seed(derive_seed(config.seed, {kEX})));
  }));
  auto m_z = std::make_shared<const FittedLearner>(with_name("m_Z", [&] {
    return fit_classifier(train.c(), train.z(), cls.with_seed(derive_seed(config.seed, {kMZ})));
  }));
  const RowMatrix xc = arm_features(train.x(), train.c());
  auto e_z = std::make_shared<const FittedLearner>(with_name("e_Z", [&] {
    return fit_classifier(xc, train.z(), cls.with_seed(derive_seed(config.seed, {kEZ})));
  }));
  auto m_y = std::make_shared<const FittedLearner>(with_name("m_Y", [&] {
    return fit_regressor(xc, train.y(), std::nullopt, reg.with_seed(derive_seed(config.seed, {kMY})));
  }));

  return RNuisanceSet([e_x](std::span<const double> c) { return e_x->predict(c); },
                      [m_z](std::span<const double> c) { return m_z->predict(c); },
                      [e_z](int x, std::span<const double> c) {
                        return e_z->predict(prepend({static_cast<double>(x)}, c));
                      },
                      [m_y](int x, std::span<const double> c) {
                        return m_y->predict(prepend({static_cast<double>(x)}, c));
                      });
}

CrossFitNuisances fit_cross_nuisances(const SampleTable& data, const LearnerConfig& config,
                                      const NuisanceOptions& options, std::uint64_t fold_seed) {
  CrossFitNuisances out;
  out.plan = make_folds(data.rows(), 2, fold_seed);
  for (int k = 0; k < 2; ++k) {
    const SampleTable train = data.subset(out.plan.rows_in(k));
    out.sets.push_back(
        fit_fd_nuisances(train, config.with_seed(derive_seed(config.seed, {fold_seed, std::uint64_t(k)})), options));
  }
  return out;
}

CrossFitNuisances with_noise(const CrossFitNuisances& cross, const NoiseSpec& spec) {
  CrossFitNuisances out{cross.plan, {}};
  for (std::size_t k = 0; k < cross.sets.size(); ++k) {
    NoiseSpec s = spec;
    s.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(k)});
    out.sets.push_back(cross.sets[k].with_noise(s));
  }
  return out;
}

}  // namespace fdcate
