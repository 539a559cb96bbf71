#include "fdcate/fd_r.hpp"

#include <stdexcept>

#include "fdcate/random.hpp"

namespace fdcate {

double pseudo_g(int x, double e_tilde, double g0, double g1) {
  return (1.0 - e_tilde) * g0 + e_tilde * g1 + (static_cast<double>(x) - e_tilde) * (g1 - g0);
}

double gamma_plugin(double e_hat, double g0, double g1) { return e_hat * g1 + (1.0 - e_hat) * g0; }

namespace {

double eval_g(const LinearCate& g, int x, std::span<const double> c) {
  std::vector<double> input;
  input.reserve(c.size() + 1);
  input.push_back(static_cast<double>(x));
  input.insert(input.end(), c.begin(), c.end());
  return g(input);
}

}  // namespace

FdRModel::FdRModel(std::vector<FdRStage> stages, Provenance provenance)
    : stages_(std::move(stages)), provenance_(std::move(provenance)) {
  if (stages_.empty()) throw std::invalid_argument("FD-R model needs at least one stage");
}

double FdRModel::b(std::span<const double> c) const {
  double s = 0.0;
  for (const auto& st : stages_) s += st.b(c);
  return s / static_cast<double>(stages_.size());
}

double FdRModel::g(int x, std::span<const double> c) const {
  double s = 0.0;
  for (const auto& st : stages_) s += eval_g(st.g, x, c);
  return s / static_cast<double>(stages_.size());
}

double FdRModel::gamma(std::span<const double> c) const {
  double s = 0.0;
  for (const auto& st : stages_) s += st.gamma(c);
  return s / static_cast<double>(stages_.size());
}

double FdRModel::tau(std::span<const double> c) const {
  double s = 0.0;
  for (const auto& st : stages_) s += st.b(c) * st.gamma(c);
  return s / static_cast<double>(stages_.size());
}

CateModel FdRModel::as_cate() const {
  const FdRModel self = *this;
  return CateModel(EstimatorKind::r, [self](std::span<const double> c) { return self.tau(c); }, provenance_);
}

FdRStage fd_r_stage(const RNuisanceSet& nuisances, const SampleTable& d2, const SampleTable& d3,
                    const FdROptions& options) {
  FdRStage st;
  st.b = bdr_fit_b(d2, nuisances, options.penalty);
  st.g = bdr_fit_g(d2, nuisances, options.penalty);

  std::vector<double> zeta(d3.rows());
  for (std::size_t i = 0; i < d3.rows(); ++i) {
    const auto c = d3.covariates(i);
    zeta[i] = pseudo_g(d3.x()[i], nuisances.e_x(c), eval_g(st.g, 0, c), eval_g(st.g, 1, c));
  }
  st.gamma = fit_linear_cate(BasisKind::linear, d3.c(), zeta, std::nullopt, options.gamma_penalty);
  return st;
}

FdRNuisances fit_fd_r_nuisances(const SampleTable& data, const LearnerConfig& config, std::uint64_t seed,
                                bool rotate) {
  if (data.rows() < 6) throw std::invalid_argument("FD-R needs at least 6 rows");
  FdRNuisances out;
  out.plan = make_folds(data.rows(), 3, seed);
  out.config = config;
  for (int k = 0; k < 3; ++k) out.folds.push_back(data.subset(out.plan.rows_in(k)));
  for (int r = 0; r < (rotate ? 3 : 1); ++r) {
    const LearnerConfig cfg = config.with_seed(derive_seed(config.seed, {seed, static_cast<std::uint64_t>(r)}));
    out.sets.push_back(fit_r_nuisances(out.folds[static_cast<std::size_t>(r)], cfg));
  }
  return out;
}

FdRModel fd_r_fit(const FdRNuisances& nuisances, const FdROptions& options) {
  std::vector<FdRStage> stages;
  for (std::size_t r = 0; r < nuisances.sets.size(); ++r) {
    RNuisanceSet rn = nuisances.sets[r];
    if (options.noise) {
      NoiseSpec spec = *options.noise;
      spec.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(r)});
      rn = rn.with_noise(spec);
    }
    const std::size_t f2 = (r + 1) % 3, f3 = (r + 2) % 3;
    FdRStage st = fd_r_stage(rn, nuisances.folds[f2], nuisances.folds[f3], options);
    st.nuisance_fold = static_cast<int>(r);
    st.component_fold = static_cast<int>(f2);
    st.gamma_fold = static_cast<int>(f3);
    stages.push_back(std::move(st));
  }
  Provenance prov;
  prov.nuisance_config = nuisances.config;
  prov.final_penalty = options.gamma_penalty;
  prov.folds = 3;
  prov.fold_seed = nuisances.plan.seed;
  prov.cross_fit_averaged = nuisances.sets.size() > 1;
  return FdRModel(std::move(stages), prov);
}

FdRModel fd_r_fit(const SampleTable& data, const LearnerConfig& config, std::uint64_t seed, const FdROptions& options) {
  return fd_r_fit(fit_fd_r_nuisances(data, config, seed, options.rotate), options);
}

}  // namespace fdcate
