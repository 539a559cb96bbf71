#pragma once

#include <optional>
#include <vector>

#include "fdcate/bd_r_learner.hpp"
#include "fdcate/cate_model.hpp"
#include "fdcate/nuisance.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

/// Pseudo-outcome for gamma(c) = E[g(X,C) | C=c]:
///   (1 - e) g0 + e g1 + (X - e)(g1 - g0).
/// For binary X it equals g(X, c) for every e.
double pseudo_g(int x, double e_tilde, double g0, double g1);

/// Plug-in gamma: e g1 + (1 - e) g0.
double gamma_plugin(double e_hat, double g0, double g1);

/// One fold-role assignment of the three-stage fit.
struct FdRStage {
  int nuisance_fold = 0;
  int component_fold = 1;
  int gamma_fold = 2;
  LinearCate b;      // over C
  LinearCate g;      // over (X, C)
  LinearCate gamma;  // over C
};

/// tau_hat(c) = b_hat(c) * gamma_hat(c), averaged over the fitted stages.
class FdRModel {
 public:
  explicit FdRModel(std::vector<FdRStage> stages, Provenance provenance = {});

  double b(std::span<const double> c) const;
  double g(int x, std::span<const double> c) const;
  double gamma(std::span<const double> c) const;
  double tau(std::span<const double> c) const;

  const std::vector<FdRStage>& stages() const { return stages_; }
  CateModel as_cate() const;

 private:
  std::vector<FdRStage> stages_;
  Provenance provenance_;
};

struct FdROptions {
  /// Average over the three cyclic fold-role assignments; otherwise use only
  /// (nuisances, components, gamma) = folds (0, 1, 2).
  bool rotate = true;
  double penalty = 1e-6;
  double gamma_penalty = 1e-6;
  std::optional<NoiseSpec> noise;
};

/// Three-way split with the R-nuisances already fit: sets[r] is fit on
/// folds[r] and used by rotation r.
struct FdRNuisances {
  FoldPlan plan;
  std::vector<SampleTable> folds;
  std::vector<RNuisanceSet> sets;
  LearnerConfig config;
};

/// Fits the R-nuisances of each rotation (one set when `rotate` is off).
FdRNuisances fit_fd_r_nuisances(const SampleTable& data, const LearnerConfig& config, std::uint64_t seed,
                                bool rotate = true);

/// Stages 2-3 on prepared nuisances; `options.noise`, if set, is applied to each set.
FdRModel fd_r_fit(const FdRNuisances& nuisances, const FdROptions& options = {});

/// Three-way split: R-nuisances on D1; b and g by BD-R on D2; gamma by
/// regressing the pseudo-outcome on C over D3.
FdRModel fd_r_fit(const SampleTable& data, const LearnerConfig& config, std::uint64_t seed,
                  const FdROptions& options = {});

/// b, g on `d2` and gamma on `d3` given R-nuisances (noise already applied).
FdRStage fd_r_stage(const RNuisanceSet& nuisances, const SampleTable& d2, const SampleTable& d3,
                    const FdROptions& options);

}  // namespace fdcate
