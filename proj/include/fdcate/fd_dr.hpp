#pragma once

#include <functional>
#include <vector>

#include "fdcate/cate_model.hpp"
#include "fdcate/discrete.hpp"
#include "fdcate/nuisance.hpp"
#include "fdcate/sample_table.hpp"

namespace fdcate {

/// Front-door pseudo-outcome for arm xbar:
///   xi (Y - m(Z,X,C)) + pi (r_me(Z,C) - nu_meq(X,C)) + s_mq(X,C).
double fdpo(const NuisancePoint& p, int x, int z, double y, int xbar);
double fdpo(const Observation& row, const NuisanceSet& ns, int xbar);

/// Signature of a pseudo-outcome; lets checks run against alternative implementations.
using FdpoFn = std::function<double(const NuisancePoint&, int x, int z, double y, int xbar)>;

struct FdpoRecord {
  std::size_t row = 0;
  int fold = 0;  // fold whose nuisances produced the values
  double phi1 = 0.0;
  double phi0 = 0.0;
  double difference() const { return phi1 - phi0; }
};

/// Pseudo-outcomes for every row, each evaluated with the nuisance set fit on the other fold.
std::vector<FdpoRecord> fdpo_records(const SampleTable& data, const CrossFitNuisances& cross);

struct FdDrOptions {
  bool swap = true;
  double penalty = 1e-6;
};

/// Regresses phi1 - phi0 on C (linear basis, ridge) on the fold not used for
/// the nuisances; with `swap`, repeats with roles exchanged and averages.
CateModel fd_dr_fit(const SampleTable& data, const CrossFitNuisances& cross, const FdDrOptions& options = {});

/// Fits two-fold nuisances and then the DR regression.
CateModel fd_dr_fit(const SampleTable& data, const LearnerConfig& config, const NuisanceOptions& nuisance,
                    std::uint64_t seed, const FdDrOptions& options = {});

/// Bias of the pseudo-outcome at one covariate value split into its three
/// product terms, along with the directly computed bias
/// E[phi(eta_hat) - phi(eta) | c] under the law given by `truth`.
struct BiasTerms {
  double mediator = 0.0;    // E[(m_hat - m)(xi - xi_hat)]
  double treatment = 0.0;   // E[(pi_hat - pi)(nu_{m_hat q e_hat} - nu_{m_hat q_hat e_hat})]
  double cross = 0.0;       // sum_{z,x} m_hat (q(z|xbar) - q_hat(z|xbar)) (e_hat(x) - e(x))
  double direct = 0.0;
  double sum() const { return mediator + treatment + cross; }
};

BiasTerms dr_bias_decomposition(const NuisancePoint& truth, const NuisancePoint& hat, int xbar);

/// Marginal version over a discrete instance: mass-weighted sums of the
/// per-point terms. `hat` holds one point per support value.
BiasTerms dr_bias_decomposition(const DiscreteInstance& inst, const std::vector<NuisancePoint>& hat, int xbar,
                                double floor);

}  // namespace fdcate
