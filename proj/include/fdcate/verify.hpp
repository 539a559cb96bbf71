#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdcate/fd_dr.hpp"

namespace fdcate {

struct VerifyCheck {
  std::string suite;
  std::string name;
  double value = 0.0;      // max deviation, or the statistic named in `detail`
  double tolerance = 0.0;  // pass iff value < tolerance, unless `detail` says otherwise
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  int instances = 50;
  std::size_t max_support = 8;
  int pseudo_g_points = 100000;
  /// Instances used for the bias-scaling check and the perturbation size.
  int scaling_instances = 20;
  double scaling_eps = 0.02;
  /// Floor used by every pseudo-outcome check. Discrete tables and their
  /// corruptions stay in [0.02, 0.98], so it never binds.
  double floor = 0.01;
  /// Pseudo-outcome under test; defaults to the library implementation.
  FdpoFn fdpo = [](const NuisancePoint& p, int x, int z, double y, int xbar) { return fdcate::fdpo(p, x, z, y, xbar); };
};

/// Suites: all, fdpo, pseudo-g, ple, expressiveness. Throws std::invalid_argument on an unknown suite.
VerifyReport verify(const std::string& suite, const VerifyOptions& options = {});

/// Individual suites, exposed for the acceptance tests.
std::vector<VerifyCheck> verify_fdpo(const VerifyOptions& options);
std::vector<VerifyCheck> verify_pseudo_g(const VerifyOptions& options);
std::vector<VerifyCheck> verify_ple(const VerifyOptions& options);
std::vector<VerifyCheck> verify_expressiveness(const VerifyOptions& options);

/// min and max over instances of |bias(eps)| / |bias(eps/2)|, with |.| the L2
/// norm over (c, xbar) of the conditional pseudo-outcome bias when m, e and q
/// are all perturbed.
struct ScalingResult {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};
ScalingResult bias_scaling(const VerifyOptions& options);

}  // namespace fdcate
