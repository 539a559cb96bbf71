#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fdcate/nuisance.hpp"

namespace fdcate {

/// A front-door law with finitely supported C and exact nuisance tables.
/// Y given (z, x, c) has mean m[c][z][x]; its noise never matters for the
/// expectations computed from the tables.
struct DiscreteInstance {
  std::vector<double> mass;                                   // Pr(C = c)
  std::vector<double> e1;                                     // Pr(X=1 | c)
  std::vector<std::array<double, 2>> q1;                      // q1[c][x] = Pr(Z=1 | x, c)
  std::vector<std::array<std::array<double, 2>, 2>> m;        // m[c][z][x]

  std::size_t support() const { return mass.size(); }
  /// Throws std::invalid_argument unless masses sum to 1 and all
  /// probabilities lie strictly inside (0, 1).
  void validate() const;
};

/// Random instance: Dirichlet(1) masses, probabilities uniform on [0.1, 0.9],
/// outcome means uniform on [-2, 2].
DiscreteInstance make_discrete_instance(std::uint64_t seed, std::size_t support_size);

/// True nuisances at support point c, packaged for the estimator functionals.
NuisancePoint instance_point(const DiscreteInstance& inst, std::size_t c, double floor);
std::vector<NuisancePoint> instance_points(const DiscreteInstance& inst, double floor);

/// Which nuisances to corrupt.
struct Corruption {
  bool m = false;
  bool e = false;
  bool q = false;
};

/// Adds eps * s to every selected table entry, with fixed signed directions s
/// of magnitude in [0.5, 1] drawn from `seed`; probabilities are clipped to
/// [0.02, 0.98]. Frozen copies follow the corrupted values.
std::vector<NuisancePoint> corrupt_points(const std::vector<NuisancePoint>& points, double eps, Corruption which,
                                          std::uint64_t seed);

/// Instance with the same masses whose tables are the numerator values of `points`.
DiscreteInstance instance_from_points(const DiscreteInstance& inst, const std::vector<NuisancePoint>& points);

}  // namespace fdcate
