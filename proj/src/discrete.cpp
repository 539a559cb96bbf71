#include "fdcate/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fdcate/random.hpp"

namespace fdcate {

void DiscreteInstance::validate() const {
  const std::size_t k = mass.size();
  if (k == 0) throw std::invalid_argument("discrete instance has empty support");
  if (e1.size() != k || q1.size() != k || m.size() != k) throw std::invalid_argument("discrete tables differ in size");
  double total = 0.0;
  for (double w : mass) {
    if (!(w > 0.0)) throw std::invalid_argument("support masses must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("support masses must sum to 1");
  auto inside = [](double p) { return p > 0.0 && p < 1.0; };
  for (std::size_t c = 0; c < k; ++c) {
    if (!inside(e1[c]) || !inside(q1[c][0]) || !inside(q1[c][1])) {
      throw std::invalid_argument("discrete probabilities must lie strictly inside (0, 1)");
    }
  }
}

DiscreteInstance make_discrete_instance(std::uint64_t seed, std::size_t support_size) {
  if (support_size < 1) throw std::invalid_argument("support size must be at least 1");
  std::mt19937_64 rng(derive_seed(seed, {0xd15c}));
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::uniform_real_distribution<double> prob(0.1, 0.9);
  std::uniform_real_distribution<double> mean(-2.0, 2.0);

  DiscreteInstance inst;
  double total = 0.0;
  for (std::size_t c = 0; c < support_size; ++c) {
    const double g = std::max(gamma(rng), 1e-3);
    inst.mass.push_back(g);
    total += g;
  }
  for (double& w : inst.mass) w /= total;
  for (std::size_t c = 0; c < support_size; ++c) {
    inst.e1.push_back(prob(rng));
    inst.q1.push_back({prob(rng), prob(rng)});
    std::array<std::array<double, 2>, 2> mc{};
    for (auto& row : mc) {
      for (double& v : row) v = mean(rng);
    }
    inst.m.push_back(mc);
  }
  return inst;
}

NuisancePoint instance_point(const DiscreteInstance& inst, std::size_t c, double floor) {
  return NuisancePoint::make(inst.m[c], inst.e1[c], inst.q1[c], floor);
}

std::vector<NuisancePoint> instance_points(const DiscreteInstance& inst, double floor) {
  std::vector<NuisancePoint> out;
  for (std::size_t c = 0; c < inst.support(); ++c) out.push_back(instance_point(inst, c, floor));
  return out;
}

std::vector<NuisancePoint> corrupt_points(const std::vector<NuisancePoint>& points, double eps, Corruption which,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(0.5, 1.0);
  std::bernoulli_distribution sign(0.5);
  auto direction = [&] { return (sign(rng) ? 1.0 : -1.0) * magnitude(rng); };
  auto clip = [](double p) { return std::clamp(p, 0.02, 0.98); };

  std::vector<NuisancePoint> out = points;
  for (NuisancePoint& p : out) {
    // Directions are always drawn so that a given seed fixes them regardless of `which`.
    std::array<std::array<double, 2>, 2> dm{};
    for (auto& row : dm) {
      for (double& v : row) v = direction();
    }
    const double de = direction();
    const std::array<double, 2> dq{direction(), direction()};
    if (which.m) {
      for (int z = 0; z < 2; ++z) {
        for (int x = 0; x < 2; ++x) p.m[z][x] += eps * dm[z][x];
      }
    }
    if (which.e) p.e1 = p.e1_frozen = clip(p.e1 + eps * de);
    if (which.q) {
      for (int x = 0; x < 2; ++x) p.q1[x] = p.q1_frozen[x] = clip(p.q1[x] + eps * dq[x]);
    }
  }
  return out;
}

DiscreteInstance instance_from_points(const DiscreteInstance& inst, const std::vector<NuisancePoint>& points) {
  if (points.size() != inst.support()) throw std::invalid_argument("one point per support value is required");
  DiscreteInstance out = inst;
  for (std::size_t c = 0; c < points.size(); ++c) {
    out.e1[c] = points[c].e1;
    out.q1[c] = points[c].q1;
    out.m[c] = points[c].m;
  }
  return out;
}

}  // namespace fdcate
