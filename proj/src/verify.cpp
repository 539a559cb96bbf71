#include "fdcate/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fdcate/discrete.hpp"
#include "fdcate/fd_r.hpp"
#include "fdcate/oracle.hpp"
#include "fdcate/plugin.hpp"
#include "fdcate/random.hpp"

namespace fdcate {

namespace {

std::vector<DiscreteInstance> instances(const VerifyOptions& o, int count, std::uint64_t tag) {
  std::vector<DiscreteInstance> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t support = 1 + static_cast<std::size_t>(i) % o.max_support;
    out.push_back(make_discrete_instance(derive_seed(o.seed, {tag, static_cast<std::uint64_t>(i)}), support));
  }
  return out;
}

VerifyCheck below(const std::string& suite, const std::string& name, double value, double tol,
                  const std::string& detail = "max abs deviation") {
  return {suite, name, value, tol, value < tol, detail};
}

// E[phi(hat) - phi(truth) | c] for every c, enumerated over the true law.
std::vector<double> direct_bias(const DiscreteInstance& inst, const std::vector<NuisancePoint>& truth,
                                const std::vector<NuisancePoint>& hat, int xbar, const FdpoFn& fn) {
  std::vector<double> out;
  for (std::size_t c = 0; c < inst.support(); ++c) {
    out.push_back(oracle::enum_conditional_mean(inst, c, [&](int x, int z, double y) {
      return fn(hat[c], x, z, y, xbar) - fn(truth[c], x, z, y, xbar);
    }));
  }
  return out;
}

double bias_norm(const DiscreteInstance& inst, double eps, std::uint64_t seed, const VerifyOptions& o) {
  const auto truth = instance_points(inst, o.floor);
  const auto hat = corrupt_points(truth, eps, {true, true, true}, seed);
  double ss = 0.0;
  for (int xbar = 0; xbar < 2; ++xbar) {
    for (double b : direct_bias(inst, truth, hat, xbar, o.fdpo)) ss += b * b;
  }
  return std::sqrt(ss);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

ScalingResult bias_scaling(const VerifyOptions& o) {
  ScalingResult r{std::numeric_limits<double>::infinity(), 0.0};
  const auto insts = instances(o, o.scaling_instances, 0x5ca1e);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const std::uint64_t dir_seed = derive_seed(o.seed, {0xd12, i});
    const double full = bias_norm(insts[i], o.scaling_eps, dir_seed, o);
    const double half = bias_norm(insts[i], o.scaling_eps / 2.0, dir_seed, o);
    const double ratio = half > 0.0 ? full / half : std::numeric_limits<double>::infinity();
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  return r;
}

std::vector<VerifyCheck> verify_fdpo(const VerifyOptions& o) {
  const std::string suite = "fdpo";
  double consistency = 0.0, decomposition = 0.0, decomposition_oracle = 0.0, dr_q = 0.0, dr_me = 0.0;
  const auto insts = instances(o, o.instances, 0xf0);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const DiscreteInstance& inst = insts[i];
    const auto truth = instance_points(inst, o.floor);
    const std::uint64_t s = derive_seed(o.seed, {0xc0, i});
    const auto all_bad = corrupt_points(truth, 0.1, {true, true, true}, s);
    const auto me_bad = corrupt_points(truth, 0.1, {true, true, false}, s);
    const auto q_bad = corrupt_points(truth, 0.1, {false, false, true}, s);
    for (int xbar = 0; xbar < 2; ++xbar) {
      const auto tau = oracle::enum_tau_arm(inst, xbar);
      for (std::size_t c = 0; c < inst.support(); ++c) {
        const double mean_phi = oracle::enum_conditional_mean(
            inst, c, [&](int x, int z, double y) { return o.fdpo(truth[c], x, z, y, xbar); });
        consistency = std::max(consistency, std::abs(mean_phi - tau[c]));
      }
      const auto direct = direct_bias(inst, truth, all_bad, xbar, o.fdpo);
      const auto independent = oracle::enum_fdpo_bias(inst, instance_from_points(inst, all_bad), xbar, o.floor);
      for (std::size_t c = 0; c < inst.support(); ++c) {
        const BiasTerms t = dr_bias_decomposition(truth[c], all_bad[c], xbar);
        decomposition = std::max(decomposition, std::abs(t.sum() - direct[c]));
        decomposition_oracle = std::max(decomposition_oracle, std::abs(t.sum() - independent[c]));
      }
      for (double b : direct_bias(inst, truth, me_bad, xbar, o.fdpo)) dr_q = std::max(dr_q, std::abs(b));
      for (double b : direct_bias(inst, truth, q_bad, xbar, o.fdpo)) dr_me = std::max(dr_me, std::abs(b));
    }
  }
  std::vector<VerifyCheck> out;
  out.push_back(below(suite, "consistency: E[phi_xbar | c] = tau_xbar(c)", consistency, 1e-10));
  out.push_back(below(suite, "bias decomposition: three terms = direct bias", decomposition, 1e-10));
  out.push_back(
      below(suite, "bias decomposition: three terms = independently enumerated bias", decomposition_oracle, 1e-10));
  out.push_back(below(suite, "double robustness: q correct, m and e corrupted", dr_q, 1e-12, "max abs bias"));
  out.push_back(below(suite, "double robustness: m and e correct, q corrupted", dr_me, 1e-12, "max abs bias"));

  const ScalingResult sc = bias_scaling(o);
  std::ostringstream detail;
  detail << "bias ratio at eps vs eps/2 over " << o.scaling_instances << " instances, range [" << sc.min_ratio << ", "
         << sc.max_ratio << "], required within [3.5, 4.5]";
  out.push_back({suite, "second-order bias scaling", sc.max_ratio, 4.5,
                 sc.min_ratio >= 3.5 && sc.max_ratio <= 4.5, detail.str()});
  return out;
}

std::vector<VerifyCheck> verify_pseudo_g(const VerifyOptions& o) {
  const std::string suite = "pseudo-g";
  std::mt19937_64 rng(derive_seed(o.seed, {0x9e}));
  std::uniform_real_distribution<double> unit(0.0, 1.0), val(-2.0, 2.0);
  double identity = 0.0;
  for (int i = 0; i < o.pseudo_g_points; ++i) {
    const int x = unit(rng) < 0.5 ? 0 : 1;
    const double e = unit(rng), g0 = val(rng), g1 = val(rng);
    identity = std::max(identity, std::abs(pseudo_g(x, e, g0, g1) - (x == 1 ? g1 : g0)));
  }

  double correction = 0.0, insensitivity = 0.0, plug_sensitivity = 0.0;
  const auto insts = instances(o, o.instances, 0x9f);
  std::uniform_real_distribution<double> shift(-0.3, 0.3);
  for (const auto& inst : insts) {
    for (std::size_t c = 0; c < inst.support(); ++c) {
      const auto g = oracle::enum_g(inst, c);
      const double g_hat0 = g[0] + shift(rng), g_hat1 = g[1] + shift(rng);
      const double e_hat = std::clamp(inst.e1[c] + shift(rng), 0.02, 0.98);
      const double mean_zeta = oracle::enum_conditional_mean_x(
          inst, c, [&](int x) { return pseudo_g(x, e_hat, g_hat0, g_hat1); });
      const double expected = inst.e1[c] * (g_hat1 - g[1]) + (1.0 - inst.e1[c]) * (g_hat0 - g[0]);
      correction = std::max(correction, std::abs(mean_zeta - oracle::enum_gamma(inst, c) - expected));

      // Moving e_hat by 0.2 leaves every pseudo-outcome unchanged.
      const double e_moved = std::clamp(e_hat + 0.2, 0.0, 1.0);
      for (int x = 0; x < 2; ++x) {
        insensitivity = std::max(insensitivity, std::abs(pseudo_g(x, e_moved, g_hat0, g_hat1) -
                                                         pseudo_g(x, e_hat, g_hat0, g_hat1)));
      }
      plug_sensitivity = std::max(plug_sensitivity, std::abs(gamma_plugin(e_moved, g_hat0, g_hat1) -
                                                             gamma_plugin(e_hat, g_hat0, g_hat1)));
    }
  }
  std::vector<VerifyCheck> out;
  out.push_back(below(suite, "identity: zeta(x) = g(x) for binary x", identity, 1e-14));
  out.push_back(below(suite, "error correction: E[zeta|c] - gamma = e1 (g1_hat - g1) + e0 (g0_hat - g0)", correction,
                      1e-10));
  out.push_back(below(suite, "pseudo-outcome unchanged when e_hat moves", insensitivity, 1e-14));
  std::ostringstream detail;
  detail << "max change of the plug-in gamma when e_hat moves (informational, must be positive): " << plug_sensitivity;
  out.push_back({suite, "plug-in gamma responds to e_hat", plug_sensitivity, 0.0, plug_sensitivity > 0.0, detail.str()});
  return out;
}

std::vector<VerifyCheck> verify_ple(const VerifyOptions& o) {
  const std::string suite = "ple";
  double moments = 0.0, tau_gap = 0.0, gamma_dec = 0.0, gamma_lib = 0.0;
  const auto insts = instances(o, o.instances, 0x91e);
  std::mt19937_64 rng(derive_seed(o.seed, {0x91f}));
  std::uniform_real_distribution<double> shift(-0.3, 0.3);
  for (const auto& inst : insts) {
    const oracle::PleReport r = oracle::enum_ple(inst);
    moments = std::max({moments, r.max_eps_x, r.max_eps_z, r.max_eps_y});
    tau_gap = std::max(tau_gap, r.max_tau_gap);

    std::vector<double> e_hat;
    std::vector<std::array<double, 2>> g_hat;
    for (std::size_t c = 0; c < inst.support(); ++c) {
      const auto g = oracle::enum_g(inst, c);
      e_hat.push_back(std::clamp(inst.e1[c] + shift(rng), 0.02, 0.98));
      g_hat.push_back({g[0] + shift(rng), g[1] + shift(rng)});
    }
    const oracle::GammaDecomposition dec = oracle::enum_gamma_decomposition(inst, e_hat, g_hat);
    gamma_dec = std::max(gamma_dec, dec.max_deviation());
    for (std::size_t c = 0; c < inst.support(); ++c) {
      const double lib = gamma_plugin(e_hat[c], g_hat[c][0], g_hat[c][1]) - oracle::enum_gamma(inst, c);
      const auto& t = dec.terms[c];
      gamma_lib = std::max(gamma_lib, std::abs(lib - (t[0] + t[1] + t[2])));
    }
  }
  return {below(suite, "partial linear model residual moments", moments, 1e-12),
          below(suite, "tau(c) = b(c) gamma_g(c)", tau_gap, 1e-10),
          below(suite, "plug-in gamma decomposition (oracle)", gamma_dec, 1e-10),
          below(suite, "plug-in gamma decomposition (library gamma_plugin)", gamma_lib, 1e-10)};
}

std::vector<VerifyCheck> verify_expressiveness(const VerifyOptions& o) {
  const std::string suite = "expressiveness";
  double four_way = 0.0, functionals = 0.0, plugin = 0.0;
  const auto insts = instances(o, o.instances, 0xe1);
  for (const auto& inst : insts) {
    const auto pts = instance_points(inst, o.floor);
    const auto tau = oracle::enum_tau(inst);
    for (std::size_t c = 0; c < inst.support(); ++c) plugin = std::max(plugin, std::abs(plugin_tau(pts[c]) - tau[c]));
    for (int xbar = 0; xbar < 2; ++xbar) {
      const oracle::Expressiveness ex = oracle::enum_expressiveness(inst, xbar);
      four_way = std::max(four_way, ex.max_deviation());
      // The same expectations built from the library's functionals.
      std::vector<double> xi_y, pi_r, smq;
      for (std::size_t c = 0; c < inst.support(); ++c) {
        const NuisancePoint& p = pts[c];
        xi_y.push_back(oracle::enum_conditional_mean(inst, c, [&](int x, int z, double y) { return xi(p, z, x, xbar) * y; }));
        pi_r.push_back(oracle::enum_conditional_mean(inst, c, [&](int x, int z, double) { return pi(p, x, xbar) * r_me(p, z); }));
        smq.push_back(oracle::enum_conditional_mean_x(inst, c, [&](int x) { return s_mq(p, x, xbar); }));
      }
      for (double v : {oracle::marginal(inst, xi_y), oracle::marginal(inst, pi_r), oracle::marginal(inst, smq)}) {
        functionals = std::max(functionals, std::abs(v - ex.tau));
      }
    }
  }
  return {below(suite, "four-way equality (oracle)", four_way, 1e-10),
          below(suite, "library functionals match E[tau_xbar(C)]", functionals, 1e-10),
          below(suite, "plug-in of true nuisances = tau(c)", plugin, 1e-12)};
}

VerifyReport verify(const std::string& suite, const VerifyOptions& options) {
  VerifyReport report;
  auto add = [&](std::vector<VerifyCheck> v) { report.checks.insert(report.checks.end(), v.begin(), v.end()); };
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "fdpo") known = true, add(verify_fdpo(options));
  if (all || suite == "pseudo-g") known = true, add(verify_pseudo_g(options));
  if (all || suite == "ple") known = true, add(verify_ple(options));
  if (all || suite == "expressiveness") known = true, add(verify_expressiveness(options));
  if (!known) throw std::invalid_argument("unknown suite '" + suite + "' (expected all, fdpo, pseudo-g, ple or expressiveness)");
  return report;
}

}  // namespace fdcate
