#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fdcate/discrete.hpp"

/// Exact-enumeration reference values on discrete instances. Everything here is
/// written directly against the instance tables and shares no evaluation code
/// with the estimators, so agreement between the two is evidence rather than
/// a tautology.
namespace fdcate::oracle {

/// tau_xbar(c) = sum_{z,x} q(z|xbar,c) e(x|c) m(z,x,c), per support point.
std::vector<double> enum_tau_arm(const DiscreteInstance& inst, int xbar);
/// tau(c) = tau_1(c) - tau_0(c).
std::vector<double> enum_tau(const DiscreteInstance& inst);

/// E[f(X, Z, Y) | C=c] when Y enters linearly: Y is replaced by m(Z,X,c).
double enum_conditional_mean(const DiscreteInstance& inst, std::size_t c,
                             const std::function<double(int x, int z, double y)>& f);
/// E[f(X) | C=c].
double enum_conditional_mean_x(const DiscreteInstance& inst, std::size_t c, const std::function<double(int x)>& f);
/// sum_c Pr(c) v[c].
double marginal(const DiscreteInstance& inst, const std::vector<double>& per_c);

/// The four expectations that coincide for the front-door functional of arm xbar:
/// E[xi Y], E[pi r_me(Z,C)], E[s_mq(X,C)], E[tau_xbar(C)].
struct Expressiveness {
  double xi_y = 0.0;
  double pi_r = 0.0;
  double s_mq = 0.0;
  double tau = 0.0;
  double max_deviation() const;
};
Expressiveness enum_expressiveness(const DiscreteInstance& inst, int xbar);

/// Partial-linear-model components and their residual moments.
struct PleReport {
  std::vector<double> a, b, gamma;                 // per c
  std::vector<std::array<double, 2>> f, g;         // per c, per x
  double max_eps_x = 0.0;   // max_c |E[X - e(1|c) | c]|
  double max_eps_z = 0.0;   // max_{x,c} |E[Z - a - X b | x, c]|
  double max_eps_y = 0.0;   // max_{z,x,c} |E[Y - f - Z g | z, x, c]|
  double max_tau_gap = 0.0; // max_c |tau(c) - b(c) gamma(c)|
  double max_moment() const;
};
PleReport enum_ple(const DiscreteInstance& inst);

/// Plug-in gamma error split as (g1 - g0)(e_hat - e) + e_hat (g_hat1 - g1) + (1 - e_hat)(g_hat0 - g0).
struct GammaDecomposition {
  std::vector<double> direct;                 // gamma_plug(c) - gamma(c)
  std::vector<std::array<double, 3>> terms;   // per c
  double max_deviation() const;
};
GammaDecomposition enum_gamma_decomposition(const DiscreteInstance& inst, const std::vector<double>& e_hat,
                                            const std::vector<std::array<double, 2>>& g_hat);

/// g(x, c) = m(1,x,c) - m(0,x,c) and gamma(c) = sum_x e(x|c) g(x,c).
std::array<double, 2> enum_g(const DiscreteInstance& inst, std::size_t c);
double enum_gamma(const DiscreteInstance& inst, std::size_t c);

/// E[phi_xbar(eta_hat) - phi_xbar(eta) | c] per support point, where the
/// pseudo-outcome is evaluated from tables with denominators floored at `floor`.
std::vector<double> enum_fdpo_bias(const DiscreteInstance& truth, const DiscreteInstance& hat, int xbar,
                                   double floor);

}  // namespace fdcate::oracle
