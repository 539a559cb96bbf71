#include "fdcate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdcate::oracle {

namespace {

double px(const DiscreteInstance& inst, std::size_t c, int x) { return x == 1 ? inst.e1[c] : 1.0 - inst.e1[c]; }

double pz(const DiscreteInstance& inst, std::size_t c, int z, int x) {
  return z == 1 ? inst.q1[c][static_cast<std::size_t>(x)] : 1.0 - inst.q1[c][static_cast<std::size_t>(x)];
}

double my(const DiscreteInstance& inst, std::size_t c, int z, int x) {
  return inst.m[c][static_cast<std::size_t>(z)][static_cast<std::size_t>(x)];
}

// Pseudo-outcome written out term by term from the tables.
double phi(const DiscreteInstance& t, std::size_t c, int x, int z, double y, int xbar, double floor) {
  const double qden = std::max(floor, pz(t, c, z, x));
  const double eden = std::max(floor, px(t, c, x));
  const double weight_z = pz(t, c, z, xbar) / qden;
  const double weight_x = x == xbar ? 1.0 / eden : 0.0;
  double r_z = 0.0;
  for (int xp = 0; xp < 2; ++xp) r_z += my(t, c, z, xp) * px(t, c, xp);
  double nu_x = 0.0;
  for (int zp = 0; zp < 2; ++zp) {
    double r = 0.0;
    for (int xp = 0; xp < 2; ++xp) r += my(t, c, zp, xp) * px(t, c, xp);
    nu_x += r * pz(t, c, zp, x);
  }
  double s = 0.0;
  for (int zp = 0; zp < 2; ++zp) s += my(t, c, zp, x) * pz(t, c, zp, xbar);
  return weight_z * (y - my(t, c, z, x)) + weight_x * (r_z - nu_x) + s;
}

}  // namespace

std::vector<double> enum_tau_arm(const DiscreteInstance& inst, int xbar) {
  std::vector<double> out(inst.support(), 0.0);
  for (std::size_t c = 0; c < inst.support(); ++c) {
    for (int z = 0; z < 2; ++z) {
      for (int x = 0; x < 2; ++x) out[c] += pz(inst, c, z, xbar) * px(inst, c, x) * my(inst, c, z, x);
    }
  }
  return out;
}

std::vector<double> enum_tau(const DiscreteInstance& inst) {
  std::vector<double> t1 = enum_tau_arm(inst, 1);
  const std::vector<double> t0 = enum_tau_arm(inst, 0);
  for (std::size_t c = 0; c < t1.size(); ++c) t1[c] -= t0[c];
  return t1;
}

double enum_conditional_mean(const DiscreteInstance& inst, std::size_t c,
                             const std::function<double(int x, int z, double y)>& f) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) s += px(inst, c, x) * pz(inst, c, z, x) * f(x, z, my(inst, c, z, x));
  }
  return s;
}

double enum_conditional_mean_x(const DiscreteInstance& inst, std::size_t c, const std::function<double(int x)>& f) {
  return px(inst, c, 0) * f(0) + px(inst, c, 1) * f(1);
}

double marginal(const DiscreteInstance& inst, const std::vector<double>& per_c) {
  if (per_c.size() != inst.support()) throw std::invalid_argument("per-support vector has the wrong length");
  double s = 0.0;
  for (std::size_t c = 0; c < per_c.size(); ++c) s += inst.mass[c] * per_c[c];
  return s;
}

double Expressiveness::max_deviation() const {
  const std::array<double, 4> v{xi_y, pi_r, s_mq, tau};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

Expressiveness enum_expressiveness(const DiscreteInstance& inst, int xbar) {
  Expressiveness out;
  const std::vector<double> tau = enum_tau_arm(inst, xbar);
  for (std::size_t c = 0; c < inst.support(); ++c) {
    const double w = inst.mass[c];
    for (int x = 0; x < 2; ++x) {
      for (int z = 0; z < 2; ++z) {
        const double joint = px(inst, c, x) * pz(inst, c, z, x);
        out.xi_y += w * joint * (pz(inst, c, z, xbar) / pz(inst, c, z, x)) * my(inst, c, z, x);
        if (x == xbar) {
          double r = 0.0;
          for (int xp = 0; xp < 2; ++xp) r += my(inst, c, z, xp) * px(inst, c, xp);
          out.pi_r += w * joint / px(inst, c, x) * r;
        }
      }
      double s = 0.0;
      for (int z = 0; z < 2; ++z) s += my(inst, c, z, x) * pz(inst, c, z, xbar);
      out.s_mq += w * px(inst, c, x) * s;
    }
    out.tau += w * tau[c];
  }
  return out;
}

std::array<double, 2> enum_g(const DiscreteInstance& inst, std::size_t c) {
  return {my(inst, c, 1, 0) - my(inst, c, 0, 0), my(inst, c, 1, 1) - my(inst, c, 0, 1)};
}

double enum_gamma(const DiscreteInstance& inst, std::size_t c) {
  const auto g = enum_g(inst, c);
  return px(inst, c, 0) * g[0] + px(inst, c, 1) * g[1];
}

double PleReport::max_moment() const { return std::max({max_eps_x, max_eps_z, max_eps_y, max_tau_gap}); }

PleReport enum_ple(const DiscreteInstance& inst) {
  PleReport r;
  const std::vector<double> tau = enum_tau(inst);
  for (std::size_t c = 0; c < inst.support(); ++c) {
    // Components from their defining conditional expectations.
    const double a = pz(inst, c, 1, 0);
    const double b = pz(inst, c, 1, 1) - pz(inst, c, 1, 0);
    std::array<double, 2> f{}, g{};
    for (int x = 0; x < 2; ++x) {
      f[static_cast<std::size_t>(x)] = my(inst, c, 0, x);
      g[static_cast<std::size_t>(x)] = my(inst, c, 1, x) - my(inst, c, 0, x);
    }
    const double gamma = px(inst, c, 0) * g[0] + px(inst, c, 1) * g[1];
    r.a.push_back(a);
    r.b.push_back(b);
    r.f.push_back(f);
    r.g.push_back(g);
    r.gamma.push_back(gamma);

    const double eps_x = px(inst, c, 0) * (0.0 - inst.e1[c]) + px(inst, c, 1) * (1.0 - inst.e1[c]);
    r.max_eps_x = std::max(r.max_eps_x, std::abs(eps_x));
    for (int x = 0; x < 2; ++x) {
      const double eps_z = pz(inst, c, 0, x) * (0.0 - a - x * b) + pz(inst, c, 1, x) * (1.0 - a - x * b);
      r.max_eps_z = std::max(r.max_eps_z, std::abs(eps_z));
      for (int z = 0; z < 2; ++z) {
        const double eps_y = my(inst, c, z, x) - f[static_cast<std::size_t>(x)] - z * g[static_cast<std::size_t>(x)];
        r.max_eps_y = std::max(r.max_eps_y, std::abs(eps_y));
      }
    }
    r.max_tau_gap = std::max(r.max_tau_gap, std::abs(tau[c] - b * gamma));
  }
  return r;
}

double GammaDecomposition::max_deviation() const {
  double dev = 0.0;
  for (std::size_t c = 0; c < direct.size(); ++c) {
    dev = std::max(dev, std::abs(direct[c] - (terms[c][0] + terms[c][1] + terms[c][2])));
  }
  return dev;
}

GammaDecomposition enum_gamma_decomposition(const DiscreteInstance& inst, const std::vector<double>& e_hat,
                                            const std::vector<std::array<double, 2>>& g_hat) {
  if (e_hat.size() != inst.support() || g_hat.size() != inst.support()) {
    throw std::invalid_argument("estimates must cover the support");
  }
  GammaDecomposition out;
  for (std::size_t c = 0; c < inst.support(); ++c) {
    const auto g = enum_g(inst, c);
    const double e = inst.e1[c];
    const double plug = e_hat[c] * g_hat[c][1] + (1.0 - e_hat[c]) * g_hat[c][0];
    out.direct.push_back(plug - enum_gamma(inst, c));
    out.terms.push_back({(g[1] - g[0]) * (e_hat[c] - e), e_hat[c] * (g_hat[c][1] - g[1]),
                         (1.0 - e_hat[c]) * (g_hat[c][0] - g[0])});
  }
  return out;
}

std::vector<double> enum_fdpo_bias(const DiscreteInstance& truth, const DiscreteInstance& hat, int xbar,
                                   double floor) {
  if (hat.support() != truth.support()) throw std::invalid_argument("instances must share the support");
  std::vector<double> out(truth.support(), 0.0);
  for (std::size_t c = 0; c < truth.support(); ++c) {
    for (int x = 0; x < 2; ++x) {
      for (int z = 0; z < 2; ++z) {
        const double y = my(truth, c, z, x);
        out[c] += px(truth, c, x) * pz(truth, c, z, x) *
                  (phi(hat, c, x, z, y, xbar, floor) - phi(truth, c, x, z, y, xbar, floor));
      }
    }
  }
  return out;
}

}  // namespace fdcate::oracle
