#include "fdcate/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "fdcate/fd_dr.hpp"
#include "fdcate/fd_r.hpp"
#include "fdcate/plugin.hpp"

namespace fdcate {

std::vector<HistogramBin> histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  if (values.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) return {{lo, hi, values.size()}};
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lo = lo + b * width;
    out[static_cast<std::size_t>(b)].hi = b + 1 == bins ? hi : lo + (b + 1) * width;
  }
  for (double v : values) {
    const auto b = std::min<std::size_t>(static_cast<std::size_t>((v - lo) / width), static_cast<std::size_t>(bins - 1));
    ++out[b].count;
  }
  return out;
}

std::vector<ConcentrationPoint> concentration_curve(std::span<const double> values, std::span<const double> alphas) {
  if (values.empty()) throw std::invalid_argument("concentration curve of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> prefix(sorted.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
  std::vector<ConcentrationPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("concentration fractions must lie in (0, 1]");
    std::size_t k = static_cast<std::size_t>(std::ceil(a * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    out.push_back({a, k, prefix[k] / static_cast<double>(k)});
  }
  return out;
}

CateModel fit_estimator(const SampleTable& data, const EstimateOptions& options) {
  NuisanceOptions nuis;
  nuis.floor = options.floor;
  switch (options.estimator) {
    case EstimatorKind::plugin:
      return plugin_fit(data, options.config, nuis, options.seed);
    case EstimatorKind::dr: {
      FdDrOptions o;
      o.penalty = options.penalty;
      return fd_dr_fit(data, options.config, nuis, options.seed, o);
    }
    case EstimatorKind::r: {
      FdROptions o;
      o.penalty = options.penalty;
      o.gamma_penalty = options.penalty;
      return fd_r_fit(data, options.config, options.seed, o).as_cate();
    }
    case EstimatorKind::bdr_component:
      break;
  }
  throw std::invalid_argument("estimator must be pi, dr or r");
}

EstimateOutput estimate_table(const SampleTable& data, const EstimateOptions& options) {
  const CateModel model = fit_estimator(data, options);
  EstimateOutput out;
  out.tau = model.predict_rows(data.c());
  out.histogram = histogram(out.tau, options.histogram_bins);
  out.concentration = concentration_curve(out.tau, options.alphas);
  return out;
}

void write_estimate_outputs(const EstimateOutput& out, const std::filesystem::path& output_prefix) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  };
  const std::string base = output_prefix.string();
  char buf[64];
  {
    std::ofstream f = open(base + ".csv");
    f << "row_id,tau_hat\n";
    for (std::size_t i = 0; i < out.tau.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", out.tau[i]);
      f << i + 1 << ',' << buf << '\n';
    }
  }
  {
    std::ofstream f = open(base + "_histogram.csv");
    f << "bin,lo,hi,count\n";
    for (std::size_t b = 0; b < out.histogram.size(); ++b) {
      f << b << ',' << out.histogram[b].lo << ',' << out.histogram[b].hi << ',' << out.histogram[b].count << '\n';
    }
  }
  {
    std::ofstream f = open(base + "_concentration.csv");
    f << "alpha,top_k,mean_tau_hat\n";
    for (const auto& p : out.concentration) {
      std::snprintf(buf, sizeof buf, "%.17g", p.mean);
      f << p.alpha << ',' << p.top_k << ',' << buf << '\n';
    }
  }
}

EstimateOutput estimate_csv(const std::filesystem::path& input, const CsvSchema& schema,
                            const EstimateOptions& options, const std::filesystem::path& output_prefix) {
  const SampleTable data = load_csv(input, schema);
  EstimateOutput out = estimate_table(data, options);
  write_estimate_outputs(out, output_prefix);
  return out;
}

}  // namespace fdcate
