// Histogram gradient boosting with depth-wise growth and second-order leaf
// weights, in the style of xgboost's `hist` method.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "fdcate/learners.hpp"
#include "fdcate/math.hpp"

namespace fdcate {

namespace {

struct GradPair {
  double g = 0.0;
  double h = 0.0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;
  GradPair left;
  GradPair right;
};

struct BinnedColumns {
  std::size_t rows = 0;
  std::vector<std::vector<double>> cuts;  // per feature, ascending, last is +inf
  std::vector<std::uint8_t> bins;         // feature-major
  int max_bins_used = 1;

  const std::uint8_t* column(std::size_t f) const { return bins.data() + f * rows; }
};

std::vector<double> make_cuts(std::vector<double> values, int max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> uniq = values;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<double> cuts;
  if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
    cuts = uniq;
  } else {
    const std::size_t n = values.size();
    for (int k = 1; k < max_bins; ++k) {
      const std::size_t idx = std::min(n - 1, static_cast<std::size_t>(k) * n / static_cast<std::size_t>(max_bins));
      cuts.push_back(values[idx]);
    }
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  }
  if (cuts.empty()) cuts.push_back(0.0);
  cuts.back() = std::numeric_limits<double>::infinity();
  return cuts;
}

BinnedColumns bin_features(const RowMatrix& x, std::span<const std::size_t> order, int max_bins) {
  BinnedColumns out;
  const std::size_t n = order.size();
  const std::size_t d = static_cast<std::size_t>(x.cols());
  out.rows = n;
  out.cuts.resize(d);
  out.bins.resize(n * d);
  std::vector<double> col(n);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t i = 0; i < n; ++i) col[i] = x(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(f));
    out.cuts[f] = make_cuts(col, max_bins);
    const auto& cuts = out.cuts[f];
    out.max_bins_used = std::max(out.max_bins_used, static_cast<int>(cuts.size()));
    std::uint8_t* dst = out.bins.data() + f * n;
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = static_cast<std::uint8_t>(std::lower_bound(cuts.begin(), cuts.end(), col[i]) - cuts.begin());
    }
  }
  return out;
}

double split_score(const GradPair& s, double l2) { return s.h + l2 > 0.0 ? s.g * s.g / (s.h + l2) : 0.0; }

double leaf_weight(const GradPair& s, double l2) { return s.h + l2 > 0.0 ? -s.g / (s.h + l2) : 0.0; }

}  // namespace

GbtEnsemble fit_gbt(const RowMatrix& features, std::span<const double> targets,
                    std::optional<std::span<const double>> weights, const GbtParams& params, bool logistic,
                    std::uint64_t seed) {
  const std::size_t n = targets.size();
  const std::size_t d = static_cast<std::size_t>(features.cols());

  // Canonical row order makes the fit independent of the caller's row order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t f = 0; f < d; ++f) {
      const double va = features(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(f));
      const double vb = features(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(f));
      if (va != vb) return va < vb;
    }
    if (targets[a] != targets[b]) return targets[a] < targets[b];
    if (weights) return (*weights)[a] < (*weights)[b];
    return false;
  });

  std::vector<double> y(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = targets[order[i]];
    if (weights) w[i] = (*weights)[order[i]];
  }

  GbtEnsemble ens;
  ens.logistic = logistic;
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += w[i] * y[i];
  mean = wsum > 0.0 ? mean / wsum : 0.0;
  ens.base_score = logistic ? logit(std::clamp(mean, 1e-6, 1.0 - 1e-6)) : mean;
  if (d == 0) return ens;

  const BinnedColumns binned = bin_features(features, order, params.max_bins);
  const std::size_t nb = static_cast<std::size_t>(binned.max_bins_used);

  std::vector<double> pred(n, ens.base_score);
  std::vector<GradPair> grad(n);
  std::vector<std::size_t> sampled;
  sampled.reserve(n);
  std::vector<int> node_of(n);
  std::vector<int> slot_of_row(n);
  std::vector<std::size_t> feature_pool(d);
  const std::size_t n_features =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(params.colsample * static_cast<double>(d))), 1, d);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (logistic) {
        const double p = sigmoid(pred[i]);
        grad[i] = {(p - y[i]) * w[i], std::max(p * (1.0 - p), 1e-16) * w[i]};
      } else {
        grad[i] = {(pred[i] - y[i]) * w[i], w[i]};
      }
    }

    sampled.clear();
    if (params.subsample < 1.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (unif(rng) < params.subsample) sampled.push_back(i);
      }
    }
    if (sampled.empty()) {
      sampled.resize(n);
      std::iota(sampled.begin(), sampled.end(), std::size_t{0});
    }

    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < n_features && n_features < d; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, d - 1);
      std::swap(feature_pool[k], feature_pool[pick(rng)]);
    }
    std::vector<std::size_t> feats(feature_pool.begin(), feature_pool.begin() + static_cast<std::ptrdiff_t>(n_features));
    std::sort(feats.begin(), feats.end());
    const std::size_t kf = feats.size();

    std::vector<TreeNode> tree(1);
    std::vector<int> split_bin(1, -1);
    std::vector<GradPair> node_sum(1);
    for (std::size_t i : sampled) {
      node_of[i] = 0;
      node_sum[0].g += grad[i].g;
      node_sum[0].h += grad[i].h;
    }

    std::vector<int> level = {0};
    std::vector<GradPair> hist;
    for (int depth = 0; depth < params.max_depth && !level.empty(); ++depth) {
      const std::size_t L = level.size();
      std::vector<int> slot_of_node(tree.size(), -1);
      for (std::size_t s = 0; s < L; ++s) slot_of_node[static_cast<std::size_t>(level[s])] = static_cast<int>(s);
      for (std::size_t i : sampled) slot_of_row[i] = slot_of_node[static_cast<std::size_t>(node_of[i])];

      hist.assign(L * kf * nb, GradPair{});
      for (std::size_t fi = 0; fi < kf; ++fi) {
        const std::uint8_t* col = binned.column(feats[fi]);
        for (std::size_t i : sampled) {
          const int s = slot_of_row[i];
          if (s < 0) continue;
          GradPair& cell = hist[(static_cast<std::size_t>(s) * kf + fi) * nb + col[i]];
          cell.g += grad[i].g;
          cell.h += grad[i].h;
        }
      }

      std::vector<int> next;
      std::vector<int> split_nodes;
      for (std::size_t s = 0; s < L; ++s) {
        const int node = level[s];
        const GradPair total = node_sum[static_cast<std::size_t>(node)];
        const double parent = split_score(total, params.l2);
        SplitCandidate best;
        for (std::size_t fi = 0; fi < kf; ++fi) {
          const GradPair* h = &hist[(s * kf + fi) * nb];
          const std::size_t nbins = binned.cuts[feats[fi]].size();
          GradPair left;
          for (std::size_t b = 0; b + 1 < nbins; ++b) {
            left.g += h[b].g;
            left.h += h[b].h;
            const GradPair right{total.g - left.g, total.h - left.h};
            if (left.h < params.min_child_weight || right.h < params.min_child_weight) continue;
            const double gain = split_score(left, params.l2) + split_score(right, params.l2) - parent;
            if (gain > best.gain + 1e-12) {
              best = {gain, static_cast<int>(feats[fi]), static_cast<int>(b), left, right};
            }
          }
        }
        if (best.feature < 0) continue;
        const int left_id = static_cast<int>(tree.size());
        tree.push_back({});
        tree.push_back({});
        split_bin.push_back(-1);
        split_bin.push_back(-1);
        node_sum.push_back(best.left);
        node_sum.push_back(best.right);
        TreeNode& parent_node = tree[static_cast<std::size_t>(node)];
        parent_node.feature = best.feature;
        parent_node.threshold = binned.cuts[static_cast<std::size_t>(best.feature)][static_cast<std::size_t>(best.bin)];
        parent_node.left = left_id;
        parent_node.right = left_id + 1;
        split_bin[static_cast<std::size_t>(node)] = best.bin;
        next.push_back(left_id);
        next.push_back(left_id + 1);
        split_nodes.push_back(node);
      }
      if (split_nodes.empty()) break;
      for (std::size_t i : sampled) {
        const TreeNode& nd = tree[static_cast<std::size_t>(node_of[i])];
        if (nd.feature < 0) continue;
        const std::uint8_t b = binned.column(static_cast<std::size_t>(nd.feature))[i];
        node_of[i] = b <= split_bin[static_cast<std::size_t>(node_of[i])] ? nd.left : nd.right;
      }
      level = std::move(next);
    }

    for (std::size_t k = 0; k < tree.size(); ++k) {
      if (tree[k].feature < 0) tree[k].value = params.learning_rate * leaf_weight(node_sum[k], params.l2);
    }
    for (std::size_t i = 0; i < n; ++i) {
      int node = 0;
      while (tree[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& nd = tree[static_cast<std::size_t>(node)];
        const std::uint8_t b = binned.column(static_cast<std::size_t>(nd.feature))[i];
        node = b <= split_bin[static_cast<std::size_t>(node)] ? nd.left : nd.right;
      }
      pred[i] += tree[static_cast<std::size_t>(node)].value;
    }
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

}  // namespace fdcate
