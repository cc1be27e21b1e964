#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "eazy/learners.hpp"

namespace eazy {

namespace {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = -1.0;
};

double gini(std::size_t n_bonafide, std::size_t n_attack) {
  double n = static_cast<double>(n_bonafide + n_attack);
  if (n == 0.0) return 0.0;
  double pb = static_cast<double>(n_bonafide) / n;
  double pa = static_cast<double>(n_attack) / n;
  return 1.0 - pb * pb - pa * pa;
}

class CartBuilder {
 public:
  CartBuilder(const LabeledDataset& data, const CartConfig& config, std::uint64_t seed)
      : data_(data), config_(config), rng_(make_rng(seed)) {
    if (config.feature_subsample)
      subsample_count_ = split_candidate_count(*config.feature_subsample, data.dim());
  }

  TreeModel build() {
    TreeModel tree;
    tree.dim = data_.dim();
    std::vector<std::size_t> rows(data_.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    build_node(tree, rows, 1);
    return tree;
  }

 private:
  // Candidate features for one split: all of them, or a seeded subset drawn
  // without replacement when subsampling is on.
  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> all(data_.dim());
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (subsample_count_ == 0 || subsample_count_ == data_.dim()) return all;
    for (std::size_t j = 0; j < subsample_count_; ++j) {
      std::size_t pick = j + rng_() % (all.size() - j);
      std::swap(all[j], all[pick]);
    }
    all.resize(subsample_count_);
    std::sort(all.begin(), all.end());
    return all;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows) {
    std::size_t total_attack = 0;
    for (std::size_t r : rows) total_attack += data_.label(r) == Label::Attack;
    std::size_t total_bonafide = rows.size() - total_attack;
    double parent = gini(total_bonafide, total_attack);
    double n = static_cast<double>(rows.size());
    auto min_leaf = static_cast<std::size_t>(config_.min_leaf);

    SplitChoice choice;
    std::vector<std::pair<double, Label>> column(rows.size());
    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        column[i] = {data_.row(rows[i])[f], data_.label(rows[i])};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::size_t left_attack = 0, left_total = 0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_attack += column[i].second == Label::Attack;
        ++left_total;
        if (column[i].first == column[i + 1].first) continue;
        if (left_total < min_leaf || rows.size() - left_total < min_leaf) continue;
        double threshold = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
        std::size_t right_attack = total_attack - left_attack;
        double wl = static_cast<double>(left_total) / n;
        double wr = 1.0 - wl;
        double gain = parent - wl * gini(left_total - left_attack, left_attack) -
                      wr * gini(rows.size() - left_total - right_attack, right_attack);
        // Strictly-better only: features and thresholds are scanned in
        // ascending order, so equal-gain ties resolve toward the lowest
        // feature index, then the lowest threshold.
        if (gain > choice.gain + 1e-12) {
          choice.found = true;
          choice.feature = f;
          choice.threshold = threshold;
          choice.gain = gain;
        }
      }
    }
    return choice;
  }

  int make_leaf(TreeModel& tree, const std::vector<std::size_t>& rows) {
    TreeNode node;
    for (std::size_t r : rows) {
      if (data_.label(r) == Label::Attack)
        ++node.count_attack;
      else
        ++node.count_bonafide;
    }
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size() - 1);
  }

  int build_node(TreeModel& tree, const std::vector<std::size_t>& rows, int depth) {
    std::size_t attack = 0;
    for (std::size_t r : rows) attack += data_.label(r) == Label::Attack;
    bool pure = attack == 0 || attack == rows.size();
    if (pure || depth > config_.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(config_.min_leaf))
      return make_leaf(tree, rows);

    auto choice = best_split(rows);
    // An impure node still splits on zero gain when a valid threshold
    // exists; only the absence of any usable threshold makes a leaf.
    if (!choice.found || choice.gain < -1e-12) return make_leaf(tree, rows);

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      if (data_.row(r)[choice.feature] < choice.threshold)
        left_rows.push_back(r);
      else
        right_rows.push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) return make_leaf(tree, rows);

    TreeNode node;
    node.feature = static_cast<int>(choice.feature);
    node.threshold = choice.threshold;
    tree.nodes.push_back(node);
    auto index = static_cast<int>(tree.nodes.size() - 1);
    int left = build_node(tree, left_rows, depth + 1);
    int right = build_node(tree, right_rows, depth + 1);
    tree.nodes[index].left = left;
    tree.nodes[index].right = right;
    return index;
  }

  const LabeledDataset& data_;
  CartConfig config_;
  std::mt19937_64 rng_;
  std::size_t subsample_count_ = 0;
};

std::size_t depth_below(const TreeModel& tree, int node, std::size_t depth) {
  const auto& n = tree.nodes[node];
  if (n.feature < 0) return depth;
  return std::max(depth_below(tree, n.left, depth + 1),
                  depth_below(tree, n.right, depth + 1));
}

}  // namespace

std::size_t split_candidate_count(double fraction, std::size_t dim) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw DataError("feature_subsample must lie in (0,1]");
  auto count = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(dim) - 1e-9));
  return std::clamp<std::size_t>(count, 1, dim);
}

std::size_t TreeModel::depth() const {
  if (nodes.empty()) return 0;
  return depth_below(*this, 0, 0);
}

std::size_t TreeModel::min_leaf_count() const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& n : nodes)
    if (n.feature < 0) best = std::min(best, n.count_attack + n.count_bonafide);
  return best;
}

TreeModel cart_train(const LabeledDataset& data, const CartConfig& config,
                     std::uint64_t seed) {
  if (data.empty()) throw DataError("cart_train: empty dataset");
  if (config.max_depth < 1) throw DataError("cart_train: max_depth must be >= 1");
  if (config.min_leaf < 1) throw DataError("cart_train: min_leaf must be >= 1");
  return CartBuilder(data, config, seed).build();
}

}  // namespace eazy
