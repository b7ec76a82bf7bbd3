#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "wavecart/core_types.hpp"

namespace wavecart {

// Misclassification cost table over ordinal classes, 1-based accessors.
struct CostMatrix {
    int class_count = 0;
    std::vector<double> costs;  // row-major class_count x class_count

    double at(int k, int kprime) const {
        return costs[static_cast<std::size_t>(k - 1) * class_count + (kprime - 1)];
    }

    // Gamma(k, k') = |k - k'|, the natural choice for an ordinal response.
    static CostMatrix absolute_difference(int class_count);
    CostMatrix scaled(double factor) const;
    std::vector<std::string> validate() const;
};

// Feature matrix with stable column identifiers ("j:k" coefficient ids).
struct FeatureTable {
    std::vector<std::string> ids;
    std::size_t rows = 0;
    std::vector<double> data;  // row-major rows x ids.size()

    std::size_t cols() const { return ids.size(); }
    double at(std::size_t row, std::size_t col) const {
        return data[row * cols() + col];
    }
    std::vector<double> row(std::size_t r) const {
        return std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(r * cols()),
                                   data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols()));
    }
};

struct Split {
    int feature = -1;        // column index into the tree's feature ids
    double threshold = 0.0;  // midpoint between observed values
    bool goes_left = true;   // value <= threshold routed left when true
};

struct Surrogate {
    Split split;
    double agreement = 0.0;  // fraction of node samples routed like the primary
    double decrease = 0.0;   // impurity decrease of the surrogate itself, node-weighted
};

struct GrowthParams {
    int min_node_size = 5;
    int max_depth = 30;
    int surrogate_count = 5;
};

struct TreeNode {
    Split split;                    // feature == -1 marks a leaf
    int left = -1;
    int right = -1;
    int label = 0;                  // cost-minimizing class
    std::vector<int> class_counts;  // index k-1 = class k
    std::size_t size = 0;
    double impurity = 0.0;
    double impurity_decrease = 0.0;  // primary split, weighted by node share
    std::vector<Surrogate> surrogates;
    int prune_step = std::numeric_limits<int>::max();

    bool is_leaf() const { return split.feature < 0; }
};

struct PruneStep {
    double alpha = 0.0;
    int leaf_count = 0;
    double training_cost = 0.0;  // mean cost after this collapse
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<std::string> feature_ids;
    GrowthParams params;
    int class_count = 0;
    std::vector<PruneStep> prune_sequence;  // filled by prune_sequence()

    const TreeNode& root() const { return nodes.front(); }
    int leaf_count() const;
};

// Cost-generalized Gini: sum_{k != k'} Gamma(k,k') p(k) p(k').
double impurity(const std::vector<int>& class_counts, const CostMatrix& gamma);

// Cost-minimizing label: argmin_k sum_k' Gamma(k,k') p(k'); ties to lowest k.
int cost_minimizing_label(const std::vector<int>& class_counts, const CostMatrix& gamma);

// Greedy maximal tree. Deterministic: ties broken by lowest feature column,
// then lowest threshold.
Tree grow_tree(const FeatureTable& X, const std::vector<int>& y, const CostMatrix& gamma,
               const GrowthParams& params);

// Weakest-link cost-complexity sequence; marks nodes with the step at which
// they collapse and returns the (alpha, subtree) ladder ending at the root.
const std::vector<PruneStep>& prune_sequence(Tree& t, const CostMatrix& gamma);

// Routes x down the tree (full tree by default, or the subtree at the given
// prune step). Missing values (NaN) fall back to surrogates, then to the
// majority direction.
int predict(const Tree& t, const std::vector<double>& x, int prune_step = -1);

double resubstitution_cost(const Tree& t, const FeatureTable& X, const std::vector<int>& y,
                           const CostMatrix& gamma, int prune_step = -1);

struct CvResult {
    double mean_cost = 0.0;
    std::vector<double> per_repeat;
};

// Repeated, stratified, seeded 10-fold CV of the grow+prune pipeline;
// per-fold subtree chosen from the prune ladder by held-out cost.
CvResult cv_cost(const FeatureTable& X, const std::vector<int>& y, const CostMatrix& gamma,
                 const GrowthParams& params, int folds, int repeats, std::uint64_t seed,
                 int threads = 1);

// Raw per-feature importance: primary-split decreases, plus the best
// surrogate's own decrease when enabled.
std::map<std::string, double> variable_importance(const Tree& t, ImportanceMode mode);

struct ImportanceResult {
    std::map<std::string, double> raw;     // averaged impurity-decrease units
    std::map<std::string, double> scaled;  // max scaled to 100 (all-zero stays zero)
};

// Importance averaged over B trees grown on n-out-of-n bootstrap resamples.
ImportanceResult bagged_importance(const FeatureTable& X, const std::vector<int>& y,
                                   const CostMatrix& gamma, const GrowthParams& params,
                                   int bootstrap_count, std::uint64_t seed,
                                   ImportanceMode mode, int threads = 1);

std::map<std::string, double> scale_importance(const std::map<std::string, double>& raw);

// Stable JSON form (nodes, splits, surrogates, labels) for report diffing.
std::string tree_to_json(const Tree& t);
Tree tree_from_json(const std::string& text);

}  // namespace wavecart
