#include "wavecart/cart.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "wavecart/parallel.hpp"
#include "wavecart/rng.hpp"

namespace wavecart {

using nlohmann::json;

CostMatrix CostMatrix::absolute_difference(int class_count) {
    CostMatrix g;
    g.class_count = class_count;
    g.costs.resize(static_cast<std::size_t>(class_count) * class_count);
    for (int k = 1; k <= class_count; ++k)
        for (int kp = 1; kp <= class_count; ++kp)
            g.costs[static_cast<std::size_t>(k - 1) * class_count + (kp - 1)] =
                std::abs(k - kp);
    return g;
}

CostMatrix CostMatrix::scaled(double factor) const {
    CostMatrix g = *this;
    for (double& c : g.costs) c *= factor;
    return g;
}

std::vector<std::string> CostMatrix::validate() const {
    std::vector<std::string> v;
    if (class_count < 2) v.push_back("cost matrix needs at least 2 classes");
    if (costs.size() != static_cast<std::size_t>(class_count) * class_count)
        v.push_back("cost matrix has wrong shape");
    for (int k = 1; k <= class_count; ++k) {
        if (at(k, k) != 0.0) v.push_back("cost matrix diagonal must be zero");
        for (int kp = 1; kp <= class_count; ++kp)
            if (at(k, kp) < 0.0) v.push_back("cost matrix entries must be nonnegative");
    }
    return v;
}

double impurity(const std::vector<int>& class_counts, const CostMatrix& gamma) {
    long long total = 0;
    for (int c : class_counts) total += c;
    if (total == 0) throw std::invalid_argument("impurity: empty node");
    const double n = static_cast<double>(total);
    double imp = 0.0;
    const int K = static_cast<int>(class_counts.size());
    for (int k = 0; k < K; ++k) {
        if (class_counts[k] == 0) continue;
        const double pk = class_counts[k] / n;
        for (int kp = 0; kp < K; ++kp) {
            if (kp == k || class_counts[kp] == 0) continue;
            imp += gamma.at(k + 1, kp + 1) * pk * (class_counts[kp] / n);
        }
    }
    return imp;
}

int cost_minimizing_label(const std::vector<int>& class_counts, const CostMatrix& gamma) {
    long long total = 0;
    for (int c : class_counts) total += c;
    if (total == 0) throw std::invalid_argument("cost_minimizing_label: empty node");
    const int K = static_cast<int>(class_counts.size());
    int best = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= K; ++k) {
        double cost = 0.0;
        for (int kp = 1; kp <= K; ++kp)
            cost += gamma.at(k, kp) * class_counts[static_cast<std::size_t>(kp - 1)];
        if (cost < best_cost) {
            best_cost = cost;
            best = k;
        }
    }
    return best;
}

namespace {

std::vector<int> count_classes(const std::vector<int>& y, const std::vector<int>& idx,
                               int class_count) {
    std::vector<int> counts(static_cast<std::size_t>(class_count), 0);
    for (int i : idx) ++counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)] - 1)];
    return counts;
}

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // local, unweighted
    bool valid() const { return feature >= 0; }
};

// Best (feature, midpoint) pair by impurity decrease; ties resolved to the
// lowest feature column then the lowest threshold (the iteration order).
SplitCandidate best_split(const FeatureTable& X, const std::vector<int>& y,
                          const std::vector<int>& idx, const std::vector<int>& node_counts,
                          double node_impurity, const CostMatrix& gamma,
                          int min_node_size) {
    const std::size_t n = idx.size();
    const int K = gamma.class_count;
    SplitCandidate best;

    std::vector<std::pair<double, int>> order(n);  // (value, label)
    std::vector<int> left(static_cast<std::size_t>(K));
    std::vector<int> right(static_cast<std::size_t>(K));

    for (std::size_t col = 0; col < X.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = static_cast<std::size_t>(idx[i]);
            order[i] = {X.at(r, col), y[r]};
        }
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::fill(left.begin(), left.end(), 0);
        std::copy(node_counts.begin(), node_counts.end(), right.begin());

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const int label = order[i].second;
            ++left[static_cast<std::size_t>(label - 1)];
            --right[static_cast<std::size_t>(label - 1)];
            if (order[i].first == order[i + 1].first) continue;  // no midpoint
            const std::size_t n_left = i + 1, n_right = n - n_left;
            if (n_left < static_cast<std::size_t>(min_node_size) ||
                n_right < static_cast<std::size_t>(min_node_size))
                continue;
            const double dec = node_impurity -
                               (static_cast<double>(n_left) / n) * impurity(left, gamma) -
                               (static_cast<double>(n_right) / n) * impurity(right, gamma);
            if (dec > best.decrease) {
                best.feature = static_cast<int>(col);
                best.threshold = 0.5 * (order[i].first + order[i + 1].first);
                best.decrease = dec;
            }
        }
    }
    return best;
}

// Best mimic of the primary partition on every other feature; kept only when
// strictly better than the majority-direction baseline.
std::vector<Surrogate> find_surrogates(const FeatureTable& X, const std::vector<int>& y,
                                       const std::vector<int>& idx,
                                       const std::vector<bool>& went_left,
                                       const std::vector<int>& node_counts,
                                       double node_impurity, const CostMatrix& gamma,
                                       int primary_feature, double node_share,
                                       int max_count) {
    if (max_count <= 0) return {};
    const std::size_t n = idx.size();
    const int K = gamma.class_count;
    std::size_t n_primary_left = 0;
    for (bool b : went_left) n_primary_left += b ? 1 : 0;
    const double baseline =
        static_cast<double>(std::max(n_primary_left, n - n_primary_left)) / n;

    struct Entry {
        double value;
        bool left;
        int label;
    };
    std::vector<Entry> order(n);
    std::vector<int> lc(static_cast<std::size_t>(K));
    std::vector<int> rc(static_cast<std::size_t>(K));
    std::vector<Surrogate> found;

    for (std::size_t col = 0; col < X.cols(); ++col) {
        if (static_cast<int>(col) == primary_feature) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = static_cast<std::size_t>(idx[i]);
            order[i] = {X.at(r, col), went_left[i], y[r]};
        }
        std::sort(order.begin(), order.end(),
                  [](const Entry& a, const Entry& b) { return a.value < b.value; });

        std::fill(lc.begin(), lc.end(), 0);
        std::copy(node_counts.begin(), node_counts.end(), rc.begin());
        std::size_t prefix_left = 0;
        Surrogate best_here;
        bool have = false;

        for (std::size_t i = 0; i + 1 < n; ++i) {
            prefix_left += order[i].left ? 1 : 0;
            ++lc[static_cast<std::size_t>(order[i].label - 1)];
            --rc[static_cast<std::size_t>(order[i].label - 1)];
            if (order[i].value == order[i + 1].value) continue;
            const std::size_t n_le = i + 1;
            // matches for "value <= threshold goes left"
            const std::size_t matches =
                prefix_left + (n - n_primary_left) - (n_le - prefix_left);
            const double agree_left = static_cast<double>(matches) / n;
            const double agree_right = 1.0 - agree_left;
            const bool left_orientation = agree_left >= agree_right;
            const double agreement = left_orientation ? agree_left : agree_right;
            if (agreement <= baseline) continue;

            const double dec =
                node_impurity - (static_cast<double>(n_le) / n) * impurity(lc, gamma) -
                (static_cast<double>(n - n_le) / n) * impurity(rc, gamma);
            Surrogate s;
            s.split.feature = static_cast<int>(col);
            s.split.threshold = 0.5 * (order[i].value + order[i + 1].value);
            s.split.goes_left = left_orientation;
            s.agreement = agreement;
            s.decrease = dec * node_share;
            if (!have || s.agreement > best_here.agreement) {
                best_here = s;
                have = true;
            }
        }
        if (have) found.push_back(best_here);
    }

    std::sort(found.begin(), found.end(), [](const Surrogate& a, const Surrogate& b) {
        if (a.agreement != b.agreement) return a.agreement > b.agreement;
        if (a.split.feature != b.split.feature) return a.split.feature < b.split.feature;
        return a.split.threshold < b.split.threshold;
    });
    if (found.size() > static_cast<std::size_t>(max_count))
        found.resize(static_cast<std::size_t>(max_count));
    return found;
}

}  // namespace

int Tree::leaf_count() const {
    int leaves = 0;
    for (const TreeNode& n : nodes) leaves += n.is_leaf() ? 1 : 0;
    return leaves;
}

Tree grow_tree(const FeatureTable& X, const std::vector<int>& y, const CostMatrix& gamma,
               const GrowthParams& params) {
    if (y.size() != X.rows) throw std::invalid_argument("grow_tree: |y| != rows");
    if (y.empty()) throw std::invalid_argument("grow_tree: empty training set");
    const auto gamma_issues = gamma.validate();
    if (!gamma_issues.empty())
        throw std::invalid_argument("grow_tree: " + gamma_issues.front());

    Tree tree;
    tree.feature_ids = X.ids;
    tree.params = params;
    tree.class_count = gamma.class_count;

    struct Work {
        std::vector<int> idx;
        int node;
        int depth;
    };

    std::vector<int> all(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) all[i] = static_cast<int>(i);
    const double n_root = static_cast<double>(X.rows);

    tree.nodes.emplace_back();
    std::vector<Work> stack;
    stack.push_back({std::move(all), 0, 0});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        TreeNode& node = tree.nodes[static_cast<std::size_t>(w.node)];
        node.class_counts = count_classes(y, w.idx, gamma.class_count);
        node.size = w.idx.size();
        node.impurity = impurity(node.class_counts, gamma);
        node.label = cost_minimizing_label(node.class_counts, gamma);

        const bool splittable = w.depth < params.max_depth &&
                                w.idx.size() >= 2 * static_cast<std::size_t>(params.min_node_size) &&
                                node.impurity > 0.0 && X.cols() > 0;
        if (!splittable) continue;

        const SplitCandidate cand = best_split(X, y, w.idx, node.class_counts,
                                               node.impurity, gamma, params.min_node_size);
        if (!cand.valid() || cand.decrease <= 0.0) continue;

        const double node_share = static_cast<double>(w.idx.size()) / n_root;
        node.split = Split{cand.feature, cand.threshold, true};
        node.impurity_decrease = cand.decrease * node_share;

        std::vector<int> left_idx, right_idx;
        std::vector<bool> went_left(w.idx.size());
        for (std::size_t i = 0; i < w.idx.size(); ++i) {
            const bool l = X.at(static_cast<std::size_t>(w.idx[i]),
                                static_cast<std::size_t>(cand.feature)) <= cand.threshold;
            went_left[i] = l;
            (l ? left_idx : right_idx).push_back(w.idx[i]);
        }

        node.surrogates =
            find_surrogates(X, y, w.idx, went_left, node.class_counts, node.impurity,
                            gamma, cand.feature, node_share, params.surrogate_count);

        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const int right_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[static_cast<std::size_t>(w.node)].left = left_id;
        tree.nodes[static_cast<std::size_t>(w.node)].right = right_id;
        stack.push_back({std::move(right_idx), right_id, w.depth + 1});
        stack.push_back({std::move(left_idx), left_id, w.depth + 1});
    }
    return tree;
}

namespace {

// Resubstitution cost of a node as a leaf, as a share of the root sample.
double node_leaf_cost(const TreeNode& node, const CostMatrix& gamma, double n_root) {
    double cost = 0.0;
    for (int kp = 1; kp <= gamma.class_count; ++kp)
        cost += gamma.at(node.label, kp) *
                node.class_counts[static_cast<std::size_t>(kp - 1)];
    return cost / n_root;
}

struct LinkState {
    std::vector<double> subtree_cost;
    std::vector<int> subtree_leaves;
};

// Cost and leaf count of every live subtree, honoring collapses <= step.
void refresh_links(const Tree& t, const CostMatrix& gamma, double n_root, int step,
                   LinkState& st) {
    const int n = static_cast<int>(t.nodes.size());
    st.subtree_cost.assign(static_cast<std::size_t>(n), 0.0);
    st.subtree_leaves.assign(static_cast<std::size_t>(n), 0);
    // nodes vector is in DFS preorder; children follow parents, so a reverse
    // sweep visits children first.
    for (int i = n - 1; i >= 0; --i) {
        const TreeNode& node = t.nodes[static_cast<std::size_t>(i)];
        if (node.is_leaf() || node.prune_step <= step) {
            st.subtree_cost[static_cast<std::size_t>(i)] = node_leaf_cost(node, gamma, n_root);
            st.subtree_leaves[static_cast<std::size_t>(i)] = 1;
        } else {
            st.subtree_cost[static_cast<std::size_t>(i)] =
                st.subtree_cost[static_cast<std::size_t>(node.left)] +
                st.subtree_cost[static_cast<std::size_t>(node.right)];
            st.subtree_leaves[static_cast<std::size_t>(i)] =
                st.subtree_leaves[static_cast<std::size_t>(node.left)] +
                st.subtree_leaves[static_cast<std::size_t>(node.right)];
        }
    }
}

void live_internal_nodes(const Tree& t, int step, int node, std::vector<int>& out) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf() || n.prune_step <= step) return;
    out.push_back(node);
    live_internal_nodes(t, step, n.left, out);
    live_internal_nodes(t, step, n.right, out);
}

}  // namespace

const std::vector<PruneStep>& prune_sequence(Tree& t, const CostMatrix& gamma) {
    t.prune_sequence.clear();
    for (TreeNode& n : t.nodes) n.prune_step = std::numeric_limits<int>::max();
    const double n_root = static_cast<double>(t.root().size);

    LinkState st;
    int step = 0;
    double prev_alpha = -1.0;
    for (;;) {
        refresh_links(t, gamma, n_root, step, st);
        std::vector<int> live;
        live_internal_nodes(t, step, 0, live);

        // Weakest links for this step: smallest g = (R(t) - R(T_t)) / (|T_t| - 1).
        double alpha = std::numeric_limits<double>::infinity();
        for (int id : live) {
            const TreeNode& node = t.nodes[static_cast<std::size_t>(id)];
            const double g =
                (node_leaf_cost(node, gamma, n_root) - st.subtree_cost[static_cast<std::size_t>(id)]) /
                (st.subtree_leaves[static_cast<std::size_t>(id)] - 1);
            alpha = std::min(alpha, g);
        }
        if (step == 0 && alpha > 0.0) {
            // Maximal tree is already optimal at alpha = 0.
            t.prune_sequence.push_back(
                PruneStep{0.0, st.subtree_leaves[0], st.subtree_cost[0]});
            prev_alpha = 0.0;
            ++step;
            if (live.empty()) break;
            continue;
        }
        if (live.empty()) break;

        if (step == 0) alpha = std::max(alpha, 0.0);
        // Collapse every node at this alpha, including cascades it uncovers.
        bool collapsed_any = false;
        for (;;) {
            bool collapsed = false;
            for (int id : live) {
                TreeNode& node = t.nodes[static_cast<std::size_t>(id)];
                if (node.prune_step <= step) continue;
                const double g =
                    (node_leaf_cost(node, gamma, n_root) -
                     st.subtree_cost[static_cast<std::size_t>(id)]) /
                    (st.subtree_leaves[static_cast<std::size_t>(id)] - 1);
                if (g <= alpha) {
                    node.prune_step = step;
                    collapsed = true;
                    collapsed_any = true;
                }
            }
            if (!collapsed) break;
            refresh_links(t, gamma, n_root, step, st);
            live.clear();
            live_internal_nodes(t, step, 0, live);
        }
        if (!collapsed_any) break;  // defensive; cannot happen

        t.prune_sequence.push_back(PruneStep{alpha, st.subtree_leaves[0], st.subtree_cost[0]});
        prev_alpha = alpha;
        ++step;
        if (live.empty()) break;  // collapsed down to the root
    }
    (void)prev_alpha;
    return t.prune_sequence;
}

namespace {

int route(const Tree& t, const TreeNode& node, const std::vector<double>& x) {
    // Primary split, then surrogates in rank order, then majority direction.
    auto side = [&](const Split& s, double v) {
        const bool le = v <= s.threshold;
        return le == s.goes_left ? node.left : node.right;
    };
    const double v = x[static_cast<std::size_t>(node.split.feature)];
    if (!std::isnan(v)) return side(node.split, v);
    for (const Surrogate& s : node.surrogates) {
        const double sv = x[static_cast<std::size_t>(s.split.feature)];
        if (!std::isnan(sv)) return side(s.split, sv);
    }
    const TreeNode& l = t.nodes[static_cast<std::size_t>(node.left)];
    const TreeNode& r = t.nodes[static_cast<std::size_t>(node.right)];
    return l.size >= r.size ? node.left : node.right;
}

}  // namespace

int predict(const Tree& t, const std::vector<double>& x, int prune_step) {
    if (x.size() != t.feature_ids.size())
        throw std::invalid_argument("predict: feature count mismatch");
    int id = 0;
    for (;;) {
        const TreeNode& node = t.nodes[static_cast<std::size_t>(id)];
        if (node.is_leaf() || (prune_step >= 0 && node.prune_step <= prune_step))
            return node.label;
        id = route(t, node, x);
    }
}

double resubstitution_cost(const Tree& t, const FeatureTable& X, const std::vector<int>& y,
                           const CostMatrix& gamma, int prune_step) {
    if (X.rows == 0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i)
        total += gamma.at(predict(t, X.row(i), prune_step), y[i]);
    return total / static_cast<double>(X.rows);
}

namespace {

// Stratified fold assignment; classes dealt round-robin after a seeded
// shuffle, with the fold cursor carried across classes to balance sizes.
std::vector<int> stratified_folds(const std::vector<int>& y, int class_count, int folds,
                                  Rng& rng) {
    std::vector<int> assignment(y.size(), -1);
    int cursor = 0;
    for (int k = 1; k <= class_count; ++k) {
        std::vector<int> members;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == k) members.push_back(static_cast<int>(i));
        rng.shuffle(members);
        for (int idx : members) {
            assignment[static_cast<std::size_t>(idx)] = cursor % folds;
            ++cursor;
        }
    }
    return assignment;
}

bool folds_cover_all_classes(const std::vector<int>& y, const std::vector<int>& assignment,
                             int class_count, int folds) {
    std::vector<int> total(static_cast<std::size_t>(class_count), 0);
    std::vector<std::vector<int>> in_fold(
        static_cast<std::size_t>(folds),
        std::vector<int>(static_cast<std::size_t>(class_count), 0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        ++total[static_cast<std::size_t>(y[i] - 1)];
        ++in_fold[static_cast<std::size_t>(assignment[i])][static_cast<std::size_t>(y[i] - 1)];
    }
    for (int f = 0; f < folds; ++f)
        for (int k = 0; k < class_count; ++k)
            if (total[static_cast<std::size_t>(k)] > 0 &&
                in_fold[static_cast<std::size_t>(f)][static_cast<std::size_t>(k)] ==
                    total[static_cast<std::size_t>(k)])
                return false;  // training for fold f would miss class k+1
    return true;
}

FeatureTable gather_rows(const FeatureTable& X, const std::vector<int>& rows) {
    FeatureTable out;
    out.ids = X.ids;
    out.rows = rows.size();
    out.data.reserve(rows.size() * X.cols());
    for (int r : rows) {
        const auto begin = X.data.begin() + static_cast<std::ptrdiff_t>(
                                                static_cast<std::size_t>(r) * X.cols());
        out.data.insert(out.data.end(), begin, begin + static_cast<std::ptrdiff_t>(X.cols()));
    }
    return out;
}

}  // namespace

CvResult cv_cost(const FeatureTable& X, const std::vector<int>& y, const CostMatrix& gamma,
                 const GrowthParams& params, int folds, int repeats, std::uint64_t seed,
                 int threads) {
    if (y.size() != X.rows) throw std::invalid_argument("cv_cost: |y| != rows");
    if (static_cast<std::size_t>(folds) > y.size())
        throw std::invalid_argument("cv_cost: more folds than samples");

    // Fold assignments are drawn up front so fold tasks can run concurrently.
    std::vector<std::vector<int>> assignments(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            Rng rng(derive_seed(seed, "cv-folds", static_cast<std::uint64_t>(r),
                                static_cast<std::uint64_t>(attempt)));
            assignments[static_cast<std::size_t>(r)] =
                stratified_folds(y, gamma.class_count, folds, rng);
            ok = folds_cover_all_classes(y, assignments[static_cast<std::size_t>(r)],
                                         gamma.class_count, folds);
        }
        if (!ok)
            throw DataError("cv_cost: a class is too rare to keep every training fold "
                            "populated (10 fold draws attempted)");
    }

    const std::size_t tasks = static_cast<std::size_t>(repeats) * folds;
    std::vector<double> fold_total(tasks, 0.0);

    parallel_for(tasks, threads, [&](std::size_t task) {
        const int r = static_cast<int>(task) / folds;
        const int f = static_cast<int>(task) % folds;
        const auto& assignment = assignments[static_cast<std::size_t>(r)];

        std::vector<int> train_rows, test_rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            ((assignment[i] == f) ? test_rows : train_rows).push_back(static_cast<int>(i));
        if (test_rows.empty()) return;  // fewer samples than folds in this repeat

        const FeatureTable train_X = gather_rows(X, train_rows);
        std::vector<int> train_y;
        train_y.reserve(train_rows.size());
        for (int i : train_rows) train_y.push_back(y[static_cast<std::size_t>(i)]);

        Tree tree = grow_tree(train_X, train_y, gamma, params);
        prune_sequence(tree, gamma);

        // Held-out cost of the best subtree in the ladder.
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < tree.prune_sequence.size(); ++s) {
            double total = 0.0;
            for (int i : test_rows)
                total += gamma.at(predict(tree, X.row(static_cast<std::size_t>(i)),
                                          static_cast<int>(s)),
                                  y[static_cast<std::size_t>(i)]);
            best = std::min(best, total);
        }
        fold_total[task] = best;
    });

    CvResult result;
    result.per_repeat.resize(static_cast<std::size_t>(repeats), 0.0);
    for (int r = 0; r < repeats; ++r) {
        double total = 0.0;
        for (int f = 0; f < folds; ++f)
            total += fold_total[static_cast<std::size_t>(r) * folds + f];
        result.per_repeat[static_cast<std::size_t>(r)] = total / static_cast<double>(y.size());
    }
    double sum = 0.0;
    for (double v : result.per_repeat) sum += v;
    result.mean_cost = sum / static_cast<double>(repeats);
    return result;
}

std::map<std::string, double> variable_importance(const Tree& t, ImportanceMode mode) {
    std::map<std::string, double> imp;
    for (const std::string& id : t.feature_ids) imp[id] = 0.0;
    for (const TreeNode& node : t.nodes) {
        if (node.is_leaf()) continue;
        imp[t.feature_ids[static_cast<std::size_t>(node.split.feature)]] +=
            node.impurity_decrease;
        if (mode == ImportanceMode::primary_plus_surrogate && !node.surrogates.empty()) {
            const Surrogate& s = node.surrogates.front();
            imp[t.feature_ids[static_cast<std::size_t>(s.split.feature)]] += s.decrease;
        }
    }
    return imp;
}

std::map<std::string, double> scale_importance(const std::map<std::string, double>& raw) {
    double max = 0.0;
    for (const auto& [id, v] : raw) max = std::max(max, v);
    std::map<std::string, double> scaled = raw;
    if (max > 0.0)
        for (auto& [id, v] : scaled) v *= 100.0 / max;
    return scaled;
}

ImportanceResult bagged_importance(const FeatureTable& X, const std::vector<int>& y,
                                   const CostMatrix& gamma, const GrowthParams& params,
                                   int bootstrap_count, std::uint64_t seed,
                                   ImportanceMode mode, int threads) {
    std::vector<std::map<std::string, double>> per_tree(
        static_cast<std::size_t>(bootstrap_count));

    parallel_for(static_cast<std::size_t>(bootstrap_count), threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, "bootstrap", b));
        std::vector<int> rows(X.rows);
        for (std::size_t i = 0; i < X.rows; ++i)
            rows[i] = static_cast<int>(rng.next_below(X.rows));
        const FeatureTable bx = gather_rows(X, rows);
        std::vector<int> by;
        by.reserve(rows.size());
        for (int r : rows) by.push_back(y[static_cast<std::size_t>(r)]);
        per_tree[b] = variable_importance(grow_tree(bx, by, gamma, params), mode);
    });

    ImportanceResult out;
    for (const std::string& id : X.ids) out.raw[id] = 0.0;
    for (const auto& m : per_tree)
        for (const auto& [id, v] : m) out.raw[id] += v;
    for (auto& [id, v] : out.raw) v /= static_cast<double>(bootstrap_count);
    out.scaled = scale_importance(out.raw);
    return out;
}

namespace {

json split_to_json(const Split& s, const std::vector<std::string>& ids) {
    return json{{"feature", ids[static_cast<std::size_t>(s.feature)]},
                {"threshold", s.threshold},
                {"goes_left", s.goes_left}};
}

Split split_from_json(const json& j, const std::vector<std::string>& ids) {
    Split s;
    const std::string id = j.at("feature").get<std::string>();
    const auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw DataError("tree json: unknown feature id " + id);
    s.feature = static_cast<int>(it - ids.begin());
    s.threshold = j.at("threshold").get<double>();
    s.goes_left = j.at("goes_left").get<bool>();
    return s;
}

}  // namespace

std::string tree_to_json(const Tree& t) {
    json j;
    j["feature_ids"] = t.feature_ids;
    j["class_count"] = t.class_count;
    j["params"] = {{"min_node_size", t.params.min_node_size},
                   {"max_depth", t.params.max_depth},
                   {"surrogate_count", t.params.surrogate_count}};
    j["nodes"] = json::array();
    for (const TreeNode& n : t.nodes) {
        json jn;
        jn["label"] = n.label;
        jn["class_counts"] = n.class_counts;
        jn["size"] = n.size;
        jn["impurity"] = n.impurity;
        if (!n.is_leaf()) {
            jn["split"] = split_to_json(n.split, t.feature_ids);
            jn["left"] = n.left;
            jn["right"] = n.right;
            jn["impurity_decrease"] = n.impurity_decrease;
            jn["surrogates"] = json::array();
            for (const Surrogate& s : n.surrogates)
                jn["surrogates"].push_back(json{{"split", split_to_json(s.split, t.feature_ids)},
                                                {"agreement", s.agreement},
                                                {"decrease", s.decrease}});
        }
        if (n.prune_step != std::numeric_limits<int>::max())
            jn["prune_step"] = n.prune_step;
        j["nodes"].push_back(std::move(jn));
    }
    j["prune_sequence"] = json::array();
    for (const PruneStep& p : t.prune_sequence)
        j["prune_sequence"].push_back(json{{"alpha", p.alpha},
                                           {"leaf_count", p.leaf_count},
                                           {"training_cost", p.training_cost}});
    return j.dump(2);
}

Tree tree_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("tree json: ") + e.what());
    }
    Tree t;
    t.feature_ids = j.at("feature_ids").get<std::vector<std::string>>();
    t.class_count = j.at("class_count").get<int>();
    t.params.min_node_size = j.at("params").at("min_node_size").get<int>();
    t.params.max_depth = j.at("params").at("max_depth").get<int>();
    t.params.surrogate_count = j.at("params").at("surrogate_count").get<int>();
    for (const json& jn : j.at("nodes")) {
        TreeNode n;
        n.label = jn.at("label").get<int>();
        n.class_counts = jn.at("class_counts").get<std::vector<int>>();
        n.size = jn.at("size").get<std::size_t>();
        n.impurity = jn.at("impurity").get<double>();
        if (jn.contains("split")) {
            n.split = split_from_json(jn.at("split"), t.feature_ids);
            n.left = jn.at("left").get<int>();
            n.right = jn.at("right").get<int>();
            n.impurity_decrease = jn.at("impurity_decrease").get<double>();
            for (const json& js : jn.at("surrogates")) {
                Surrogate s;
                s.split = split_from_json(js.at("split"), t.feature_ids);
                s.agreement = js.at("agreement").get<double>();
                s.decrease = js.at("decrease").get<double>();
                n.surrogates.push_back(std::move(s));
            }
        }
        if (jn.contains("prune_step")) n.prune_step = jn.at("prune_step").get<int>();
        t.nodes.push_back(std::move(n));
    }
    for (const json& jp : j.at("prune_sequence"))
        t.prune_sequence.push_back(PruneStep{jp.at("alpha").get<double>(),
                                             jp.at("leaf_count").get<int>(),
                                             jp.at("training_cost").get<double>()});
    return t;
}

}  // namespace wavecart
