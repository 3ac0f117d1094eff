#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "confaudit/error.hpp"
#include "confaudit/models.hpp"
#include "confaudit/rng.hpp"

#include "models_internal.hpp"

namespace confaudit {

namespace {

// CART with a presorted splitter: every feature's row order is sorted once
// per tree and maintained through stable partitions, so split search is a
// single linear scan per candidate feature. Candidate thresholds sit at
// midpoints between consecutive distinct sorted values. Zero-gain splits
// are taken (growth stops at pure nodes, empty candidate sets, the depth
// cap, or min_samples_leaf); ties keep the first candidate in (ascending
// feature, ascending threshold) order, which pins the structure needed to
// reproduce splits on minute value differences.
//
// Criterion to maximize, strictly equivalent to the impurity decrease:
//   classification: sum over children of (count1^2 + count0^2) / count
//     (Gini; integer-valued doubles, so balanced groups tie exactly)
//   regression: sum over children of (sum y)^2 / count (variance reduction)
struct SplitResult {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
};

struct CartBuilder {
    const Matrix& x;
    std::span<const double> y;
    TargetKind task;
    const ModelSpec& spec;
    int p;
    int mtry;
    Rng rng;

    std::vector<std::vector<int>> order;  // per feature, node-range sorted row ids
    std::vector<std::uint8_t> side;       // per dataset row: 1 = left of current split
    std::vector<int> scratch;
    std::vector<int> feature_pool;
    std::vector<TreeNode> nodes;

    CartBuilder(const Matrix& x_, std::span<const double> y_, TargetKind task_,
                const ModelSpec& spec_, std::uint64_t seed, int mtry_)
        : x(x_), y(y_), task(task_), spec(spec_), p(static_cast<int>(x_.cols())),
          mtry(mtry_), rng(seed) {}

    void init_order(std::span<const int> rows) {
        order.assign(static_cast<std::size_t>(p), {});
        for (int j = 0; j < p; ++j) {
            auto& ord = order[static_cast<std::size_t>(j)];
            ord.assign(rows.begin(), rows.end());
            const auto col = x.col(static_cast<std::size_t>(j));
            std::sort(ord.begin(), ord.end(), [&col](int a, int b) {
                return col[static_cast<std::size_t>(a)] < col[static_cast<std::size_t>(b)];
            });
        }
        side.assign(x.rows(), 0);
        scratch.resize(rows.size());
    }

    std::span<const int> candidates() {
        if (mtry >= p) {
            if (feature_pool.size() != static_cast<std::size_t>(p)) {
                feature_pool.resize(static_cast<std::size_t>(p));
                std::iota(feature_pool.begin(), feature_pool.end(), 0);
            }
            return feature_pool;
        }
        // Random subset per split, re-sorted ascending so the deterministic
        // tie-break order is preserved.
        feature_pool.resize(static_cast<std::size_t>(p));
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        for (int i = 0; i < mtry; ++i) {
            const auto j =
                i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - i)));
            std::swap(feature_pool[static_cast<std::size_t>(i)],
                      feature_pool[static_cast<std::size_t>(j)]);
        }
        feature_pool.resize(static_cast<std::size_t>(mtry));
        std::sort(feature_pool.begin(), feature_pool.end());
        return feature_pool;
    }

    SplitResult best_split(int begin, int end) {
        const double n = static_cast<double>(end - begin);
        const int min_leaf = spec.min_samples_leaf;
        SplitResult best;
        double best_score;

        best_score = -std::numeric_limits<double>::infinity();
        if (task == TargetKind::classification) {
            double n1 = 0.0;
            for (int k = begin; k < end; ++k)
                n1 += y[static_cast<std::size_t>(order[0][static_cast<std::size_t>(k)])];
            for (int f : candidates()) {
                const auto& ord = order[static_cast<std::size_t>(f)];
                const auto col = x.col(static_cast<std::size_t>(f));
                double l1 = 0.0;
                for (int k = begin; k + 1 < end; ++k) {
                    const auto row = static_cast<std::size_t>(ord[static_cast<std::size_t>(k)]);
                    l1 += y[row];
                    const double a = col[row];
                    const double b =
                        col[static_cast<std::size_t>(ord[static_cast<std::size_t>(k + 1)])];
                    if (a == b) continue;
                    const double nl = static_cast<double>(k - begin + 1);
                    const double nr = n - nl;
                    if (nl < min_leaf || nr < min_leaf) continue;
                    const double l0 = nl - l1;
                    const double r1 = n1 - l1;
                    const double r0 = nr - r1;
                    const double score =
                        (l1 * l1 + l0 * l0) / nl + (r1 * r1 + r0 * r0) / nr;
                    if (score > best_score) {
                        double t = a + (b - a) / 2.0;
                        if (t >= b) t = a;  // adjacent doubles: keep the split valid
                        best = {true, f, t};
                        best_score = score;
                    }
                }
            }
        } else {
            double total = 0.0;
            for (int k = begin; k < end; ++k)
                total += y[static_cast<std::size_t>(order[0][static_cast<std::size_t>(k)])];
            for (int f : candidates()) {
                const auto& ord = order[static_cast<std::size_t>(f)];
                const auto col = x.col(static_cast<std::size_t>(f));
                double sl = 0.0;
                for (int k = begin; k + 1 < end; ++k) {
                    const auto row = static_cast<std::size_t>(ord[static_cast<std::size_t>(k)]);
                    sl += y[row];
                    const double a = col[row];
                    const double b =
                        col[static_cast<std::size_t>(ord[static_cast<std::size_t>(k + 1)])];
                    if (a == b) continue;
                    const double nl = static_cast<double>(k - begin + 1);
                    const double nr = n - nl;
                    if (nl < min_leaf || nr < min_leaf) continue;
                    const double sr = total - sl;
                    const double score = sl * sl / nl + sr * sr / nr;
                    if (score > best_score) {
                        double t = a + (b - a) / 2.0;
                        if (t >= b) t = a;
                        best = {true, f, t};
                        best_score = score;
                    }
                }
            }
        }
        return best;
    }

    bool node_is_pure(int begin, int end) const {
        const auto& ord = order[0];
        const double first = y[static_cast<std::size_t>(ord[static_cast<std::size_t>(begin)])];
        for (int k = begin + 1; k < end; ++k) {
            if (y[static_cast<std::size_t>(ord[static_cast<std::size_t>(k)])] != first)
                return false;
        }
        return true;
    }

    double leaf_value(int begin, int end) const {
        const auto& ord = order[0];
        double s = 0.0;
        for (int k = begin; k < end; ++k)
            s += y[static_cast<std::size_t>(ord[static_cast<std::size_t>(k)])];
        return s / static_cast<double>(end - begin);
    }

    // Stable partition of every feature's order range by the chosen split,
    // preserving sorted order inside both children.
    int apply_split(int begin, int end, const SplitResult& split) {
        const auto col = x.col(static_cast<std::size_t>(split.feature));
        int n_left = 0;
        for (int k = begin; k < end; ++k) {
            const int row = order[static_cast<std::size_t>(split.feature)]
                                 [static_cast<std::size_t>(k)];
            const bool left = col[static_cast<std::size_t>(row)] <= split.threshold;
            side[static_cast<std::size_t>(row)] = left ? 1 : 0;
            if (left) ++n_left;
        }
        for (int j = 0; j < p; ++j) {
            auto& ord = order[static_cast<std::size_t>(j)];
            int lo = 0, hi = n_left;
            for (int k = begin; k < end; ++k) {
                const int row = ord[static_cast<std::size_t>(k)];
                scratch[static_cast<std::size_t>(side[static_cast<std::size_t>(row)] ? lo++
                                                                                     : hi++)] =
                    row;
            }
            std::copy(scratch.begin(), scratch.begin() + (end - begin), ord.begin() + begin);
        }
        return begin + n_left;
    }

    int build(int begin, int end, int depth) {
        const int idx = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[static_cast<std::size_t>(idx)].samples = end - begin;
        nodes[static_cast<std::size_t>(idx)].value = leaf_value(begin, end);

        const bool depth_ok = !spec.max_depth || depth < *spec.max_depth;
        if (end - begin < 2 * spec.min_samples_leaf || !depth_ok || node_is_pure(begin, end))
            return idx;

        const SplitResult split = best_split(begin, end);
        if (!split.found) return idx;

        const int mid = apply_split(begin, end, split);
        nodes[static_cast<std::size_t>(idx)].feature = split.feature;
        nodes[static_cast<std::size_t>(idx)].threshold = split.threshold;
        const int left = build(begin, mid, depth + 1);
        nodes[static_cast<std::size_t>(idx)].left = left;
        const int right = build(mid, end, depth + 1);
        nodes[static_cast<std::size_t>(idx)].right = right;
        return idx;
    }
};

}  // namespace

std::vector<TreeNode> build_cart(const Matrix& x, std::span<const double> y, TargetKind task,
                                 std::span<const int> rows, const ModelSpec& spec,
                                 std::uint64_t mtry_seed, int mtry) {
    CartBuilder builder(x, y, task, spec, mtry_seed, mtry);
    builder.init_order(rows);
    builder.build(0, static_cast<int>(rows.size()), 0);
    return std::move(builder.nodes);
}

double predict_tree(const std::vector<TreeNode>& nodes, const Matrix& x, std::size_t row) {
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(idx)];
        idx = x(row, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(idx)].value;
}

FittedModel fit_tree_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                           TargetKind task) {
    FittedModel m;
    m.kind = ModelKind::tree;
    m.task = task;
    m.n_features_in = x.cols();
    std::vector<int> rows(x.rows());
    std::iota(rows.begin(), rows.end(), 0);
    m.nodes = build_cart(x, y, task, rows, spec, 0, static_cast<int>(x.cols()));
    return m;
}

FittedModel fit_forest_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                             TargetKind task) {
    FittedModel m;
    m.kind = ModelKind::forest;
    m.task = task;
    m.n_features_in = x.cols();
    const int p = static_cast<int>(x.cols());
    const int n = static_cast<int>(x.rows());

    int mtry;
    if (spec.mtry) {
        mtry = std::clamp(*spec.mtry, 1, p);
    } else if (task == TargetKind::classification) {
        mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p)))));
    } else {
        mtry = std::max(1, p / 3);
    }

    m.trees.resize(static_cast<std::size_t>(spec.n_trees));
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < static_cast<long long>(spec.n_trees); ++t) {
        const std::uint64_t tree_seed =
            derive_seed(spec.seed, seedtag::tree, static_cast<std::uint64_t>(t));
        Rng boot(tree_seed);
        std::vector<int> rows(static_cast<std::size_t>(n));
        if (spec.bootstrap) {
            for (int i = 0; i < n; ++i)
                rows[static_cast<std::size_t>(i)] =
                    static_cast<int>(boot.below(static_cast<std::uint64_t>(n)));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        m.trees[static_cast<std::size_t>(t)] =
            build_cart(x, y, task, rows, spec, derive_seed(tree_seed, seedtag::split), mtry);
    }
    return m;
}

std::vector<TreeNodeInfo> tree_structure(const FittedModel& m) {
    if (m.kind != ModelKind::tree)
        throw InvalidArgument("tree_structure requires a tree model");
    std::vector<TreeNodeInfo> info(m.nodes.size());
    std::vector<int> depth(m.nodes.size(), 0);
    std::vector<int> parent(m.nodes.size(), -1);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const auto& nd = m.nodes[i];
        if (nd.feature >= 0) {
            depth[static_cast<std::size_t>(nd.left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nd.right)] = depth[i] + 1;
            parent[static_cast<std::size_t>(nd.left)] = static_cast<int>(i);
            parent[static_cast<std::size_t>(nd.right)] = static_cast<int>(i);
        }
        info[i] = {static_cast<int>(i), parent[i], depth[i], nd.feature,
                   nd.threshold, nd.samples, nd.value, nd.left, nd.right};
    }
    return info;
}

}  // namespace confaudit
