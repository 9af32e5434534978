#include "inplay/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace inplay {

namespace {

double gini(const std::array<double, 3>& c) {
    const double n = c[0] + c[1] + c[2];
    if (n <= 0) {
        return 0.0;
    }
    return 1.0 - (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) / (n * n);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const LabeledRows& rows, const ForestConfig& config, int mtry, std::uint64_t seed)
        : rows_(rows), config_(config), mtry_(mtry), rng_(seed) {}

    DecisionTree build(std::vector<std::size_t> sample) {
        DecisionTree tree;
        struct Task {
            int node;
            int depth;
            std::vector<std::size_t> idx;
        };
        std::vector<Task> stack;
        tree.nodes.emplace_back();
        stack.push_back({0, 0, std::move(sample)});
        while (!stack.empty()) {
            Task task = std::move(stack.back());
            stack.pop_back();
            std::array<double, 3> counts{};
            for (std::size_t i : task.idx) {
                counts[static_cast<int>(rows_.y[i])] += 1;
            }
            tree.nodes[task.node].counts = counts;
            const bool pure = std::count_if(counts.begin(), counts.end(),
                                            [](double c) { return c > 0; }) <= 1;
            if (pure || task.depth >= config_.max_depth ||
                static_cast<int>(task.idx.size()) < config_.min_samples_split) {
                continue;
            }
            const Split split = best_split(task.idx, counts);
            if (split.feature < 0) {
                continue;
            }
            std::vector<std::size_t> left;
            std::vector<std::size_t> right;
            for (std::size_t i : task.idx) {
                (rows_.row(i)[split.feature] <= split.threshold ? left : right).push_back(i);
            }
            const int l = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[task.node];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = l;
            node.right = l + 1;
            stack.push_back({l + 1, task.depth + 1, std::move(right)});
            stack.push_back({l, task.depth + 1, std::move(left)});
        }
        return tree;
    }

private:
    Split best_split(const std::vector<std::size_t>& idx, const std::array<double, 3>& counts) {
        const int d = static_cast<int>(rows_.width);
        std::vector<int> features(d);
        for (int j = 0; j < d; ++j) {
            features[j] = j;
        }
        // Partial Fisher-Yates: the first mtry entries are a uniform subset.
        for (int j = 0; j < mtry_; ++j) {
            std::uniform_int_distribution<int> pick(j, d - 1);
            std::swap(features[j], features[pick(rng_)]);
        }
        const double n = static_cast<double>(idx.size());
        Split best;
        best.impurity = gini(counts);
        std::vector<std::pair<double, int>> values(idx.size());
        for (int f = 0; f < mtry_; ++f) {
            const int feature = features[f];
            for (std::size_t k = 0; k < idx.size(); ++k) {
                values[k] = {rows_.row(idx[k])[feature], static_cast<int>(rows_.y[idx[k]])};
            }
            std::sort(values.begin(), values.end());
            std::array<double, 3> left{};
            std::array<double, 3> right = counts;
            for (std::size_t k = 0; k + 1 < values.size(); ++k) {
                left[values[k].second] += 1;
                right[values[k].second] -= 1;
                if (values[k].first == values[k + 1].first) {
                    continue;
                }
                const double nl = static_cast<double>(k + 1);
                const double impurity = (nl * gini(left) + (n - nl) * gini(right)) / n;
                if (impurity < best.impurity - 1e-12) {
                    best.feature = feature;
                    best.threshold = 0.5 * (values[k].first + values[k + 1].first);
                    best.impurity = impurity;
                }
            }
        }
        return best;
    }

    const LabeledRows& rows_;
    const ForestConfig& config_;
    int mtry_;
    std::mt19937_64 rng_;
};

} // namespace

ForestModel fit_forest(const LabeledRows& rows, const FeatureSchema& schema,
                       const ForestConfig& config) {
    if (rows.size() == 0) {
        throw std::invalid_argument("empty training set");
    }
    const int d = static_cast<int>(rows.width);
    int mtry = config.features_per_split > 0
                   ? config.features_per_split
                   : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    mtry = std::clamp(mtry, 1, d);

    ForestModel model;
    model.schema = schema;
    model.max_depth = config.max_depth;
    model.features_per_split = mtry;
    model.trees.resize(std::max(config.trees, 0));

    auto grow = [&](int t) {
        const std::uint64_t seed = mix_seed(config.seed, static_cast<std::uint64_t>(t));
        TreeBuilder builder(rows, config, mtry, seed);
        std::vector<std::size_t> sample(rows.size());
        if (config.bootstrap) {
            std::mt19937_64 rng(mix_seed(seed, 0xb007));
            std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
            for (auto& s : sample) {
                s = pick(rng);
            }
        } else {
            for (std::size_t i = 0; i < sample.size(); ++i) {
                sample[i] = i;
            }
        }
        model.trees[t] = builder.build(std::move(sample));
    };

    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int workers = std::min(config.threads > 0 ? config.threads : hw, config.trees);
    if (workers <= 1) {
        for (int t = 0; t < config.trees; ++t) {
            grow(t);
        }
    } else {
        // Trees are independent and seeded by index, so the result does not
        // depend on the thread count.
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int t = w; t < config.trees; t += workers) {
                    grow(t);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return model;
}

ForestModel fit_rf(std::span<const FrameMatrix> frames, const ForestConfig& config) {
    const FeatureSchema schema = full_schema();
    return fit_forest(home_rows(frames, schema), schema, config);
}

OutcomeProbs predict_forest(const ForestModel& model, std::span<const double> x) {
    std::array<double, 3> sum{};
    for (const auto& tree : model.trees) {
        int n = 0;
        while (tree.nodes[n].feature >= 0) {
            const TreeNode& node = tree.nodes[n];
            n = x[node.feature] <= node.threshold ? node.left : node.right;
        }
        const auto& c = tree.nodes[n].counts;
        const double total = c[0] + c[1] + c[2];
        for (int k = 0; k < 3; ++k) {
            sum[k] += c[k] / total;
        }
    }
    const double trees = static_cast<double>(model.trees.size());
    if (trees == 0) {
        return {};
    }
    return {sum[0] / trees, sum[1] / trees, sum[2] / trees};
}

OutcomeProbs predict_rf(const ForestModel& model, const FrameState& state) {
    return predict_forest(model, feature_vector(state, model.schema));
}

} // namespace inplay
