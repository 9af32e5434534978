#pragma once

#include "inplay/features.hpp"
#include "inplay/standardize.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace inplay {

struct LinearConfig {
    double l2 = 1e-4;
    int max_iterations = 10000;
    // Stop once the largest gradient component falls below this.
    double grad_tol = 1e-6;
    // Reject inputs whose standardized magnitude exceeds range_limit.
    bool range_check = false;
    double range_limit = 10.0;
};

/// Multinomial softmax over (win, tie, loss).
struct LinearModel {
    Standardization standardization;
    std::array<std::vector<double>, 3> weights;
    std::array<double, 3> intercepts{};
    bool range_check = false;
    double range_limit = 10.0;

    const FeatureSchema& schema() const { return standardization.schema; }
    bool operator==(const LinearModel&) const = default;
};

// Flat design matrix: rows of equal width.
struct LabeledRows {
    std::size_t width = 0;
    std::vector<double> x;
    std::vector<Outcome> y;

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * width, width}; }
    void add(std::span<const double> r, Outcome label);
};

struct SoftmaxFit {
    std::array<std::vector<double>, 3> weights;
    std::array<double, 3> intercepts{};
    int iterations = 0;
    double grad_norm = 0.0;
    double loss = 0.0;
};

/// L2-penalised multinomial NLL minimised by accelerated gradient descent with
/// a fixed 1/L step. Throws NumericalError if grad_tol is not reached.
SoftmaxFit fit_softmax(const LabeledRows& rows, const LinearConfig& config);
OutcomeProbs softmax_probs(const std::array<std::vector<double>, 3>& weights,
                           const std::array<double, 3>& intercepts, std::span<const double> x);

// Home-team states labelled with the final outcome; all frames, or only
// frame `only_frame` when it is 1..100. Rows are standardized when `st` is given.
LabeledRows home_rows(std::span<const FrameMatrix> frames, const FeatureSchema& schema,
                      const Standardization* st = nullptr, int only_frame = 0);

LinearModel fit_lr(std::span<const FrameMatrix> frames, const LinearConfig& config = {});
OutcomeProbs predict_lr(const LinearModel& model, const FrameState& state);

/// One model per frame; game_time is dropped from the feature vector.
struct FramewiseModel {
    std::vector<LinearModel> frames; // index t-1
    bool operator==(const FramewiseModel&) const = default;
};

FramewiseModel fit_mlr(std::span<const FrameMatrix> frames, const LinearConfig& config = {});
// Throws std::out_of_range when state.t is outside 1..100.
OutcomeProbs predict_mlr(const FramewiseModel& model, const FrameState& state);

struct ForestConfig {
    int trees = 200;
    int max_depth = 12;
    int features_per_split = 0; // 0 -> ceil(sqrt(d))
    int min_samples_split = 2;
    bool bootstrap = true;
    std::uint64_t seed = 20190901;
    int threads = 0; // 0 -> hardware concurrency
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<double, 3> counts{};
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // root at 0
    bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
    FeatureSchema schema;
    std::vector<DecisionTree> trees;
    int max_depth = 12;
    int features_per_split = 0;
    bool operator==(const ForestModel&) const = default;
};

// Unstandardized rows: trees split on raw feature values.
ForestModel fit_forest(const LabeledRows& rows, const FeatureSchema& schema,
                       const ForestConfig& config);
ForestModel fit_rf(std::span<const FrameMatrix> frames, const ForestConfig& config = {});
OutcomeProbs predict_forest(const ForestModel& model, std::span<const double> x);
OutcomeProbs predict_rf(const ForestModel& model, const FrameState& state);

} // namespace inplay
