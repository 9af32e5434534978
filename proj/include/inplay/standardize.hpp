#pragma once

#include "inplay/features.hpp"

#include <span>
#include <vector>

namespace inplay {

/// Per-feature z-scoring fitted on training rows and stored with every model.
struct Standardization {
    FeatureSchema schema;
    std::vector<double> mean;
    std::vector<double> sd;

    std::size_t size() const { return schema.size(); }
    std::vector<double> apply(const FrameState& s) const;
    void apply_into(const FrameState& s, std::span<double> out) const;

    // Rows are raw feature vectors in schema order. Zero-variance columns get sd 1.
    static Standardization fit(const FeatureSchema& schema,
                               std::span<const std::vector<double>> rows);
    // Pools both teams' states from every frame of every match.
    static Standardization fit_states(const FeatureSchema& schema,
                                      std::span<const FrameMatrix> frames, bool both_sides);

    bool operator==(const Standardization&) const = default;
};

} // namespace inplay
