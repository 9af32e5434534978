#include "inplay/standardize.hpp"

#include <cmath>

namespace inplay {

std::vector<double> Standardization::apply(const FrameState& s) const {
    std::vector<double> out(schema.size());
    apply_into(s, out);
    return out;
}

void Standardization::apply_into(const FrameState& s, std::span<double> out) const {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        out[i] = (feature_value(s, schema[i]) - mean[i]) / sd[i];
    }
}

namespace {

// Welford accumulation in row order.
struct Moments {
    std::vector<double> mean;
    std::vector<double> m2;
    double n = 0;

    explicit Moments(std::size_t d) : mean(d, 0.0), m2(d, 0.0) {}

    void add(std::span<const double> row) {
        n += 1;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double delta = row[i] - mean[i];
            mean[i] += delta / n;
            m2[i] += delta * (row[i] - mean[i]);
        }
    }

    Standardization finish(const FeatureSchema& schema) const {
        Standardization st;
        st.schema = schema;
        st.mean = mean;
        st.sd.resize(mean.size());
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double var = n > 1 ? m2[i] / (n - 1) : 0.0;
            st.sd[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
        }
        return st;
    }
};

} // namespace

Standardization Standardization::fit(const FeatureSchema& schema,
                                     std::span<const std::vector<double>> rows) {
    Moments m(schema.size());
    for (const auto& r : rows) {
        m.add(r);
    }
    return m.finish(schema);
}

Standardization Standardization::fit_states(const FeatureSchema& schema,
                                            std::span<const FrameMatrix> frames, bool both_sides) {
    Moments m(schema.size());
    for (const auto& fm : frames) {
        for (const auto& st : fm.home) {
            m.add(feature_vector(st, schema));
        }
        if (both_sides) {
            for (const auto& st : fm.away) {
                m.add(feature_vector(st, schema));
            }
        }
    }
    return m.finish(schema);
}

} // namespace inplay
