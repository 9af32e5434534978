#include "inplay/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace inplay {

void LabeledRows::add(std::span<const double> r, Outcome label) {
    if (width == 0 && y.empty()) {
        width = r.size();
    }
    if (r.size() != width) {
        throw std::invalid_argument("row width mismatch");
    }
    x.insert(x.end(), r.begin(), r.end());
    y.push_back(label);
}

OutcomeProbs softmax_probs(const std::array<std::vector<double>, 3>& weights,
                           const std::array<double, 3>& intercepts, std::span<const double> x) {
    std::array<double, 3> a{};
    for (int k = 0; k < 3; ++k) {
        a[k] = intercepts[k];
        for (std::size_t j = 0; j < x.size(); ++j) {
            a[k] += weights[k][j] * x[j];
        }
    }
    const double m = std::max({a[0], a[1], a[2]});
    std::array<double, 3> e{};
    for (int k = 0; k < 3; ++k) {
        e[k] = std::exp(a[k] - m);
    }
    const double z = e[0] + e[1] + e[2];
    return {e[0] / z, e[1] / z, e[2] / z};
}

namespace {

// Parameters packed as [w_win | b_win | w_tie | b_tie | w_loss | b_loss].
struct Packed {
    std::size_t d;
    std::vector<double> v;

    explicit Packed(std::size_t width) : d(width), v(3 * (width + 1), 0.0) {}
    double* w(int k) { return v.data() + k * (d + 1); }
    const double* w(int k) const { return v.data() + k * (d + 1); }
    double& b(int k) { return v[k * (d + 1) + d]; }
    double b(int k) const { return v[k * (d + 1) + d]; }
};

// Mean NLL + l2/2 |w|^2 and its gradient.
double loss_and_grad(const LabeledRows& rows, const Packed& p, double l2, Packed& grad) {
    std::fill(grad.v.begin(), grad.v.end(), 0.0);
    const std::size_t d = rows.width;
    const double n = static_cast<double>(rows.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* x = rows.x.data() + i * d;
        std::array<double, 3> a{};
        for (int k = 0; k < 3; ++k) {
            const double* w = p.w(k);
            double s = p.b(k);
            for (std::size_t j = 0; j < d; ++j) {
                s += w[j] * x[j];
            }
            a[k] = s;
        }
        const double m = std::max({a[0], a[1], a[2]});
        const double lse = m + std::log(std::exp(a[0] - m) + std::exp(a[1] - m) +
                                        std::exp(a[2] - m));
        const int label = static_cast<int>(rows.y[i]);
        loss += lse - a[label];
        for (int k = 0; k < 3; ++k) {
            const double g = std::exp(a[k] - lse) - (k == label ? 1.0 : 0.0);
            double* gw = grad.w(k);
            for (std::size_t j = 0; j < d; ++j) {
                gw[j] += g * x[j];
            }
            grad.b(k) += g;
        }
    }
    loss /= n;
    for (double& g : grad.v) {
        g /= n;
    }
    for (int k = 0; k < 3; ++k) {
        const double* w = p.w(k);
        double* gw = grad.w(k);
        for (std::size_t j = 0; j < d; ++j) {
            loss += 0.5 * l2 * w[j] * w[j];
            gw[j] += l2 * w[j];
        }
    }
    return loss;
}

// Upper bound on the Lipschitz constant of the gradient: the softmax Hessian
// w.r.t. logits is bounded by I/2, so L <= eig_max(X'X/n)/2 + l2, with X
// augmented by the intercept column.
double lipschitz_bound(const LabeledRows& rows, double l2) {
    const std::size_t d = rows.width + 1;
    std::vector<double> gram(d * d, 0.0);
    std::vector<double> xa(d, 1.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto r = rows.row(i);
        std::copy(r.begin(), r.end(), xa.begin());
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                gram[a * d + b] += xa[a] * xa[b];
            }
        }
    }
    const double n = static_cast<double>(rows.size());
    for (double& g : gram) {
        g /= n;
    }
    // Power iteration; the trace bounds the estimate from above if it stalls.
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    std::vector<double> next(d);
    double eig = 0.0;
    for (int it = 0; it < 200; ++it) {
        double norm = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < d; ++b) {
                s += gram[a * d + b] * v[b];
            }
            next[a] = s;
            norm += s * s;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            break;
        }
        for (std::size_t a = 0; a < d; ++a) {
            v[a] = next[a] / norm;
        }
        if (std::abs(norm - eig) <= 1e-12 * norm) {
            eig = norm;
            break;
        }
        eig = norm;
    }
    return 0.5 * eig * 1.01 + l2;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

SoftmaxFit fit_softmax(const LabeledRows& rows, const LinearConfig& config) {
    if (rows.size() == 0) {
        throw std::invalid_argument("empty training set");
    }
    std::array<bool, 3> present{};
    for (Outcome o : rows.y) {
        present[static_cast<int>(o)] = true;
    }
    if (std::count(present.begin(), present.end(), true) < 2) {
        throw ValidationError("training data must contain at least two outcome classes");
    }

    const double step = 1.0 / lipschitz_bound(rows, config.l2);
    Packed theta(rows.width);
    Packed y = theta;
    Packed grad(rows.width);
    Packed next(rows.width);
    double momentum = 1.0;
    double loss = 0.0;
    double gnorm = 0.0;
    int it = 0;
    for (; it < config.max_iterations; ++it) {
        loss = loss_and_grad(rows, y, config.l2, grad);
        if (!std::isfinite(loss)) {
            throw NumericalError("softmax fit diverged (non-finite loss)");
        }
        gnorm = inf_norm(grad.v);
        if (gnorm < config.grad_tol) {
            theta = y;
            break;
        }
        double restart = 0.0;
        for (std::size_t i = 0; i < next.v.size(); ++i) {
            next.v[i] = y.v[i] - step * grad.v[i];
            restart += grad.v[i] * (next.v[i] - theta.v[i]);
        }
        if (restart > 0.0) {
            momentum = 1.0;
            theta = next;
            y = next;
            continue;
        }
        const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / m_next;
        for (std::size_t i = 0; i < next.v.size(); ++i) {
            y.v[i] = next.v[i] + beta * (next.v[i] - theta.v[i]);
        }
        theta = next;
        momentum = m_next;
    }
    if (it >= config.max_iterations) {
        std::ostringstream msg;
        msg << "softmax fit did not converge after " << config.max_iterations
            << " iterations; final gradient norm " << gnorm;
        throw NumericalError(msg.str());
    }

    SoftmaxFit fit;
    for (int k = 0; k < 3; ++k) {
        fit.weights[k].assign(theta.w(k), theta.w(k) + rows.width);
        fit.intercepts[k] = theta.b(k);
    }
    fit.iterations = it;
    fit.grad_norm = gnorm;
    fit.loss = loss;
    return fit;
}

LabeledRows home_rows(std::span<const FrameMatrix> frames, const FeatureSchema& schema,
                      const Standardization* st, int only_frame) {
    LabeledRows rows;
    rows.width = schema.size();
    std::vector<double> buf(schema.size());
    for (const auto& fm : frames) {
        for (const auto& s : fm.home) {
            if (only_frame != 0 && s.t != only_frame) {
                continue;
            }
            if (st != nullptr) {
                st->apply_into(s, buf);
            } else {
                buf = feature_vector(s, schema);
            }
            rows.add(buf, fm.outcome);
        }
    }
    return rows;
}

namespace {

LinearModel make_linear(Standardization st, SoftmaxFit fit, const LinearConfig& config) {
    LinearModel m;
    m.standardization = std::move(st);
    m.weights = std::move(fit.weights);
    m.intercepts = fit.intercepts;
    m.range_check = config.range_check;
    m.range_limit = config.range_limit;
    return m;
}

OutcomeProbs predict_linear(const LinearModel& model, const FrameState& state) {
    const auto z = model.standardization.apply(state);
    if (model.range_check) {
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (std::abs(z[i]) > model.range_limit) {
                throw ValidationError("feature " + std::string(feature_name(model.schema()[i])) +
                                      " outside the standardized training range");
            }
        }
    }
    return softmax_probs(model.weights, model.intercepts, z);
}

} // namespace

LinearModel fit_lr(std::span<const FrameMatrix> frames, const LinearConfig& config) {
    const FeatureSchema schema = full_schema();
    Standardization st = Standardization::fit_states(schema, frames, false);
    const LabeledRows rows = home_rows(frames, schema, &st);
    return make_linear(std::move(st), fit_softmax(rows, config), config);
}

OutcomeProbs predict_lr(const LinearModel& model, const FrameState& state) {
    return predict_linear(model, state);
}

FramewiseModel fit_mlr(std::span<const FrameMatrix> frames, const LinearConfig& config) {
    const FeatureSchema schema = schema_without(Feature::game_time);
    const Standardization st = Standardization::fit_states(schema, frames, false);
    FramewiseModel model;
    model.frames.reserve(kFrames);
    for (int t = 1; t <= kFrames; ++t) {
        const LabeledRows rows = home_rows(frames, schema, &st, t);
        if (rows.size() == 0) {
            throw ValidationError("no training rows for frame " + std::to_string(t));
        }
        model.frames.push_back(make_linear(st, fit_softmax(rows, config), config));
    }
    return model;
}

OutcomeProbs predict_mlr(const FramewiseModel& model, const FrameState& state) {
    if (state.t < 1 || state.t > static_cast<int>(model.frames.size())) {
        throw std::out_of_range("frame index " + std::to_string(state.t) + " outside 1..100");
    }
    return predict_linear(model.frames[state.t - 1], state);
}

} // namespace inplay
