#include "inplay/bayes.hpp"

#include <algorithm>
#include <cmath>

namespace inplay {

void PriorConfig::validate() const {
    for (double s : {alpha_walk_scale, beta_scale, ha_scale, alpha1_scale}) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw ValidationError("prior scales must be finite and strictly positive");
        }
    }
}

VariationalParams VariationalParams::constant(std::size_t features, double mean, double log_sd) {
    VariationalParams q;
    q.features = features;
    q.alpha_mean.assign(kFrames * features, mean);
    q.alpha_log_sd.assign(kFrames * features, log_sd);
    q.beta_mean = mean;
    q.beta_log_sd = log_sd;
    q.ha_mean = mean;
    q.ha_log_sd = log_sd;
    return q;
}

std::vector<double> VariationalParams::flatten() const {
    std::vector<double> out;
    out.reserve(flat_size());
    out.insert(out.end(), alpha_mean.begin(), alpha_mean.end());
    out.insert(out.end(), alpha_log_sd.begin(), alpha_log_sd.end());
    out.push_back(beta_mean);
    out.push_back(beta_log_sd);
    out.push_back(ha_mean);
    out.push_back(ha_log_sd);
    return out;
}

VariationalParams VariationalParams::unflatten(std::size_t features, std::span<const double> flat) {
    VariationalParams q;
    q.features = features;
    const std::size_t a = kFrames * features;
    if (flat.size() != 2 * a + 4) {
        throw std::invalid_argument("flat parameter vector has wrong size");
    }
    q.alpha_mean.assign(flat.begin(), flat.begin() + a);
    q.alpha_log_sd.assign(flat.begin() + a, flat.begin() + 2 * a);
    q.beta_mean = flat[2 * a];
    q.beta_log_sd = flat[2 * a + 1];
    q.ha_mean = flat[2 * a + 2];
    q.ha_log_sd = flat[2 * a + 3];
    return q;
}

double VariationalParams::sd(int t, std::size_t f) const {
    return std::exp(alpha_log_sd[(t - 1) * features + f]);
}

FeatureSchema bayes_schema(bool with_rating) {
    FeatureSchema s = schema_without(Feature::game_time);
    if (!with_rating) {
        std::erase(s, Feature::rating_diff);
    }
    return s;
}

ObservationSet make_observations(std::span<const FrameMatrix> frames, const Standardization& st) {
    ObservationSet obs;
    obs.features = st.size();
    const std::size_t n = frames.size() * (kFrames - 1) * 2;
    obs.frame.reserve(n);
    obs.home.reserve(n);
    obs.goal.reserve(n);
    obs.x.reserve(n * obs.features);
    std::vector<double> z(obs.features);
    for (const auto& fm : frames) {
        std::array<std::array<std::uint8_t, kFrames + 2>, 2> scored{};
        for (const auto& g : fm.goal_frames) {
            scored[static_cast<int>(g.side)][g.t] = 1;
        }
        for (int t = 1; t < kFrames; ++t) {
            for (Side side : {Side::home, Side::away}) {
                st.apply_into(fm.states(side)[t - 1], z);
                obs.frame.push_back(static_cast<std::int16_t>(t));
                obs.home.push_back(side == Side::home ? 1 : 0);
                obs.goal.push_back(scored[static_cast<int>(side)][t + 1]);
                obs.x.insert(obs.x.end(), z.begin(), z.end());
            }
        }
    }
    return obs;
}

PointParams posterior_mean(const PosteriorParams& params) {
    PointParams p;
    p.features = params.q.features;
    p.alpha = params.q.alpha_mean;
    p.beta = params.q.beta_mean;
    p.ha = params.q.ha_mean;
    return p;
}

PointParams posterior_sample(const PosteriorParams& params, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    const auto& q = params.q;
    PointParams p;
    p.features = q.features;
    p.alpha.resize(q.alpha_mean.size());
    for (std::size_t i = 0; i < p.alpha.size(); ++i) {
        p.alpha[i] = q.alpha_mean[i] + std::exp(q.alpha_log_sd[i]) * normal(rng);
    }
    p.beta = q.beta_mean + std::exp(q.beta_log_sd) * normal(rng);
    p.ha = q.ha_mean + std::exp(q.ha_log_sd) * normal(rng);
    return p;
}

double scoring_intensity(const PointParams& p, int t, std::span<const double> z, Side side) {
    const double* a = p.alpha.data() + (t - 1) * p.features;
    double eta = p.beta + (side == Side::home ? p.ha : 0.0);
    for (std::size_t f = 0; f < p.features; ++f) {
        eta += a[f] * z[f];
    }
    return invlogit(eta);
}

double scoring_intensity(const FrameState& state, const PosteriorParams& params, Side side,
                         DrawMode mode) {
    PointParams p;
    if (mode.kind == DrawMode::Kind::sample) {
        std::mt19937_64 rng(mode.seed);
        p = posterior_sample(params, rng);
    } else {
        p = posterior_mean(params);
    }
    return scoring_intensity(p, state.t, params.standardization.apply(state), side);
}

namespace {

constexpr int kMaxTable = 256;

const std::array<double, kMaxTable + 1>& log_factorials() {
    static const auto table = [] {
        std::array<double, kMaxTable + 1> t{};
        for (int i = 1; i <= kMaxTable; ++i) {
            t[i] = t[i - 1] + std::log(static_cast<double>(i));
        }
        return t;
    }();
    return table;
}

double log_factorial(int n) {
    return n <= kMaxTable ? log_factorials()[n] : std::lgamma(n + 1.0);
}

} // namespace

double GoalDist::mean() const {
    double m = 0.0;
    for (std::size_t g = 0; g < pmf.size(); ++g) {
        m += static_cast<double>(g) * pmf[g];
    }
    return m;
}

GoalDist future_goals(double theta, int frames_remaining) {
    if (frames_remaining < 0) {
        throw std::invalid_argument("frames_remaining must be non-negative");
    }
    GoalDist d;
    const int n = frames_remaining;
    d.pmf.assign(n + 1, 0.0);
    if (theta <= 0.0) {
        d.pmf[0] = 1.0;
        return d;
    }
    if (theta >= 1.0) {
        d.pmf[n] = 1.0;
        return d;
    }
    const double lt = std::log(theta);
    const double l1t = std::log1p(-theta);
    const double lfn = log_factorial(n);
    for (int k = 0; k <= n; ++k) {
        d.pmf[k] = std::exp(lfn - log_factorial(k) - log_factorial(n - k) + k * lt + (n - k) * l1t);
    }
    return d;
}

OutcomeProbs outcome_probs(int score_diff, const GoalDist& home, const GoalDist& away) {
    const auto& ph = home.pmf;
    const auto& pa = away.pmf;
    const int na = static_cast<int>(pa.size());
    // below[k] = sum_{j < k} pa[j]
    std::vector<double> below(na + 1, 0.0);
    for (int j = 0; j < na; ++j) {
        below[j + 1] = below[j] + pa[j];
    }
    double win = 0.0;
    double tie = 0.0;
    double loss = 0.0;
    for (int gh = 0; gh < static_cast<int>(ph.size()); ++gh) {
        // Away must score exactly `level` more goals to tie.
        const int level = score_diff + gh;
        const int lo = std::clamp(level, 0, na);
        const int hi = std::clamp(level + 1, 0, na);
        win += ph[gh] * below[lo];
        if (level >= 0 && level < na) {
            tie += ph[gh] * pa[level];
        }
        loss += ph[gh] * (below[na] - below[hi]);
    }
    return {win, tie, loss};
}

OutcomeProbs predict_frame(const FrameState& home, const FrameState& away,
                           const Standardization& st, const PointParams& p) {
    if (home.t != away.t || home.t < 1 || home.t > kFrames) {
        throw std::out_of_range("frame index must agree and lie in 1..100");
    }
    const int t = home.t;
    const double th = scoring_intensity(p, t, st.apply(home), Side::home);
    const double ta = scoring_intensity(p, t, st.apply(away), Side::away);
    const int remaining = kFrames - t;
    return outcome_probs(home.score_diff, future_goals(th, remaining), future_goals(ta, remaining));
}

namespace {

void check_consistent(const PosteriorParams& params) {
    if (params.q.features != params.schema().size() ||
        params.standardization.mean.size() != params.schema().size()) {
        std::vector<std::string> names = schema_names(params.schema());
        throw SchemaError(names);
    }
}

OutcomeProbs average(std::span<const OutcomeProbs> ps) {
    OutcomeProbs out{0.0, 0.0, 0.0};
    for (const auto& p : ps) {
        out.win += p.win;
        out.tie += p.tie;
        out.loss += p.loss;
    }
    const double n = static_cast<double>(ps.size());
    return {out.win / n, out.tie / n, out.loss / n};
}

} // namespace

OutcomeProbs predict_frame(const FrameState& home, const FrameState& away,
                           const PosteriorParams& params, PredictMode mode) {
    check_consistent(params);
    if (mode.kind == PredictMode::Kind::mean) {
        return predict_frame(home, away, params.standardization, posterior_mean(params));
    }
    std::mt19937_64 rng(mode.seed);
    std::vector<OutcomeProbs> draws;
    for (int s = 0; s < std::max(1, mode.samples); ++s) {
        draws.push_back(predict_frame(home, away, params.standardization,
                                      posterior_sample(params, rng)));
    }
    return average(draws);
}

std::vector<OutcomeProbs> predict_match(const FrameMatrix& frames, const PosteriorParams& params,
                                        PredictMode mode) {
    check_consistent(params);
    std::vector<OutcomeProbs> out(kFrames);
    if (mode.kind == PredictMode::Kind::mean) {
        const PointParams p = posterior_mean(params);
        for (int t = 1; t <= kFrames; ++t) {
            out[t - 1] = predict_frame(frames.home[t - 1], frames.away[t - 1],
                                       params.standardization, p);
        }
        return out;
    }
    // Each posterior draw is a whole parameter vector shared by all frames.
    std::mt19937_64 rng(mode.seed);
    const int samples = std::max(1, mode.samples);
    std::vector<std::vector<OutcomeProbs>> per_frame(kFrames);
    for (int s = 0; s < samples; ++s) {
        const PointParams p = posterior_sample(params, rng);
        for (int t = 1; t <= kFrames; ++t) {
            per_frame[t - 1].push_back(predict_frame(frames.home[t - 1], frames.away[t - 1],
                                                     params.standardization, p));
        }
    }
    for (int t = 0; t < kFrames; ++t) {
        out[t] = average(per_frame[t]);
    }
    return out;
}

std::vector<FeatureTrace> feature_traces(const PosteriorParams& params) {
    std::vector<FeatureTrace> out;
    const auto& q = params.q;
    for (std::size_t f = 0; f < q.features; ++f) {
        FeatureTrace tr{params.schema()[f], {}};
        const double scale = params.standardization.sd[f];
        for (int t = 1; t <= kFrames; ++t) {
            tr.points.push_back({t, q.mean(t, f) / scale, q.sd(t, f) / scale});
        }
        out.push_back(std::move(tr));
    }
    return out;
}

} // namespace inplay
