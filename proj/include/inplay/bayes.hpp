#pragma once

#include "inplay/features.hpp"
#include "inplay/standardize.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace inplay {

/// Scales (standard deviations) of the priors
///   alpha_1 ~ N(0, alpha1_scale), alpha_t ~ N(alpha_{t-1}, alpha_walk_scale),
///   beta ~ N(0, beta_scale), Ha ~ N(0, ha_scale).
struct PriorConfig {
    double alpha_walk_scale = 2.0;
    double beta_scale = 10.0;
    double ha_scale = 10.0;
    double alpha1_scale = 10.0;

    void validate() const;
    bool operator==(const PriorConfig&) const = default;
};

/// Fully factorized Gaussian over alpha[t][f], beta and Ha, parameterized by
/// means and log standard deviations.
struct VariationalParams {
    std::size_t features = 0;
    std::vector<double> alpha_mean;   // kFrames x features, frame-major
    std::vector<double> alpha_log_sd; // same layout
    double beta_mean = 0.0;
    double beta_log_sd = 0.0;
    double ha_mean = 0.0;
    double ha_log_sd = 0.0;

    static VariationalParams constant(std::size_t features, double mean, double log_sd);

    // Number of latent scalars: kFrames * features + 2.
    std::size_t latent_count() const { return kFrames * features + 2; }
    // Flattened: [alpha_mean | alpha_log_sd | beta_mean beta_log_sd ha_mean ha_log_sd].
    std::size_t flat_size() const { return 2 * kFrames * features + 4; }
    std::vector<double> flatten() const;
    static VariationalParams unflatten(std::size_t features, std::span<const double> flat);

    double mean(int t, std::size_t f) const { return alpha_mean[(t - 1) * features + f]; }
    double sd(int t, std::size_t f) const;

    bool operator==(const VariationalParams&) const = default;
};

/// Per-frame training observations. The state after frame t (t = 1..99) is
/// paired with whether that team scored in frame t + 1 (capped at one).
struct ObservationSet {
    std::size_t features = 0;
    std::vector<std::int16_t> frame;
    std::vector<std::uint8_t> home;
    std::vector<std::uint8_t> goal;
    std::vector<double> x; // standardized, size() x features

    std::size_t size() const { return goal.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * features, features}; }
};

ObservationSet make_observations(std::span<const FrameMatrix> frames, const Standardization& st);

/// Standard-normal draws for the reparameterization; each draw covers every
/// latent scalar in the order alpha (frame-major), beta, Ha.
struct NoiseDraws {
    std::size_t latent = 0;
    std::vector<double> eps;

    std::size_t draws() const { return latent == 0 ? 0 : eps.size() / latent; }
    std::span<const double> draw(std::size_t s) const { return {eps.data() + s * latent, latent}; }
    static NoiseDraws sample(std::size_t latent, std::size_t draws, std::mt19937_64& rng);
};

struct ElboResult {
    double value = 0.0;
    VariationalParams grad;
};

/// Closed-form E_q[log prior] + entropy of q, with gradient.
ElboResult prior_and_entropy(const VariationalParams& q, const PriorConfig& prior);

/// Unbiased ELBO estimate: the likelihood over `batch` is averaged over the
/// noise draws and rescaled by total_count / |batch|; prior and entropy terms
/// are exact. Throws NumericalError naming the offending block if the value is
/// not finite.
ElboResult elbo_and_grad(const VariationalParams& q, const PriorConfig& prior,
                         const ObservationSet& data, std::span<const std::size_t> batch,
                         const NoiseDraws& noise, double total_count);

struct VISchedule {
    double step = 0.02;      // Adam step
    int decay_start = 1000;  // constant step until here, then step * sqrt(decay_start / iteration)
    int max_iterations = 20000;
    std::size_t minibatch = 4096;
    std::uint64_t seed = 20190901;
    double tol = 1e-4;
    int window = 50;
    int patience = 10;  // consecutive windows without a tol-sized gain before stopping
    int draws = 1;
    int report_draws = 16;
    double init_sd = 0.1;

    bool operator==(const VISchedule&) const = default;
};

struct PosteriorParams {
    Standardization standardization;
    VariationalParams q;
    PriorConfig prior;
    VISchedule schedule;
    std::vector<double> elbo_trace; // full-data ELBO every `window` iterations
    double final_elbo = 0.0;
    int iterations = 0;
    bool converged = false;

    const FeatureSchema& schema() const { return standardization.schema; }
    bool operator==(const PosteriorParams&) const = default;
};

/// Default Bayesian feature set. game_time is left out: with per-frame
/// coefficients it only acts as a per-frame intercept, which would make beta
/// unidentifiable. `with_rating = false` gives the pregame-strength-free variant.
FeatureSchema bayes_schema(bool with_rating = true);

PosteriorParams fit_vi(std::span<const FrameMatrix> frames, const FeatureSchema& schema,
                       const PriorConfig& prior = {}, const VISchedule& schedule = {});
PosteriorParams fit_vi(const ObservationSet& data, Standardization st, const PriorConfig& prior,
                       const VISchedule& schedule);

/// One point in parameter space: the posterior mean or a posterior draw.
struct PointParams {
    std::size_t features = 0;
    std::vector<double> alpha;
    double beta = 0.0;
    double ha = 0.0;
};

PointParams posterior_mean(const PosteriorParams& params);
PointParams posterior_sample(const PosteriorParams& params, std::mt19937_64& rng);

struct DrawMode {
    enum class Kind { mean, sample } kind = Kind::mean;
    std::uint64_t seed = 0;

    static DrawMode mean() { return {}; }
    static DrawMode sample(std::uint64_t seed) { return {Kind::sample, seed}; }
};

double scoring_intensity(const FrameState& state, const PosteriorParams& params, Side side,
                         DrawMode mode = DrawMode::mean());
// invlogit(alpha_t . z + beta + Ha [side = home]) for a standardized state z.
double scoring_intensity(const PointParams& p, int t, std::span<const double> z, Side side);

/// Probability mass over future goal counts 0..n.
struct GoalDist {
    std::vector<double> pmf;
    double mean() const;
};

GoalDist future_goals(double theta, int frames_remaining);

/// P(final result) given the current home-minus-away score and independent
/// distributions of goals still to come.
OutcomeProbs outcome_probs(int score_diff, const GoalDist& home, const GoalDist& away);

struct PredictMode {
    enum class Kind { mean, posterior } kind = Kind::mean;
    int samples = 100;
    std::uint64_t seed = 20190901;

    static PredictMode mean() { return {}; }
    static PredictMode posterior(int samples, std::uint64_t seed) {
        return {Kind::posterior, samples, seed};
    }
};

// Probabilities at frame home.t (== away.t) from the two team states.
OutcomeProbs predict_frame(const FrameState& home, const FrameState& away,
                           const Standardization& st, const PointParams& p);
OutcomeProbs predict_frame(const FrameState& home, const FrameState& away,
                           const PosteriorParams& params, PredictMode mode = PredictMode::mean());

std::vector<OutcomeProbs> predict_match(const FrameMatrix& frames, const PosteriorParams& params,
                                        PredictMode mode = PredictMode::mean());

struct TracePoint {
    int t = 1;
    double mean = 0.0;
    double sd = 0.0;
};

struct FeatureTrace {
    Feature feature;
    std::vector<TracePoint> points;
};

/// Per-frame posterior of each feature weight, in raw (unstandardized) units.
std::vector<FeatureTrace> feature_traces(const PosteriorParams& params);

} // namespace inplay
