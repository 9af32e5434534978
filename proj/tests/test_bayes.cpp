#include "inplay/bayes.hpp"
#include "inplay/simgen.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace inplay;

namespace {

// Point-mass posterior on an identity standardization.
PosteriorParams point_params(const FeatureSchema& schema, double beta, double ha) {
    PosteriorParams p;
    p.standardization.schema = schema;
    p.standardization.mean.assign(schema.size(), 0.0);
    p.standardization.sd.assign(schema.size(), 1.0);
    p.q = VariationalParams::constant(schema.size(), 0.0, std::log(1e-9));
    p.q.beta_mean = beta;
    p.q.ha_mean = ha;
    return p;
}

std::size_t column(const FeatureSchema& schema, Feature f) {
    return static_cast<std::size_t>(std::find(schema.begin(), schema.end(), f) - schema.begin());
}

void set_weight(PosteriorParams& p, Feature f, double w) {
    const std::size_t c = column(p.schema(), f);
    for (int t = 1; t <= kFrames; ++t) {
        p.q.alpha_mean[(t - 1) * p.q.features + c] = w;
    }
}

std::vector<FrameMatrix> featurize(const Corpus& c) {
    std::vector<FrameMatrix> out;
    for (const auto& m : c.matches) {
        out.push_back(build_frames(m, c.ratings));
    }
    return out;
}

} // namespace

TEST_CASE("scoring intensity closed forms") {
    const FeatureSchema schema{Feature::score_diff};
    FrameState s;
    s.t = 30;
    CHECK(scoring_intensity(s, point_params(schema, 0.0, 0.0), Side::home) == 0.5);
    CHECK(scoring_intensity(s, point_params(schema, -4.0, 0.0), Side::away) ==
          doctest::Approx(1.0 / (1.0 + std::exp(4.0))).epsilon(1e-14));
    CHECK(scoring_intensity(s, point_params(schema, -4.0, 0.0), Side::away) ==
          doctest::Approx(0.0180).epsilon(0.01));
    // Home advantage only enters for the home side.
    const auto p = point_params(schema, -4.0, 0.5);
    CHECK(scoring_intensity(s, p, Side::home) ==
          doctest::Approx(1.0 / (1.0 + std::exp(3.5))).epsilon(1e-14));
}

TEST_CASE("future goals") {
    CHECK(future_goals(0.3, 0).pmf == std::vector<double>{1.0});
    const auto two = future_goals(0.5, 2).pmf;
    REQUIRE(two.size() == 3);
    CHECK(two[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(two[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(two[2] == doctest::Approx(0.25).epsilon(1e-15));
    const GoalDist d = future_goals(0.03, 50);
    double direct = 0;
    for (std::size_t g = 0; g < d.pmf.size(); ++g) {
        direct += static_cast<double>(g) * d.pmf[g];
        CHECK(std::abs(d.pmf[g] - oracle::binom_pmf(50, static_cast<int>(g), 0.03)) <= 1e-14);
    }
    CHECK(std::abs(d.mean() - 1.5) <= 1e-12);
    CHECK(std::abs(direct - 1.5) <= 1e-12);
    CHECK(std::abs(std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0) - 1.0) <= 1e-9);
}

TEST_CASE("outcome probabilities") {
    const auto done = outcome_probs(1, future_goals(0.2, 0), future_goals(0.2, 0));
    CHECK(done.win == 1.0);
    CHECK(done.tie == 0.0);
    CHECK(done.loss == 0.0);

    const double th = 0.07;
    const auto last = outcome_probs(0, future_goals(th, 1), future_goals(th, 1));
    CHECK(last.win == doctest::Approx(th * (1 - th)).epsilon(1e-14));
    CHECK(last.loss == doctest::Approx(th * (1 - th)).epsilon(1e-14));
    CHECK(last.tie == doctest::Approx(th * th + (1 - th) * (1 - th)).epsilon(1e-14));

    const auto p = outcome_probs(-1, future_goals(0.4, 3), future_goals(0.2, 3));
    const auto e = oracle::enumerate(-1, 3, 0.4, 3, 0.2);
    CHECK(std::abs(p.win - e.win) <= 1e-12);
    CHECK(std::abs(p.tie - e.tie) <= 1e-12);
    CHECK(std::abs(p.loss - e.loss) <= 1e-12);
}

TEST_CASE("outcome probabilities are monotone in the score") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.001, 0.3);
    for (int i = 0; i < 200; ++i) {
        const auto h = future_goals(u(rng), static_cast<int>(rng() % 60));
        const auto a = future_goals(u(rng), static_cast<int>(rng() % 60));
        for (int d = -4; d < 4; ++d) {
            const auto lo = outcome_probs(d, h, a);
            const auto hi = outcome_probs(d + 1, h, a);
            CHECK(hi.win >= lo.win - 1e-15);
            CHECK(hi.loss <= lo.loss + 1e-15);
        }
    }
}

TEST_CASE("predictions at the final frame and under symmetry") {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = 30;
    const auto frames = featurize(simulate_matches(g));
    auto params = point_params(bayes_schema(), -4.0, 0.3);
    set_weight(params, Feature::score_diff, 0.1);
    set_weight(params, Feature::rating_diff, 0.004);
    for (const auto& f : frames) {
        const auto probs = predict_match(f, params);
        REQUIRE(probs.size() == 100);
        const Outcome o = f.outcome;
        CHECK(probs[99][o] == 1.0);
        for (const auto& p : probs) {
            CHECK(p.valid());
        }
    }

    // Swapping the teams and removing home advantage swaps win and loss.
    auto sym = point_params(bayes_schema(), -4.0, 0.0);
    set_weight(sym, Feature::score_diff, 0.2);
    set_weight(sym, Feature::duel_strength, -1.0);
    FrameState h;
    h.t = 37;
    h.score_diff = 1;
    h.goals = 2;
    h.duel_strength = 0.6;
    FrameState a = h;
    a.score_diff = -1;
    a.goals = 1;
    a.duel_strength = 0.4;
    const auto fwd = predict_frame(h, a, sym);
    const auto rev = predict_frame(a, h, sym);
    CHECK(std::abs(fwd.win - rev.loss) <= 1e-12);
    CHECK(std::abs(fwd.tie - rev.tie) <= 1e-12);

    FrameState level;
    level.t = 50;
    const auto even = predict_frame(level, level, sym);
    CHECK(std::abs(even.win - even.loss) <= 1e-9);
}

TEST_CASE("match prediction agrees with frozen-intensity rollouts") {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = 1;
    const auto frames = featurize(simulate_matches(g));
    const FrameMatrix& f = frames[0];
    auto params = point_params({Feature::score_diff, Feature::red_diff}, -3.6, 0.3);
    set_weight(params, Feature::score_diff, -0.2);
    set_weight(params, Feature::red_diff, -0.5);
    const auto probs = predict_match(f, params);
    for (int t : {1, 25, 60, 90}) {
        const auto& h = f.home[t - 1];
        const auto& a = f.away[t - 1];
        const double th = 1.0 / (1.0 + std::exp(-(-3.6 + 0.3 - 0.2 * h.score_diff - 0.5 * h.red_diff)));
        const double ta = 1.0 / (1.0 + std::exp(-(-3.6 - 0.2 * a.score_diff - 0.5 * a.red_diff)));
        const auto mc = oracle::rollouts(h.score_diff, th, ta, 100 - t, 100000, 40 + t);
        CHECK(std::abs(probs[t - 1].win - mc.win) <= 0.03);
        CHECK(std::abs(probs[t - 1].tie - mc.tie) <= 0.03);
        CHECK(std::abs(probs[t - 1].loss - mc.loss) <= 0.03);
    }
}

TEST_CASE("posterior-mode prediction averages draws") {
    auto params = point_params({Feature::score_diff}, -3.5, 0.2);
    params.q.beta_log_sd = std::log(0.5);
    FrameState s;
    s.t = 20;
    const auto a = predict_frame(s, s, params, PredictMode::posterior(50, 1));
    const auto b = predict_frame(s, s, params, PredictMode::posterior(50, 1));
    CHECK(a.win == b.win);
    CHECK(a.valid());
    CHECK(std::abs(a.tie - predict_frame(s, s, params).tie) > 1e-3);
    // Without spread the draws collapse onto the mean.
    params.q.beta_log_sd = std::log(1e-9);
    const auto c = predict_frame(s, s, params, PredictMode::posterior(20, 1));
    const auto m = predict_frame(s, s, params);
    CHECK(std::abs(c.win - m.win) <= 1e-7);
    CHECK(std::abs(c.tie - m.tie) <= 1e-7);
}

TEST_CASE("schema mismatch is reported") {
    auto params = point_params({Feature::score_diff, Feature::red_diff}, -4, 0);
    params.standardization.mean.pop_back();
    FrameMatrix f;
    f.home.resize(100);
    f.away.resize(100);
    CHECK_THROWS_AS(predict_match(f, params), SchemaError);
}

namespace {

// 1 / sqrt(diagonal precision) of the random-walk prior for one feature.
std::vector<double> walk_optimal_sd(const PriorConfig& prior) {
    const double w = 1.0 / (prior.alpha_walk_scale * prior.alpha_walk_scale);
    const double a1 = 1.0 / (prior.alpha1_scale * prior.alpha1_scale);
    std::vector<double> sd(kFrames);
    for (int t = 1; t <= kFrames; ++t) {
        double prec = t == 1 ? a1 + w : t == kFrames ? w : 2 * w;
        sd[t - 1] = 1.0 / std::sqrt(prec);
    }
    return sd;
}

} // namespace

TEST_CASE("without data the optimum sits at the prior") {
    const PriorConfig prior;
    const auto sd = walk_optimal_sd(prior);
    VariationalParams q = VariationalParams::constant(2, 0.0, 0.0);
    for (int t = 1; t <= kFrames; ++t) {
        for (std::size_t f = 0; f < 2; ++f) {
            q.alpha_log_sd[(t - 1) * 2 + f] = std::log(sd[t - 1]);
        }
    }
    q.beta_log_sd = std::log(prior.beta_scale);
    q.ha_log_sd = std::log(prior.ha_scale);
    const auto at = prior_and_entropy(q, prior);
    for (double g : at.grad.flatten()) {
        CHECK(std::abs(g) <= 1e-12);
    }

    // Any perturbation lowers the objective.
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.1);
    for (int k = 0; k < 20; ++k) {
        auto flat = q.flatten();
        for (double& v : flat) {
            v += n(rng);
        }
        CHECK(prior_and_entropy(VariationalParams::unflatten(2, flat), prior).value < at.value);
    }

    // Plain gradient ascent from elsewhere heads to the same scalars.
    VariationalParams r = VariationalParams::constant(2, 0.7, -1.0);
    for (int it = 0; it < 4000; ++it) {
        const auto g = prior_and_entropy(r, prior).grad;
        r.beta_mean += 1.0 * g.beta_mean;
        r.beta_log_sd += 0.01 * g.beta_log_sd;
        r.ha_mean += 1.0 * g.ha_mean;
        r.ha_log_sd += 0.01 * g.ha_log_sd;
    }
    CHECK(std::abs(r.beta_mean) <= 1e-3);
    CHECK(std::abs(std::exp(r.beta_log_sd) - 10.0) <= 1e-3);
    CHECK(std::abs(std::exp(r.ha_log_sd) - 10.0) <= 1e-3);
}

namespace {

struct SmallProblem {
    std::vector<FrameMatrix> frames;
    Standardization st;
    ObservationSet data;
};

SmallProblem small_problem(int matches) {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = matches;
    SmallProblem p;
    p.frames = featurize(simulate_matches(g));
    p.st = Standardization::fit_states(bayes_schema(), p.frames, true);
    p.data = make_observations(p.frames, p.st);
    return p;
}

} // namespace

TEST_CASE("observations pair a state with the next frame's goal") {
    Match m = oracle::empty_match();
    oracle::add_goal(m, 40, Side::home);
    oracle::add_goal(m, 1, Side::away);
    const FrameMatrix f = build_frames(m, RatingTable{});
    const std::vector<FrameMatrix> frames{f};
    const auto st = Standardization::fit_states(bayes_schema(), frames, true);
    const ObservationSet obs = make_observations(frames, st);
    CHECK(obs.size() == 198);
    int goals = 0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs.goal[i]) {
            ++goals;
            CHECK(obs.frame[i] == 39);
            CHECK(obs.home[i] == 1);
        }
    }
    // The frame-1 goal has no preceding state.
    CHECK(goals == 1);
}

TEST_CASE("gradient matches central differences") {
    const SmallProblem p = small_problem(20);
    const PriorConfig prior;
    std::vector<std::size_t> all(p.data.size());
    std::iota(all.begin(), all.end(), 0);
    std::mt19937_64 rng(8);
    const std::size_t features = p.st.size();
    VariationalParams base = VariationalParams::constant(features, 0.0, std::log(0.2));
    const NoiseDraws noise = NoiseDraws::sample(base.latent_count(), 2, rng);
    std::normal_distribution<double> n(0.0, 0.3);
    std::uniform_int_distribution<std::size_t> pick(0, base.flat_size() - 1);
    const double h = 1e-5;
    double worst = 0;
    for (int point = 0; point < 3; ++point) {
        auto flat = base.flatten();
        for (double& v : flat) {
            v += n(rng);
        }
        flat[flat.size() - 4] -= 3.5; // beta near a realistic intercept
        const auto q = VariationalParams::unflatten(features, flat);
        const auto grad = elbo_and_grad(q, prior, p.data, all, noise, all.size()).grad.flatten();
        for (int k = 0; k < 40; ++k) {
            const std::size_t i = k < 4 ? flat.size() - 1 - k : pick(rng);
            auto up = flat;
            auto down = flat;
            up[i] += h;
            down[i] -= h;
            const double fu =
                elbo_and_grad(VariationalParams::unflatten(features, up), prior, p.data, all, noise,
                              all.size()).value;
            const double fd = elbo_and_grad(VariationalParams::unflatten(features, down), prior,
                                            p.data, all, noise, all.size()).value;
            const double num = (fu - fd) / (2 * h);
            const double rel = std::abs(num - grad[i]) / std::max(1.0, std::abs(grad[i]));
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("minibatch rescaling is unbiased") {
    const SmallProblem p = small_problem(10);
    const PriorConfig prior;
    std::mt19937_64 rng(12);
    const auto q = VariationalParams::constant(p.st.size(), 0.0, std::log(0.1));
    VariationalParams q2 = q;
    q2.beta_mean = -3.5;
    const NoiseDraws noise = NoiseDraws::sample(q.latent_count(), 4, rng);
    std::vector<std::size_t> all(p.data.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> even;
    std::vector<std::size_t> odd;
    for (std::size_t i : all) {
        (i % 2 ? odd : even).push_back(i);
    }
    const double n = static_cast<double>(all.size());
    const double full = elbo_and_grad(q2, prior, p.data, all, noise, n).value;
    const double a = elbo_and_grad(q2, prior, p.data, even, noise, n).value;
    const double b = elbo_and_grad(q2, prior, p.data, odd, noise, n).value;
    // The two halves are equally likely batches; their mean is the full-data value.
    CHECK(std::abs(0.5 * (a + b) - full) <= 1e-8 * std::abs(full));
}

TEST_CASE("non-finite parameters are named") {
    const SmallProblem p = small_problem(2);
    std::mt19937_64 rng(1);
    auto q = VariationalParams::constant(p.st.size(), 0.0, 0.0);
    q.ha_mean = std::numeric_limits<double>::quiet_NaN();
    const NoiseDraws noise = NoiseDraws::sample(q.latent_count(), 1, rng);
    std::vector<std::size_t> batch{0, 1, 2};
    try {
        elbo_and_grad(q, PriorConfig{}, p.data, batch, noise, 3.0);
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("ha") != std::string::npos);
    }
}

TEST_CASE("fit smoke run and reproducibility") {
    const SmallProblem p = small_problem(1);
    VISchedule s;
    s.max_iterations = 10;
    s.minibatch = 64;
    const auto a = fit_vi(p.frames, bayes_schema(), {}, s);
    CHECK(std::isfinite(a.final_elbo));
    CHECK(a.iterations == 10);
    CHECK(a.q.alpha_mean.size() == 100 * bayes_schema().size());
    const auto b = fit_vi(p.frames, bayes_schema(), {}, s);
    CHECK(a == b);
    CHECK_THROWS_AS(fit_vi(std::vector<FrameMatrix>{}, bayes_schema(), {}, s), ValidationError);
    PriorConfig bad;
    bad.alpha_walk_scale = 0;
    CHECK_THROWS_AS(fit_vi(p.frames, bayes_schema(), bad, s), ValidationError);
}

TEST_CASE("intercept recovery without feature effects") {
    GeneratorConfig g;
    g.beta = -3.8;
    g.ha = 0.35;
    g.matches = 2000;
    const auto frames = featurize(simulate_matches(g));
    const auto fit = fit_vi(frames, bayes_schema());
    // A centered state has linear predictor beta + Ha.
    const double theta = invlogit(fit.q.beta_mean + fit.q.ha_mean);
    CHECK(std::abs(theta - invlogit(-3.45)) <= 0.005);
    CHECK(fit.q.ha_mean >= 0.20);
    CHECK(fit.q.ha_mean <= 0.50);
}

TEST_CASE("feature traces") {
    GeneratorConfig g;
    g.beta = -3.9;
    g.ha = 0.3;
    g.matches = 1500;
    g.set_constant(Feature::duel_strength, -3.0);
    g.set_constant(Feature::red_diff, -0.6);
    const auto frames = featurize(simulate_matches(g));
    const auto fit = fit_vi(frames, bayes_schema());
    const auto traces = feature_traces(fit);
    REQUIRE(traces.size() == bayes_schema().size());
    for (const auto& tr : traces) {
        CHECK(tr.points.size() == 100);
        CHECK(tr.points.front().t == 1);
        CHECK(tr.points.back().t == 100);
    }
    const auto& duel = traces[column(fit.schema(), Feature::duel_strength)];
    int negative = 0;
    double mean = 0;
    for (const auto& pt : duel.points) {
        negative += pt.mean < 0;
        mean += pt.mean / 100.0;
    }
    CHECK(negative > 50);
    // A constant effect gives a flat trace. Mean-field sds are too narrow for
    // correlated weights, so a few frames may stray past 3 sd.
    int inside = 0;
    for (const auto& pt : duel.points) {
        inside += std::abs(pt.mean - mean) < 3 * pt.sd;
    }
    CHECK(inside >= 95);
}
