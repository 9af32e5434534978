#include "inplay/simgen.hpp"

#include <doctest.h>

#include <random>

using namespace inplay;

TEST_CASE("null preset scores about 2.7 goals a game") {
    GeneratorConfig g = GeneratorConfig::preset("null");
    g.matches = 5000;
    const Corpus c = simulate_matches(g);
    double goals = 0;
    for (const auto& m : c.matches) {
        goals += m.header.final_home_goals + m.header.final_away_goals;
    }
    CHECK(std::abs(goals / 5000.0 - 2.72) <= 0.1);
}

TEST_CASE("huge home advantage means home wins") {
    GeneratorConfig g;
    g.ha = 5.0;
    g.matches = 200;
    const Corpus c = simulate_matches(g);
    int wins = 0;
    for (const auto& m : c.matches) {
        wins += m.header.final_home_goals > m.header.final_away_goals;
    }
    CHECK(wins >= 198);
}

namespace {

// Monte-Carlo continuation from the state after frame t using the logged
// intensities.
OutcomeProbs rollout(const MatchTruth& tr, int t, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double win = 0;
    double tie = 0;
    for (int i = 0; i < n; ++i) {
        int d = t == 0 ? 0 : tr.score_diff[t - 1];
        for (int s = t + 1; s <= kFrames; ++s) {
            const double c = tr.score_coef[s - 1];
            const double ph = 1.0 / (1.0 + std::exp(-(tr.base_logit[0][s - 1] + c * d)));
            const double pa = 1.0 / (1.0 + std::exp(-(tr.base_logit[1][s - 1] - c * d)));
            const bool h = u(rng) < ph;
            const bool a = u(rng) < pa;
            d += (h ? 1 : 0) - (a ? 1 : 0);
        }
        win += d > 0;
        tie += d == 0;
    }
    return {win / n, tie / n, (n - win - tie) / n};
}

} // namespace

TEST_CASE("true outcome probabilities") {
    GeneratorConfig g = GeneratorConfig::preset("recovery");
    g.matches = 3;
    const Corpus c = simulate_matches(g);
    for (const auto& tr : c.truth) {
        CHECK(tr.probs.size() == 100);
        for (int t = 1; t <= 100; ++t) {
            const auto p = true_outcome_probs(tr, t);
            CHECK(p.win == tr.probs[t - 1].win);
            CHECK(p.valid());
        }
        const auto end = tr.probs[99];
        const Outcome o = outcome_from_score(tr.score_diff[99]);
        CHECK(end[o] == 1.0);
    }
    const MatchTruth& tr = c.truth[0];
    for (int t : {0, 30, 75}) {
        const auto exact = true_outcome_probs(tr, t);
        const auto mc = rollout(tr, t, 100000, 100 + t);
        CHECK(std::abs(exact.win - mc.win) <= 0.005);
        CHECK(std::abs(exact.tie - mc.tie) <= 0.005);
        CHECK(std::abs(exact.loss - mc.loss) <= 0.005);
    }
    CHECK_THROWS_AS(true_outcome_probs(tr, 101), std::out_of_range);
}

TEST_CASE("symmetric kickoff") {
    GeneratorConfig g;
    g.rating_sd = 0.0;
    g.matches = 3;
    const Corpus c = simulate_matches(g);
    for (const auto& tr : c.truth) {
        CHECK(std::abs(tr.kickoff.win - tr.kickoff.loss) <= 1e-12);
    }
}

TEST_CASE("logged intensities follow from the emitted events") {
    GeneratorConfig g = GeneratorConfig::preset("timevarying");
    g.matches = 4;
    const Corpus c = simulate_matches(g);
    for (std::size_t i = 0; i < c.matches.size(); ++i) {
        const FrameMatrix f = build_frames(c.matches[i], c.ratings);
        for (Side side : {Side::home, Side::away}) {
            const int k = side == Side::home ? 0 : 1;
            for (int t = 1; t <= 100; ++t) {
                const FrameState& s = f.states(side)[t - 1];
                double eta = g.beta + (side == Side::home ? g.ha : 0.0);
                for (Feature feat : kAllFeatures) {
                    eta += g.coef(t, feat) * feature_value(s, feat);
                }
                CHECK(std::abs(invlogit(eta) - c.truth[i].theta[k][t - 1]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("determinism and per-match independence") {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = 6;
    const Corpus a = simulate_matches(g);
    const Corpus b = simulate_matches(g);
    CHECK(a.matches == b.matches);
    const GeneratedMatch one = simulate_match(g, league_ratings(g), 4);
    CHECK(one.match == a.matches[4]);
    g.seed += 1;
    CHECK_FALSE(simulate_matches(g).matches == a.matches);
}

TEST_CASE("configuration errors") {
    GeneratorConfig g;
    g.set_constant(Feature::goals, 0.1);
    CHECK_THROWS_AS(g.validate(), ValidationError);
    GeneratorConfig h;
    h.beta = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(simulate_matches(h), ValidationError);
    CHECK_THROWS_AS(GeneratorConfig::preset("nope"), ValidationError);
    for (const auto& name : GeneratorConfig::preset_names()) {
        CHECK_NOTHROW(GeneratorConfig::preset(name).validate());
    }
}
