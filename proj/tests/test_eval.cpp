#include "inplay/eval.hpp"
#include "inplay/simgen.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace inplay;

TEST_CASE("rps closed forms") {
    CHECK(rps({1.0, 0.0, 0.0}, Outcome::win) == 0.0);
    CHECK(std::abs(rps({1.0 / 3, 1.0 / 3, 1.0 / 3}, Outcome::win) - 5.0 / 18.0) <= 1e-12);
    CHECK(std::abs(rps({0.0, 0.0, 1.0}, Outcome::win) - 1.0) <= 1e-12);
}

TEST_CASE("rps properties") {
    std::mt19937_64 rng(21);
    std::gamma_distribution<double> g(1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double a = g(rng);
        const double b = g(rng);
        const double c = g(rng);
        const double s = a + b + c;
        const OutcomeProbs p{a / s, b / s, c / s};
        const OutcomeProbs rev{p.loss, p.tie, p.win};
        for (Outcome o : {Outcome::win, Outcome::tie, Outcome::loss}) {
            const double r = rps(p, o);
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
            CHECK(std::abs(r - oracle::rps(p, o)) <= 1e-15);
        }
        CHECK(std::abs(rps(p, Outcome::win) - rps(rev, Outcome::loss)) <= 1e-12);
    }
}

TEST_CASE("accuracy curves") {
    // Perfect endgame: only the last frame is right.
    std::vector<MatchForecast> f(3, MatchForecast(100, OutcomeProbs{}));
    const std::vector<Outcome> o{Outcome::win, Outcome::tie, Outcome::loss};
    for (std::size_t m = 0; m < 3; ++m) {
        f[m][99] = {o[m] == Outcome::win ? 1.0 : 0.0, o[m] == Outcome::tie ? 1.0 : 0.0,
                    o[m] == Outcome::loss ? 1.0 : 0.0};
    }
    const auto acc = accuracy_curve(f, o);
    CHECK(acc[99] == 1.0);
    // Uniform forecasts resolve to win under the declared tie-break.
    CHECK(acc[0] == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(accuracy_curve(f, std::vector<Outcome>{Outcome::win}), std::invalid_argument);
}

namespace {

struct TruthSet {
    std::vector<MatchForecast> forecasts;
    std::vector<Outcome> outcomes;
};

TruthSet truth_forecasts(int matches) {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = matches;
    const Corpus c = simulate_matches(g);
    TruthSet s;
    for (std::size_t i = 0; i < c.matches.size(); ++i) {
        s.forecasts.push_back(c.truth[i].probs);
        const auto& h = c.matches[i].header;
        s.outcomes.push_back(outcome_from_score(h.final_home_goals - h.final_away_goals));
    }
    return s;
}

} // namespace

TEST_CASE("true probabilities are calibrated") {
    const TruthSet s = truth_forecasts(5000);
    const CalibrationTable table = calibration_curve(s.forecasts, s.outcomes);
    std::size_t total = 0;
    for (Outcome o : {Outcome::win, Outcome::tie, Outcome::loss}) {
        CHECK(table.max_deviation(o, 50) <= 0.05);
        std::size_t n = 0;
        for (const auto& b : table.of(o)) {
            CHECK(b.empirical >= 0.0);
            CHECK(b.empirical <= 1.0);
            CHECK(b.low_confidence == (b.count < 50));
            n += b.count;
        }
        CHECK(n == 5000 * 100);
        total += n;
    }
    CHECK(total == 3 * 5000 * 100);
}

TEST_CASE("constant home-win predictor") {
    TruthSet s = truth_forecasts(2000);
    double rate = 0;
    for (Outcome o : s.outcomes) {
        rate += o == Outcome::win ? 1.0 / 2000.0 : 0.0;
    }
    for (auto& f : s.forecasts) {
        std::fill(f.begin(), f.end(), OutcomeProbs{1.0, 0.0, 0.0});
    }
    const EvalReport r = evaluate(s.forecasts, s.outcomes);
    for (double a : r.accuracy) {
        CHECK(a == doctest::Approx(rate));
    }
    CHECK(std::abs(rate - 0.45) <= 0.05);
    const auto& win = r.calibration.of(Outcome::win);
    REQUIRE(win.size() == 1);
    CHECK(win[0].predicted == 1.0);
    CHECK(win[0].empirical == doctest::Approx(rate));
    CHECK(r.matches == 2000);
}

TEST_CASE("empty inputs") {
    const std::vector<MatchForecast> none;
    const std::vector<Outcome> no;
    const CalibrationTable t = calibration_curve(none, no);
    for (const auto& c : t.classes) {
        CHECK(c.empty());
    }
    CalibrationOptions bad;
    bad.bins = 1;
    CHECK_THROWS_AS(calibration_curve(none, no, bad), std::invalid_argument);
}

TEST_CASE("report exports") {
    const TruthSet s = truth_forecasts(20);
    const EvalReport r = evaluate(s.forecasts, s.outcomes);
    CHECK(r.rps.size() == 100);
    CHECK(r.accuracy.size() == 100);
    CHECK(r.accuracy[99] == 1.0);
    CHECK(r.rps[99] == 0.0);
    std::ostringstream curves;
    write_curves_csv(curves, r);
    const std::string text = curves.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 101);
    const std::string json = report_json(r);
    CHECK(json.find("mean_rps") != std::string::npos);
}
