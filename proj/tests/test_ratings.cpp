#include "inplay/ratings.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace inplay;

TEST_CASE("rating_diff basics") {
    RatingTable t;
    CHECK(rating_diff(t, "x", "y") == 0.0);
    t.set("x", 1600);
    t.set("y", 1500);
    CHECK(rating_diff(t, "x", "y") == 100.0);
    CHECK(rating_diff(t, "y", "unknown") == 0.0);
}

TEST_CASE("elo update closed forms") {
    RatingTable t;
    t.set("h", 1500);
    t.set("a", 1500);
    const auto tie = elo_update(t, "h", "a", 1, 1);
    CHECK(tie.rating("h") == doctest::Approx(1500.0).epsilon(1e-15));
    CHECK(tie.rating("a") == doctest::Approx(1500.0).epsilon(1e-15));
    const auto win = elo_update(t, "h", "a", 2, 0);
    CHECK(win.rating("h") - 1500.0 == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(win.rating("a") - 1500.0 == doctest::Approx(-10.0).epsilon(1e-12));
    // Expected score against a 400-point weaker side.
    CHECK(elo_expected(1900, 1500, 0) == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("a team winning every match ends above everybody") {
    std::vector<Match> season;
    const std::vector<std::string> others{"B", "C", "D", "E"};
    int id = 0;
    for (int round = 0; round < 3; ++round) {
        for (const auto& o : others) {
            Match m = oracle::empty_match("s" + std::to_string(id++));
            const bool home = round % 2 == 0;
            m.header.home_team_id = home ? "A" : o;
            m.header.away_team_id = home ? o : "A";
            (home ? m.header.final_home_goals : m.header.final_away_goals) = 1;
            season.push_back(m);
        }
        // Results among the others, so their ratings move as well.
        Match m = oracle::empty_match("x" + std::to_string(id++));
        m.header.home_team_id = "B";
        m.header.away_team_id = "C";
        m.header.final_home_goals = 2;
        season.push_back(m);
    }
    const RatingTable t = ratings_from_history(season);
    for (const auto& o : others) {
        CHECK(rating_diff(t, "A", o) > 0.0);
    }
}

namespace {

double gap_after(const std::vector<bool>& wins) {
    RatingTable t;
    t.set("strong", 1500);
    t.set("weak", 1500);
    for (bool w : wins) {
        t = elo_update(t, "strong", "weak", w ? 1 : 0, w ? 0 : 1);
    }
    return t.rating("strong") - t.rating("weak");
}

} // namespace

TEST_CASE("elo gap converges to the 60 percent fixed point") {
    const double fixed_point = 400.0 * std::log10(0.6 / 0.4);
    // Evenly spread 60% schedule: three wins in every five matches.
    std::vector<bool> schedule;
    for (int i = 0; i < 1000; ++i) {
        const int k = i % 5;
        schedule.push_back(k == 0 || k == 2 || k == 3);
    }
    CHECK(std::abs(gap_after(schedule) - fixed_point) <= 40.0);

    // Random results: the final gap is noisy, so compare its running average.
    std::mt19937_64 rng(11);
    std::bernoulli_distribution coin(0.6);
    RatingTable t;
    double sum = 0;
    for (int i = 0; i < 1000; ++i) {
        const bool w = coin(rng);
        t = elo_update(t, "strong", "weak", w ? 1 : 0, w ? 0 : 1);
        if (i >= 200) {
            sum += t.rating("strong") - t.rating("weak");
        }
    }
    CHECK(std::abs(sum / 800.0 - fixed_point) <= 40.0);
}

TEST_CASE("ratings csv round trip") {
    RatingTable t;
    t.set("x", 1612.25);
    t.set("y", 1433.5);
    std::stringstream s;
    write_ratings_csv(s, t);
    const RatingTable back = read_ratings_csv(s);
    CHECK(back.rating("x") == 1612.25);
    CHECK(back.rating("y") == 1433.5);
    std::istringstream bad("team,rating\nx,abc\n");
    CHECK_THROWS_AS(read_ratings_csv(bad), ParseError);
}
