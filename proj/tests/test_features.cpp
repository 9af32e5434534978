#include "inplay/features.hpp"
#include "inplay/simgen.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace inplay;

TEST_CASE("frame boundaries") {
    const std::array<double, 2> reg{2700.0, 2700.0};
    CHECK(frame_index(1, 0.0, reg) == 1);
    CHECK(frame_index(2, 2700.0, reg) == 100);
    CHECK(frame_index(1, 1400.0, {2800.0, 2700.0}) == 25);
    CHECK(frame_index(1, 2700.0, reg) == 50);
    CHECK(frame_index(2, 0.0, reg) == 51);
    int clamped = 0;
    CHECK(frame_index(1, 3000.0, reg, &clamped) == 50);
    CHECK(clamped == 1);
}

TEST_CASE("match without events") {
    const Match m = oracle::empty_match();
    RatingTable r;
    r.set("H", 1550);
    r.set("A", 1500);
    const FrameMatrix f = build_frames(m, r);
    REQUIRE(f.home.size() == 100);
    CHECK(f.outcome == Outcome::tie);
    for (int t = 1; t <= 100; ++t) {
        const auto& h = f.home[t - 1];
        const auto& a = f.away[t - 1];
        CHECK(h.t == t);
        CHECK(h.game_time == doctest::Approx(t / 100.0));
        CHECK(h.score_diff == 0);
        CHECK(h.goals == 0);
        CHECK(h.yellows == 0);
        CHECK(h.red_diff == 0);
        CHECK(h.attacking_passes == 0.0);
        CHECK(h.duel_strength == 0.5);
        CHECK(h.rating_diff == 50.0);
        CHECK(a.rating_diff == -50.0);
    }
}

TEST_CASE("single home goal in frame 40") {
    Match m = oracle::empty_match();
    oracle::add_goal(m, 40, Side::home);
    const FrameMatrix f = build_frames(m, RatingTable{});
    CHECK(f.outcome == Outcome::win);
    for (int t = 1; t <= 100; ++t) {
        const int expect = t >= 40 ? 1 : 0;
        CHECK(f.home[t - 1].score_diff == expect);
        CHECK(f.home[t - 1].goals == expect);
        CHECK(f.away[t - 1].score_diff == -expect);
        CHECK(f.away[t - 1].goals == 0);
    }
    CHECK(f.goals_in_frame(Side::home, 40) == 1);
    CHECK(f.goals_in_frame(Side::home, 41) == 0);
}

TEST_CASE("cards and rolling features") {
    Match m = oracle::empty_match();
    auto [p, s] = oracle::mid_frame(5);
    m.events.push_back(oracle::event("m1", p, s, "A", EventKind::red_card));
    std::tie(p, s) = oracle::mid_frame(6);
    m.events.push_back(oracle::event("m1", p, s, "H", EventKind::yellow_card));
    // One duel won by the home team in frame 20, one by the away team in frame 21.
    std::tie(p, s) = oracle::mid_frame(20);
    m.events.push_back(oracle::event("m1", p, s, "H", EventKind::duel, true));
    std::tie(p, s) = oracle::mid_frame(21);
    m.events.push_back(oracle::event("m1", p, s, "H", EventKind::duel, false));
    // Successful attacking pass in frame 30.
    std::tie(p, s) = oracle::mid_frame(30);
    auto pass = oracle::event("m1", p, s, "H", EventKind::pass, true);
    pass.x = 0.5;
    pass.end_x = 0.8;
    m.events.push_back(pass);

    const FrameMatrix f = build_frames(m, RatingTable{});
    CHECK(f.home[3].red_diff == 0);
    CHECK(f.home[4].red_diff == -1); // own minus opponent
    CHECK(f.away[4].red_diff == 1);
    CHECK(f.home[5].yellows == 1);
    CHECK(f.home[4].yellows == 0);
    // Rolling windows only look at strictly earlier frames.
    CHECK(f.home[19].duel_strength == 0.5);
    CHECK(f.home[20].duel_strength == 1.0);
    CHECK(f.home[21].duel_strength == 0.5);
    CHECK(f.away[21].duel_strength == 0.5);
    CHECK(f.home[29].duel_strength == 0.5); // frames 20..29: one each way
    CHECK(f.home[30].duel_strength == 0.0); // frames 21..30: only the away win
    CHECK(f.home[31].duel_strength == 0.5);
    CHECK(f.home[29].attacking_passes == 0.0);
    CHECK(f.home[30].attacking_passes == doctest::Approx(0.1));
    CHECK(f.home[39].attacking_passes == doctest::Approx(0.1));
    CHECK(f.home[40].attacking_passes == 0.0);
}

TEST_CASE("features agree with the generator's own traces") {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = 5;
    const Corpus c = simulate_matches(g);
    for (std::size_t i = 0; i < c.matches.size(); ++i) {
        const FrameMatrix f = build_frames(c.matches[i], c.ratings);
        const MatchTruth& tr = c.truth[i];
        for (int s = 0; s < 2; ++s) {
            const auto& states = f.states(s == 0 ? Side::home : Side::away);
            for (int t = 1; t <= 100; ++t) {
                CHECK(std::abs(states[t - 1].duel_strength - tr.duel_strength[s][t - 1]) <= 1e-12);
                CHECK(std::abs(states[t - 1].attacking_passes - tr.attacking_rolling[s][t - 1]) <=
                      1e-12);
            }
        }
        for (int t = 1; t <= 100; ++t) {
            CHECK(f.home[t - 1].score_diff == tr.score_diff[t - 1]);
        }
        const ExtendedFrames ext = extended_features(c.matches[i].header, c.matches[i].events);
        for (int t = 1; t <= 100; ++t) {
            CHECK(*ext.value(Side::home, t, "tempo") == tr.events[0][t - 1]);
            CHECK(*ext.value(Side::away, t, "tempo") == tr.events[1][t - 1]);
        }
    }
}

TEST_CASE("duel strengths of the two teams sum to one") {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = 3;
    const Corpus c = simulate_matches(g);
    for (const auto& m : c.matches) {
        const FrameMatrix f = build_frames(m, c.ratings);
        for (int t = 0; t < 100; ++t) {
            CHECK(f.home[t].duel_strength + f.away[t].duel_strength == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("extended catalog") {
    const Match empty = oracle::empty_match();
    const ExtendedFrames e0 = extended_features(empty.header, empty.events);
    for (const char* count : {"shots", "attacking_passes", "crosses", "box_entries", "tempo"}) {
        CHECK(*e0.value(Side::home, 50, count) == 0.0);
    }
    for (const char* rate : {"attacking_pass_success_rate", "tackle_success_rate", "possession",
                             "pass_length", "backward_pass_fraction"}) {
        CHECK_FALSE(e0.value(Side::away, 50, rate).has_value());
    }

    Match m = oracle::empty_match();
    auto [p, s] = oracle::mid_frame(3);
    auto pass = oracle::event("m1", p, s, "H", EventKind::pass, true);
    pass.x = 0.5;
    pass.end_x = 0.8;
    m.events.push_back(pass);
    const ExtendedFrames e = extended_features(m.header, m.events);
    CHECK(*e.value(Side::home, 2, "attacking_passes") == 0.0);
    CHECK_FALSE(e.value(Side::home, 2, "attacking_pass_success_rate").has_value());
    for (int t = 3; t <= 100; ++t) {
        CHECK(*e.value(Side::home, t, "attacking_passes") == 1.0);
        CHECK(*e.value(Side::home, t, "attacking_pass_success_rate") == 1.0);
    }
}

TEST_CASE("frames csv round trip and schema errors") {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = 2;
    const Corpus c = simulate_matches(g);
    std::vector<FrameMatrix> frames;
    for (const auto& m : c.matches) {
        frames.push_back(build_frames(m, c.ratings));
    }
    std::stringstream s;
    write_frames_csv(s, frames);
    const auto back = read_frames_csv(s, full_schema());
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].match_id == frames[i].match_id);
        CHECK(back[i].outcome == frames[i].outcome);
        CHECK(back[i].home == frames[i].home);
        CHECK(back[i].away == frames[i].away);
    }

    std::istringstream narrow(
        "match_id,team,side,t,score_diff,outcome,frame_goals\nm,H,home,1,0,win,0\n");
    try {
        read_frames_csv(narrow, full_schema());
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(std::find(e.missing().begin(), e.missing().end(), "duel_strength") !=
              e.missing().end());
    }
}
