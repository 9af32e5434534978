#include "inplay/simgen.hpp"

#include "inplay/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace inplay {

namespace {

constexpr std::size_t kF = kAllFeatures.size();
constexpr int kHalf = kFrames / 2;
// Goal-difference states tracked by the truth recursion: [-kMaxDiff, kMaxDiff].
constexpr int kMaxDiff = 40;

std::size_t feature_slot(Feature f) {
    return static_cast<std::size_t>(f);
}

} // namespace

double GeneratorConfig::coef(int t, Feature f) const {
    return alpha[(t - 1) * kF + feature_slot(f)];
}

void GeneratorConfig::set_constant(Feature f, double value) {
    for (int t = 1; t <= kFrames; ++t) {
        alpha[(t - 1) * kF + feature_slot(f)] = value;
    }
}

void GeneratorConfig::set_ramp(Feature f, double from, double to) {
    for (int t = 1; t <= kFrames; ++t) {
        alpha[(t - 1) * kF + feature_slot(f)] = from + (to - from) * (t - 1) / (kFrames - 1.0);
    }
}

void GeneratorConfig::validate() const {
    auto fail = [&](const std::string& why) {
        throw ValidationError("generator config " + name + ": " + why);
    };
    if (alpha.size() != kFrames * kF) {
        fail("alpha must have 100 x 8 entries");
    }
    for (double a : alpha) {
        if (!std::isfinite(a)) {
            fail("alpha must be finite (theta outside (0,1))");
        }
    }
    if (!std::isfinite(beta) || !std::isfinite(ha)) {
        fail("beta and home advantage must be finite (theta outside (0,1))");
    }
    for (int t = 1; t <= kFrames; ++t) {
        if (coef(t, Feature::goals) != 0.0) {
            fail("the own-goals coefficient must be zero");
        }
    }
    if (teams < 2) {
        fail("need at least two teams");
    }
    if (!(rating_sd >= 0.0) || !std::isfinite(rating_mean)) {
        fail("rating distribution is invalid");
    }
    if (matches < 0) {
        fail("match count must be non-negative");
    }
    for (double r : {rates.passes, rates.duels, rates.fouls, rates.shots}) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            fail("event rates must be finite and non-negative");
        }
    }
    for (double p : {rates.attacking_share, rates.duel_win, rates.yellow, rates.red, mismatch.burst}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            fail("probabilities must lie in [0,1]");
        }
    }
    if (!(mismatch.momentum_sd >= 0.0) || !(std::abs(mismatch.momentum_decay) < 1.0)) {
        fail("momentum process is not stationary");
    }
}

std::vector<std::string> GeneratorConfig::preset_names() {
    return {"default", "recovery", "calibration", "timevarying", "null"};
}

GeneratorConfig GeneratorConfig::preset(std::string_view name) {
    GeneratorConfig c;
    c.name = std::string(name);
    if (name == "null") {
        c.beta = logit(0.0136);
        c.rating_sd = 0.0;
    } else if (name == "default") {
        // Tuned by grid search to home/draw/away rates near 45 / 30 / 25 percent.
        c.beta = -4.8;
        c.ha = 0.42;
        c.rating_sd = 50.0;
        c.set_constant(Feature::rating_diff, 0.0035);
        c.set_constant(Feature::red_diff, -0.4);
        c.set_constant(Feature::duel_strength, -0.3);
        c.set_ramp(Feature::attacking_passes, 0.1, 0.3);
        c.set_ramp(Feature::score_diff, 0.0, -0.1);
    } else if (name == "recovery") {
        c.beta = -3.8;
        c.ha = 0.35;
        c.set_ramp(Feature::score_diff, 0.0, 0.6);
    } else if (name == "calibration") {
        c.beta = -4.3;
        c.ha = 0.3;
        c.set_constant(Feature::rating_diff, 0.004);
        c.set_constant(Feature::red_diff, -0.5);
        c.set_constant(Feature::duel_strength, -0.3);
        c.set_constant(Feature::attacking_passes, 0.2);
    } else if (name == "timevarying") {
        c.beta = -4.3;
        c.ha = 0.3;
        c.set_ramp(Feature::rating_diff, 0.006, 0.001);
        c.set_ramp(Feature::score_diff, -0.2, 0.3);
        c.set_ramp(Feature::red_diff, -0.8, -0.2);
        c.set_ramp(Feature::attacking_passes, 0.0, 0.4);
        c.set_constant(Feature::duel_strength, -0.3);
    } else {
        throw ValidationError("unknown generator preset " + c.name);
    }
    return c;
}

namespace {

struct Probs3 {
    double w = 0.0;
    double d = 0.0;
    double l = 0.0;
};

// Goals in one frame: 0, 1, or 2 with a burst.
std::array<double, 3> frame_goal_pmf(double theta, double burst) {
    return {1.0 - theta, theta * (1.0 - burst), theta * burst};
}

// value[t][d + kMaxDiff]: P(result | home diff d after frame t), t = 0..100.
std::vector<std::vector<Probs3>> backward_values(const MatchTruth& truth) {
    const int width = 2 * kMaxDiff + 1;
    std::vector<std::vector<Probs3>> v(kFrames + 1, std::vector<Probs3>(width));
    for (int i = 0; i < width; ++i) {
        const int d = i - kMaxDiff;
        v[kFrames][i] = {d > 0 ? 1.0 : 0.0, d == 0 ? 1.0 : 0.0, d < 0 ? 1.0 : 0.0};
    }
    for (int s = kFrames; s >= 1; --s) {
        const double bh = truth.base_logit[0][s - 1];
        const double ba = truth.base_logit[1][s - 1];
        const double c = truth.score_coef[s - 1];
        for (int i = 0; i < width; ++i) {
            const int d = i - kMaxDiff;
            const auto ph = frame_goal_pmf(invlogit(bh + c * d), truth.burst);
            const auto pa = frame_goal_pmf(invlogit(ba - c * d), truth.burst);
            Probs3 acc;
            for (int gh = 0; gh < 3; ++gh) {
                for (int ga = 0; ga < 3; ++ga) {
                    const double p = ph[gh] * pa[ga];
                    const int j = std::clamp(i + gh - ga, 0, width - 1);
                    acc.w += p * v[s][j].w;
                    acc.d += p * v[s][j].d;
                    acc.l += p * v[s][j].l;
                }
            }
            v[s - 1][i] = acc;
        }
    }
    return v;
}

OutcomeProbs lookup(const std::vector<std::vector<Probs3>>& v, int t, int d) {
    const int i = std::clamp(d, -kMaxDiff, kMaxDiff) + kMaxDiff;
    const Probs3& p = v[t][i];
    return {p.w, p.d, p.l};
}

// Generator-side game state, kept independently of the features module.
struct SideState {
    int goals = 0;
    int yellows = 0;
    int reds = 0;
};

std::array<double, kF> state_vector(int t, int score_diff, double rating, int goals, int yellows,
                                    int red_diff, double attacking, double duel) {
    std::array<double, kF> x{};
    x[feature_slot(Feature::game_time)] = t / static_cast<double>(kFrames);
    x[feature_slot(Feature::score_diff)] = score_diff;
    x[feature_slot(Feature::rating_diff)] = rating;
    x[feature_slot(Feature::goals)] = goals;
    x[feature_slot(Feature::yellows)] = yellows;
    x[feature_slot(Feature::red_diff)] = red_diff;
    x[feature_slot(Feature::attacking_passes)] = attacking;
    x[feature_slot(Feature::duel_strength)] = duel;
    return x;
}

std::string team_name(int i) {
    std::string s = std::to_string(i + 1);
    return "T" + std::string(s.size() < 2 ? 1 : 0, '0') + s;
}

std::string match_name(int i) {
    std::string s = std::to_string(i + 1);
    return "M" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

} // namespace

OutcomeProbs true_outcome_probs(const MatchTruth& truth, int t) {
    if (t < 0 || t > kFrames) {
        throw std::out_of_range("frame index must lie in 0..100");
    }
    const auto v = backward_values(truth);
    return lookup(v, t, t == 0 ? 0 : truth.score_diff[t - 1]);
}

RatingTable league_ratings(const GeneratorConfig& config) {
    RatingTable table(config.rating_mean);
    std::mt19937_64 rng(mix_seed(config.seed, 0x7ea5));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < config.teams; ++i) {
        // Rounded so the ratings file reproduces the values exactly.
        const double r = config.rating_mean + config.rating_sd * normal(rng);
        table.set(team_name(i), std::round(r * 100.0) / 100.0);
    }
    return table;
}

GeneratedMatch simulate_match(const GeneratorConfig& config, const RatingTable& ratings, int index) {
    std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(index) + 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto bernoulli = [&](double p) { return unit(rng) < p; };
    auto poisson = [&](double mean) {
        return mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0;
    };

    GeneratedMatch out;
    Match& m = out.match;
    MatchTruth& tr = out.truth;

    std::uniform_int_distribution<int> pick_team(0, config.teams - 1);
    const int home_idx = pick_team(rng);
    int away_idx = pick_team(rng);
    while (away_idx == home_idx) {
        away_idx = pick_team(rng);
    }
    const std::array<std::string, 2> team{team_name(home_idx), team_name(away_idx)};
    const double rdiff = ratings.rating(team[0]) - ratings.rating(team[1]);
    const std::array<double, 2> rating{rdiff, -rdiff};

    m.header.match_id = match_name(index);
    m.header.home_team_id = team[0];
    m.header.away_team_id = team[1];
    m.header.period_durations = {
        kRegulationHalf + std::uniform_int_distribution<int>(0, 180)(rng),
        kRegulationHalf + std::uniform_int_distribution<int>(60, 420)(rng)};
    tr.match_id = m.header.match_id;
    tr.burst = config.mismatch.burst;

    for (int s = 0; s < 2; ++s) {
        tr.theta[s].resize(kFrames);
        tr.base_logit[s].resize(kFrames);
        tr.goals[s].assign(kFrames, 0);
        tr.attacking_passes[s].assign(kFrames, 0);
        tr.duels_won[s].assign(kFrames, 0);
        tr.events[s].assign(kFrames, 0);
        tr.duel_strength[s].resize(kFrames);
        tr.attacking_rolling[s].resize(kFrames);
    }
    tr.score_coef.resize(kFrames);
    tr.score_diff.resize(kFrames);

    std::array<SideState, 2> st{};
    std::array<double, 2> shock{};
    std::vector<int> total_duels(kFrames, 0);
    // Kickoff state drives frame 1 through alpha row 1.
    std::array<std::array<double, kF>, 2> prev{
        state_vector(0, 0, rating[0], 0, 0, 0, 0.0, 0.5),
        state_vector(0, 0, rating[1], 0, 0, 0, 0.0, 0.5)};

    for (int s = 1; s <= kFrames; ++s) {
        const int row = std::max(1, s - 1);
        const int half = s <= kHalf ? 1 : 2;
        const double duration = m.header.period_durations[half - 1];
        const int local = s - (half - 1) * kHalf;
        std::vector<MatchEvent> frame_events;
        auto emit = [&](int side, EventKind kind, double x, double y, bool success,
                        std::optional<double> end_x, bool with_player) {
            MatchEvent e;
            e.match_id = m.header.match_id;
            e.period = half;
            const double u = 0.02 + 0.96 * unit(rng);
            e.second = std::round(duration * (local - 1 + u) / kHalf * 1000.0) / 1000.0;
            e.team_id = team[side];
            if (with_player) {
                const int p = std::uniform_int_distribution<int>(1, 11)(rng);
                e.player_id = team[side] + "_p" + (p < 10 ? "0" : "") + std::to_string(p);
            }
            auto r3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
            e.kind = kind;
            e.x = r3(x);
            e.y = r3(y);
            e.success = success;
            if (end_x) {
                e.end_x = r3(*end_x);
            }
            frame_events.push_back(std::move(e));
            ++tr.events[side][s - 1];
        };

        tr.score_coef[s - 1] = config.coef(row, Feature::score_diff);
        for (int side = 0; side < 2; ++side) {
            if (config.mismatch.momentum_sd > 0.0) {
                shock[side] = config.mismatch.momentum_decay * shock[side] +
                              config.mismatch.momentum_sd * normal(rng);
            }
            double base = config.beta + (side == 0 ? config.ha : 0.0) + shock[side];
            for (Feature f : kAllFeatures) {
                if (f != Feature::score_diff) {
                    base += config.coef(row, f) * prev[side][feature_slot(f)];
                }
            }
            tr.base_logit[side][s - 1] = base;
        }
        // Goals first: they use the state at the end of the previous frame.
        for (int side = 0; side < 2; ++side) {
            const double own_diff = prev[side][feature_slot(Feature::score_diff)];
            const double theta =
                invlogit(tr.base_logit[side][s - 1] + tr.score_coef[s - 1] * own_diff);
            int g = bernoulli(theta) ? 1 : 0;
            if (g == 1 && bernoulli(config.mismatch.burst)) {
                g = 2;
            }
            tr.goals[side][s - 1] = g;
            for (int k = 0; k < g; ++k) {
                emit(side, EventKind::goal, 0.93, 0.5, true, std::nullopt, true);
            }
        }
        // Contextual events never depend on goals.
        for (int side = 0; side < 2; ++side) {
            const int passes = poisson(config.rates.passes);
            for (int k = 0; k < passes; ++k) {
                if (bernoulli(config.rates.attacking_share)) {
                    const double x = 0.3 + 0.35 * unit(rng);
                    emit(side, EventKind::pass, x, unit(rng), true, 0.7 + 0.28 * unit(rng), true);
                    ++tr.attacking_passes[side][s - 1];
                } else if (bernoulli(0.5)) {
                    const double x = 0.05 + 0.6 * unit(rng);
                    emit(side, EventKind::pass, x, unit(rng), bernoulli(0.8),
                         0.05 + 0.6 * unit(rng), true);
                } else {
                    const double x = 0.3 + 0.35 * unit(rng);
                    emit(side, EventKind::pass, x, unit(rng), false, 0.7 + 0.28 * unit(rng), true);
                }
            }
            const int duels = poisson(config.rates.duels);
            for (int k = 0; k < duels; ++k) {
                const bool won = bernoulli(config.rates.duel_win);
                emit(side, EventKind::duel, unit(rng), unit(rng), won, std::nullopt, true);
                ++tr.duels_won[won ? side : 1 - side][s - 1];
                ++total_duels[s - 1];
            }
            const int fouls = poisson(config.rates.fouls);
            for (int k = 0; k < fouls; ++k) {
                emit(side, EventKind::foul, unit(rng), unit(rng), false, std::nullopt, true);
            }
            const int shots = poisson(config.rates.shots);
            for (int k = 0; k < shots; ++k) {
                emit(side, EventKind::shot, 0.7 + 0.25 * unit(rng), 0.2 + 0.6 * unit(rng),
                     bernoulli(0.35), std::nullopt, true);
            }
            if (bernoulli(config.rates.yellow)) {
                emit(side, EventKind::yellow_card, unit(rng), unit(rng), false, std::nullopt, true);
                ++st[side].yellows;
            }
            if (bernoulli(config.rates.red)) {
                emit(side, EventKind::red_card, unit(rng), unit(rng), false, std::nullopt, true);
                ++st[side].reds;
            }
        }
        std::stable_sort(frame_events.begin(), frame_events.end(),
                         [](const MatchEvent& a, const MatchEvent& b) { return a.second < b.second; });
        for (auto& e : frame_events) {
            m.events.push_back(std::move(e));
        }

        for (int side = 0; side < 2; ++side) {
            st[side].goals += tr.goals[side][s - 1];
        }
        // Rolling features over frames max(1, s-10) .. s-1.
        const int first = std::max(1, s - kRollingWindow);
        const int window = s - first;
        std::array<double, 2> passes{};
        std::array<double, 2> won{};
        double duels = 0.0;
        for (int w = first; w < s; ++w) {
            duels += total_duels[w - 1];
            for (int side = 0; side < 2; ++side) {
                passes[side] += tr.attacking_passes[side][w - 1];
                won[side] += tr.duels_won[side][w - 1];
            }
        }
        for (int side = 0; side < 2; ++side) {
            const int o = 1 - side;
            const double att = window > 0 ? passes[side] / window : 0.0;
            const double duel = duels > 0 ? won[side] / duels : 0.5;
            tr.attacking_rolling[side][s - 1] = att;
            tr.duel_strength[side][s - 1] = duel;
            prev[side] = state_vector(s, st[side].goals - st[o].goals, rating[side], st[side].goals,
                                      st[side].yellows, st[side].reds - st[o].reds, att, duel);
            double eta = config.beta + (side == 0 ? config.ha : 0.0);
            for (Feature f : kAllFeatures) {
                eta += config.coef(s, f) * prev[side][feature_slot(f)];
            }
            tr.theta[side][s - 1] = invlogit(eta);
        }
        tr.score_diff[s - 1] = st[0].goals - st[1].goals;
    }

    m.header.final_home_goals = st[0].goals;
    m.header.final_away_goals = st[1].goals;
    tr.event_count = m.events.size();

    const auto values = backward_values(tr);
    tr.kickoff = lookup(values, 0, 0);
    tr.probs.resize(kFrames);
    for (int t = 1; t <= kFrames; ++t) {
        tr.probs[t - 1] = lookup(values, t, tr.score_diff[t - 1]);
    }
    return out;
}

Corpus simulate_matches(const GeneratorConfig& config) {
    config.validate();
    Corpus c;
    c.ratings = league_ratings(config);
    c.matches.reserve(config.matches);
    c.truth.reserve(config.matches);
    for (int i = 0; i < config.matches; ++i) {
        auto g = simulate_match(config, c.ratings, i);
        c.matches.push_back(std::move(g.match));
        c.truth.push_back(std::move(g.truth));
    }
    return c;
}

void write_truth_csv(std::ostream& out, std::span<const MatchTruth> truth) {
    out << "match,frame,side,theta,p_win,p_tie,p_loss\n";
    for (const auto& tr : truth) {
        for (int t = 1; t <= kFrames; ++t) {
            const OutcomeProbs& p = tr.probs[t - 1];
            for (int s = 0; s < 2; ++s) {
                out << tr.match_id << ',' << t << ',' << side_name(static_cast<Side>(s)) << ','
                    << format_number(tr.theta[s][t - 1]) << ',' << format_number(p.win) << ','
                    << format_number(p.tie) << ',' << format_number(p.loss) << '\n';
            }
        }
    }
}

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
    std::filesystem::create_directories(dir);
    write_events(dir / "events.jsonl", corpus.matches);
    {
        std::ofstream out(dir / "truth.csv");
        write_truth_csv(out, corpus.truth);
    }
    std::ofstream out(dir / "ratings.csv");
    write_ratings_csv(out, corpus.ratings);
}

} // namespace inplay
