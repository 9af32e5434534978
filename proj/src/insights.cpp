#include "inplay/insights.hpp"

#include "inplay/csv.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace inplay {

namespace {

// Win/tie probability from `side`'s point of view.
std::pair<double, double> side_view(const OutcomeProbs& p, Side side) {
    return side == Side::home ? std::pair{p.win, p.tie} : std::pair{p.loss, p.tie};
}

void add_goal(FrameState& home, FrameState& away, Side scorer, int n) {
    FrameState& s = scorer == Side::home ? home : away;
    FrameState& o = scorer == Side::home ? away : home;
    s.goals += n;
    s.score_diff += n;
    o.score_diff -= n;
}

} // namespace

GoalDelta goal_delta(const FrameState& home, const FrameState& away, const PosteriorParams& params,
                     Side scorer, PredictMode mode) {
    const OutcomeProbs before = predict_frame(home, away, params, mode);
    FrameState h = home;
    FrameState a = away;
    add_goal(h, a, scorer, 1);
    const OutcomeProbs after = predict_frame(h, a, params, mode);
    const auto [w0, t0] = side_view(before, scorer);
    const auto [w1, t1] = side_view(after, scorer);
    return {w1 - w0, t1 - t0};
}

GoalDelta goal_delta(const FrameMatrix& frames, const PosteriorParams& params, int t, Side scorer,
                     PredictMode mode) {
    if (t < 1 || t > kFrames) {
        throw std::out_of_range("frame index " + std::to_string(t) + " outside 1..100");
    }
    return goal_delta(frames.home[t - 1], frames.away[t - 1], params, scorer, mode);
}

std::pair<FrameState, FrameState> pre_goal_states(const FrameMatrix& frames, int t, Side scorer) {
    if (t < 1 || t > kFrames) {
        throw std::out_of_range("frame index " + std::to_string(t) + " outside 1..100");
    }
    FrameState h = frames.home[t - 1];
    FrameState a = frames.away[t - 1];
    if (frames.goals_in_frame(scorer, t) > 0) {
        add_goal(h, a, scorer, -1);
    }
    return {h, a};
}

std::vector<AGVRecord> agv_p90(std::span<const GoalContribution> goals,
                               const std::map<std::string, double>& minutes,
                               std::vector<std::string>* warnings) {
    std::map<std::string, AGVRecord> acc;
    for (const auto& [player, m] : minutes) {
        acc[player] = {player, 0, m, 0.0};
    }
    std::map<std::string, double> numerator;
    for (const auto& g : goals) {
        auto& r = acc[g.player_id];
        r.player_id = g.player_id;
        ++r.goals;
        numerator[g.player_id] += 3.0 * g.delta.win + g.delta.tie;
    }
    std::vector<AGVRecord> out;
    for (auto& [player, r] : acc) {
        auto it = minutes.find(player);
        if (it == minutes.end() || !(it->second > 0.0)) {
            if (warnings != nullptr) {
                warnings->push_back("player " + player + " has no minutes; excluded");
            }
            continue;
        }
        r.minutes = it->second;
        r.agv_p90 = r.goals == 0 ? 0.0 : numerator[player] / r.minutes * 90.0;
        out.push_back(r);
    }
    return out;
}

std::vector<GoalLogEntry> read_goal_log(std::istream& in) {
    CsvReader csv(in);
    const std::size_t c_player = csv.column("player");
    const std::size_t c_match = csv.column("match");
    const std::size_t c_frame = csv.column("frame");
    const std::size_t c_minutes = csv.column("minutes");
    const bool has_side = csv.has_column("side");
    const std::size_t c_side = has_side ? csv.column("side") : 0;
    std::vector<GoalLogEntry> out;
    while (auto row = csv.next()) {
        GoalLogEntry e;
        e.player_id = row->at(c_player);
        e.match_id = row->at(c_match);
        if (!row->at(c_frame).empty()) {
            const long long t = csv.integer(*row, c_frame);
            if (t < 1 || t > kFrames) {
                throw ParseError(csv.line(), "frame outside 1..100");
            }
            e.t = static_cast<int>(t);
        }
        e.minutes = csv.number(*row, c_minutes);
        if (has_side && c_side < row->size() && !row->at(c_side).empty()) {
            try {
                e.side = side_from_name(row->at(c_side));
            } catch (const std::exception& err) {
                throw ParseError(csv.line(), err.what());
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<GoalLogEntry> read_goal_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open goal log " + path.string());
    }
    return read_goal_log(in);
}

std::map<std::string, double> minutes_played(std::span<const GoalLogEntry> log) {
    std::map<std::string, double> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : log) {
        if (seen.insert({e.player_id, e.match_id}).second) {
            out[e.player_id] += e.minutes;
        }
    }
    return out;
}

std::vector<GoalContribution> goal_contributions(std::span<const GoalLogEntry> log,
                                                 std::span<const FrameMatrix> frames,
                                                 const PosteriorParams& params, PredictMode mode) {
    std::map<std::string, const FrameMatrix*> by_id;
    for (const auto& fm : frames) {
        by_id[fm.match_id] = &fm;
    }
    std::vector<GoalContribution> out;
    for (const auto& e : log) {
        if (!e.t) {
            continue;
        }
        auto it = by_id.find(e.match_id);
        if (it == by_id.end()) {
            throw ValidationError("goal log refers to unknown match " + e.match_id);
        }
        const FrameMatrix& fm = *it->second;
        Side side = Side::home;
        if (e.side) {
            side = *e.side;
        } else {
            const int h = fm.goals_in_frame(Side::home, *e.t);
            const int a = fm.goals_in_frame(Side::away, *e.t);
            if ((h > 0) == (a > 0)) {
                throw ValidationError("match " + e.match_id + ": cannot infer scoring side at frame " +
                                      std::to_string(*e.t) + "; add a side column");
            }
            side = h > 0 ? Side::home : Side::away;
        }
        const auto [home, away] = pre_goal_states(fm, *e.t, side);
        out.push_back({e.player_id, e.match_id, *e.t, goal_delta(home, away, params, side, mode)});
    }
    return out;
}

Quartiles summarize(std::vector<double> v) {
    if (v.empty()) {
        return {};
    }
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

CounterfactualCurve counterfactual_curve(std::span<const FrameMatrix> frames,
                                         const PosteriorParams& params, int home_goals,
                                         int away_goals, std::optional<int> red_diff,
                                         PredictMode mode) {
    if (home_goals < 0 || away_goals < 0) {
        throw std::invalid_argument("forced goal counts must be non-negative");
    }
    CounterfactualCurve out;
    out.home_goals = home_goals;
    out.away_goals = away_goals;
    std::vector<std::vector<double>> hw(kFrames);
    std::vector<std::vector<double>> aw(kFrames);
    for (const auto& fm : frames) {
        FrameMatrix forced = fm;
        for (int t = 0; t < kFrames; ++t) {
            forced.home[t].goals = home_goals;
            forced.away[t].goals = away_goals;
            forced.home[t].score_diff = home_goals - away_goals;
            forced.away[t].score_diff = away_goals - home_goals;
            if (red_diff) {
                forced.home[t].red_diff = *red_diff;
                forced.away[t].red_diff = -*red_diff;
            }
        }
        const auto probs = predict_match(forced, params, mode);
        for (int t = 0; t < kFrames; ++t) {
            hw[t].push_back(probs[t].win);
            aw[t].push_back(probs[t].loss);
        }
    }
    for (int t = 0; t < kFrames; ++t) {
        out.home_win.push_back(summarize(std::move(hw[t])));
        out.away_win.push_back(summarize(std::move(aw[t])));
    }
    return out;
}

StoryCurve story_curve(const FrameMatrix& frames, const PosteriorParams& params,
                       PredictMode mode) {
    StoryCurve s;
    s.match_id = frames.match_id;
    s.probs = predict_match(frames, params, mode);
    for (const auto& g : frames.goal_frames) {
        s.markers.push_back({g.t, g.side, StoryMarker::Kind::goal});
    }
    for (const auto& c : frames.card_frames) {
        s.markers.push_back(
            {c.t, c.side, c.red ? StoryMarker::Kind::red_card : StoryMarker::Kind::yellow_card});
    }
    std::stable_sort(s.markers.begin(), s.markers.end(),
                     [](const StoryMarker& a, const StoryMarker& b) { return a.t < b.t; });
    return s;
}

std::vector<ClutchMoment> clutch_moments(const FrameMatrix& frames, const PosteriorParams& params,
                                         double factor) {
    std::vector<ClutchMoment> all;
    std::vector<double> deltas;
    for (int t = 1; t <= kFrames; ++t) {
        for (Side side : {Side::home, Side::away}) {
            const double d = goal_delta(frames, params, t, side).win;
            all.push_back({t, side, d});
            deltas.push_back(d);
        }
    }
    const double median = summarize(deltas).median;
    std::vector<ClutchMoment> out;
    for (const auto& c : all) {
        if (c.delta_win >= factor * median && c.delta_win > 0.0) {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace inplay
