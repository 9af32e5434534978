#pragma once

#include "inplay/bayes.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace inplay {

/// Change in the scoring team's win and tie probability caused by one goal.
struct GoalDelta {
    double win = 0.0;
    double tie = 0.0;
};

// Probabilities with `home`/`away` as the current state versus the same state
// with one extra goal for `scorer`; only score_diff and goals change.
GoalDelta goal_delta(const FrameState& home, const FrameState& away, const PosteriorParams& params,
                     Side scorer, PredictMode mode = PredictMode::mean());
GoalDelta goal_delta(const FrameMatrix& frames, const PosteriorParams& params, int t, Side scorer,
                     PredictMode mode = PredictMode::mean());

// Team states at frame t with one of `scorer`'s goals in that frame removed.
std::pair<FrameState, FrameState> pre_goal_states(const FrameMatrix& frames, int t, Side scorer);

struct AGVRecord {
    std::string player_id;
    int goals = 0;
    double minutes = 0.0;
    double agv_p90 = 0.0;
};

struct GoalContribution {
    std::string player_id;
    std::string match_id;
    int t = 1;
    GoalDelta delta;
};

/// (sum 3 dWin + dTie) / minutes * 90. Players without
/// minutes are skipped and reported through `warnings`.
std::vector<AGVRecord> agv_p90(std::span<const GoalContribution> goals,
                               const std::map<std::string, double>& minutes,
                               std::vector<std::string>* warnings = nullptr);

/// One row of the goals CSV `player,match,frame,minutes`; an empty frame marks
/// an appearance without a goal. An optional `side` column pins the scorer.
struct GoalLogEntry {
    std::string player_id;
    std::string match_id;
    std::optional<int> t;
    double minutes = 0.0;
    std::optional<Side> side;
};

std::vector<GoalLogEntry> read_goal_log(std::istream& in);
std::vector<GoalLogEntry> read_goal_log(const std::filesystem::path& path);

// Minutes are counted once per (player, match).
std::map<std::string, double> minutes_played(std::span<const GoalLogEntry> log);

/// Deltas for every logged goal, evaluated at the pre-goal state of its frame.
/// The scoring side is taken from the log or inferred from the match's goals.
std::vector<GoalContribution> goal_contributions(std::span<const GoalLogEntry> log,
                                                 std::span<const FrameMatrix> frames,
                                                 const PosteriorParams& params,
                                                 PredictMode mode = PredictMode::mean());

struct Quartiles {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

Quartiles summarize(std::vector<double> values);

struct CounterfactualCurve {
    int home_goals = 0;
    int away_goals = 0;
    std::vector<Quartiles> home_win; // per frame
    std::vector<Quartiles> away_win;

    // The leading side's win probability (home when level).
    const std::vector<Quartiles>& leading() const {
        return away_goals > home_goals ? away_win : home_win;
    }
};

/// Forces the scoreline (and optionally the home red-card difference) at every
/// frame of every match and summarizes the resulting win probabilities.
CounterfactualCurve counterfactual_curve(std::span<const FrameMatrix> frames,
                                         const PosteriorParams& params, int home_goals,
                                         int away_goals, std::optional<int> red_diff = {},
                                         PredictMode mode = PredictMode::mean());

struct StoryMarker {
    int t = 1;
    Side side = Side::home;
    enum class Kind { goal, yellow_card, red_card } kind = Kind::goal;
};

struct StoryCurve {
    std::string match_id;
    std::vector<OutcomeProbs> probs;
    std::vector<StoryMarker> markers;
};

StoryCurve story_curve(const FrameMatrix& frames, const PosteriorParams& params,
                       PredictMode mode = PredictMode::mean());

/// Frames where a goal by `side` would move that side's win probability by at
/// least `factor` times the match median delta.
struct ClutchMoment {
    int t = 1;
    Side side = Side::home;
    double delta_win = 0.0;
};

std::vector<ClutchMoment> clutch_moments(const FrameMatrix& frames, const PosteriorParams& params,
                                         double factor = 2.0);

} // namespace inplay
