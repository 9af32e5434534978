#pragma once

#include "inplay/events.hpp"
#include "inplay/ratings.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace inplay {

/// The eight game-state variables describing one team at one frame.
enum class Feature {
    game_time,
    score_diff,
    rating_diff,
    goals,
    yellows,
    red_diff,
    attacking_passes,
    duel_strength,
};

inline constexpr std::array<Feature, 8> kAllFeatures{
    Feature::game_time, Feature::score_diff, Feature::rating_diff,      Feature::goals,
    Feature::yellows,   Feature::red_diff,   Feature::attacking_passes, Feature::duel_strength,
};

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

using FeatureSchema = std::vector<Feature>;

FeatureSchema full_schema();
// Schema with one feature removed (e.g. game_time for per-frame models).
FeatureSchema schema_without(Feature f);
std::vector<std::string> schema_names(const FeatureSchema& schema);
FeatureSchema schema_from_names(const std::vector<std::string>& names);

struct FrameState {
    int t = 1;
    double game_time = 0.01;
    int score_diff = 0;
    int goals = 0;
    int yellows = 0;
    int red_diff = 0;
    double attacking_passes = 0.0;
    double duel_strength = 0.5;
    double rating_diff = 0.0;

    bool operator==(const FrameState&) const = default;
};

double feature_value(const FrameState& s, Feature f);
std::vector<double> feature_vector(const FrameState& s, const FeatureSchema& schema);

struct GoalFrame {
    int t = 1;
    Side side = Side::home;
    bool operator==(const GoalFrame&) const = default;
};

struct CardFrame {
    int t = 1;
    Side side = Side::home;
    bool red = false;
    bool operator==(const CardFrame&) const = default;
};

struct FrameMatrix {
    std::string match_id;
    std::string home_team_id;
    std::string away_team_id;
    std::vector<FrameState> home; // frames 1..100 at index t-1
    std::vector<FrameState> away;
    Outcome outcome = Outcome::tie;
    std::vector<GoalFrame> goal_frames; // event order
    std::vector<CardFrame> card_frames;
    int clamped_events = 0; // events past their period's duration

    const std::vector<FrameState>& states(Side s) const { return s == Side::home ? home : away; }
    std::vector<FrameState>& states(Side s) { return s == Side::home ? home : away; }
    // Goals scored by `side` inside frame t.
    int goals_in_frame(Side side, int t) const;

    bool operator==(const FrameMatrix&) const = default;
};

/// Maps a timestamp onto frames 1..100: the first half is spread linearly over
/// frames 1..50 of its actual duration, the second half over 51..100. Seconds
/// beyond the period duration are clamped to its last frame and counted.
int frame_index(int period, double second, const std::array<double, 2>& durations,
                int* clamped = nullptr);

// Rolling features use this many strictly previous frames.
inline constexpr int kRollingWindow = 10;

FrameMatrix build_frames(const MatchHeader& header, std::span<const MatchEvent> events,
                         const RatingTable& ratings);
FrameMatrix build_frames(const Match& match, const RatingTable& ratings);

/// Extended feature catalog. Rates with an empty denominator are
/// absent (nullopt); counts are cumulative through frame t unless named
/// per-frame.
struct ExtendedFrames {
    std::vector<std::string> names;
    // [t-1][feature]
    std::vector<std::vector<std::optional<double>>> home;
    std::vector<std::vector<std::optional<double>>> away;

    std::optional<double> value(Side side, int t, std::string_view name) const;
};

ExtendedFrames extended_features(const MatchHeader& header, std::span<const MatchEvent> events);

// Penalty-box bounds in pitch fractions (105 x 68 m pitch).
inline constexpr double kBoxDepth = 16.5 / 105.0;
inline constexpr double kBoxHalfWidth = 20.16 / 68.0;

/// Frame export, one row per (match, side, frame).
void write_frames_csv(std::ostream& out, std::span<const FrameMatrix> frames);
void write_frames_csv(const std::filesystem::path& path, std::span<const FrameMatrix> frames);
// Throws SchemaError when any of `required` is absent from the header; other
// feature columns default to their neutral values.
std::vector<FrameMatrix> read_frames_csv(std::istream& in, const FeatureSchema& required);
std::vector<FrameMatrix> read_frames_csv(const std::filesystem::path& path,
                                         const FeatureSchema& required);

} // namespace inplay
