#pragma once

#include "inplay/common.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace inplay {

// Provider event types collapse onto these kinds; anything unknown is `other`.
enum class EventKind { pass, shot, duel, foul, yellow_card, red_card, goal, other };

std::string_view kind_name(EventKind k);
EventKind kind_from_name(std::string_view name);

/// One annotated on-pitch event. Coordinates are team-relative: x grows
/// toward the acting team's attacking goal.
struct MatchEvent {
    std::string match_id;
    int period = 1;
    double second = 0.0;
    std::string team_id;
    std::optional<std::string> player_id;
    EventKind kind = EventKind::other;
    double x = 0.5;
    double y = 0.5;
    bool success = false;
    std::optional<double> end_x;

    bool operator==(const MatchEvent&) const = default;
};

struct MatchHeader {
    std::string match_id;
    std::string home_team_id;
    std::string away_team_id;
    int final_home_goals = 0;
    int final_away_goals = 0;
    std::array<double, 2> period_durations{2700.0, 2700.0};

    bool operator==(const MatchHeader&) const = default;
};

struct Match {
    MatchHeader header;
    std::vector<MatchEvent> events;

    bool operator==(const Match&) const = default;
};

// Regulation length of one half in seconds.
inline constexpr double kRegulationHalf = 2700.0;

/// Reads a line-delimited JSON event file. Matches are returned in order of
/// first appearance, events sorted by (period, second). Missing headers are
/// synthesized from the stream: the first team seen is taken as home.
std::vector<Match> parse_events(const std::filesystem::path& path);
std::vector<Match> parse_events(std::istream& in);

void write_events(std::ostream& out, std::span<const Match> matches);
void write_events(const std::filesystem::path& path, std::span<const Match> matches);

// Throws ValidationError naming the match and the broken rule.
void validate_match(const Match& m);

// Successful forward pass ending in the final third.
bool attacking_pass(const MatchEvent& e);

// Side of the team that performed the event; throws if neither team matches.
Side side_of(const MatchHeader& h, const MatchEvent& e);

} // namespace inplay
