#include "inplay/features.hpp"

#include <cmath>

namespace inplay {

namespace {

// Column order of ExtendedFrames.
enum Col : std::size_t {
    shots,
    shots_on_target,
    well_positioned_shots,
    opportunities,
    attacking_passes,
    attacking_pass_success_rate,
    crosses,
    box_entries,
    tackle_success_rate,
    tempo,
    average_x,
    possession,
    pass_length,
    attacking_pass_length,
    backward_pass_fraction,
    attacking_tackles,
    attacking_tackle_success_rate,
    frames_since_goal,
    kColumns,
};

const std::array<std::string, kColumns> kNames{
    "shots",
    "shots_on_target",
    "well_positioned_shots",
    "opportunities",
    "attacking_passes",
    "attacking_pass_success_rate",
    "crosses",
    "box_entries",
    "tackle_success_rate",
    "tempo",
    "average_x",
    "possession",
    "pass_length",
    "attacking_pass_length",
    "backward_pass_fraction",
    "attacking_tackles",
    "attacking_tackle_success_rate",
    "frames_since_goal",
};

constexpr double kFinalThird = 2.0 / 3.0;

struct Running {
    double shots = 0;
    double on_target = 0;
    double well_positioned = 0;
    double opportunities = 0;
    double att_pass_attempts = 0;
    double att_pass_success = 0;
    double att_pass_length = 0;
    double crosses = 0;
    double box_entries = 0;
    double tackles = 0;
    double tackles_won = 0;
    double att_tackles = 0;
    double att_tackles_won = 0;
    double actions = 0;
    double x_sum = 0;
    double passes_with_end = 0;
    double pass_length = 0;
    double backward = 0;
};

bool in_box(double x, double y) {
    return x >= 1.0 - kBoxDepth && std::abs(y - 0.5) <= kBoxHalfWidth;
}

std::optional<double> ratio(double num, double den) {
    if (den <= 0) {
        return std::nullopt;
    }
    return num / den;
}

void accumulate(Running& r, const MatchEvent& e) {
    r.actions += 1;
    r.x_sum += e.x;
    switch (e.kind) {
    case EventKind::goal:
        if (!e.player_id) {
            break; // own goal
        }
        [[fallthrough]];
    case EventKind::shot: {
        const bool on_target = e.kind == EventKind::goal || e.success;
        r.shots += 1;
        r.on_target += on_target ? 1 : 0;
        if (e.x > kFinalThird) {
            r.opportunities += 1;
            if (std::abs(e.y - 0.5) <= 1.0 / 6.0) {
                r.well_positioned += 1;
            }
        }
        if (in_box(e.x, e.y)) {
            r.box_entries += 1;
        }
        break;
    }
    case EventKind::pass:
        if (e.end_x) {
            const double end = *e.end_x;
            r.passes_with_end += 1;
            r.pass_length += std::abs(end - e.x);
            r.backward += end < e.x ? 1 : 0;
            if (end > kFinalThird && end > e.x) {
                r.att_pass_attempts += 1;
                r.att_pass_success += e.success ? 1 : 0;
                r.att_pass_length += end - e.x;
            }
            // No end_y in the schema: a cross is a pass from a wide channel in
            // the final third that lands at box depth.
            if (e.x > kFinalThird && std::abs(e.y - 0.5) > kBoxHalfWidth &&
                end >= 1.0 - kBoxDepth) {
                r.crosses += 1;
            }
            if (e.success && end >= 1.0 - kBoxDepth) {
                r.box_entries += 1;
            }
        }
        break;
    case EventKind::duel:
        r.tackles += 1;
        r.tackles_won += e.success ? 1 : 0;
        if (e.x > kFinalThird) {
            r.att_tackles += 1;
            r.att_tackles_won += e.success ? 1 : 0;
        }
        break;
    default:
        break;
    }
}

} // namespace

std::optional<double> ExtendedFrames::value(Side side, int t, std::string_view name) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == name) {
            return (side == Side::home ? home : away).at(t - 1).at(c);
        }
    }
    throw std::out_of_range("unknown extended feature " + std::string(name));
}

ExtendedFrames extended_features(const MatchHeader& header, std::span<const MatchEvent> events) {
    ExtendedFrames out;
    out.names.assign(kNames.begin(), kNames.end());
    out.home.assign(kFrames, std::vector<std::optional<double>>(kColumns));
    out.away.assign(kFrames, std::vector<std::optional<double>>(kColumns));

    std::array<Running, 2> run{};
    std::size_t next = 0;
    int last_goal = 0;
    for (int t = 1; t <= kFrames; ++t) {
        std::array<double, 2> in_frame{};
        while (next < events.size() &&
               frame_index(events[next].period, events[next].second,
                           header.period_durations) == t) {
            const MatchEvent& e = events[next++];
            const int s = static_cast<int>(side_of(header, e));
            accumulate(run[s], e);
            in_frame[s] += 1;
            if (e.kind == EventKind::goal) {
                last_goal = t;
            }
        }
        const double all_actions = run[0].actions + run[1].actions;
        for (int s = 0; s < 2; ++s) {
            const Running& r = run[s];
            auto& row = (s == 0 ? out.home : out.away)[t - 1];
            row[shots] = r.shots;
            row[shots_on_target] = r.on_target;
            row[well_positioned_shots] = r.well_positioned;
            row[opportunities] = r.opportunities;
            row[attacking_passes] = r.att_pass_attempts;
            row[attacking_pass_success_rate] = ratio(r.att_pass_success, r.att_pass_attempts);
            row[crosses] = r.crosses;
            row[box_entries] = r.box_entries;
            row[tackle_success_rate] = ratio(r.tackles_won, r.tackles);
            row[tempo] = in_frame[s];
            row[average_x] = ratio(r.x_sum, r.actions);
            row[possession] = ratio(r.actions, all_actions);
            row[pass_length] = ratio(r.pass_length, r.passes_with_end);
            row[attacking_pass_length] = ratio(r.att_pass_length, r.att_pass_attempts);
            row[backward_pass_fraction] = ratio(r.backward, r.passes_with_end);
            row[attacking_tackles] = r.att_tackles;
            row[attacking_tackle_success_rate] = ratio(r.att_tackles_won, r.att_tackles);
            row[frames_since_goal] = static_cast<double>(t - last_goal);
        }
    }
    return out;
}

} // namespace inplay
