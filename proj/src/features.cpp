#include "inplay/features.hpp"

#include "inplay/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace inplay {

namespace {

constexpr std::array<std::string_view, 8> kFeatureNames{
    "game_time", "score_diff", "rating_diff",      "goals",
    "yellows",   "red_diff",   "attacking_passes", "duel_strength",
};

constexpr int kHalfFrames = kFrames / 2;

struct FrameCounts {
    std::array<int, kFrames + 1> goals{};
    std::array<int, kFrames + 1> yellows{};
    std::array<int, kFrames + 1> reds{};
    std::array<int, kFrames + 1> attacking_passes{};
    std::array<int, kFrames + 1> duels_won{};
};

} // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
        if (kFeatureNames[i] == name) {
            return static_cast<Feature>(i);
        }
    }
    return std::nullopt;
}

FeatureSchema full_schema() { return FeatureSchema(kAllFeatures.begin(), kAllFeatures.end()); }

FeatureSchema schema_without(Feature f) {
    FeatureSchema out;
    for (Feature g : kAllFeatures) {
        if (g != f) {
            out.push_back(g);
        }
    }
    return out;
}

std::vector<std::string> schema_names(const FeatureSchema& schema) {
    std::vector<std::string> out;
    for (Feature f : schema) {
        out.emplace_back(feature_name(f));
    }
    return out;
}

FeatureSchema schema_from_names(const std::vector<std::string>& names) {
    FeatureSchema out;
    std::vector<std::string> unknown;
    for (const auto& n : names) {
        if (auto f = feature_from_name(n)) {
            out.push_back(*f);
        } else {
            unknown.push_back(n);
        }
    }
    if (!unknown.empty()) {
        throw SchemaError(unknown);
    }
    return out;
}

double feature_value(const FrameState& s, Feature f) {
    switch (f) {
    case Feature::game_time: return s.game_time;
    case Feature::score_diff: return s.score_diff;
    case Feature::rating_diff: return s.rating_diff;
    case Feature::goals: return s.goals;
    case Feature::yellows: return s.yellows;
    case Feature::red_diff: return s.red_diff;
    case Feature::attacking_passes: return s.attacking_passes;
    case Feature::duel_strength: return s.duel_strength;
    }
    return 0.0;
}

std::vector<double> feature_vector(const FrameState& s, const FeatureSchema& schema) {
    std::vector<double> out;
    out.reserve(schema.size());
    for (Feature f : schema) {
        out.push_back(feature_value(s, f));
    }
    return out;
}

int FrameMatrix::goals_in_frame(Side side, int t) const {
    int n = 0;
    for (const auto& g : goal_frames) {
        n += (g.t == t && g.side == side) ? 1 : 0;
    }
    return n;
}

int frame_index(int period, double second, const std::array<double, 2>& durations,
                int* clamped) {
    if (period != 1 && period != 2) {
        throw ValidationError("period must be 1 or 2");
    }
    const double duration = durations[period - 1];
    if (second > duration) {
        second = duration;
        if (clamped != nullptr) {
            ++*clamped;
        }
    }
    int k = static_cast<int>(std::ceil(kHalfFrames * std::max(second, 0.0) / duration));
    k = std::clamp(k, 1, kHalfFrames);
    return (period - 1) * kHalfFrames + k;
}

FrameMatrix build_frames(const MatchHeader& header, std::span<const MatchEvent> events,
                         const RatingTable& ratings) {
    FrameMatrix fm;
    fm.match_id = header.match_id;
    fm.home_team_id = header.home_team_id;
    fm.away_team_id = header.away_team_id;

    std::array<FrameCounts, 2> counts{};
    std::array<int, kFrames + 1> duels{};

    for (const auto& e : events) {
        const int t = frame_index(e.period, e.second, header.period_durations, &fm.clamped_events);
        const Side s = side_of(header, e);
        FrameCounts& own = counts[static_cast<int>(s)];
        switch (e.kind) {
        case EventKind::goal:
            own.goals[t] += 1;
            fm.goal_frames.push_back({t, s});
            break;
        case EventKind::yellow_card:
            own.yellows[t] += 1;
            fm.card_frames.push_back({t, s, false});
            break;
        case EventKind::red_card:
            own.reds[t] += 1;
            fm.card_frames.push_back({t, s, true});
            break;
        case EventKind::duel: {
            duels[t] += 1;
            const Side winner = e.success ? s : other(s);
            counts[static_cast<int>(winner)].duels_won[t] += 1;
            break;
        }
        case EventKind::pass:
            if (attacking_pass(e)) {
                own.attacking_passes[t] += 1;
            }
            break;
        default:
            break;
        }
    }

    const double home_rating_diff =
        rating_diff(ratings, header.home_team_id, header.away_team_id);

    fm.home.resize(kFrames);
    fm.away.resize(kFrames);
    std::array<int, 2> goals{};
    std::array<int, 2> yellows{};
    std::array<int, 2> reds{};
    for (int t = 1; t <= kFrames; ++t) {
        for (int s = 0; s < 2; ++s) {
            goals[s] += counts[s].goals[t];
            yellows[s] += counts[s].yellows[t];
            reds[s] += counts[s].reds[t];
        }
        const int first = std::max(1, t - kRollingWindow);
        const int window = t - first;
        std::array<double, 2> passes{};
        std::array<double, 2> won{};
        double total_duels = 0.0;
        for (int w = first; w < t; ++w) {
            total_duels += duels[w];
            for (int s = 0; s < 2; ++s) {
                passes[s] += counts[s].attacking_passes[w];
                won[s] += counts[s].duels_won[w];
            }
        }
        for (int s = 0; s < 2; ++s) {
            const int o = 1 - s;
            FrameState& st = (s == 0 ? fm.home : fm.away)[t - 1];
            st.t = t;
            st.game_time = t / static_cast<double>(kFrames);
            st.score_diff = goals[s] - goals[o];
            st.goals = goals[s];
            st.yellows = yellows[s];
            st.red_diff = reds[s] - reds[o];
            st.attacking_passes = window > 0 ? passes[s] / window : 0.0;
            st.duel_strength = total_duels > 0 ? won[s] / total_duels : 0.5;
            st.rating_diff = s == 0 ? home_rating_diff : -home_rating_diff;
        }
    }
    fm.outcome = outcome_from_score(goals[0] - goals[1]);
    return fm;
}

FrameMatrix build_frames(const Match& match, const RatingTable& ratings) {
    return build_frames(match.header, match.events, ratings);
}

void write_frames_csv(std::ostream& out, std::span<const FrameMatrix> frames) {
    out << "match_id,team,side,t";
    for (Feature f : kAllFeatures) {
        out << ',' << feature_name(f);
    }
    out << ",outcome,frame_goals,frame_yellows,frame_reds\n";
    for (const auto& fm : frames) {
        for (Side side : {Side::home, Side::away}) {
            std::array<int, kFrames + 1> yellow_in{};
            std::array<int, kFrames + 1> red_in{};
            for (const auto& c : fm.card_frames) {
                if (c.side == side) {
                    (c.red ? red_in : yellow_in)[c.t] += 1;
                }
            }
            const std::string& team = side == Side::home ? fm.home_team_id : fm.away_team_id;
            for (const auto& st : fm.states(side)) {
                out << fm.match_id << ',' << team << ',' << side_name(side) << ',' << st.t;
                for (Feature f : kAllFeatures) {
                    out << ',' << format_number(feature_value(st, f));
                }
                out << ',' << outcome_name(fm.outcome) << ',' << fm.goals_in_frame(side, st.t)
                    << ',' << yellow_in[st.t] << ',' << red_in[st.t] << '\n';
            }
        }
    }
}

void write_frames_csv(const std::filesystem::path& path, std::span<const FrameMatrix> frames) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_frames_csv(out, frames);
}

std::vector<FrameMatrix> read_frames_csv(std::istream& in, const FeatureSchema& required) {
    CsvReader reader(in);
    std::vector<std::string> missing;
    for (Feature f : required) {
        if (!reader.has_column(feature_name(f))) {
            missing.emplace_back(feature_name(f));
        }
    }
    if (!missing.empty()) {
        throw SchemaError(missing);
    }
    const std::size_t c_match = reader.column("match_id");
    const std::size_t c_team = reader.column("team");
    const std::size_t c_side = reader.column("side");
    const std::size_t c_t = reader.column("t");
    const std::size_t c_outcome = reader.column("outcome");
    const std::size_t c_goals = reader.column("frame_goals");
    const bool has_cards = reader.has_column("frame_yellows") && reader.has_column("frame_reds");
    std::array<std::optional<std::size_t>, 8> c_feature{};
    for (Feature f : kAllFeatures) {
        if (reader.has_column(feature_name(f))) {
            c_feature[static_cast<std::size_t>(f)] = reader.column(feature_name(f));
        }
    }

    std::vector<FrameMatrix> out;
    std::map<std::string, std::size_t> index;
    // Per match, per side, per frame goal counts (reassembled into event order below).
    std::vector<std::array<std::array<int, kFrames + 1>, 2>> goal_counts;
    std::vector<std::array<std::array<std::array<int, kFrames + 1>, 2>, 2>> card_counts;
    std::vector<std::array<std::array<bool, kFrames + 1>, 2>> seen;

    while (auto row = reader.next()) {
        const std::string& id = (*row)[c_match];
        auto [it, inserted] = index.try_emplace(id, out.size());
        if (inserted) {
            FrameMatrix fm;
            fm.match_id = id;
            fm.home.resize(kFrames);
            fm.away.resize(kFrames);
            out.push_back(std::move(fm));
            goal_counts.emplace_back();
            card_counts.emplace_back();
            seen.emplace_back();
        }
        const std::size_t mi = it->second;
        FrameMatrix& fm = out[mi];
        const Side side = side_from_name((*row)[c_side]);
        const long long t = reader.integer(*row, c_t);
        if (t < 1 || t > kFrames) {
            throw ParseError(reader.line(), "frame index out of range");
        }
        (side == Side::home ? fm.home_team_id : fm.away_team_id) = (*row)[c_team];
        fm.outcome = outcome_from_name((*row)[c_outcome]);
        FrameState& st = fm.states(side)[t - 1];
        st.t = static_cast<int>(t);
        st.game_time = t / static_cast<double>(kFrames);
        auto get = [&](Feature f, double fallback) {
            const auto& c = c_feature[static_cast<std::size_t>(f)];
            return c ? reader.number(*row, *c) : fallback;
        };
        st.game_time = get(Feature::game_time, st.game_time);
        st.score_diff = static_cast<int>(std::lround(get(Feature::score_diff, 0.0)));
        st.rating_diff = get(Feature::rating_diff, 0.0);
        st.goals = static_cast<int>(std::lround(get(Feature::goals, 0.0)));
        st.yellows = static_cast<int>(std::lround(get(Feature::yellows, 0.0)));
        st.red_diff = static_cast<int>(std::lround(get(Feature::red_diff, 0.0)));
        st.attacking_passes = get(Feature::attacking_passes, 0.0);
        st.duel_strength = get(Feature::duel_strength, 0.5);
        const int s = static_cast<int>(side);
        goal_counts[mi][s][t] = static_cast<int>(reader.integer(*row, c_goals));
        if (has_cards) {
            card_counts[mi][s][0][t] =
                static_cast<int>(reader.integer(*row, reader.column("frame_yellows")));
            card_counts[mi][s][1][t] =
                static_cast<int>(reader.integer(*row, reader.column("frame_reds")));
        }
        seen[mi][s][t] = true;
    }

    for (std::size_t mi = 0; mi < out.size(); ++mi) {
        FrameMatrix& fm = out[mi];
        for (int s = 0; s < 2; ++s) {
            for (int t = 1; t <= kFrames; ++t) {
                if (!seen[mi][s][t]) {
                    throw ValidationError("match " + fm.match_id + ": missing " +
                                          std::string(side_name(static_cast<Side>(s))) +
                                          " frame " + std::to_string(t));
                }
            }
        }
        for (int t = 1; t <= kFrames; ++t) {
            for (int s = 0; s < 2; ++s) {
                for (int k = 0; k < goal_counts[mi][s][t]; ++k) {
                    fm.goal_frames.push_back({t, static_cast<Side>(s)});
                }
                for (int red = 0; red < 2; ++red) {
                    for (int k = 0; k < card_counts[mi][s][red][t]; ++k) {
                        fm.card_frames.push_back({t, static_cast<Side>(s), red == 1});
                    }
                }
            }
        }
    }
    return out;
}

std::vector<FrameMatrix> read_frames_csv(const std::filesystem::path& path,
                                         const FeatureSchema& required) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_frames_csv(in, required);
}

} // namespace inplay
