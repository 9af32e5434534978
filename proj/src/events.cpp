#include "inplay/events.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace inplay {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kKindNames{{
    {EventKind::pass, "pass"},
    {EventKind::shot, "shot"},
    {EventKind::duel, "duel"},
    {EventKind::foul, "foul"},
    {EventKind::yellow_card, "yellow_card"},
    {EventKind::red_card, "red_card"},
    {EventKind::goal, "goal"},
    {EventKind::other, "other"},
}};

std::string id_field(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(line, std::string("missing key '") + key + "'");
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number_integer()) {
        return std::to_string(it->get<long long>());
    }
    throw ParseError(line, std::string("key '") + key + "' must be a string");
}

double number_field(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(line, std::string("missing key '") + key + "'");
    }
    if (!it->is_number()) {
        throw ParseError(line, std::string("key '") + key + "' must be a number");
    }
    return it->get<double>();
}

struct PendingMatch {
    std::optional<MatchHeader> header;
    std::optional<int> declared_home_goals;
    std::optional<int> declared_away_goals;
    std::vector<MatchEvent> events;
    std::vector<std::string> teams_seen;
    std::array<double, 2> last_second{-1.0, -1.0};
};

MatchHeader parse_header(const json& j, std::size_t line, PendingMatch& pm) {
    MatchHeader h;
    h.match_id = id_field(j, "match_id", line);
    h.home_team_id = id_field(j, "home", line);
    h.away_team_id = id_field(j, "away", line);
    auto it = j.find("period_durations");
    if (it == j.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
        !(*it)[1].is_number()) {
        throw ParseError(line, "period_durations must be an array of two numbers");
    }
    h.period_durations = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    if (auto g = j.find("home_goals"); g != j.end()) {
        if (!g->is_number_integer()) {
            throw ParseError(line, "home_goals must be an integer");
        }
        pm.declared_home_goals = g->get<int>();
    }
    if (auto g = j.find("away_goals"); g != j.end()) {
        if (!g->is_number_integer()) {
            throw ParseError(line, "away_goals must be an integer");
        }
        pm.declared_away_goals = g->get<int>();
    }
    return h;
}

MatchEvent parse_event(const json& j, std::size_t line) {
    MatchEvent e;
    e.match_id = id_field(j, "match_id", line);
    const double period = number_field(j, "period", line);
    if (period != 1.0 && period != 2.0) {
        throw ParseError(line, "period must be 1 or 2");
    }
    e.period = static_cast<int>(period);
    e.second = number_field(j, "second", line);
    e.team_id = id_field(j, "team", line);
    if (auto it = j.find("player"); it != j.end() && !it->is_null()) {
        e.player_id = id_field(j, "player", line);
    }
    auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) {
        throw ParseError(line, "key 'kind' must be a string");
    }
    e.kind = kind_from_name(kind->get<std::string>());
    e.x = number_field(j, "x", line);
    e.y = number_field(j, "y", line);
    if (auto it = j.find("success"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            throw ParseError(line, "key 'success' must be a boolean");
        }
        e.success = it->get<bool>();
    }
    if (auto it = j.find("end_x"); it != j.end() && !it->is_null()) {
        e.end_x = number_field(j, "end_x", line);
    }
    return e;
}

[[noreturn]] void invalid(const std::string& match_id, const std::string& rule) {
    throw ValidationError("match " + match_id + ": " + rule);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace

std::string_view kind_name(EventKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) {
            return name;
        }
    }
    return "other";
}

EventKind kind_from_name(std::string_view name) {
    for (const auto& [kind, n] : kKindNames) {
        if (n == name) {
            return kind;
        }
    }
    return EventKind::other;
}

bool attacking_pass(const MatchEvent& e) {
    if (e.kind != EventKind::pass || !e.end_x) {
        return false;
    }
    return e.success && *e.end_x > 2.0 / 3.0 && *e.end_x > e.x;
}

Side side_of(const MatchHeader& h, const MatchEvent& e) {
    if (e.team_id == h.home_team_id) {
        return Side::home;
    }
    if (e.team_id == h.away_team_id) {
        return Side::away;
    }
    invalid(h.match_id, "team '" + e.team_id + "' is neither home nor away");
}

void validate_match(const Match& m) {
    const auto& h = m.header;
    if (h.home_team_id == h.away_team_id) {
        invalid(h.match_id, "exactly two distinct team_id values required");
    }
    for (double d : h.period_durations) {
        if (!(d >= kRegulationHalf)) {
            invalid(h.match_id, "period duration below 2700 seconds");
        }
    }
    int home_goals = 0;
    int away_goals = 0;
    std::array<double, 2> last{-1.0, -1.0};
    int last_period = 1;
    for (const auto& e : m.events) {
        if (e.match_id != h.match_id) {
            invalid(h.match_id, "event belongs to match " + e.match_id);
        }
        if (e.period != 1 && e.period != 2) {
            invalid(h.match_id, "period must be 1 or 2");
        }
        if (!(e.second >= 0.0) || !std::isfinite(e.second)) {
            invalid(h.match_id, "negative or non-finite second");
        }
        if (e.period < last_period || e.second < last[e.period - 1]) {
            invalid(h.match_id, "events not ordered by (period, second)");
        }
        last_period = e.period;
        last[e.period - 1] = e.second;
        if (!in_unit(e.x) || !in_unit(e.y) || (e.end_x && !in_unit(*e.end_x))) {
            invalid(h.match_id, "coordinate outside [0,1]");
        }
        const Side s = side_of(h, e);
        if (e.kind == EventKind::goal) {
            (s == Side::home ? home_goals : away_goals) += 1;
        }
    }
    if (home_goals != h.final_home_goals || away_goals != h.final_away_goals) {
        invalid(h.match_id, "final score does not match goal events");
    }
}

std::vector<Match> parse_events(std::istream& in) {
    std::vector<std::string> order;
    std::map<std::string, PendingMatch> pending;

    auto slot = [&](const std::string& id) -> PendingMatch& {
        auto [it, inserted] = pending.try_emplace(id);
        if (inserted) {
            order.push_back(id);
        }
        return it->second;
    };

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
            continue;
        }
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& err) {
            throw ParseError(line, std::string("malformed JSON: ") + err.what());
        }
        if (!j.is_object()) {
            throw ParseError(line, "record must be a JSON object");
        }
        auto header_flag = j.find("header");
        if (header_flag != j.end() && header_flag->is_boolean() && header_flag->get<bool>()) {
            const std::string id = id_field(j, "match_id", line);
            PendingMatch& pm = slot(id);
            if (pm.header) {
                invalid(id, "duplicate header");
            }
            pm.header = parse_header(j, line, pm);
            continue;
        }
        MatchEvent e = parse_event(j, line);
        PendingMatch& pm = slot(e.match_id);
        const int p = e.period - 1;
        if (e.second < pm.last_second[p]) {
            invalid(e.match_id, "second decreases within period " + std::to_string(e.period) +
                                    " at line " + std::to_string(line));
        }
        pm.last_second[p] = e.second;
        if (std::find(pm.teams_seen.begin(), pm.teams_seen.end(), e.team_id) ==
            pm.teams_seen.end()) {
            pm.teams_seen.push_back(e.team_id);
        }
        pm.events.push_back(std::move(e));
    }

    std::vector<Match> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        PendingMatch& pm = pending.at(id);
        Match m;
        if (pm.header) {
            m.header = *pm.header;
        } else {
            if (pm.teams_seen.size() != 2) {
                invalid(id, "exactly two distinct team_id values required");
            }
            m.header.match_id = id;
            m.header.home_team_id = pm.teams_seen[0];
            m.header.away_team_id = pm.teams_seen[1];
            for (int p = 0; p < 2; ++p) {
                m.header.period_durations[p] = std::max(kRegulationHalf, pm.last_second[p]);
            }
        }
        if (pm.teams_seen.size() > 2) {
            invalid(id, "exactly two distinct team_id values required");
        }
        std::stable_sort(pm.events.begin(), pm.events.end(),
                         [](const MatchEvent& a, const MatchEvent& b) {
                             return std::pair(a.period, a.second) < std::pair(b.period, b.second);
                         });
        m.events = std::move(pm.events);
        int home_goals = 0;
        int away_goals = 0;
        for (const auto& e : m.events) {
            if (e.kind == EventKind::goal) {
                (side_of(m.header, e) == Side::home ? home_goals : away_goals) += 1;
            }
        }
        if ((pm.declared_home_goals && *pm.declared_home_goals != home_goals) ||
            (pm.declared_away_goals && *pm.declared_away_goals != away_goals)) {
            invalid(id, "final score does not match goal events");
        }
        m.header.final_home_goals = home_goals;
        m.header.final_away_goals = away_goals;
        validate_match(m);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Match> parse_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_events(in);
}

void write_events(std::ostream& out, std::span<const Match> matches) {
    for (const auto& m : matches) {
        ordered_json h;
        h["header"] = true;
        h["match_id"] = m.header.match_id;
        h["home"] = m.header.home_team_id;
        h["away"] = m.header.away_team_id;
        h["period_durations"] = {m.header.period_durations[0], m.header.period_durations[1]};
        h["home_goals"] = m.header.final_home_goals;
        h["away_goals"] = m.header.final_away_goals;
        out << h.dump() << '\n';
        for (const auto& e : m.events) {
            ordered_json j;
            j["match_id"] = e.match_id;
            j["period"] = e.period;
            j["second"] = e.second;
            j["team"] = e.team_id;
            j["player"] = e.player_id ? json(*e.player_id) : json(nullptr);
            j["kind"] = kind_name(e.kind);
            j["x"] = e.x;
            j["y"] = e.y;
            j["success"] = e.success;
            if (e.end_x) {
                j["end_x"] = *e.end_x;
            }
            out << j.dump() << '\n';
        }
    }
}

void write_events(const std::filesystem::path& path, std::span<const Match> matches) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_events(out, matches);
}

} // namespace inplay
