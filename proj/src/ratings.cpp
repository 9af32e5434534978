#include "inplay/ratings.hpp"

#include "inplay/csv.hpp"

#include <cmath>
#include <fstream>

namespace inplay {

double RatingTable::rating(const std::string& team) const {
    auto it = ratings_.find(team);
    return it == ratings_.end() ? default_rating_ : it->second;
}

double rating_diff(const RatingTable& table, const std::string& home, const std::string& away) {
    return table.rating(home) - table.rating(away);
}

double elo_expected(double home_rating, double away_rating, double home_offset) {
    return 1.0 / (1.0 + std::pow(10.0, -(home_rating + home_offset - away_rating) / 400.0));
}

RatingTable elo_update(RatingTable table, const std::string& home, const std::string& away,
                       int home_goals, int away_goals, const EloConfig& config) {
    if (home_goals < 0 || away_goals < 0) {
        throw ValidationError("goal counts must be non-negative");
    }
    const double rh = table.rating(home);
    const double ra = table.rating(away);
    const double expected = elo_expected(rh, ra, config.home_offset);
    const double actual = home_goals > away_goals ? 1.0 : (home_goals == away_goals ? 0.5 : 0.0);
    const double delta = config.k * (actual - expected);
    table.set(home, rh + delta);
    table.set(away, ra - delta);
    return table;
}

RatingTable ratings_from_history(std::span<const Match> history, const EloConfig& config) {
    RatingTable table(config.initial_rating);
    for (const auto& m : history) {
        table = elo_update(std::move(table), m.header.home_team_id, m.header.away_team_id,
                           m.header.final_home_goals, m.header.final_away_goals, config);
    }
    return table;
}

RatingTable read_ratings_csv(std::istream& in, double default_rating) {
    CsvReader reader(in);
    const std::size_t team_col = reader.column("team");
    const std::size_t rating_col = reader.column("rating");
    RatingTable table(default_rating);
    while (auto row = reader.next()) {
        const double r = reader.number(*row, rating_col);
        if (!std::isfinite(r)) {
            throw ParseError(reader.line(), "rating must be finite");
        }
        table.set((*row)[team_col], r);
    }
    return table;
}

RatingTable read_ratings_csv(const std::filesystem::path& path, double default_rating) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_ratings_csv(in, default_rating);
}

void write_ratings_csv(std::ostream& out, const RatingTable& table) {
    out << "team,rating\n";
    for (const auto& [team, rating] : table.entries()) {
        out << team << ',' << format_number(rating) << '\n';
    }
}

} // namespace inplay
