#pragma once

#include "inplay/events.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

namespace inplay {

struct EloConfig {
    double k = 20.0;
    // Home-side offset added to the home rating inside the expectation only.
    double home_offset = 0.0;
    double initial_rating = 1500.0;
};

/// Pre-game team strengths in Elo points. Unknown teams get the default.
class RatingTable {
public:
    explicit RatingTable(double default_rating = 1500.0) : default_rating_(default_rating) {}

    double rating(const std::string& team) const;
    void set(const std::string& team, double rating) { ratings_[team] = rating; }
    bool contains(const std::string& team) const { return ratings_.count(team) != 0; }
    double default_rating() const { return default_rating_; }
    const std::map<std::string, double>& entries() const { return ratings_; }

    bool operator==(const RatingTable&) const = default;

private:
    std::map<std::string, double> ratings_;
    double default_rating_;
};

double rating_diff(const RatingTable& table, const std::string& home, const std::string& away);

// Expected home score 1 / (1 + 10^(-(r_h + H - r_a) / 400)).
double elo_expected(double home_rating, double away_rating, double home_offset);

RatingTable elo_update(RatingTable table, const std::string& home, const std::string& away,
                       int home_goals, int away_goals, const EloConfig& config = {});

// Replays a result history in order, starting every team at config.initial_rating.
RatingTable ratings_from_history(std::span<const Match> history, const EloConfig& config = {});

// CSV with header `team,rating`.
RatingTable read_ratings_csv(std::istream& in, double default_rating = 1500.0);
RatingTable read_ratings_csv(const std::filesystem::path& path, double default_rating = 1500.0);
void write_ratings_csv(std::ostream& out, const RatingTable& table);

} // namespace inplay
