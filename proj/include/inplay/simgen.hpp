#pragma once

#include "inplay/events.hpp"
#include "inplay/features.hpp"
#include "inplay/ratings.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace inplay {

// Per-team, per-frame event rates (Poisson means or Bernoulli probabilities).
struct EventRates {
    double passes = 4.0;
    double attacking_share = 0.15; // share of passes that are successful attacking passes
    double duels = 1.5;
    double duel_win = 0.5;
    double fouls = 0.12;
    double shots = 0.12;
    double yellow = 0.018;
    double red = 0.001;
};

// Departures from the per-frame Bernoulli goal process.
struct Mismatch {
    double burst = 0.0;       // chance that a goal is followed by a second one in the same frame
    double momentum_sd = 0.0; // AR(1) logit shock per team
    double momentum_decay = 0.9;

    bool active() const { return burst > 0.0 || momentum_sd > 0.0; }
};

/// Known generative parameters. alpha is kFrames x 8 in kAllFeatures order and
/// in raw feature units; row t maps the state after frame t onto the goal logit
/// of frame t + 1 (row 1 also drives frame 1 from the kickoff state).
struct GeneratorConfig {
    std::string name = "custom";
    std::vector<double> alpha = std::vector<double>(kFrames * kAllFeatures.size(), 0.0);
    double beta = -4.28;
    double ha = 0.0;
    int teams = 20;
    double rating_mean = 1500.0;
    double rating_sd = 100.0;
    EventRates rates;
    Mismatch mismatch;
    int matches = 100;
    std::uint64_t seed = 20190901;

    double coef(int t, Feature f) const;
    void set_constant(Feature f, double value);
    // Linear in t from `from` at t = 1 to `to` at t = 100.
    void set_ramp(Feature f, double from, double to);

    // Throws ValidationError for unusable settings. The own-goals coefficient
    // must be zero so that truth probabilities depend on goal difference only.
    void validate() const;

    // default, recovery, calibration, timevarying, null
    static GeneratorConfig preset(std::string_view name);
    static std::vector<std::string> preset_names();
};

/// Ground truth for one generated match.
struct MatchTruth {
    std::string match_id;
    // theta[side][t-1]: invlogit(beta + Ha [home] + alpha_t . x_t) for the
    // state after frame t, i.e. the intensity for frame t + 1.
    std::array<std::vector<double>, 2> theta;
    // Goal logit of frame s = base_logit[side][s-1] + score_coef[s-1] * own score diff.
    std::array<std::vector<double>, 2> base_logit;
    std::vector<double> score_coef;
    double burst = 0.0;
    std::vector<int> score_diff;      // home score diff after frame t
    std::vector<OutcomeProbs> probs;  // exact, after frame t
    OutcomeProbs kickoff;             // exact, before frame 1

    // Generator-side logs, [side][t-1].
    std::array<std::vector<int>, 2> goals;
    std::array<std::vector<int>, 2> attacking_passes;
    std::array<std::vector<int>, 2> duels_won;
    std::array<std::vector<int>, 2> events;
    std::array<std::vector<double>, 2> duel_strength;
    std::array<std::vector<double>, 2> attacking_rolling;
    std::size_t event_count = 0;
};

/// Exact result probabilities after frame t (t = 0 is kickoff), by a backward
/// pass over goal-difference states using the true future intensities.
OutcomeProbs true_outcome_probs(const MatchTruth& truth, int t);

struct GeneratedMatch {
    Match match;
    MatchTruth truth;
};

struct Corpus {
    std::vector<Match> matches;
    std::vector<MatchTruth> truth;
    RatingTable ratings;
};

RatingTable league_ratings(const GeneratorConfig& config);
// Match `index` of the corpus; depends only on (config, index).
GeneratedMatch simulate_match(const GeneratorConfig& config, const RatingTable& ratings, int index);
Corpus simulate_matches(const GeneratorConfig& config);

void write_truth_csv(std::ostream& out, std::span<const MatchTruth> truth);
// events.jsonl, truth.csv and ratings.csv inside `dir`.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus);

} // namespace inplay
