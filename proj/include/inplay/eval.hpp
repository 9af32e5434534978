#pragma once

#include "inplay/common.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace inplay {

// One match's forecasts, index t-1 for frames 1..100.
using MatchForecast = std::vector<OutcomeProbs>;

/// Ranked probability score over the ordered classes (win, tie, loss).
double rps(const OutcomeProbs& p, Outcome outcome);

// Mean RPS per frame across matches (100 values).
std::vector<double> rps_curve(std::span<const MatchForecast> forecasts,
                              std::span<const Outcome> outcomes);
// Fraction of matches whose argmax forecast equals the outcome, per frame.
std::vector<double> accuracy_curve(std::span<const MatchForecast> forecasts,
                                   std::span<const Outcome> outcomes);

struct CalibrationBin {
    double center = 0.0;
    double predicted = 0.0; // mean forecast probability in the bin
    double empirical = 0.0; // observed outcome frequency
    std::size_t count = 0;
    bool low_confidence = false;
};

struct CalibrationOptions {
    int bins = 10;
    std::size_t min_count = 50; // bins below this are flagged
    int first_frame = 1;        // pooled frame range, inclusive
    int last_frame = kFrames;
};

/// Occupied equal-width bins per class (win, tie, loss).
struct CalibrationTable {
    std::array<std::vector<CalibrationBin>, 3> classes;

    const std::vector<CalibrationBin>& of(Outcome o) const {
        return classes[static_cast<int>(o)];
    }
    // Largest |predicted - empirical| among bins with at least min_count samples.
    double max_deviation(Outcome o, std::size_t min_count) const;
};

CalibrationTable calibration_curve(std::span<const MatchForecast> forecasts,
                                   std::span<const Outcome> outcomes,
                                   const CalibrationOptions& options = {});

struct EvalReport {
    std::vector<double> rps;      // per frame
    std::vector<double> accuracy; // per frame
    CalibrationTable calibration;
    std::size_t matches = 0;

    double mean_rps() const;
    double mean_accuracy(int first, int last) const;
};

EvalReport evaluate(std::span<const MatchForecast> forecasts, std::span<const Outcome> outcomes,
                    const CalibrationOptions& options = {});

void write_curves_csv(std::ostream& out, const EvalReport& report);
void write_calibration_csv(std::ostream& out, const CalibrationTable& table);
std::string report_json(const EvalReport& report);

} // namespace inplay
