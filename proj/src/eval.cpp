#include "inplay/eval.hpp"

#include "inplay/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace inplay {

double rps(const OutcomeProbs& p, Outcome outcome) {
    // Cumulative outcome encodings: win [1,1,1], tie [0,1,1], loss [0,0,1].
    const double e1 = outcome == Outcome::win ? 1.0 : 0.0;
    const double e2 = outcome == Outcome::loss ? 0.0 : 1.0;
    const double c1 = p.win - e1;
    const double c2 = p.win + p.tie - e2;
    return 0.5 * (c1 * c1 + c2 * c2);
}

namespace {

void check_aligned(std::span<const MatchForecast> forecasts, std::span<const Outcome> outcomes) {
    if (forecasts.size() != outcomes.size()) {
        throw std::invalid_argument("forecasts and outcomes are not aligned");
    }
    for (const auto& f : forecasts) {
        if (f.size() != static_cast<std::size_t>(kFrames)) {
            throw std::invalid_argument("every forecast must cover 100 frames");
        }
    }
}

} // namespace

std::vector<double> rps_curve(std::span<const MatchForecast> forecasts,
                              std::span<const Outcome> outcomes) {
    check_aligned(forecasts, outcomes);
    std::vector<double> out(kFrames, 0.0);
    if (forecasts.empty()) {
        return out;
    }
    for (std::size_t m = 0; m < forecasts.size(); ++m) {
        for (int t = 0; t < kFrames; ++t) {
            out[t] += rps(forecasts[m][t], outcomes[m]);
        }
    }
    for (double& v : out) {
        v /= static_cast<double>(forecasts.size());
    }
    return out;
}

std::vector<double> accuracy_curve(std::span<const MatchForecast> forecasts,
                                   std::span<const Outcome> outcomes) {
    check_aligned(forecasts, outcomes);
    std::vector<double> out(kFrames, 0.0);
    if (forecasts.empty()) {
        return out;
    }
    for (std::size_t m = 0; m < forecasts.size(); ++m) {
        for (int t = 0; t < kFrames; ++t) {
            out[t] += forecasts[m][t].argmax() == outcomes[m] ? 1.0 : 0.0;
        }
    }
    for (double& v : out) {
        v /= static_cast<double>(forecasts.size());
    }
    return out;
}

double CalibrationTable::max_deviation(Outcome o, std::size_t min_count) const {
    double worst = 0.0;
    for (const auto& b : of(o)) {
        if (b.count >= min_count) {
            worst = std::max(worst, std::abs(b.predicted - b.empirical));
        }
    }
    return worst;
}

CalibrationTable calibration_curve(std::span<const MatchForecast> forecasts,
                                   std::span<const Outcome> outcomes,
                                   const CalibrationOptions& options) {
    check_aligned(forecasts, outcomes);
    if (options.bins < 2) {
        throw std::invalid_argument("calibration needs at least 2 bins");
    }
    const int first = std::max(1, options.first_frame);
    const int last = std::min(kFrames, options.last_frame);
    const int nb = options.bins;
    CalibrationTable table;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> sum_p(nb, 0.0);
        std::vector<double> hits(nb, 0.0);
        std::vector<std::size_t> count(nb, 0);
        for (std::size_t m = 0; m < forecasts.size(); ++m) {
            const double hit = static_cast<int>(outcomes[m]) == k ? 1.0 : 0.0;
            for (int t = first; t <= last; ++t) {
                const double p = forecasts[m][t - 1].as_array()[k];
                const int b = std::clamp(static_cast<int>(std::floor(p * nb)), 0, nb - 1);
                sum_p[b] += p;
                hits[b] += hit;
                ++count[b];
            }
        }
        for (int b = 0; b < nb; ++b) {
            if (count[b] == 0) {
                continue;
            }
            const double n = static_cast<double>(count[b]);
            table.classes[k].push_back({(b + 0.5) / nb, sum_p[b] / n, hits[b] / n, count[b],
                                        count[b] < options.min_count});
        }
    }
    return table;
}

double EvalReport::mean_rps() const {
    if (rps.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : rps) {
        s += v;
    }
    return s / static_cast<double>(rps.size());
}

double EvalReport::mean_accuracy(int first, int last) const {
    double s = 0.0;
    int n = 0;
    for (int t = std::max(1, first); t <= std::min(last, static_cast<int>(accuracy.size())); ++t) {
        s += accuracy[t - 1];
        ++n;
    }
    return n == 0 ? 0.0 : s / n;
}

EvalReport evaluate(std::span<const MatchForecast> forecasts, std::span<const Outcome> outcomes,
                    const CalibrationOptions& options) {
    EvalReport r;
    r.rps = rps_curve(forecasts, outcomes);
    r.accuracy = accuracy_curve(forecasts, outcomes);
    r.calibration = calibration_curve(forecasts, outcomes, options);
    r.matches = forecasts.size();
    return r;
}

void write_curves_csv(std::ostream& out, const EvalReport& report) {
    out << "t,rps,accuracy\n";
    for (std::size_t t = 0; t < report.rps.size(); ++t) {
        out << t + 1 << ',' << format_number(report.rps[t]) << ','
            << format_number(report.accuracy[t]) << '\n';
    }
}

void write_calibration_csv(std::ostream& out, const CalibrationTable& table) {
    out << "class,bin_center,predicted,empirical,count,low_confidence\n";
    for (int k = 0; k < 3; ++k) {
        for (const auto& b : table.classes[k]) {
            out << outcome_name(static_cast<Outcome>(k)) << ',' << format_number(b.center) << ','
                << format_number(b.predicted) << ',' << format_number(b.empirical) << ','
                << b.count << ',' << (b.low_confidence ? 1 : 0) << '\n';
        }
    }
}

std::string report_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["matches"] = report.matches;
    j["mean_rps"] = report.mean_rps();
    j["rps"] = report.rps;
    j["accuracy"] = report.accuracy;
    nlohmann::ordered_json cal = nlohmann::ordered_json::object();
    for (int k = 0; k < 3; ++k) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& b : report.calibration.classes[k]) {
            arr.push_back({{"bin_center", b.center},
                           {"predicted", b.predicted},
                           {"empirical", b.empirical},
                           {"count", b.count},
                           {"low_confidence", b.low_confidence}});
        }
        cal[std::string(outcome_name(static_cast<Outcome>(k)))] = std::move(arr);
    }
    j["calibration"] = std::move(cal);
    return j.dump(2);
}

} // namespace inplay
