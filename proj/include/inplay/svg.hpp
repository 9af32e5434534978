#pragma once

#include "inplay/bayes.hpp"
#include "inplay/eval.hpp"
#include "inplay/insights.hpp"

#include <string>
#include <utility>
#include <vector>

namespace inplay {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
    std::vector<double> x_marks; // vertical guide lines
};

/// Standalone SVG; the plotted values are repeated as CSV inside a comment so
/// the file can be diffed and re-read.
std::string line_chart(const ChartSpec& spec, const std::vector<Series>& series);

std::string reliability_svg(const CalibrationTable& table, const std::string& title);
// One series per named report.
std::string curve_svg(const std::vector<std::pair<std::string, EvalReport>>& reports, bool accuracy);
std::string story_svg(const StoryCurve& story);
std::string trace_svg(const std::vector<FeatureTrace>& traces);
std::string counterfactual_svg(const std::vector<CounterfactualCurve>& curves);
std::string agv_svg(const std::vector<AGVRecord>& records);

} // namespace inplay
