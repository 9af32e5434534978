#include "inplay/svg.hpp"

#include "inplay/csv.hpp"

#include <algorithm>
#include <sstream>

namespace inplay {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 60;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

} // namespace

std::string line_chart(const ChartSpec& spec, const std::vector<Series>& series) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const double xr = spec.x_max > spec.x_min ? spec.x_max - spec.x_min : 1.0;
    const double yr = spec.y_max > spec.y_min ? spec.y_max - spec.y_min : 1.0;
    auto px = [&](double x) { return kLeft + (x - spec.x_min) / xr * pw; };
    auto py = [&](double y) { return kTop + ph - (std::clamp(y, spec.y_min, spec.y_max) - spec.y_min) / yr * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<!-- data\nseries,x,y\n";
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            o << s.name << ',' << format_number(x) << ',' << format_number(y) << '\n';
        }
    }
    o << "-->\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(spec.title) << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = spec.y_min + yr * i / 4.0;
        const double xv = spec.x_min + xr * i / 4.0;
        o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(py(yv))
          << "\" y2=\"" << num(py(yv)) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(yv) + 4)
          << "\" text-anchor=\"end\">" << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
        o << "<text x=\"" << num(px(xv)) << "\" y=\"" << kTop + ph + 18
          << "\" text-anchor=\"middle\">" << format_number(std::round(xv * 1000) / 1000)
          << "</text>\n";
    }
    for (double xm : spec.x_marks) {
        o << "<line x1=\"" << num(px(xm)) << "\" x2=\"" << num(px(xm)) << "\" y1=\"" << kTop
          << "\" y2=\"" << kTop + ph << "\" stroke=\"#999\" stroke-dasharray=\"2,3\"/>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        if (!s.points.empty()) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
            if (s.dashed) {
                o << " stroke-dasharray=\"5,4\"";
            }
            o << " points=\"";
            for (const auto& [x, y] : s.points) {
                o << num(px(x)) << ',' << num(py(y)) << ' ';
            }
            o << "\"/>\n";
        }
        const double ly = kTop + 14 + 18 * static_cast<double>(i);
        o << "<line x1=\"" << kLeft + pw + 10 << "\" x2=\"" << kLeft + pw + 30 << "\" y1=\"" << ly
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << kLeft + pw + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string reliability_svg(const CalibrationTable& table, const std::string& title) {
    std::vector<Series> series{{"ideal", {{0.0, 0.0}, {1.0, 1.0}}, true}};
    for (int k = 0; k < 3; ++k) {
        Series s{std::string(outcome_name(static_cast<Outcome>(k))), {}, false};
        for (const auto& b : table.classes[k]) {
            s.points.emplace_back(b.predicted, b.empirical);
        }
        series.push_back(std::move(s));
    }
    return line_chart({title, "predicted probability", "observed frequency", 0, 1, 0, 1, {}},
                      series);
}

std::string curve_svg(const std::vector<std::pair<std::string, EvalReport>>& reports,
                      bool accuracy) {
    std::vector<Series> series;
    double hi = 0.0;
    for (const auto& [name, r] : reports) {
        Series s{name, {}, false};
        const auto& v = accuracy ? r.accuracy : r.rps;
        for (std::size_t t = 0; t < v.size(); ++t) {
            s.points.emplace_back(static_cast<double>(t + 1), v[t]);
            hi = std::max(hi, v[t]);
        }
        series.push_back(std::move(s));
    }
    ChartSpec spec{accuracy ? "Accuracy per frame" : "Mean RPS per frame", "frame",
                   accuracy ? "accuracy" : "RPS", 1, kFrames, 0, accuracy ? 1.0 : std::max(0.05, hi * 1.1),
                   {50.5}};
    return line_chart(spec, series);
}

std::string story_svg(const StoryCurve& story) {
    Series win{"home win", {}, false};
    Series tie{"tie", {}, false};
    Series loss{"away win", {}, false};
    for (std::size_t t = 0; t < story.probs.size(); ++t) {
        const double x = static_cast<double>(t + 1);
        win.points.emplace_back(x, story.probs[t].win);
        tie.points.emplace_back(x, story.probs[t].tie);
        loss.points.emplace_back(x, story.probs[t].loss);
    }
    ChartSpec spec{"Match " + story.match_id, "frame", "probability", 1, kFrames, 0, 1, {}};
    std::vector<Series> series{win, tie, loss};
    for (const auto& m : story.markers) {
        spec.x_marks.push_back(m.t);
        const char* kind = m.kind == StoryMarker::Kind::goal        ? "goal"
                           : m.kind == StoryMarker::Kind::red_card ? "red"
                                                                    : "yellow";
        series.push_back({std::string(kind) + " " + std::string(side_name(m.side)) + " t" +
                              std::to_string(m.t),
                          {},
                          false});
    }
    return line_chart(spec, series);
}

std::string trace_svg(const std::vector<FeatureTrace>& traces) {
    std::vector<Series> series;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& tr : traces) {
        Series s{std::string(feature_name(tr.feature)), {}, false};
        for (const auto& p : tr.points) {
            s.points.emplace_back(p.t, p.mean);
            lo = std::min(lo, p.mean);
            hi = std::max(hi, p.mean);
        }
        series.push_back(std::move(s));
    }
    const double pad = std::max(1e-3, (hi - lo) * 0.1);
    return line_chart({"Feature weight per frame (raw units)", "frame", "mean weight", 1, kFrames,
                       lo - pad, hi + pad, {}},
                      series);
}

std::string counterfactual_svg(const std::vector<CounterfactualCurve>& curves) {
    std::vector<Series> series;
    for (const auto& c : curves) {
        Series s{"forced " + std::to_string(c.home_goals) + "-" + std::to_string(c.away_goals) +
                     " median",
                 {},
                 false};
        const auto& lead = c.leading();
        for (std::size_t t = 0; t < lead.size(); ++t) {
            s.points.emplace_back(static_cast<double>(t + 1), lead[t].median);
        }
        series.push_back(std::move(s));
    }
    return line_chart({"Leading side win probability under forced scorelines", "frame",
                       "median win probability", 1, kFrames, 0, 1, {}},
                      series);
}

std::string agv_svg(const std::vector<AGVRecord>& records) {
    Series s{"AGVp90", {}, false};
    double hi = 0.0;
    double lo = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        s.points.emplace_back(static_cast<double>(i + 1), records[i].agv_p90);
        hi = std::max(hi, records[i].agv_p90);
        lo = std::min(lo, records[i].agv_p90);
    }
    return line_chart({"Added goal value per 90 minutes", "player (file order)", "AGVp90", 1,
                       std::max<double>(2, static_cast<double>(records.size())), lo,
                       hi > lo ? hi : lo + 1, {}},
                      {s});
}

} // namespace inplay
