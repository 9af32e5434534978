#include "inplay/cli.hpp"

#include "inplay/baselines.hpp"
#include "inplay/bayes.hpp"
#include "inplay/csv.hpp"
#include "inplay/eval.hpp"
#include "inplay/events.hpp"
#include "inplay/features.hpp"
#include "inplay/insights.hpp"
#include "inplay/model_io.hpp"
#include "inplay/ratings.hpp"
#include "inplay/simgen.hpp"
#include "inplay/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace inplay::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

unsigned long long fnv1a(const std::string& bytes) {
    unsigned long long h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string hex(unsigned long long v) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + p.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + p.string());
    }
    out << text;
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_file(path, text);
    }
}

struct Options {
    std::string config;
    unsigned long long seed = kDefaultSeed;
    std::string format = "csv";

    std::string preset = "default";
    int matches = 100;
    double beta = 0.0;
    double ha = 0.0;
    double burst = 0.0;
    double momentum_sd = 0.0;
    int teams = 20;
    double rating_sd = 100.0;

    std::string events;
    std::string ratings;
    bool elo = false;
    std::string ratings_out;
    std::string extended;
    std::string frames;
    std::string out;

    std::string kind = "bayes";
    std::string model;
    std::vector<std::string> models;
    bool no_rating = false;
    int iterations = 20000;
    double step = 0.02;
    std::size_t minibatch = 4096;
    double tol = 1e-4;
    double walk_scale = 2.0;
    double alpha1_scale = 10.0;
    double beta_scale = 10.0;
    double ha_scale = 10.0;
    double l2 = 1e-4;
    int max_linear_iterations = 10000;
    int trees = 200;
    int depth = 12;
    int threads = 0;

    bool posterior = false;
    int samples = 100;
    int bins = 10;
    std::string calibration_frames = "1-100";

    std::string goals;
    std::vector<std::string> scores;
    int red_diff = 0;
    std::string match;
    std::string plot_kind = "reliability";
};

std::pair<int, int> parse_pair(const std::string& text, char sep, const std::string& what) {
    const auto pos = text.find(sep);
    try {
        if (pos == std::string::npos) {
            throw std::invalid_argument(what);
        }
        std::size_t used = 0;
        const int a = std::stoi(text.substr(0, pos), &used);
        const int b = std::stoi(text.substr(pos + 1));
        return {a, b};
    } catch (const std::exception&) {
        throw UsageError("cannot read " + what + " from '" + text + "'");
    }
}

PredictMode predict_mode(const Options& o) {
    return o.posterior ? PredictMode::posterior(o.samples, o.seed) : PredictMode::mean();
}

FeatureSchema schema_for_kind(const Options& o) {
    if (o.kind == "bayes") {
        return bayes_schema(!o.no_rating);
    }
    if (o.kind == "mlr") {
        return schema_without(Feature::game_time);
    }
    if (o.kind == "lr" || o.kind == "rf") {
        return full_schema();
    }
    throw UsageError("unknown model kind " + o.kind);
}

const PosteriorParams& need_bayes(const AnyModel& m, const std::string& what) {
    const auto* p = std::get_if<PosteriorParams>(&m);
    if (p == nullptr) {
        throw ValidationError(what + " needs a bayes model, got " + model_kind(m));
    }
    return *p;
}

std::vector<Outcome> outcomes_of(const std::vector<FrameMatrix>& frames) {
    std::vector<Outcome> out;
    for (const auto& f : frames) {
        out.push_back(f.outcome);
    }
    return out;
}

std::vector<MatchForecast> forecasts_of(const AnyModel& model, const std::vector<FrameMatrix>& frames,
                                        PredictMode mode) {
    std::vector<MatchForecast> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        if (const auto* p = std::get_if<PosteriorParams>(&model)) {
            out.push_back(predict_match(f, *p, mode));
        } else {
            out.push_back(forecast_match(model, f));
        }
    }
    return out;
}

std::pair<int, int> frame_range(const Options& o) {
    auto [a, b] = parse_pair(o.calibration_frames, '-', "calibration frame range");
    if (a < 1 || b > kFrames || a > b) {
        throw UsageError("calibration frame range must satisfy 1 <= a <= b <= 100");
    }
    return {a, b};
}

// Manifest of one run: inputs with content hashes, resolved options, versions.
struct Manifest {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::map<std::string, std::string> config;
};

void write_manifest(const fs::path& target, bool is_dir, const Manifest& m) {
    json j;
    j["tool"] = "inplay";
    j["version"] = kVersion;
    j["model_format_version"] = kModelFormatVersion;
    j["subcommand"] = m.subcommand;
    json inputs = json::array();
    for (const auto& in : m.inputs) {
        if (in.empty()) {
            continue;
        }
        const std::string bytes = read_file(in);
        inputs.push_back({{"path", in}, {"bytes", bytes.size()}, {"fnv1a", hex(fnv1a(bytes))}});
    }
    j["inputs"] = std::move(inputs);
    std::string canonical;
    json cfg = json::object();
    for (const auto& [k, v] : m.config) {
        canonical += k + "=" + v + "\n";
        cfg[k] = v;
    }
    j["config"] = std::move(cfg);
    j["config_hash"] = hex(fnv1a(canonical));
    const fs::path p = is_dir ? target / "manifest.json" : fs::path(target.string() + ".manifest.json");
    write_file(p, j.dump(2) + "\n");
}

std::map<std::string, std::string> resolved_options(const CLI::App& app, const CLI::App& sub) {
    std::map<std::string, std::string> out;
    for (const CLI::App* a : {&app, &sub}) {
        for (const CLI::Option* opt : a->get_options()) {
            const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames()[0];
            if (name == "help" || name == "config" || name == "version") {
                continue;
            }
            std::string value;
            if (opt->count() > 0) {
                for (const auto& r : opt->results()) {
                    value += (value.empty() ? "" : ",") + r;
                }
            } else {
                value = opt->get_default_str();
            }
            out[name] = value;
        }
    }
    return out;
}

// key=value lines; '#' starts a comment. Keys are long option names.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file " + path);
    }
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(n) + " is not key=value");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

// ---------------------------------------------------------------- commands

void cmd_simulate(const Options& o, const CLI::App& sub, Manifest& man) {
    if (o.out.empty()) {
        throw UsageError("simulate needs --out DIR");
    }
    GeneratorConfig g = GeneratorConfig::preset(o.preset);
    g.matches = o.matches;
    g.seed = o.seed;
    if (sub.count("--beta") > 0) {
        g.beta = o.beta;
    }
    if (sub.count("--ha") > 0) {
        g.ha = o.ha;
    }
    if (sub.count("--teams") > 0) {
        g.teams = o.teams;
    }
    if (sub.count("--rating-sd") > 0) {
        g.rating_sd = o.rating_sd;
    }
    g.mismatch.burst = o.burst;
    g.mismatch.momentum_sd = o.momentum_sd;
    const Corpus corpus = simulate_matches(g);
    write_corpus(o.out, corpus);

    json gen;
    gen["preset"] = g.name;
    gen["beta"] = g.beta;
    gen["ha"] = g.ha;
    gen["matches"] = g.matches;
    gen["seed"] = g.seed;
    json alpha = json::object();
    for (Feature f : kAllFeatures) {
        std::vector<double> v;
        for (int t = 1; t <= kFrames; ++t) {
            v.push_back(g.coef(t, f));
        }
        alpha[std::string(feature_name(f))] = v;
    }
    gen["alpha"] = std::move(alpha);
    write_file(fs::path(o.out) / "generator.json", gen.dump(1) + "\n");
    man.inputs.clear();
}

void cmd_ingest(const Options& o, std::ostream& out, Manifest& man) {
    if (o.events.empty()) {
        throw UsageError("ingest needs --events FILE");
    }
    man.inputs = {o.events};
    const auto matches = parse_events(o.events);
    if (!o.out.empty()) {
        write_events(fs::path(o.out), matches);
    }
    if (!o.ratings_out.empty()) {
        std::ostringstream r;
        write_ratings_csv(r, ratings_from_history(matches));
        write_file(o.ratings_out, r.str());
    }
    std::ostringstream s;
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& m : matches) {
            arr.push_back({{"match_id", m.header.match_id},
                           {"home", m.header.home_team_id},
                           {"away", m.header.away_team_id},
                           {"home_goals", m.header.final_home_goals},
                           {"away_goals", m.header.final_away_goals},
                           {"events", m.events.size()}});
        }
        s << arr.dump(2) << '\n';
    } else {
        s << "match_id,home,away,home_goals,away_goals,events\n";
        for (const auto& m : matches) {
            s << m.header.match_id << ',' << m.header.home_team_id << ',' << m.header.away_team_id
              << ',' << m.header.final_home_goals << ',' << m.header.final_away_goals << ','
              << m.events.size() << '\n';
        }
    }
    out << s.str();
}

void cmd_featurize(const Options& o, Manifest& man) {
    if (o.events.empty() || o.out.empty()) {
        throw UsageError("featurize needs --events FILE and --out FILE");
    }
    man.inputs = {o.events, o.ratings};
    const auto matches = parse_events(o.events);
    std::vector<FrameMatrix> frames;
    frames.reserve(matches.size());
    if (!o.ratings.empty()) {
        const RatingTable table = read_ratings_csv(fs::path(o.ratings));
        for (const auto& m : matches) {
            frames.push_back(build_frames(m, table));
        }
    } else {
        // Without a ratings file: pre-match Elo from the preceding matches
        // (--elo), or the default rating for everyone.
        RatingTable table;
        for (const auto& m : matches) {
            frames.push_back(build_frames(m, table));
            if (o.elo) {
                table = elo_update(table, m.header.home_team_id, m.header.away_team_id,
                                   m.header.final_home_goals, m.header.final_away_goals);
            }
        }
    }
    std::ostringstream s;
    write_frames_csv(s, frames);
    write_file(o.out, s.str());

    if (!o.extended.empty()) {
        std::ostringstream e;
        bool header = false;
        for (const auto& m : matches) {
            const ExtendedFrames ext = extended_features(m.header, m.events);
            if (!header) {
                e << "match_id,side,t";
                for (const auto& n : ext.names) {
                    e << ',' << n;
                }
                e << '\n';
                header = true;
            }
            for (Side side : {Side::home, Side::away}) {
                const auto& rows = side == Side::home ? ext.home : ext.away;
                for (int t = 1; t <= kFrames; ++t) {
                    e << m.header.match_id << ',' << side_name(side) << ',' << t;
                    for (const auto& v : rows[t - 1]) {
                        e << ',';
                        if (v) {
                            e << format_number(*v);
                        }
                    }
                    e << '\n';
                }
            }
        }
        write_file(o.extended, e.str());
    }
}

void cmd_fit(const Options& o, std::ostream& out, Manifest& man) {
    if (o.frames.empty() || o.out.empty()) {
        throw UsageError("fit needs --frames FILE and --out FILE");
    }
    man.inputs = {o.frames};
    const FeatureSchema schema = schema_for_kind(o);
    const auto frames = read_frames_csv(fs::path(o.frames), schema);
    if (frames.empty()) {
        throw ValidationError("training set is empty");
    }
    json summary;
    summary["kind"] = o.kind;
    summary["matches"] = frames.size();
    AnyModel model;
    if (o.kind == "bayes") {
        PriorConfig prior{o.walk_scale, o.beta_scale, o.ha_scale, o.alpha1_scale};
        VISchedule sched;
        sched.step = o.step;
        sched.max_iterations = o.iterations;
        sched.minibatch = o.minibatch;
        sched.seed = o.seed;
        sched.tol = o.tol;
        PosteriorParams p = fit_vi(frames, schema, prior, sched);
        summary["iterations"] = p.iterations;
        summary["converged"] = p.converged;
        summary["final_elbo"] = p.final_elbo;
        model = std::move(p);
    } else if (o.kind == "lr" || o.kind == "mlr") {
        LinearConfig cfg;
        cfg.l2 = o.l2;
        cfg.max_iterations = o.max_linear_iterations;
        if (o.kind == "lr") {
            model = fit_lr(frames, cfg);
        } else {
            model = fit_mlr(frames, cfg);
        }
    } else {
        ForestConfig cfg;
        cfg.trees = o.trees;
        cfg.max_depth = o.depth;
        cfg.seed = o.seed;
        cfg.threads = o.threads;
        model = fit_rf(frames, cfg);
    }
    save_model(o.out, model);
    if (o.format == "json") {
        out << summary.dump(2) << '\n';
    } else {
        std::vector<std::string> keys;
        std::vector<std::string> values;
        for (const auto& [k, v] : summary.items()) {
            keys.push_back(k);
            values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
        for (std::size_t i = 0; i < keys.size(); ++i) {
            out << keys[i] << (i + 1 < keys.size() ? "," : "\n");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << values[i] << (i + 1 < values.size() ? "," : "\n");
        }
    }
}

struct Loaded {
    AnyModel model;
    std::vector<FrameMatrix> frames;
};

Loaded load_model_and_frames(const Options& o, Manifest& man) {
    if (o.model.empty() || o.frames.empty()) {
        throw UsageError("this command needs --model FILE and --frames FILE");
    }
    man.inputs = {o.model, o.frames};
    Loaded l{load_model(o.model), {}};
    l.frames = read_frames_csv(fs::path(o.frames), model_schema(l.model));
    return l;
}

void cmd_predict(const Options& o, std::ostream& out, Manifest& man) {
    const Loaded l = load_model_and_frames(o, man);
    const auto fc = forecasts_of(l.model, l.frames, predict_mode(o));
    std::ostringstream s;
    if (o.format == "json") {
        json arr = json::array();
        for (std::size_t m = 0; m < fc.size(); ++m) {
            json probs = json::array();
            for (const auto& p : fc[m]) {
                probs.push_back({p.win, p.tie, p.loss});
            }
            arr.push_back({{"match_id", l.frames[m].match_id}, {"probs", std::move(probs)}});
        }
        s << arr.dump(1) << '\n';
    } else {
        s << "match_id,t,win,tie,loss\n";
        for (std::size_t m = 0; m < fc.size(); ++m) {
            for (int t = 1; t <= kFrames; ++t) {
                const auto& p = fc[m][t - 1];
                s << l.frames[m].match_id << ',' << t << ',' << format_number(p.win) << ','
                  << format_number(p.tie) << ',' << format_number(p.loss) << '\n';
            }
        }
    }
    emit(o.out, s.str(), out);
}

void cmd_evaluate(const Options& o, std::ostream& out, Manifest& man) {
    const Loaded l = load_model_and_frames(o, man);
    const auto fc = forecasts_of(l.model, l.frames, predict_mode(o));
    const auto [first, last] = frame_range(o);
    CalibrationOptions opts;
    opts.bins = o.bins;
    opts.first_frame = first;
    opts.last_frame = last;
    const EvalReport r = evaluate(fc, outcomes_of(l.frames), opts);
    if (o.out.empty()) {
        if (o.format == "json") {
            out << report_json(r) << '\n';
        } else {
            write_curves_csv(out, r);
        }
        return;
    }
    fs::create_directories(o.out);
    if (o.format == "json") {
        write_file(fs::path(o.out) / "report.json", report_json(r) + "\n");
    } else {
        std::ostringstream curves;
        write_curves_csv(curves, r);
        write_file(fs::path(o.out) / "curves.csv", curves.str());
        std::ostringstream cal;
        write_calibration_csv(cal, r.calibration);
        write_file(fs::path(o.out) / "calibration.csv", cal.str());
        json summary;
        summary["model"] = model_kind(l.model);
        summary["matches"] = r.matches;
        summary["mean_rps"] = r.mean_rps();
        summary["mean_accuracy"] = r.mean_accuracy(1, kFrames);
        write_file(fs::path(o.out) / "summary.json", summary.dump(2) + "\n");
    }
}

void cmd_agv(const Options& o, std::ostream& out, std::ostream& err, Manifest& man) {
    if (o.goals.empty()) {
        throw UsageError("agv needs --goals FILE");
    }
    const Loaded l = load_model_and_frames(o, man);
    man.inputs.push_back(o.goals);
    const PosteriorParams& p = need_bayes(l.model, "agv");
    if (std::find(p.schema().begin(), p.schema().end(), Feature::rating_diff) != p.schema().end()) {
        throw ValidationError("agv needs a model fitted without rating_diff (fit --no-rating)");
    }
    const auto log = read_goal_log(fs::path(o.goals));
    const auto contributions = goal_contributions(log, l.frames, p, predict_mode(o));
    std::vector<std::string> warnings;
    const auto records = agv_p90(contributions, minutes_played(log), &warnings);
    for (const auto& w : warnings) {
        err << "inplay: warning reason=\"" << w << "\"\n";
    }
    std::ostringstream s;
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& r : records) {
            arr.push_back({{"player", r.player_id},
                           {"goals", r.goals},
                           {"minutes", r.minutes},
                           {"agv_p90", r.agv_p90}});
        }
        s << arr.dump(2) << '\n';
    } else {
        s << "player,goals,minutes,agv_p90\n";
        for (const auto& r : records) {
            s << r.player_id << ',' << r.goals << ',' << format_number(r.minutes) << ','
              << format_number(r.agv_p90) << '\n';
        }
    }
    emit(o.out, s.str(), out);
}

std::vector<CounterfactualCurve> whatif_curves(const Options& o, const Loaded& l,
                                               const CLI::App& sub) {
    const PosteriorParams& p = need_bayes(l.model, "whatif");
    if (o.scores.empty()) {
        throw UsageError("whatif needs at least one --score H-A");
    }
    std::optional<int> red;
    if (sub.count("--red-diff") > 0) {
        red = o.red_diff;
    }
    std::vector<CounterfactualCurve> curves;
    for (const auto& sc : o.scores) {
        const auto [h, a] = parse_pair(sc, '-', "forced score");
        curves.push_back(counterfactual_curve(l.frames, p, h, a, red, predict_mode(o)));
    }
    return curves;
}

void cmd_whatif(const Options& o, const CLI::App& sub, std::ostream& out, Manifest& man) {
    const Loaded l = load_model_and_frames(o, man);
    const auto curves = whatif_curves(o, l, sub);
    std::ostringstream s;
    auto row = [](const Quartiles& q) {
        return std::vector<double>{q.min, q.q1, q.median, q.q3, q.max};
    };
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& c : curves) {
            json hw = json::array();
            json aw = json::array();
            for (int t = 0; t < kFrames; ++t) {
                hw.push_back(row(c.home_win[t]));
                aw.push_back(row(c.away_win[t]));
            }
            arr.push_back({{"score", std::to_string(c.home_goals) + "-" + std::to_string(c.away_goals)},
                           {"home_win", std::move(hw)},
                           {"away_win", std::move(aw)}});
        }
        s << arr.dump(1) << '\n';
    } else {
        s << "score,t,side,min,q1,median,q3,max\n";
        for (const auto& c : curves) {
            const std::string score = std::to_string(c.home_goals) + "-" + std::to_string(c.away_goals);
            for (int t = 1; t <= kFrames; ++t) {
                for (Side side : {Side::home, Side::away}) {
                    const Quartiles& q = side == Side::home ? c.home_win[t - 1] : c.away_win[t - 1];
                    s << score << ',' << t << ',' << side_name(side);
                    for (double v : row(q)) {
                        s << ',' << format_number(v);
                    }
                    s << '\n';
                }
            }
        }
    }
    emit(o.out, s.str(), out);
}

void cmd_plot(Options o, const CLI::App& sub, std::ostream& out, Manifest& man) {
    if (o.models.empty()) {
        throw UsageError("plot needs --model FILE");
    }
    o.model = o.models.front();
    std::string svg;
    if (o.plot_kind == "traces") {
        man.inputs = {o.model};
        svg = trace_svg(feature_traces(need_bayes(load_model(o.model), "traces plot")));
    } else if (o.plot_kind == "accuracy" || o.plot_kind == "rps") {
        if (o.frames.empty()) {
            throw UsageError("plot needs --frames FILE");
        }
        man.inputs = o.models;
        man.inputs.push_back(o.frames);
        std::vector<std::pair<std::string, EvalReport>> reports;
        for (const auto& path : o.models) {
            const AnyModel m = load_model(path);
            const auto frames = read_frames_csv(fs::path(o.frames), model_schema(m));
            reports.emplace_back(model_kind(m) + " (" + fs::path(path).stem().string() + ")",
                                 evaluate(forecasts_of(m, frames, predict_mode(o)), outcomes_of(frames)));
        }
        svg = curve_svg(reports, o.plot_kind == "accuracy");
    } else {
        const Loaded l = load_model_and_frames(o, man);
        if (o.plot_kind == "reliability") {
            const auto [first, last] = frame_range(o);
            CalibrationOptions opts;
            opts.bins = o.bins;
            opts.first_frame = first;
            opts.last_frame = last;
            svg = reliability_svg(
                calibration_curve(forecasts_of(l.model, l.frames, predict_mode(o)),
                                  outcomes_of(l.frames), opts),
                "Calibration (" + model_kind(l.model) + ")");
        } else if (o.plot_kind == "story") {
            const PosteriorParams& p = need_bayes(l.model, "story plot");
            auto it = std::find_if(l.frames.begin(), l.frames.end(), [&](const FrameMatrix& f) {
                return o.match.empty() || f.match_id == o.match;
            });
            if (it == l.frames.end()) {
                throw ValidationError("match " + o.match + " not found in frames");
            }
            svg = story_svg(story_curve(*it, p, predict_mode(o)));
        } else if (o.plot_kind == "whatif") {
            svg = counterfactual_svg(whatif_curves(o, l, sub));
        } else {
            throw UsageError("unknown plot kind " + o.plot_kind);
        }
    }
    emit(o.out, svg, out);
}

std::string quote(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::string q = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            q += '\\';
        }
        q += c;
    }
    return q + "\"";
}

int fail(std::ostream& err, const char* kind, int code, const std::string& reason,
         const std::string& extra = "") {
    err << "inplay: error=" << kind << " exit=" << code << extra << " reason=" << quote(reason)
        << '\n';
    return code;
}

} // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"In-game football win probability: simulate, featurize, fit, evaluate.\n"
                 "Options may also come from --config FILE with one key=value per line\n"
                 "(keys are long option names without dashes); command-line flags win.",
                 "inplay"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", o.config, "key=value configuration file");
    app.add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();
    app.add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "generate a synthetic corpus with known parameters");
    sim->add_option("--preset", o.preset, "generator preset")
        ->check(CLI::IsMember(GeneratorConfig::preset_names()))
        ->capture_default_str();
    sim->add_option("--matches", o.matches, "number of matches")->capture_default_str();
    sim->add_option("--out", o.out, "output directory");
    sim->add_option("--beta", o.beta, "override the true intercept");
    sim->add_option("--ha", o.ha, "override the true home advantage");
    sim->add_option("--teams", o.teams, "league size");
    sim->add_option("--rating-sd", o.rating_sd, "spread of team ratings");
    sim->add_option("--burst", o.burst, "mismatched mode: chance of a second goal in a frame")
        ->capture_default_str();
    sim->add_option("--momentum-sd", o.momentum_sd, "mismatched mode: AR(1) logit shock sd")
        ->capture_default_str();

    auto* ing = app.add_subcommand("ingest", "parse and validate an event file");
    ing->add_option("--events", o.events, "event file (JSON lines)");
    ing->add_option("--out", o.out, "write normalized events here");
    ing->add_option("--ratings-out", o.ratings_out, "write Elo ratings computed from the results");

    auto* feat = app.add_subcommand("featurize", "turn events into 100 frame states per team");
    feat->add_option("--events", o.events, "event file (JSON lines)");
    feat->add_option("--ratings", o.ratings, "ratings CSV (team,rating)");
    feat->add_flag("--elo", o.elo, "use pre-match Elo computed from earlier matches in the file");
    feat->add_option("--out", o.out, "frames CSV");
    feat->add_option("--extended", o.extended, "also write the extended feature catalog here");

    auto* fit = app.add_subcommand("fit", "fit a model on a frames CSV");
    fit->add_option("--frames", o.frames, "training frames CSV");
    fit->add_option("--model", o.kind, "model kind")
        ->check(CLI::IsMember({"bayes", "lr", "mlr", "rf"}))
        ->capture_default_str();
    fit->add_option("--out", o.out, "model file (JSON)");
    fit->add_flag("--no-rating", o.no_rating, "bayes: leave out rating_diff");
    fit->add_option("--iterations", o.iterations, "bayes: maximum iterations")->capture_default_str();
    fit->add_option("--step", o.step, "bayes: initial step size")->capture_default_str();
    fit->add_option("--minibatch", o.minibatch, "bayes: observations per step")->capture_default_str();
    fit->add_option("--tol", o.tol, "bayes: relative ELBO tolerance")->capture_default_str();
    fit->add_option("--walk-scale", o.walk_scale, "bayes: random-walk prior sd")->capture_default_str();
    fit->add_option("--alpha1-scale", o.alpha1_scale, "bayes: first-frame prior sd")->capture_default_str();
    fit->add_option("--beta-scale", o.beta_scale, "bayes: intercept prior sd")->capture_default_str();
    fit->add_option("--ha-scale", o.ha_scale, "bayes: home advantage prior sd")->capture_default_str();
    fit->add_option("--l2", o.l2, "lr/mlr: L2 penalty")->capture_default_str();
    fit->add_option("--max-iterations", o.max_linear_iterations, "lr/mlr: iteration cap")
        ->capture_default_str();
    fit->add_option("--trees", o.trees, "rf: number of trees")->capture_default_str();
    fit->add_option("--depth", o.depth, "rf: maximum depth")->capture_default_str();
    fit->add_option("--threads", o.threads, "rf: worker threads (0 = all)")->capture_default_str();

    auto add_predict_opts = [&](CLI::App* s) {
        s->add_option("--model", o.model, "model file");
        s->add_option("--frames", o.frames, "frames CSV");
        s->add_option("--out", o.out, "output path (stdout when absent)");
        s->add_flag("--posterior", o.posterior, "bayes: average over posterior draws");
        s->add_option("--samples", o.samples, "bayes: posterior draws")->capture_default_str();
    };
    auto* pred = app.add_subcommand("predict", "per-frame win/tie/loss probabilities");
    add_predict_opts(pred);
    auto* ev = app.add_subcommand("evaluate", "RPS, accuracy and calibration report");
    add_predict_opts(ev);
    ev->add_option("--bins", o.bins, "calibration bins")->capture_default_str();
    ev->add_option("--calibration-frames", o.calibration_frames, "frame range a-b pooled for calibration")
        ->capture_default_str();
    auto* agv = app.add_subcommand("agv", "added goal value per 90 minutes");
    add_predict_opts(agv);
    agv->add_option("--goals", o.goals, "goals CSV (player,match,frame,minutes[,side])");
    auto* wi = app.add_subcommand("whatif", "win probability under forced scorelines");
    add_predict_opts(wi);
    wi->add_option("--score", o.scores, "forced score H-A (repeatable)");
    wi->add_option("--red-diff", o.red_diff, "also force the home red-card difference");

    auto* plot = app.add_subcommand("plot", "SVG charts");
    plot->add_option("--kind", o.plot_kind, "chart kind")
        ->check(CLI::IsMember({"reliability", "accuracy", "rps", "story", "traces", "whatif"}))
        ->capture_default_str();
    plot->add_option("--model", o.models, "model file (repeatable for accuracy/rps)");
    plot->add_option("--frames", o.frames, "frames CSV");
    plot->add_option("--out", o.out, "SVG path (stdout when absent)");
    plot->add_option("--match", o.match, "story: match id (first match when absent)");
    plot->add_option("--score", o.scores, "whatif: forced score H-A (repeatable)");
    plot->add_option("--red-diff", o.red_diff, "whatif: forced home red-card difference");
    plot->add_option("--bins", o.bins, "reliability: bins")->capture_default_str();
    plot->add_option("--calibration-frames", o.calibration_frames, "reliability: frame range a-b")
        ->capture_default_str();
    plot->add_flag("--posterior", o.posterior, "bayes: average over posterior draws");
    plot->add_option("--samples", o.samples, "bayes: posterior draws")->capture_default_str();

    std::vector<std::string> args = args_in;
    try {
        // Config-file values are appended unless the flag is already given.
        std::string config_path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                config_path = args[i + 1];
            } else if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
            }
        }
        if (!config_path.empty()) {
            CLI::App* active = nullptr;
            for (const auto& a : args) {
                if (auto* s = app.get_subcommand_no_throw(a)) {
                    active = s;
                    break;
                }
            }
            for (const auto& [key, value] : read_config(config_path)) {
                const std::string flag = "--" + key;
                const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
                    return a == flag || a.rfind(flag + "=", 0) == 0;
                });
                if (given) {
                    continue;
                }
                const CLI::Option* opt = active != nullptr ? active->get_option_no_throw(flag) : nullptr;
                if (opt == nullptr) {
                    opt = app.get_option_no_throw(flag);
                    if (opt == nullptr) {
                        continue; // belongs to another subcommand
                    }
                    args.insert(args.begin(), flag + "=" + value);
                    continue;
                }
                if (opt->get_expected_max() == 0) {
                    if (value == "true" || value == "1") {
                        args.push_back(flag);
                    }
                } else {
                    args.push_back(flag + "=" + value);
                }
            }
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        return fail(err, "usage", usage, e.what());
    } catch (const UsageError& e) {
        return fail(err, "usage", usage, e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    Manifest man;
    man.subcommand = sub->get_name();
    man.config = resolved_options(app, *sub);
    try {
        const std::string name = sub->get_name();
        if (name == "simulate") {
            cmd_simulate(o, *sub, man);
        } else if (name == "ingest") {
            cmd_ingest(o, out, man);
        } else if (name == "featurize") {
            cmd_featurize(o, man);
        } else if (name == "fit") {
            cmd_fit(o, out, man);
        } else if (name == "predict") {
            cmd_predict(o, out, man);
        } else if (name == "evaluate") {
            cmd_evaluate(o, out, man);
        } else if (name == "agv") {
            cmd_agv(o, out, err, man);
        } else if (name == "whatif") {
            cmd_whatif(o, *sub, out, man);
        } else if (name == "plot") {
            cmd_plot(o, *sub, out, man);
        }
        if (!o.out.empty() && o.out != "-") {
            const bool dir = name == "simulate" || (name == "evaluate");
            write_manifest(o.out, dir, man);
        }
    } catch (const UsageError& e) {
        return fail(err, "usage", usage, e.what());
    } catch (const SchemaError& e) {
        std::string missing;
        for (const auto& m : e.missing()) {
            missing += (missing.empty() ? "" : ",") + m;
        }
        return fail(err, "schema", data, e.what(), " missing=" + missing);
    } catch (const ParseError& e) {
        return fail(err, "parse", data, e.what(), " line=" + std::to_string(e.line()));
    } catch (const ValidationError& e) {
        return fail(err, "validation", data, e.what());
    } catch (const NumericalError& e) {
        return fail(err, "numerical", numerical, e.what());
    } catch (const std::exception& e) {
        return fail(err, "data", data, e.what());
    }
    return ok;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace inplay::cli
