#include "inplay/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace inplay {

using json = nlohmann::ordered_json;

std::string model_kind(const AnyModel& model) {
    switch (model.index()) {
    case 0: return "bayes";
    case 1: return "lr";
    case 2: return "mlr";
    default: return "rf";
    }
}

FeatureSchema model_schema(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> FeatureSchema {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FramewiseModel>) {
                return m.frames.empty() ? FeatureSchema{} : m.frames.front().schema();
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                return m.schema;
            } else {
                return m.schema();
            }
        },
        model);
}

OutcomeProbs predict_state(const AnyModel& model, const FrameState& home, const FrameState& away) {
    switch (model.index()) {
    case 0: return predict_frame(home, away, std::get<PosteriorParams>(model));
    case 1: return predict_lr(std::get<LinearModel>(model), home);
    case 2: return predict_mlr(std::get<FramewiseModel>(model), home);
    default: return predict_rf(std::get<ForestModel>(model), home);
    }
}

MatchForecast forecast_match(const AnyModel& model, const FrameMatrix& frames) {
    if (const auto* p = std::get_if<PosteriorParams>(&model)) {
        return predict_match(frames, *p);
    }
    MatchForecast out(kFrames);
    for (int t = 0; t < kFrames; ++t) {
        out[t] = predict_state(model, frames.home[t], frames.away[t]);
    }
    return out;
}

namespace {

json standardization_json(const Standardization& st) {
    return {{"features", schema_names(st.schema)}, {"mean", st.mean}, {"sd", st.sd}};
}

Standardization standardization_from(const json& j) {
    Standardization st;
    st.schema = schema_from_names(j.at("features").get<std::vector<std::string>>());
    st.mean = j.at("mean").get<std::vector<double>>();
    st.sd = j.at("sd").get<std::vector<double>>();
    if (st.mean.size() != st.schema.size() || st.sd.size() != st.schema.size()) {
        throw ValidationError("standardization arrays do not match the feature list");
    }
    return st;
}

json linear_json(const LinearModel& m) {
    return {{"standardization", standardization_json(m.standardization)},
            {"weights", {m.weights[0], m.weights[1], m.weights[2]}},
            {"intercepts", m.intercepts},
            {"range_check", m.range_check},
            {"range_limit", m.range_limit}};
}

LinearModel linear_from(const json& j) {
    LinearModel m;
    m.standardization = standardization_from(j.at("standardization"));
    const auto& w = j.at("weights");
    for (int k = 0; k < 3; ++k) {
        m.weights[k] = w.at(k).get<std::vector<double>>();
        if (m.weights[k].size() != m.standardization.size()) {
            throw ValidationError("weight vector length does not match the feature list");
        }
    }
    m.intercepts = j.at("intercepts").get<std::array<double, 3>>();
    m.range_check = j.at("range_check").get<bool>();
    m.range_limit = j.at("range_limit").get<double>();
    return m;
}

json bayes_json(const PosteriorParams& p) {
    const auto& q = p.q;
    return {{"standardization", standardization_json(p.standardization)},
            {"alpha_mean", q.alpha_mean},
            {"alpha_log_sd", q.alpha_log_sd},
            {"beta_mean", q.beta_mean},
            {"beta_log_sd", q.beta_log_sd},
            {"ha_mean", q.ha_mean},
            {"ha_log_sd", q.ha_log_sd},
            {"prior",
             {{"alpha_walk_scale", p.prior.alpha_walk_scale},
              {"beta_scale", p.prior.beta_scale},
              {"ha_scale", p.prior.ha_scale},
              {"alpha1_scale", p.prior.alpha1_scale}}},
            {"schedule",
             {{"step", p.schedule.step},
              {"decay_start", p.schedule.decay_start},
              {"max_iterations", p.schedule.max_iterations},
              {"minibatch", p.schedule.minibatch},
              {"seed", p.schedule.seed},
              {"tol", p.schedule.tol},
              {"window", p.schedule.window},
              {"patience", p.schedule.patience},
              {"draws", p.schedule.draws},
              {"report_draws", p.schedule.report_draws},
              {"init_sd", p.schedule.init_sd}}},
            {"elbo_trace", p.elbo_trace},
            {"final_elbo", p.final_elbo},
            {"iterations", p.iterations},
            {"converged", p.converged}};
}

PosteriorParams bayes_from(const json& j) {
    PosteriorParams p;
    p.standardization = standardization_from(j.at("standardization"));
    auto& q = p.q;
    q.features = p.standardization.size();
    q.alpha_mean = j.at("alpha_mean").get<std::vector<double>>();
    q.alpha_log_sd = j.at("alpha_log_sd").get<std::vector<double>>();
    if (q.alpha_mean.size() != kFrames * q.features || q.alpha_log_sd.size() != q.alpha_mean.size()) {
        throw ValidationError("alpha matrices must have 100 rows of one entry per feature");
    }
    q.beta_mean = j.at("beta_mean").get<double>();
    q.beta_log_sd = j.at("beta_log_sd").get<double>();
    q.ha_mean = j.at("ha_mean").get<double>();
    q.ha_log_sd = j.at("ha_log_sd").get<double>();
    const auto& pr = j.at("prior");
    p.prior = {pr.at("alpha_walk_scale").get<double>(), pr.at("beta_scale").get<double>(),
               pr.at("ha_scale").get<double>(), pr.at("alpha1_scale").get<double>()};
    const auto& s = j.at("schedule");
    p.schedule.step = s.at("step").get<double>();
    p.schedule.decay_start = s.at("decay_start").get<int>();
    p.schedule.max_iterations = s.at("max_iterations").get<int>();
    p.schedule.minibatch = s.at("minibatch").get<std::size_t>();
    p.schedule.seed = s.at("seed").get<std::uint64_t>();
    p.schedule.tol = s.at("tol").get<double>();
    p.schedule.window = s.at("window").get<int>();
    p.schedule.patience = s.at("patience").get<int>();
    p.schedule.draws = s.at("draws").get<int>();
    p.schedule.report_draws = s.at("report_draws").get<int>();
    p.schedule.init_sd = s.at("init_sd").get<double>();
    p.elbo_trace = j.at("elbo_trace").get<std::vector<double>>();
    p.final_elbo = j.at("final_elbo").get<double>();
    p.iterations = j.at("iterations").get<int>();
    p.converged = j.at("converged").get<bool>();
    return p;
}

json forest_json(const ForestModel& m) {
    json trees = json::array();
    for (const auto& tree : m.trees) {
        json feature = json::array();
        json threshold = json::array();
        json left = json::array();
        json right = json::array();
        json counts = json::array();
        for (const auto& n : tree.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            counts.push_back(n.counts);
        }
        trees.push_back({{"feature", std::move(feature)},
                         {"threshold", std::move(threshold)},
                         {"left", std::move(left)},
                         {"right", std::move(right)},
                         {"counts", std::move(counts)}});
    }
    return {{"features", schema_names(m.schema)},
            {"max_depth", m.max_depth},
            {"features_per_split", m.features_per_split},
            {"trees", std::move(trees)}};
}

ForestModel forest_from(const json& j) {
    ForestModel m;
    m.schema = schema_from_names(j.at("features").get<std::vector<std::string>>());
    m.max_depth = j.at("max_depth").get<int>();
    m.features_per_split = j.at("features_per_split").get<int>();
    const int width = static_cast<int>(m.schema.size());
    for (const auto& t : j.at("trees")) {
        DecisionTree tree;
        const auto& feature = t.at("feature");
        const std::size_t n = feature.size();
        tree.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            TreeNode& node = tree.nodes[i];
            node.feature = feature.at(i).get<int>();
            node.threshold = t.at("threshold").at(i).get<double>();
            node.left = t.at("left").at(i).get<int>();
            node.right = t.at("right").at(i).get<int>();
            node.counts = t.at("counts").at(i).get<std::array<double, 3>>();
            const bool leaf = node.feature < 0;
            if (!leaf && (node.feature >= width || node.left <= 0 || node.right <= 0 ||
                          static_cast<std::size_t>(std::max(node.left, node.right)) >= n)) {
                throw ValidationError("forest node " + std::to_string(i) + " is malformed");
            }
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

} // namespace

std::string model_to_json(const AnyModel& model) {
    json j;
    j["format"] = "inplay-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = model_kind(model);
    switch (model.index()) {
    case 0: j["model"] = bayes_json(std::get<PosteriorParams>(model)); break;
    case 1: j["model"] = linear_json(std::get<LinearModel>(model)); break;
    case 2: {
        json frames = json::array();
        for (const auto& m : std::get<FramewiseModel>(model).frames) {
            frames.push_back(linear_json(m));
        }
        j["model"] = {{"frames", std::move(frames)}};
        break;
    }
    default: j["model"] = forest_json(std::get<ForestModel>(model)); break;
    }
    return j.dump(1);
}

AnyModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.value("format", "") != "inplay-model") {
            throw ValidationError("not a model file");
        }
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw ValidationError("unsupported model format version " + std::to_string(version));
        }
        const std::string kind = j.at("kind").get<std::string>();
        const json& m = j.at("model");
        if (kind == "bayes") {
            return bayes_from(m);
        }
        if (kind == "lr") {
            return linear_from(m);
        }
        if (kind == "mlr") {
            FramewiseModel fm;
            for (const auto& f : m.at("frames")) {
                fm.frames.push_back(linear_from(f));
            }
            if (fm.frames.size() != static_cast<std::size_t>(kFrames)) {
                throw ValidationError("framewise model must have 100 frames");
            }
            return fm;
        }
        if (kind == "rf") {
            return forest_from(m);
        }
        throw ValidationError("unknown model kind " + kind);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write model file " + path.string());
    }
    out << model_to_json(model) << '\n';
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open model file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace inplay
