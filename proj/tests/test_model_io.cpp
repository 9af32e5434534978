#include "inplay/model_io.hpp"
#include "inplay/simgen.hpp"

#include <doctest.h>

#include <filesystem>

using namespace inplay;

namespace {

std::vector<FrameMatrix> small_frames(int matches) {
    GeneratorConfig g = GeneratorConfig::preset("default");
    g.matches = matches;
    const Corpus c = simulate_matches(g);
    std::vector<FrameMatrix> out;
    for (const auto& m : c.matches) {
        out.push_back(build_frames(m, c.ratings));
    }
    return out;
}

void check_round_trip(const AnyModel& model, const FrameMatrix& f) {
    const std::string text = model_to_json(model);
    const AnyModel back = model_from_json(text);
    CHECK(back == model);
    CHECK(model_to_json(back) == text);
    const auto a = forecast_match(model, f);
    const auto b = forecast_match(back, f);
    for (int t = 0; t < 100; ++t) {
        CHECK(a[t].win == b[t].win);
        CHECK(a[t].tie == b[t].tie);
    }
}

} // namespace

TEST_CASE("every model kind survives a round trip") {
    const auto frames = small_frames(40);
    VISchedule s;
    s.max_iterations = 60;
    const AnyModel bayes = fit_vi(frames, bayes_schema(), {}, s);
    CHECK(model_kind(bayes) == "bayes");
    check_round_trip(bayes, frames[0]);
    const AnyModel lr = fit_lr(frames);
    CHECK(model_kind(lr) == "lr");
    check_round_trip(lr, frames[0]);
    const AnyModel mlr = fit_mlr(frames);
    CHECK(model_kind(mlr) == "mlr");
    check_round_trip(mlr, frames[0]);
    ForestConfig fc;
    fc.trees = 5;
    fc.max_depth = 4;
    const AnyModel rf = fit_rf(frames, fc);
    CHECK(model_kind(rf) == "rf");
    check_round_trip(rf, frames[0]);

    const auto path = std::filesystem::temp_directory_path() / "inplay_model_io_test.json";
    save_model(path, lr);
    CHECK(load_model(path) == lr);
    std::filesystem::remove(path);
}

TEST_CASE("malformed model files") {
    CHECK_THROWS_AS(model_from_json("{"), ValidationError);
    CHECK_THROWS_AS(model_from_json(R"({"kind":"lr","version":99})"), ValidationError);
    CHECK_THROWS_AS(model_from_json(R"({"kind":"svm","version":1})"), ValidationError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ValidationError);
}
