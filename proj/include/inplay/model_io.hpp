#pragma once

#include "inplay/baselines.hpp"
#include "inplay/bayes.hpp"
#include "inplay/eval.hpp"

#include <filesystem>
#include <string>
#include <variant>

namespace inplay {

using AnyModel = std::variant<PosteriorParams, LinearModel, FramewiseModel, ForestModel>;

inline constexpr int kModelFormatVersion = 1;

// "bayes", "lr", "mlr" or "rf".
std::string model_kind(const AnyModel& model);
// Feature columns the model reads.
FeatureSchema model_schema(const AnyModel& model);

OutcomeProbs predict_state(const AnyModel& model, const FrameState& home, const FrameState& away);
MatchForecast forecast_match(const AnyModel& model, const FrameMatrix& frames);

/// Versioned JSON with the standardization statistics embedded.
std::string model_to_json(const AnyModel& model);
AnyModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

} // namespace inplay
