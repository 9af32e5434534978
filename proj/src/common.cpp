#include "inplay/common.hpp"

namespace inplay {

std::string_view side_name(Side s) { return s == Side::home ? "home" : "away"; }

Side side_from_name(std::string_view name) {
    if (name == "home") {
        return Side::home;
    }
    if (name == "away") {
        return Side::away;
    }
    throw ValidationError("unknown side '" + std::string(name) + "'");
}

std::string_view outcome_name(Outcome o) {
    switch (o) {
    case Outcome::win: return "win";
    case Outcome::tie: return "tie";
    case Outcome::loss: return "loss";
    }
    return "?";
}

Outcome outcome_from_name(std::string_view name) {
    if (name == "win") {
        return Outcome::win;
    }
    if (name == "tie") {
        return Outcome::tie;
    }
    if (name == "loss") {
        return Outcome::loss;
    }
    throw ValidationError("unknown outcome '" + std::string(name) + "'");
}

Outcome outcome_from_score(int score_diff) {
    if (score_diff > 0) {
        return Outcome::win;
    }
    return score_diff == 0 ? Outcome::tie : Outcome::loss;
}

Outcome OutcomeProbs::argmax() const {
    if (win >= tie && win >= loss) {
        return Outcome::win;
    }
    return tie >= loss ? Outcome::tie : Outcome::loss;
}

bool OutcomeProbs::valid(double tol) const {
    for (double p : as_array()) {
        if (!(p >= 0.0 && p <= 1.0)) {
            return false;
        }
    }
    return std::abs(win + tie + loss - 1.0) <= tol;
}

namespace {
std::string join_missing(const std::vector<std::string>& names) {
    std::string out = "missing features:";
    for (const auto& n : names) {
        out += " " + n;
    }
    return out;
}
} // namespace

SchemaError::SchemaError(std::vector<std::string> missing)
    : std::runtime_error(join_missing(missing)), missing_(std::move(missing)) {}

} // namespace inplay
