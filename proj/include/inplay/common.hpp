#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace inplay {

// Number of percentage frames a match is split into.
inline constexpr int kFrames = 100;

enum class Side { home, away };

inline Side other(Side s) { return s == Side::home ? Side::away : Side::home; }
std::string_view side_name(Side s);
Side side_from_name(std::string_view name);

// Final result from the home team's perspective.
enum class Outcome { win = 0, tie = 1, loss = 2 };

std::string_view outcome_name(Outcome o);
Outcome outcome_from_name(std::string_view name);
Outcome outcome_from_score(int score_diff);

/// Win/tie/loss probabilities for the home team.
struct OutcomeProbs {
    double win = 1.0 / 3.0;
    double tie = 1.0 / 3.0;
    double loss = 1.0 / 3.0;

    double operator[](Outcome o) const {
        switch (o) {
        case Outcome::win: return win;
        case Outcome::tie: return tie;
        case Outcome::loss: return loss;
        }
        return 0.0;
    }
    std::array<double, 3> as_array() const { return {win, tie, loss}; }

    // Most likely class; ties resolved in the order win > tie > loss.
    Outcome argmax() const;
    bool valid(double tol = 1e-9) const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model and data disagree on the feature columns.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

// Divergence, NaN or non-convergence inside a fitting routine.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double invlogit(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// splitmix64 finalizer; used to derive independent per-unit seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace inplay
