#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical routines.

#include "inplay/common.hpp"
#include "inplay/events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// C(n, k) p^k (1-p)^(n-k) by repeated multiplication.
inline double binom_pmf(int n, int k, double p) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// Enumerates every pair of remaining goal counts.
inline inplay::OutcomeProbs enumerate(int score_diff, int n_home, double p_home, int n_away,
                                      double p_away) {
    inplay::OutcomeProbs out{0.0, 0.0, 0.0};
    for (int h = 0; h <= n_home; ++h) {
        for (int a = 0; a <= n_away; ++a) {
            const double w = binom_pmf(n_home, h, p_home) * binom_pmf(n_away, a, p_away);
            const int d = score_diff + h - a;
            if (d > 0) {
                out.win += w;
            } else if (d == 0) {
                out.tie += w;
            } else {
                out.loss += w;
            }
        }
    }
    return out;
}

// Rolls out `frames` Bernoulli frames per side with fixed intensities.
inline inplay::OutcomeProbs rollouts(int score_diff, double p_home, double p_away, int frames,
                                     int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution h(p_home);
    std::bernoulli_distribution a(p_away);
    double win = 0;
    double tie = 0;
    for (int i = 0; i < n; ++i) {
        int d = score_diff;
        for (int f = 0; f < frames; ++f) {
            d += h(rng) ? 1 : 0;
            d -= a(rng) ? 1 : 0;
        }
        win += d > 0;
        tie += d == 0;
    }
    return {win / n, tie / n, (n - win - tie) / n};
}

inline double rps(const inplay::OutcomeProbs& p, inplay::Outcome o) {
    const double e1 = o == inplay::Outcome::win ? 1.0 : 0.0;
    const double e2 = o == inplay::Outcome::loss ? 0.0 : 1.0;
    const double c1 = p.win;
    const double c2 = p.win + p.tie;
    return 0.5 * ((c1 - e1) * (c1 - e1) + (c2 - e2) * (c2 - e2));
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size();) {
        std::size_t e = k;
        while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[k]]) {
            ++e;
        }
        for (std::size_t m = k; m <= e; ++m) {
            r[idx[m]] = 0.5 * static_cast<double>(k + e);
        }
        k = e + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(ra.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0;
    double saa = 0;
    double sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Hand-built match helpers.
inline inplay::Match empty_match(const std::string& id = "m1") {
    inplay::Match m;
    m.header.match_id = id;
    m.header.home_team_id = "H";
    m.header.away_team_id = "A";
    return m;
}

inline inplay::MatchEvent event(const std::string& match, int period, double second,
                                const std::string& team, inplay::EventKind kind,
                                bool success = false) {
    inplay::MatchEvent e;
    e.match_id = match;
    e.period = period;
    e.second = second;
    e.team_id = team;
    e.kind = kind;
    e.success = success;
    return e;
}

// Second at the middle of frame t for regulation halves.
inline std::pair<int, double> mid_frame(int t) {
    const int period = t <= 50 ? 1 : 2;
    const int local = t <= 50 ? t : t - 50;
    return {period, (local - 0.5) * 2700.0 / 50.0};
}

inline void add_goal(inplay::Match& m, int t, inplay::Side side, const std::string& player = "") {
    const auto [period, second] = mid_frame(t);
    auto e = event(m.header.match_id, period, second,
                   side == inplay::Side::home ? m.header.home_team_id : m.header.away_team_id,
                   inplay::EventKind::goal, true);
    if (!player.empty()) {
        e.player_id = player;
    }
    m.events.push_back(e);
    (side == inplay::Side::home ? m.header.final_home_goals : m.header.final_away_goals) += 1;
}

} // namespace oracle
