#include "inplay/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

namespace inplay {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178; // log(2 pi) / 2

// E_q[log N(v; 0, scale)] for v ~ N(m, exp(ls)); adds d/dm, d/dls.
double gaussian_prior_term(double m, double ls, double scale, double& dm, double& dls) {
    const double var = std::exp(2.0 * ls);
    const double s2 = scale * scale;
    dm += -m / s2;
    dls += -var / s2;
    return -kHalfLog2Pi - std::log(scale) - (m * m + var) / (2.0 * s2);
}

const char* non_finite_block(const VariationalParams& q) {
    auto bad = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
    };
    if (bad(q.alpha_mean) || bad(q.alpha_log_sd)) {
        return "alpha";
    }
    if (!std::isfinite(q.beta_mean) || !std::isfinite(q.beta_log_sd)) {
        return "beta";
    }
    if (!std::isfinite(q.ha_mean) || !std::isfinite(q.ha_log_sd)) {
        return "ha";
    }
    return "likelihood";
}

// Likelihood part of the ELBO. Gradient is accumulated into `grad` when given.
double likelihood_term(const VariationalParams& q, const ObservationSet& data,
                       std::span<const std::size_t> batch, const NoiseDraws& noise,
                       double total_count, VariationalParams* grad) {
    const std::size_t F = q.features;
    const std::size_t A = kFrames * F;
    const std::size_t S = noise.draws();
    if (S == 0 || noise.latent != q.latent_count()) {
        throw std::invalid_argument("noise draws do not match the variational family");
    }
    if (batch.empty()) {
        throw std::invalid_argument("minibatch must be non-empty");
    }
    const double scale = total_count / (static_cast<double>(batch.size()) * S);

    std::vector<double> sd(A);
    for (std::size_t i = 0; i < A; ++i) {
        sd[i] = std::exp(q.alpha_log_sd[i]);
    }
    const double beta_sd = std::exp(q.beta_log_sd);
    const double ha_sd = std::exp(q.ha_log_sd);

    std::vector<double> alpha(A);
    std::vector<double> g_alpha(A);
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        const auto eps = noise.draw(s);
        for (std::size_t i = 0; i < A; ++i) {
            alpha[i] = q.alpha_mean[i] + sd[i] * eps[i];
        }
        const double beta = q.beta_mean + beta_sd * eps[A];
        const double ha = q.ha_mean + ha_sd * eps[A + 1];
        std::fill(g_alpha.begin(), g_alpha.end(), 0.0);
        double g_beta = 0.0;
        double g_ha = 0.0;
        double ll = 0.0;
        for (std::size_t i : batch) {
            const double* x = data.x.data() + i * F;
            const std::size_t base = (data.frame[i] - 1) * F;
            const double is_home = data.home[i];
            double eta = beta + ha * is_home;
            for (std::size_t f = 0; f < F; ++f) {
                eta += alpha[base + f] * x[f];
            }
            const double y = data.goal[i];
            ll += y * eta - softplus(eta);
            if (grad != nullptr) {
                const double r = y - invlogit(eta);
                for (std::size_t f = 0; f < F; ++f) {
                    g_alpha[base + f] += r * x[f];
                }
                g_beta += r;
                g_ha += r * is_home;
            }
        }
        total += scale * ll;
        if (grad != nullptr) {
            for (std::size_t i = 0; i < A; ++i) {
                const double g = scale * g_alpha[i];
                grad->alpha_mean[i] += g;
                grad->alpha_log_sd[i] += g * eps[i] * sd[i];
            }
            grad->beta_mean += scale * g_beta;
            grad->beta_log_sd += scale * g_beta * eps[A] * beta_sd;
            grad->ha_mean += scale * g_ha;
            grad->ha_log_sd += scale * g_ha * eps[A + 1] * ha_sd;
        }
    }
    return total;
}

} // namespace

NoiseDraws NoiseDraws::sample(std::size_t latent, std::size_t draws, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    NoiseDraws n;
    n.latent = latent;
    n.eps.resize(latent * draws);
    for (double& e : n.eps) {
        e = normal(rng);
    }
    return n;
}

ElboResult prior_and_entropy(const VariationalParams& q, const PriorConfig& prior) {
    ElboResult r;
    r.grad = VariationalParams::constant(q.features, 0.0, 0.0);
    auto& g = r.grad;
    const std::size_t F = q.features;
    double value = 0.0;

    for (std::size_t f = 0; f < F; ++f) {
        value += gaussian_prior_term(q.alpha_mean[f], q.alpha_log_sd[f], prior.alpha1_scale,
                                     g.alpha_mean[f], g.alpha_log_sd[f]);
    }
    // E_q[log N(a_t; a_{t-1}, w)] = -log(w sqrt(2 pi)) - ((m_t - m_{t-1})^2 + s_t^2 + s_{t-1}^2) / 2w^2
    const double w2 = prior.alpha_walk_scale * prior.alpha_walk_scale;
    for (int t = 2; t <= kFrames; ++t) {
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t cur = (t - 1) * F + f;
            const std::size_t prev = (t - 2) * F + f;
            const double diff = q.alpha_mean[cur] - q.alpha_mean[prev];
            const double v_cur = std::exp(2.0 * q.alpha_log_sd[cur]);
            const double v_prev = std::exp(2.0 * q.alpha_log_sd[prev]);
            value += -kHalfLog2Pi - std::log(prior.alpha_walk_scale) -
                     (diff * diff + v_cur + v_prev) / (2.0 * w2);
            g.alpha_mean[cur] += -diff / w2;
            g.alpha_mean[prev] += diff / w2;
            g.alpha_log_sd[cur] += -v_cur / w2;
            g.alpha_log_sd[prev] += -v_prev / w2;
        }
    }
    value += gaussian_prior_term(q.beta_mean, q.beta_log_sd, prior.beta_scale, g.beta_mean,
                                 g.beta_log_sd);
    value += gaussian_prior_term(q.ha_mean, q.ha_log_sd, prior.ha_scale, g.ha_mean, g.ha_log_sd);

    // Entropy of the factorized Gaussian: sum(log sd) + n/2 log(2 pi e).
    const double per_latent = kHalfLog2Pi + 0.5;
    for (std::size_t i = 0; i < q.alpha_log_sd.size(); ++i) {
        value += q.alpha_log_sd[i] + per_latent;
        g.alpha_log_sd[i] += 1.0;
    }
    value += q.beta_log_sd + per_latent + q.ha_log_sd + per_latent;
    g.beta_log_sd += 1.0;
    g.ha_log_sd += 1.0;
    r.value = value;
    return r;
}

ElboResult elbo_and_grad(const VariationalParams& q, const PriorConfig& prior,
                         const ObservationSet& data, std::span<const std::size_t> batch,
                         const NoiseDraws& noise, double total_count) {
    if (data.features != q.features) {
        throw std::invalid_argument("observation width does not match parameters");
    }
    ElboResult r = prior_and_entropy(q, prior);
    r.value += likelihood_term(q, data, batch, noise, total_count, &r.grad);
    if (!std::isfinite(r.value)) {
        throw NumericalError(std::string("non-finite ELBO in block ") + non_finite_block(q));
    }
    return r;
}

PosteriorParams fit_vi(std::span<const FrameMatrix> frames, const FeatureSchema& schema,
                       const PriorConfig& prior, const VISchedule& schedule) {
    if (frames.empty()) {
        throw ValidationError("training set is empty");
    }
    Standardization st = Standardization::fit_states(schema, frames, true);
    const ObservationSet data = make_observations(frames, st);
    return fit_vi(data, std::move(st), prior, schedule);
}

PosteriorParams fit_vi(const ObservationSet& data, Standardization st, const PriorConfig& prior,
                       const VISchedule& schedule) {
    prior.validate();
    if (data.size() == 0) {
        throw ValidationError("training set is empty");
    }
    if (data.features != st.size()) {
        throw std::invalid_argument("observation width does not match standardization");
    }
    const std::size_t F = data.features;
    const std::size_t N = data.size();
    const double total = static_cast<double>(N);

    double goals = 0.0;
    for (auto g : data.goal) {
        goals += g;
    }
    const double rate = std::clamp((goals + 0.5) / (total + 1.0), 1e-6, 1.0 - 1e-6);

    VariationalParams q = VariationalParams::constant(F, 0.0, std::log(schedule.init_sd));
    q.beta_mean = logit(rate);

    std::mt19937_64 rng(schedule.seed);
    std::mt19937_64 check_rng(mix_seed(schedule.seed, 1));
    const NoiseDraws check_noise = NoiseDraws::sample(q.latent_count(), 1, check_rng);

    std::vector<std::size_t> all(N);
    for (std::size_t i = 0; i < N; ++i) {
        all[i] = i;
    }
    const bool full_batch = schedule.minibatch >= N;
    std::vector<std::size_t> batch(full_batch ? N : schedule.minibatch);
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);

    auto full_elbo = [&](const VariationalParams& params, const NoiseDraws& noise) {
        const double v = prior_and_entropy(params, prior).value +
                         likelihood_term(params, data, all, noise, total, nullptr);
        if (!std::isfinite(v)) {
            throw NumericalError(std::string("ELBO diverged (non-finite in block ") +
                                 non_finite_block(params) + "); try a smaller step size");
        }
        return v;
    };

    // Adam ascent on the flattened parameters.
    constexpr double b1 = 0.9;
    constexpr double b2 = 0.999;
    constexpr double adam_eps = 1e-8;
    std::vector<double> theta = q.flatten();
    std::vector<double> m1(theta.size(), 0.0);
    std::vector<double> m2(theta.size(), 0.0);
    const std::size_t A = kFrames * F;

    PosteriorParams out;
    out.standardization = std::move(st);
    out.prior = prior;
    out.schedule = schedule;

    // Convergence is judged on the average iterate of each window, which is also what
    // gets returned; single iterates carry minibatch jitter larger than tol.
    std::vector<double> window_sum(theta.size(), 0.0);
    std::deque<std::vector<double>> recent;  // last `patience` window averages
    double best_check = 0.0;
    bool have_check = false;
    int stale = 0;
    int it = 1;
    for (; it <= schedule.max_iterations; ++it) {
        if (full_batch) {
            batch = all;
        } else {
            for (auto& b : batch) {
                b = pick(rng);
            }
        }
        const NoiseDraws noise =
            NoiseDraws::sample(q.latent_count(), std::max(1, schedule.draws), rng);
        ElboResult r;
        try {
            r = elbo_and_grad(q, prior, data, batch, noise, total);
        } catch (const NumericalError& err) {
            throw NumericalError(std::string(err.what()) + "; try a smaller step size");
        }
        const std::vector<double> g = r.grad.flatten();
        const double lr =
            schedule.step /
            std::sqrt(std::max(1.0, static_cast<double>(it) / std::max(1, schedule.decay_start)));
        const double c1 = 1.0 - std::pow(b1, it);
        const double c2 = 1.0 - std::pow(b2, it);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m1[i] = b1 * m1[i] + (1.0 - b1) * g[i];
            m2[i] = b2 * m2[i] + (1.0 - b2) * g[i] * g[i];
            theta[i] += lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + adam_eps);
        }
        // Keep log-sds in a range where exp() stays well conditioned.
        for (std::size_t i = A; i < 2 * A; ++i) {
            theta[i] = std::clamp(theta[i], -20.0, 5.0);
        }
        theta[2 * A + 1] = std::clamp(theta[2 * A + 1], -20.0, 5.0);
        theta[2 * A + 3] = std::clamp(theta[2 * A + 3], -20.0, 5.0);
        q = VariationalParams::unflatten(F, theta);

        if (schedule.window > 0) {
            for (std::size_t i = 0; i < theta.size(); ++i) {
                window_sum[i] += theta[i];
            }
        }
        if (schedule.window > 0 && it % schedule.window == 0) {
            for (auto& v : window_sum) {
                v /= schedule.window;
            }
            const VariationalParams window_mean = VariationalParams::unflatten(F, window_sum);
            recent.push_back(window_sum);
            if (static_cast<int>(recent.size()) > std::max(1, schedule.patience)) {
                recent.pop_front();
            }
            std::fill(window_sum.begin(), window_sum.end(), 0.0);
            const double v = full_elbo(window_mean, check_noise);
            out.elbo_trace.push_back(v);
            if (have_check && (v - best_check) / std::abs(best_check) < schedule.tol) {
                if (++stale >= std::max(1, schedule.patience)) {
                    out.converged = true;
                    break;
                }
            } else {
                stale = 0;
            }
            if (!have_check || v > best_check) {
                best_check = v;
            }
            have_check = true;
        }
    }
    out.iterations = std::min(it, schedule.max_iterations);
    if (recent.empty()) {
        out.q = std::move(q);
    } else {
        std::vector<double> avg(theta.size(), 0.0);
        for (const auto& w : recent) {
            for (std::size_t i = 0; i < avg.size(); ++i) {
                avg[i] += w[i] / static_cast<double>(recent.size());
            }
        }
        out.q = VariationalParams::unflatten(F, avg);
    }
    std::mt19937_64 report_rng(mix_seed(schedule.seed, 2));
    out.final_elbo = full_elbo(
        out.q, NoiseDraws::sample(out.q.latent_count(), std::max(1, schedule.report_draws),
                                  report_rng));
    return out;
}

} // namespace inplay
