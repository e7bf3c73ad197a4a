#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "conditions.hpp"
#include "errors.hpp"
#include "lstm.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "variance_config.hpp"

namespace varinit {

// Monte-Carlo measurement of what the closed-form analysis predicts. The
// probe measures and reports; it never enforces the variance conditions, so
// deliberately violating profiles (the baselines) can be measured too.
//
// Single-step protocol, per trial: draw a fresh weight set from the config,
// x ~ N(0,1)^n, set h' = x, draw c' ~ N(0, predicted cell variance) (unit
// variance when no prediction exists), run one cell step, pool every
// component of h and c across trials.
//
// Stationarity protocol, per trial: draw weights once, start from the
// single-step initial state, then iterate the cell update over fresh inputs
// carrying h and c, pooling Var(c) and Var(h) per step across trials.

struct MomentAccumulator {
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    std::size_t n = 0;

    void add(double x) {
        const double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        ++n;
    }

    // population variance
    double variance() const {
        if (n == 0) return std::numeric_limits<double>::quiet_NaN();
        const double mu = s1 / n;
        return s2 / n - mu * mu;
    }

    // standard error of the variance estimate, sqrt((m4 - m2^2) / n)
    double variance_se() const {
        if (n == 0) return std::numeric_limits<double>::quiet_NaN();
        const double nd = static_cast<double>(n);
        const double mu = s1 / nd;
        const double m2 = s2 / nd - mu * mu;
        const double m4 =
            s4 / nd - 4.0 * mu * s3 / nd + 6.0 * mu * mu * s2 / nd - 3.0 * mu * mu * mu * mu;
        const double v = m4 - m2 * m2;
        return std::sqrt(v > 0.0 ? v / nd : 0.0);
    }
};

struct SingleStepProbe {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool linearized = true;
    double predicted_var_c = 0;  // NaN when the closed form has no fixed point
    double est_var_h = 0, se_var_h = 0;
    double est_var_c = 0, se_var_c = 0;
    double rel_err_h = 0;  // |est_var_h - 1|, deviation from the unit target
    double rel_err_c = 0;  // |est_var_c - predicted| / predicted; NaN without a prediction
};

struct StationarityProbe {
    std::size_t trials = 0, steps = 0;
    std::uint64_t seed = 0;
    bool linearized = true;
    double predicted_var_c = 0;
    std::vector<double> var_c_by_step;  // pooled empirical Var(c) after step t
    std::vector<double> var_h_by_step;
    bool diverged = false;    // overflow or Var(c) beyond the runaway threshold
    std::size_t diverged_at = 0;  // 1-based step index; 0 when not diverged
    double max_rel_err_c = 0;     // worst per-step deviation from the prediction
};

namespace detail {

inline ActivationSpec probe_activations(const VarianceConfig& c, bool linearized) {
    if (!linearized) return ActivationSpec::sigmoid_tanh();
    return c.gate_mode == GateMode::identity ? ActivationSpec::identity_all()
                                             : ActivationSpec::linearized();
}

inline double prediction_or_nan(const VarianceConfig& c) {
    try {
        return predicted_cell_variance(c);
    } catch (const condition_violation&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

inline void check_probe_args(const VarianceConfig& c, std::size_t trials) {
    check_structural(c);
    if (trials < 1000)
        throw std::invalid_argument("probe: trials must be >= 1000 for a usable estimate");
}

}  // namespace detail

inline SingleStepProbe probe_single_step(const VarianceConfig& cfg, std::size_t trials,
                                         std::uint64_t seed, bool linearized = true) {
    detail::check_probe_args(cfg, trials);
    const std::size_t m = cfg.n;
    const ActivationSpec act = detail::probe_activations(cfg, linearized);
    const double predicted = detail::prediction_or_nan(cfg);
    const double c0_var = std::isnan(predicted) ? 1.0 : predicted;

    MomentAccumulator acc_h, acc_c;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const LstmWeights w = detail::sample_unchecked(cfg, m, rng, WeightDist::gaussian);
        const Vector x = rng.gaussian_vector(0.0, 1.0, m);
        const Vector c_prev = rng.gaussian_vector(0.0, c0_var, m);
        const StepState s = step(w, x, x, c_prev, act);
        for (double v : s.h) acc_h.add(v);
        for (double v : s.c) acc_c.add(v);
    }

    SingleStepProbe r;
    r.trials = trials;
    r.seed = seed;
    r.linearized = linearized;
    r.predicted_var_c = predicted;
    r.est_var_h = acc_h.variance();
    r.se_var_h = acc_h.variance_se();
    r.est_var_c = acc_c.variance();
    r.se_var_c = acc_c.variance_se();
    r.rel_err_h = std::abs(r.est_var_h - 1.0);
    r.rel_err_c = std::isnan(predicted) ? std::numeric_limits<double>::quiet_NaN()
                                        : std::abs(r.est_var_c - predicted) / predicted;
    return r;
}

inline StationarityProbe probe_stationarity(const VarianceConfig& cfg, std::size_t trials,
                                            std::size_t steps, std::uint64_t seed,
                                            bool linearized = true) {
    detail::check_probe_args(cfg, trials);
    if (steps < 2) throw std::invalid_argument("probe_stationarity: steps must be >= 2");
    const std::size_t m = cfg.n;
    const ActivationSpec act = detail::probe_activations(cfg, linearized);
    const double predicted = detail::prediction_or_nan(cfg);
    const double c0_var = std::isnan(predicted) ? 1.0 : predicted;
    constexpr double runaway = 1e9;

    std::vector<MomentAccumulator> acc_c(steps), acc_h(steps);
    std::size_t overflow_at = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const LstmWeights w = detail::sample_unchecked(cfg, m, rng, WeightDist::gaussian);
        Vector h = rng.gaussian_vector(0.0, 1.0, m);
        Vector c = rng.gaussian_vector(0.0, c0_var, m);
        for (std::size_t k = 0; k < steps; ++k) {
            const Vector x = rng.gaussian_vector(0.0, 1.0, m);
            StepState s;
            try {
                s = step(w, x, h, c, act);
            } catch (const numeric_overflow&) {
                if (overflow_at == 0 || k + 1 < overflow_at) overflow_at = k + 1;
                break;
            }
            for (double v : s.c) acc_c[k].add(v);
            for (double v : s.h) acc_h[k].add(v);
            h = s.h;
            c = s.c;
        }
    }

    StationarityProbe r;
    r.trials = trials;
    r.steps = steps;
    r.seed = seed;
    r.linearized = linearized;
    r.predicted_var_c = predicted;
    r.diverged_at = overflow_at;
    for (std::size_t k = 0; k < steps; ++k) {
        const double vc = acc_c[k].variance();
        const double vh = acc_h[k].variance();
        if (acc_c[k].n == 0) break;
        r.var_c_by_step.push_back(vc);
        r.var_h_by_step.push_back(vh);
        if (!std::isfinite(vc) || vc > runaway) {
            if (r.diverged_at == 0 || k + 1 < r.diverged_at) r.diverged_at = k + 1;
            break;
        }
    }
    r.diverged = r.diverged_at != 0;
    if (!std::isnan(predicted)) {
        for (double vc : r.var_c_by_step) {
            const double rel = std::abs(vc - predicted) / predicted;
            if (std::isfinite(rel) && rel > r.max_rel_err_c) r.max_rel_err_c = rel;
        }
    } else {
        r.max_rel_err_c = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

inline nlohmann::ordered_json to_json(const SingleStepProbe& p) {
    nlohmann::ordered_json j;
    j["trials"] = p.trials;
    j["seed"] = p.seed;
    j["linearized"] = p.linearized;
    j["predicted_var_c"] = p.predicted_var_c;
    j["est_var_h"] = p.est_var_h;
    j["se_var_h"] = p.se_var_h;
    j["est_var_c"] = p.est_var_c;
    j["se_var_c"] = p.se_var_c;
    j["rel_err_h"] = p.rel_err_h;
    j["rel_err_c"] = p.rel_err_c;
    return j;
}

inline nlohmann::ordered_json to_json(const StationarityProbe& p) {
    nlohmann::ordered_json j;
    j["trials"] = p.trials;
    j["steps"] = p.steps;
    j["seed"] = p.seed;
    j["linearized"] = p.linearized;
    j["predicted_var_c"] = p.predicted_var_c;
    j["var_c_by_step"] = p.var_c_by_step;
    j["var_h_by_step"] = p.var_h_by_step;
    j["diverged"] = p.diverged;
    j["diverged_at"] = p.diverged_at;
    j["max_rel_err_c"] = p.max_rel_err_c;
    return j;
}

}  // namespace varinit
