#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bptt.hpp"
#include "lstm.hpp"
#include "rng.hpp"

namespace varinit {

struct TrainConfig {
    double learning_rate = 0.1;
    double momentum = 0.9;
    double weight_decay = 1e-4;  // L2, not applied to biases
    std::size_t epochs = 100;
    double batch_fraction = 0.85;  // share of the training sequences in the fixed batch
    std::uint64_t seed = 0;        // draws the batch membership
    double divergence_threshold = 1e6;
    bool train_biases = true;
    bool require_standardized = true;
};

struct TrainTrace {
    std::vector<double> train_loss;  // loss at the weights entering each epoch
    std::vector<double> val_loss;    // NaN entries when no validation data given
    bool diverged = false;
    std::size_t aborted_epoch = 0;  // 1-based epoch whose loss tripped the abort; 0 = none
};

struct TrainResult {
    LstmWeights weights;
    TrainTrace trace;
};

namespace detail {

// next-step pairs: inputs s[0..T-2], targets s[1..T-1]
inline void next_step_pairs(const std::vector<Sequence>& seqs, std::vector<Sequence>& inputs,
                            std::vector<Sequence>& targets) {
    inputs.clear();
    targets.clear();
    for (const Sequence& s : seqs) {
        if (s.size() < 2)
            throw std::invalid_argument("train: sequence too short for a next-step pair");
        inputs.emplace_back(s.begin(), s.end() - 1);
        targets.emplace_back(s.begin() + 1, s.end());
    }
}

inline void check_standardized(const std::vector<Sequence>& seqs, std::size_t n) {
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    std::size_t count = 0;
    for (const Sequence& s : seqs)
        for (const Vector& row : s) {
            for (std::size_t j = 0; j < n; ++j) {
                sum[j] += row[j];
                sumsq[j] += row[j] * row[j];
            }
            ++count;
        }
    for (std::size_t j = 0; j < n; ++j) {
        const double mean = sum[j] / count;
        const double var = sumsq[j] / count - mean * mean;
        if (std::abs(mean) > 0.1 || std::abs(var - 1.0) > 0.1)
            throw std::invalid_argument(
                "train: data does not look standardized (per-feature mean within 0.1 of 0 and "
                "variance within 0.1 of 1 required; set require_standardized = false to bypass)");
    }
}

inline std::vector<std::size_t> fixed_batch_indices(std::size_t total, double fraction,
                                                    std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("train: batch_fraction must be in (0, 1]");
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = total; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.next_u64() % i]);
    std::size_t k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
    k = std::clamp<std::size_t>(k, 1, total);
    idx.resize(k);
    return idx;
}

}  // namespace detail

// Gradient descent with classical momentum on the full fixed batch:
//   v <- momentum v - lr (grad + decay w),  w <- w + v
// Batch membership is drawn once from cfg.seed and never reshuffled, so a
// (weights, data, config) triple reproduces the run bit for bit. Aborts,
// keeping the partial trace, when the batch loss exceeds the divergence
// threshold or stops being finite.
inline TrainResult train(LstmWeights w, const std::vector<Sequence>& train_seqs,
                         const std::vector<Sequence>& val_seqs, const TrainConfig& cfg,
                         const ActivationSpec& act) {
    if (train_seqs.empty()) throw std::invalid_argument("train: no training sequences");
    if (cfg.require_standardized) detail::check_standardized(train_seqs, w.n());

    const std::vector<std::size_t> member =
        detail::fixed_batch_indices(train_seqs.size(), cfg.batch_fraction, cfg.seed);
    std::vector<Sequence> batch;
    batch.reserve(member.size());
    for (std::size_t i : member) batch.push_back(train_seqs[i]);

    std::vector<Sequence> inputs, targets, val_inputs, val_targets;
    detail::next_step_pairs(batch, inputs, targets);
    if (!val_seqs.empty()) detail::next_step_pairs(val_seqs, val_inputs, val_targets);

    LstmGradients velocity = LstmWeights::zeros(w.m(), w.n(), w.kind);
    TrainResult out;
    out.trace.train_loss.reserve(cfg.epochs);
    out.trace.val_loss.reserve(cfg.epochs);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        BatchGradient bg;
        bool overflowed = false;
        try {
            bg = batch_gradient(w, inputs, targets, act);
        } catch (const numeric_overflow&) {
            overflowed = true;
        }
        const double loss = overflowed ? std::numeric_limits<double>::quiet_NaN() : bg.loss;
        out.trace.train_loss.push_back(loss);
        double vloss = std::numeric_limits<double>::quiet_NaN();
        if (!val_inputs.empty() && !overflowed)
            vloss = batch_loss(w, val_inputs, val_targets, act);
        out.trace.val_loss.push_back(vloss);

        if (overflowed || !std::isfinite(loss) || loss > cfg.divergence_threshold) {
            out.trace.diverged = true;
            out.trace.aborted_epoch = epoch;
            break;
        }

        auto wp = detail::param_refs(w);
        auto gp = detail::param_refs(bg.grad);
        auto vp = detail::param_refs(velocity);
        for (std::size_t k = 0; k < wp.size(); ++k) {
            const bool bias = wp[k].first[0] == 'b';
            if (bias && !cfg.train_biases) continue;
            const double decay = bias ? 0.0 : cfg.weight_decay;
            double& param = *wp[k].second;
            double& vel = *vp[k].second;
            vel = cfg.momentum * vel - cfg.learning_rate * (*gp[k].second + decay * param);
            param += vel;
        }
    }

    out.weights = std::move(w);
    return out;
}

// Mean squared next-step error of the weights on held-out sequences.
inline double evaluate_mse(const LstmWeights& w, const std::vector<Sequence>& seqs,
                           const ActivationSpec& act) {
    if (seqs.empty()) throw std::invalid_argument("evaluate_mse: no sequences");
    std::vector<Sequence> inputs, targets;
    detail::next_step_pairs(seqs, inputs, targets);
    return batch_loss(w, inputs, targets, act);
}

}  // namespace varinit
