#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "activations.hpp"
#include "errors.hpp"
#include "lstm.hpp"
#include "matrix.hpp"

namespace varinit {

using Sequence = std::vector<Vector>;  // T rows of n features

// Same layout as the weights themselves; kind tells which fields are live.
using LstmGradients = LstmWeights;

// Sum of squared errors and the number of contributing entries. Batch-level
// mean losses are formed by dividing pooled sums by pooled counts, so each
// predicted entry carries the same weight regardless of sequence length.
struct SseAccum {
    double sse = 0;
    std::size_t count = 0;
    double mean() const { return count ? sse / count : 0.0; }
};

inline double l2_loss(const Vector& pred, const Vector& target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("l2_loss: length mismatch");
    if (pred.empty()) throw std::invalid_argument("l2_loss: empty vectors");
    double s = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

namespace detail {

inline void accumulate_outer(Matrix& g, const Vector& d, const Vector& v) {
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t j = 0; j < g.cols(); ++j) g(r, j) += d[r] * v[j];
}

inline void add_transposed_matvec(Vector& out, const Matrix& u, const Vector& d) {
    for (std::size_t r = 0; r < u.rows(); ++r)
        for (std::size_t j = 0; j < u.cols(); ++j) out[j] += u(r, j) * d[r];
}

}  // namespace detail

// Backpropagation through time for one sequence. Gradients of the SUM of
// squared errors (not the mean) are accumulated into `grad`, which must be a
// zero-initialized weight-shaped container; the squared-error sum and entry
// count are accumulated into `acc`. Targets are per emitted step: for the
// next-step task feed xs = s[0..T-2] and targets = s[1..T-1].
inline void bptt_sequence(const LstmWeights& w, const Sequence& xs, const Sequence& targets,
                          const ActivationSpec& act, LstmGradients& grad, SseAccum& acc) {
    if (xs.size() != targets.size())
        throw std::invalid_argument("bptt_sequence: inputs and targets must align");
    if (xs.empty()) throw std::invalid_argument("bptt_sequence: empty sequence");
    const std::size_t m = w.m();
    const bool peep = w.kind == CellKind::peephole;

    const std::vector<StepState> states = unroll(w, xs, act);
    const Vector zero(m, 0.0);

    Vector dh_carry(m, 0.0), dc_carry(m, 0.0);
    Vector dh(m), dpo(m), dc(m), dpf(m), dpi(m), dpz(m);
    for (std::size_t t = states.size(); t-- > 0;) {
        const StepState& s = states[t];
        const Vector& h_prev = t == 0 ? zero : states[t - 1].h;
        const Vector& c_prev = t == 0 ? zero : states[t - 1].c;
        const Vector& target = targets[t];
        if (target.size() != m)
            throw std::invalid_argument("bptt_sequence: target length != m");

        for (std::size_t r = 0; r < m; ++r) {
            const double err = s.h[r] - target[r];
            acc.sse += err * err;
            dh[r] = 2.0 * err + dh_carry[r];
        }
        acc.count += m;

        for (std::size_t r = 0; r < m; ++r)
            dpo[r] = dh[r] * apply_squash(act.output, s.c[r]) * gate_derivative(act.gate, s.pre_o[r]);

        for (std::size_t r = 0; r < m; ++r) {
            dc[r] = dh[r] * s.o[r] * squash_derivative(act.output, s.c[r]) + dc_carry[r];
            if (peep) dc[r] += w.vo[r] * dpo[r];
        }

        for (std::size_t r = 0; r < m; ++r) {
            dpf[r] = dc[r] * c_prev[r] * gate_derivative(act.gate, s.pre_f[r]);
            dpi[r] = dc[r] * s.z[r] * gate_derivative(act.gate, s.pre_i[r]);
            dpz[r] = dc[r] * s.i[r] * squash_derivative(act.modulation, s.pre_z[r]);
        }

        detail::accumulate_outer(grad.wf, dpf, xs[t]);
        detail::accumulate_outer(grad.uf, dpf, h_prev);
        detail::accumulate_outer(grad.wi, dpi, xs[t]);
        detail::accumulate_outer(grad.ui, dpi, h_prev);
        detail::accumulate_outer(grad.wc, dpz, xs[t]);
        detail::accumulate_outer(grad.uc, dpz, h_prev);
        detail::accumulate_outer(grad.wo, dpo, xs[t]);
        detail::accumulate_outer(grad.uo, dpo, h_prev);
        for (std::size_t r = 0; r < m; ++r) {
            grad.bf[r] += dpf[r];
            grad.bi[r] += dpi[r];
            grad.bc[r] += dpz[r];
            grad.bo[r] += dpo[r];
        }
        if (peep)
            for (std::size_t r = 0; r < m; ++r) {
                grad.vf[r] += dpf[r] * c_prev[r];
                grad.vi[r] += dpi[r] * c_prev[r];
                grad.vo[r] += dpo[r] * s.c[r];
            }

        std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
        detail::add_transposed_matvec(dh_carry, w.uf, dpf);
        detail::add_transposed_matvec(dh_carry, w.ui, dpi);
        detail::add_transposed_matvec(dh_carry, w.uc, dpz);
        detail::add_transposed_matvec(dh_carry, w.uo, dpo);
        for (std::size_t r = 0; r < m; ++r) {
            dc_carry[r] = s.f[r] * dc[r];
            if (peep) dc_carry[r] += w.vf[r] * dpf[r] + w.vi[r] * dpi[r];
        }
    }

    if (!all_finite(grad.wf.data()) || !all_finite(grad.bf))
        throw numeric_overflow("gradient", "gradient overflowed to a non-finite value");
}

struct BatchGradient {
    double loss = 0;  // mean squared error over all predicted entries
    LstmGradients grad;
};

// Mean loss and its gradient over a batch of sequences.
inline BatchGradient batch_gradient(const LstmWeights& w, const std::vector<Sequence>& inputs,
                                    const std::vector<Sequence>& targets,
                                    const ActivationSpec& act) {
    if (inputs.size() != targets.size())
        throw std::invalid_argument("batch_gradient: batch sizes must align");
    if (inputs.empty()) throw std::invalid_argument("batch_gradient: empty batch");

    BatchGradient out;
    out.grad = LstmWeights::zeros(w.m(), w.n(), w.kind);
    SseAccum acc;
    for (std::size_t s = 0; s < inputs.size(); ++s)
        bptt_sequence(w, inputs[s], targets[s], act, out.grad, acc);

    const double scale = 1.0 / static_cast<double>(acc.count);
    for (Matrix* g : {&out.grad.wf, &out.grad.uf, &out.grad.wi, &out.grad.ui, &out.grad.wc,
                      &out.grad.uc, &out.grad.wo, &out.grad.uo})
        for (double& v : g->data()) v *= scale;
    for (Vector* g : {&out.grad.bf, &out.grad.bi, &out.grad.bc, &out.grad.bo, &out.grad.vf,
                      &out.grad.vi, &out.grad.vo})
        for (double& v : *g) v *= scale;
    out.loss = acc.mean();
    return out;
}

// Forward-only batch loss (same pooling as batch_gradient).
inline double batch_loss(const LstmWeights& w, const std::vector<Sequence>& inputs,
                         const std::vector<Sequence>& targets, const ActivationSpec& act) {
    if (inputs.size() != targets.size())
        throw std::invalid_argument("batch_loss: batch sizes must align");
    if (inputs.empty()) throw std::invalid_argument("batch_loss: empty batch");
    SseAccum acc;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        if (inputs[s].size() != targets[s].size())
            throw std::invalid_argument("batch_loss: inputs and targets must align");
        const std::vector<StepState> states = unroll(w, inputs[s], act);
        for (std::size_t t = 0; t < states.size(); ++t) {
            const Vector& target = targets[s][t];
            for (std::size_t r = 0; r < target.size(); ++r) {
                const double err = states[t].h[r] - target[r];
                acc.sse += err * err;
            }
            acc.count += target.size();
        }
    }
    return acc.mean();
}

// --- finite-difference gradient check --------------------------------------

struct GradcheckResult {
    double max_rel_err = 0;
    std::string worst_param;
    double analytic = 0, numeric = 0;  // at the worst parameter
};

namespace detail {

inline std::vector<std::pair<std::string, double*>> param_refs(LstmWeights& w) {
    std::vector<std::pair<std::string, double*>> out;
    auto add_matrix = [&](const char* name, Matrix& m) {
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                out.emplace_back(std::string(name) + "[" + std::to_string(r) + "," +
                                     std::to_string(c) + "]",
                                 &m(r, c));
    };
    auto add_vector = [&](const char* name, Vector& v) {
        for (std::size_t r = 0; r < v.size(); ++r)
            out.emplace_back(std::string(name) + "[" + std::to_string(r) + "]", &v[r]);
    };
    add_matrix("wf", w.wf);
    add_matrix("uf", w.uf);
    add_matrix("wi", w.wi);
    add_matrix("ui", w.ui);
    add_matrix("wc", w.wc);
    add_matrix("uc", w.uc);
    add_matrix("wo", w.wo);
    add_matrix("uo", w.uo);
    add_vector("bf", w.bf);
    add_vector("bi", w.bi);
    add_vector("bc", w.bc);
    add_vector("bo", w.bo);
    if (w.kind == CellKind::peephole) {
        add_vector("vf", w.vf);
        add_vector("vi", w.vi);
        add_vector("vo", w.vo);
    }
    return out;
}

}  // namespace detail

// Central-difference check of every parameter's analytic gradient against
// (L(p + eps) - L(p - eps)) / (2 eps). The reported error is relative,
// |a - n| / max(|a|, |n|), falling back to the absolute difference when both
// magnitudes sit below 1e-10 (0/0 guard). `inject_fault` is a test hook that
// corrupts the first analytic gradient entry by that amount, so the check's
// ability to catch a broken backward pass is itself checkable.
inline GradcheckResult gradcheck(const LstmWeights& weights, const std::vector<Sequence>& inputs,
                                 const std::vector<Sequence>& targets, const ActivationSpec& act,
                                 double eps = 1e-5, double inject_fault = 0.0) {
    if (!(eps > 0.0)) throw std::invalid_argument("gradcheck: eps must be positive");

    LstmWeights w = weights;
    const BatchGradient analytic = batch_gradient(w, inputs, targets, act);
    LstmGradients grad = analytic.grad;
    if (inject_fault != 0.0) grad.wf(0, 0) += inject_fault;
    auto params = detail::param_refs(w);
    auto grads = detail::param_refs(grad);

    GradcheckResult res;
    for (std::size_t k = 0; k < params.size(); ++k) {
        double& p = *params[k].second;
        const double saved = p;
        p = saved + eps;
        const double up = batch_loss(w, inputs, targets, act);
        p = saved - eps;
        const double down = batch_loss(w, inputs, targets, act);
        p = saved;

        const double numeric = (up - down) / (2.0 * eps);
        const double a = *grads[k].second;
        const double denom = std::max(std::abs(a), std::abs(numeric));
        const double err = denom < 1e-10 ? std::abs(a - numeric) : std::abs(a - numeric) / denom;
        if (err > res.max_rel_err) {
            res.max_rel_err = err;
            res.worst_param = params[k].first;
            res.analytic = a;
            res.numeric = numeric;
        }
    }
    return res;
}

}  // namespace varinit
