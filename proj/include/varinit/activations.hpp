#pragma once

#include <cmath>
#include <stdexcept>

namespace varinit {

// Gate nonlinearity sigma_g. `linearized` is the first-order expansion of the
// logistic around 0, sigma(x) ~ 1/2 + x/4, used by the closed-form variance
// analysis; `identity` corresponds to dropping the gate nonlinearity entirely.
enum class GateActivation { logistic, linearized, identity };

// Cell-input nonlinearity sigma_c and output nonlinearity sigma_h.
enum class SquashActivation { tanh, identity };

struct ActivationSpec {
    GateActivation gate = GateActivation::logistic;
    SquashActivation modulation = SquashActivation::tanh;
    SquashActivation output = SquashActivation::identity;

    // logistic gates, tanh modulation, identity output
    static ActivationSpec sigmoid_tanh() { return {}; }
    // everything linear: the regime of the variance analysis
    static ActivationSpec identity_all() {
        return {GateActivation::identity, SquashActivation::identity, SquashActivation::identity};
    }
    // linearized gates, linear modulation and output
    static ActivationSpec linearized() {
        return {GateActivation::linearized, SquashActivation::identity, SquashActivation::identity};
    }
};

inline double apply_gate(GateActivation a, double x) {
    switch (a) {
        case GateActivation::logistic: return 1.0 / (1.0 + std::exp(-x));
        case GateActivation::linearized: return 0.5 + 0.25 * x;
        case GateActivation::identity: return x;
    }
    throw std::invalid_argument("apply_gate: unknown activation");
}

inline double gate_derivative(GateActivation a, double x) {
    switch (a) {
        case GateActivation::logistic: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case GateActivation::linearized: return 0.25;
        case GateActivation::identity: return 1.0;
    }
    throw std::invalid_argument("gate_derivative: unknown activation");
}

inline double apply_squash(SquashActivation a, double x) {
    return a == SquashActivation::tanh ? std::tanh(x) : x;
}

inline double squash_derivative(SquashActivation a, double x) {
    if (a == SquashActivation::identity) return 1.0;
    const double t = std::tanh(x);
    return 1.0 - t * t;
}

}  // namespace varinit
