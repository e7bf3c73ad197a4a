#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "variance_config.hpp"

namespace varinit {

// Outcome of checking one variance-preservation condition.
struct ConditionReport {
    bool satisfied = false;          // range_ok && equality within tolerance
    bool range_ok = false;           // the open-interval constraint on the forget route
    double equality_residual = 0.0;  // |lhs - rhs| of the condition's equality
    std::optional<double> delta2;    // peephole only: discriminant of the gate-route
                                     // quadratic, reported as a diagnostic
    std::string details;
};

// a2 g^2 + a1 g + a0 = 0 in the stationary cell variance g
struct QuadCoeffs {
    double a2 = 0, a1 = 0, a0 = 0;
    double discriminant() const noexcept { return a1 * a1 - 4.0 * a2 * a0; }
};

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

inline void check_structural(const VarianceConfig& c) {
    require(c.n >= 1, "variance config: n must be >= 1");
    for (double v : {c.var_wf, c.var_uf, c.var_wi, c.var_ui, c.var_wc, c.var_uc, c.var_wo,
                     c.var_uo, c.var_vf, c.var_vi, c.var_vo})
        require(std::isfinite(v) && v >= 0.0, "variance config: variances must be finite and >= 0");
}

inline std::string describe(double lhs, double rhs, double lo, double mid, double hi, bool range_ok) {
    std::ostringstream os;
    os << "equality lhs=" << lhs << " rhs=" << rhs << " residual=" << std::abs(lhs - rhs)
       << "; range " << lo << " < " << mid << " < " << hi << (range_ok ? " holds" : " violated");
    return os.str();
}

}  // namespace detail

// Quadratic satisfied by the stationary cell variance when derived through the
// output gate. Identity gates give  var_vo g^2 + N So g - 1 = 0; linearized
// sigmoid gates give the same with constant term -16.
inline QuadCoeffs output_route_quad(const VarianceConfig& c) {
    detail::check_structural(c);
    detail::require(c.peephole(), "output_route_quad: peephole config required");
    const double nd = static_cast<double>(c.n);
    return {c.var_vo, nd * c.sum_o(), c.gate_mode == GateMode::identity ? -1.0 : -16.0};
}

// Quadratic satisfied by the stationary cell variance when derived through the
// forget/input gates.
inline QuadCoeffs gate_route_quad(const VarianceConfig& c) {
    detail::check_structural(c);
    detail::require(c.peephole(), "gate_route_quad: peephole config required");
    const double nd = static_cast<double>(c.n);
    if (c.gate_mode == GateMode::identity)
        return {c.var_vf, nd * c.var_vi * c.sum_c() + nd * c.sum_f() - 1.0,
                nd * nd * c.sum_i() * c.sum_c()};
    return {c.var_vf, nd * c.var_vi * c.sum_c() + nd * c.sum_f() - 12.0,
            nd * c.sum_c() * (nd * c.sum_i() + 4.0)};
}

// Positive root of the output-route quadratic: the cell variance the scheme
// aims to sustain. Defined whenever var_vo > 0 (the constant term is negative,
// so exactly one root is positive).
inline double cell_variance_output_route(const VarianceConfig& c) {
    const QuadCoeffs q = output_route_quad(c);
    detail::require(q.a2 > 0.0, "cell_variance_output_route: var_vo must be positive");
    return (-q.a1 + std::sqrt(q.discriminant())) / (2.0 * q.a2);
}

// Double root -a1 / (2 a2) of the gate-route quadratic, the value the
// condition equalities are engineered around. Requires a1 < 0 (otherwise no
// positive stationary variance exists on this route) and var_vf > 0.
inline double cell_variance_gate_route(const VarianceConfig& c) {
    const QuadCoeffs q = gate_route_quad(c);
    if (q.a2 == 0.0)
        throw std::domain_error("cell_variance_gate_route: var_vf = 0 leaves the route undefined");
    if (!(q.a1 < 0.0))
        throw condition_violation(
            "cell_variance_gate_route: forget/input route admits no positive stationary variance "
            "(linear coefficient is non-negative)");
    return -q.a1 / (2.0 * q.a2);
}

// --- validators -------------------------------------------------------------
// Each checks its condition's open-interval range and equality and never
// throws on a merely violated condition; structural misuse (wrong kind or
// gate mode, negative variance) throws instead.

inline ConditionReport validate_traditional_identity(const VarianceConfig& c, double tol = 1e-9) {
    detail::check_structural(c);
    detail::require(!c.peephole() && c.gate_mode == GateMode::identity,
                    "validate_traditional_identity: config is not traditional/identity");
    detail::require(tol >= 0.0, "tolerance must be >= 0");
    const double nd = static_cast<double>(c.n);
    const double lhs = nd * nd * nd * c.sum_i() * c.sum_c() * c.sum_o();
    const double rhs = 1.0 - nd * c.sum_f();
    ConditionReport r;
    r.range_ok = c.sum_f() > 0.0 && c.sum_f() < 1.0 / nd;
    r.equality_residual = std::abs(lhs - rhs);
    r.satisfied = r.range_ok && r.equality_residual <= tol;
    r.details = detail::describe(lhs, rhs, 0.0, c.sum_f(), 1.0 / nd, r.range_ok);
    return r;
}

inline ConditionReport validate_traditional_sigmoid(const VarianceConfig& c, double tol = 1e-9) {
    detail::check_structural(c);
    detail::require(!c.peephole() && c.gate_mode == GateMode::sigmoid_linearized,
                    "validate_traditional_sigmoid: config is not traditional/sigmoid-linearized");
    detail::require(tol >= 0.0, "tolerance must be >= 0");
    const double nd = static_cast<double>(c.n);
    const double lhs = (12.0 - nd * c.sum_f()) / (nd * c.sum_i() + 4.0);
    const double rhs = nd * nd * c.sum_o() * c.sum_c() / 16.0;
    ConditionReport r;
    r.range_ok = c.sum_f() > 0.0 && c.sum_f() < 12.0 / nd;
    r.equality_residual = std::abs(lhs - rhs);
    r.satisfied = r.range_ok && r.equality_residual <= tol;
    r.details = detail::describe(lhs, rhs, 0.0, c.sum_f(), 12.0 / nd, r.range_ok);
    return r;
}

namespace detail {

// Shared peephole equality: (vo/vf) sqrt(inner) = sqrt(N^2 So^2 + k vo) - N So,
// with (inner, k) = (4 N^2 vf Si Sc, 4) for identity gates and
// (4 N vf Sc (N Si + 4), 64) for linearized sigmoid gates.
inline ConditionReport validate_peephole(const VarianceConfig& c, double tol, bool identity) {
    check_structural(c);
    require(c.peephole(), "validate_peephole: peephole config required");
    require(tol >= 0.0, "tolerance must be >= 0");
    if (c.var_vf == 0.0)
        throw std::domain_error("peephole condition: var_vf = 0 divides the gate route by zero");
    const double nd = static_cast<double>(c.n);
    const double inner = identity ? 4.0 * nd * nd * c.var_vf * c.sum_i() * c.sum_c()
                                  : 4.0 * nd * c.var_vf * c.sum_c() * (nd * c.sum_i() + 4.0);
    const double k = identity ? 4.0 : 64.0;
    const double bound = identity ? 1.0 : 12.0;
    const double nso = nd * c.sum_o();
    const double lhs = (c.var_vo / c.var_vf) * std::sqrt(inner);
    const double rhs = std::sqrt(nso * nso + k * c.var_vo) - nso;
    const double mid = c.var_vi * c.sum_c() + c.sum_f();
    ConditionReport r;
    r.range_ok = mid > 0.0 && mid < bound / nd;
    r.equality_residual = std::abs(lhs - rhs);
    r.satisfied = r.range_ok && r.equality_residual <= tol;
    r.delta2 = gate_route_quad(c).discriminant();
    r.details = describe(lhs, rhs, 0.0, mid, bound / nd, r.range_ok);
    return r;
}

}  // namespace detail

inline ConditionReport validate_peephole_identity(const VarianceConfig& c, double tol = 1e-9) {
    detail::require(c.gate_mode == GateMode::identity,
                    "validate_peephole_identity: config is not identity mode");
    return detail::validate_peephole(c, tol, true);
}

inline ConditionReport validate_peephole_sigmoid(const VarianceConfig& c, double tol = 1e-9) {
    detail::require(c.gate_mode == GateMode::sigmoid_linearized,
                    "validate_peephole_sigmoid: config is not sigmoid-linearized mode");
    return detail::validate_peephole(c, tol, false);
}

// Routes to the validator matching the config's kind and gate mode.
inline ConditionReport validate(const VarianceConfig& c, double tol = 1e-9) {
    if (c.peephole())
        return c.gate_mode == GateMode::identity ? validate_peephole_identity(c, tol)
                                                 : validate_peephole_sigmoid(c, tol);
    return c.gate_mode == GateMode::identity ? validate_traditional_identity(c, tol)
                                             : validate_traditional_sigmoid(c, tol);
}

// Stationary cell variance the closed-form analysis predicts for the config.
// Traditional cells take the fixed point of the cell-state variance recursion;
// peephole cells take the output-route root. Throws condition_violation when
// no finite positive fixed point exists (the divergent regime).
inline double predicted_cell_variance(const VarianceConfig& c) {
    detail::check_structural(c);
    const double nd = static_cast<double>(c.n);
    if (c.peephole()) return cell_variance_output_route(c);
    if (c.gate_mode == GateMode::identity) {
        const double denom = 1.0 - nd * c.sum_f();
        if (!(denom > 0.0))
            throw condition_violation("predicted_cell_variance: N (var_wf + var_uf) >= 1, "
                                      "cell variance has no finite fixed point");
        return nd * nd * c.sum_i() * c.sum_c() / denom;
    }
    const double denom = 0.75 - nd * c.sum_f() / 16.0;
    if (!(denom > 0.0))
        throw condition_violation("predicted_cell_variance: N (var_wf + var_uf) >= 12, "
                                  "cell variance has no finite fixed point");
    return (nd * c.sum_i() / 16.0 + 0.25) * nd * c.sum_c() / denom;
}

// Solves the peephole equality for var_vo given the other variances, so a
// condition-satisfying config can be constructed instead of searched for.
// Throws condition_violation when the solved value is not positive.
inline double solve_var_vo(const VarianceConfig& c) {
    detail::check_structural(c);
    detail::require(c.peephole(), "solve_var_vo: peephole config required");
    if (c.var_vf == 0.0)
        throw std::domain_error("solve_var_vo: var_vf = 0 divides the gate route by zero");
    const bool identity = c.gate_mode == GateMode::identity;
    const double nd = static_cast<double>(c.n);
    const double inner = identity ? 4.0 * nd * nd * c.var_vf * c.sum_i() * c.sum_c()
                                  : 4.0 * nd * c.var_vf * c.sum_c() * (nd * c.sum_i() + 4.0);
    const double k = identity ? 4.0 : 64.0;
    const double a = std::sqrt(inner);
    detail::require(a > 0.0, "solve_var_vo: gate-route variances must be positive");
    const double b = nd * c.sum_o();
    // (vo/vf) a = sqrt(b^2 + k vo) - b  =>  vo = (k - 2 a b / vf) vf^2 / a^2
    const double vo = (k - 2.0 * a * b / c.var_vf) * c.var_vf * c.var_vf / (inner);
    if (!(vo > 0.0))
        throw condition_violation("solve_var_vo: no positive var_vo satisfies the equality");
    return vo;
}

}  // namespace varinit
