#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "activations.hpp"
#include "errors.hpp"
#include "matrix.hpp"

namespace varinit {

// Cell equations, per step t (elementwise products throughout):
//
//   f = sigma_g(Wf x + Uf h' + vf.c' + bf)        forget gate
//   i = sigma_g(Wi x + Ui h' + vi.c' + bi)        input gate
//   z = sigma_c(Wc x + Uc h' + bc)                cell input
//   c = f.c' + i.z                                cell state
//   o = sigma_g(Wo x + Uo h' + vo.c  + bo)        output gate (reads NEW c)
//   h = o.sigma_h(c)
//
// where h', c' are the previous hidden and cell state. The vf/vi/vo peephole
// terms exist only for the peephole cell; the traditional cell drops them.

enum class CellKind { traditional, peephole };

struct LstmWeights {
    CellKind kind = CellKind::traditional;

    Matrix wf, wi, wc, wo;  // input weights, M x N
    Matrix uf, ui, uc, uo;  // recurrent weights, M x M
    Vector bf, bi, bc, bo;  // biases, length M

    // diagonal peephole weights, length M; empty for the traditional cell
    Vector vf, vi, vo;

    std::size_t m() const noexcept { return uf.rows(); }
    std::size_t n() const noexcept { return wf.cols(); }

    static LstmWeights zeros(std::size_t m, std::size_t n, CellKind kind) {
        LstmWeights w;
        w.kind = kind;
        w.wf = w.wi = w.wc = w.wo = Matrix(m, n);
        w.uf = w.ui = w.uc = w.uo = Matrix(m, m);
        w.bf = w.bi = w.bc = w.bo = Vector(m, 0.0);
        if (kind == CellKind::peephole) w.vf = w.vi = w.vo = Vector(m, 0.0);
        return w;
    }
};

struct StepState {
    Vector pre_f, pre_i, pre_z, pre_o;  // gate pre-activations
    Vector f, i, z, o;                  // gate values
    Vector c, h;
};

namespace detail {

inline void check_shapes(const LstmWeights& w, const Vector& x, const Vector& h_prev,
                         const Vector& c_prev, bool peephole) {
    const std::size_t m = w.m(), n = w.n();
    auto bad = [](const char* what) { throw std::invalid_argument(std::string("lstm step: ") + what); };
    if (m == 0 || n == 0) bad("empty weights");
    if (w.wf.rows() != m || w.wi.rows() != m || w.wc.rows() != m || w.wo.rows() != m ||
        w.wi.cols() != n || w.wc.cols() != n || w.wo.cols() != n)
        bad("input weight shapes disagree");
    if (w.uf.cols() != m || w.ui.rows() != m || w.ui.cols() != m || w.uc.rows() != m ||
        w.uc.cols() != m || w.uo.rows() != m || w.uo.cols() != m)
        bad("recurrent weight shapes disagree");
    if (w.bf.size() != m || w.bi.size() != m || w.bc.size() != m || w.bo.size() != m)
        bad("bias lengths disagree");
    if (peephole && (w.vf.size() != m || w.vi.size() != m || w.vo.size() != m))
        bad("peephole cell requires vf, vi, vo of length m");
    if (x.size() != n) bad("input length != n");
    if (h_prev.size() != m || c_prev.size() != m) bad("state length != m");
    if (!all_finite(x) || !all_finite(h_prev) || !all_finite(c_prev))
        bad("non-finite input or state");
}

inline void preactivate(const Matrix& wx, const Matrix& uh, const Vector& b, const Vector& x,
                        const Vector& h_prev, Vector& out) {
    const std::size_t m = wx.rows(), n = wx.cols();
    out.assign(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        double s = b[r];
        for (std::size_t j = 0; j < n; ++j) s += wx(r, j) * x[j];
        for (std::size_t j = 0; j < m; ++j) s += uh(r, j) * h_prev[j];
        out[r] = s;
    }
}

inline void check_finite(const Vector& v, const char* where) {
    if (!all_finite(v)) throw numeric_overflow(where, std::string(where) + " overflowed to a non-finite value");
}

// Shared kernel for both cell kinds. The peephole contributions are skipped
// entirely when the coefficient is zero, which makes a peephole cell with
// vf = vi = vo = 0 reproduce the traditional cell bit for bit.
inline StepState step_impl(const LstmWeights& w, const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, const ActivationSpec& act, bool peephole) {
    check_shapes(w, x, h_prev, c_prev, peephole);
    const std::size_t m = w.m();

    StepState s;
    preactivate(w.wf, w.uf, w.bf, x, h_prev, s.pre_f);
    preactivate(w.wi, w.ui, w.bi, x, h_prev, s.pre_i);
    preactivate(w.wc, w.uc, w.bc, x, h_prev, s.pre_z);
    preactivate(w.wo, w.uo, w.bo, x, h_prev, s.pre_o);
    if (peephole)
        for (std::size_t r = 0; r < m; ++r) {
            if (w.vf[r] != 0.0) s.pre_f[r] += w.vf[r] * c_prev[r];
            if (w.vi[r] != 0.0) s.pre_i[r] += w.vi[r] * c_prev[r];
        }
    check_finite(s.pre_f, "forget gate");
    check_finite(s.pre_i, "input gate");
    check_finite(s.pre_z, "cell input");

    s.f.resize(m);
    s.i.resize(m);
    s.z.resize(m);
    s.c.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        s.f[r] = apply_gate(act.gate, s.pre_f[r]);
        s.i[r] = apply_gate(act.gate, s.pre_i[r]);
        s.z[r] = apply_squash(act.modulation, s.pre_z[r]);
        s.c[r] = s.f[r] * c_prev[r] + s.i[r] * s.z[r];
    }
    check_finite(s.c, "cell state");

    if (peephole)
        for (std::size_t r = 0; r < m; ++r)
            if (w.vo[r] != 0.0) s.pre_o[r] += w.vo[r] * s.c[r];
    check_finite(s.pre_o, "output gate");

    s.o.resize(m);
    s.h.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        s.o[r] = apply_gate(act.gate, s.pre_o[r]);
        s.h[r] = s.o[r] * apply_squash(act.output, s.c[r]);
    }
    check_finite(s.h, "hidden state");
    return s;
}

}  // namespace detail

inline StepState step_traditional(const LstmWeights& w, const Vector& x, const Vector& h_prev,
                                  const Vector& c_prev, const ActivationSpec& act) {
    return detail::step_impl(w, x, h_prev, c_prev, act, false);
}

inline StepState step_peephole(const LstmWeights& w, const Vector& x, const Vector& h_prev,
                               const Vector& c_prev, const ActivationSpec& act) {
    if (w.kind != CellKind::peephole)
        throw std::invalid_argument("step_peephole: weights carry no peephole vectors");
    return detail::step_impl(w, x, h_prev, c_prev, act, true);
}

inline StepState step(const LstmWeights& w, const Vector& x, const Vector& h_prev,
                      const Vector& c_prev, const ActivationSpec& act) {
    return w.kind == CellKind::peephole ? step_peephole(w, x, h_prev, c_prev, act)
                                        : step_traditional(w, x, h_prev, c_prev, act);
}

// Runs the cell over a sequence; xs[t] is the input at step t. Initial state
// defaults to zeros when h0/c0 are empty.
inline std::vector<StepState> unroll(const LstmWeights& w, const std::vector<Vector>& xs,
                                     const ActivationSpec& act, Vector h0 = {}, Vector c0 = {}) {
    const std::size_t m = w.m();
    if (h0.empty()) h0.assign(m, 0.0);
    if (c0.empty()) c0.assign(m, 0.0);
    std::vector<StepState> states;
    states.reserve(xs.size());
    const Vector* h = &h0;
    const Vector* c = &c0;
    for (const Vector& x : xs) {
        states.push_back(step(w, x, *h, *c, act));
        h = &states.back().h;
        c = &states.back().c;
    }
    return states;
}

}  // namespace varinit
