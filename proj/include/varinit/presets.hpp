#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "variance_config.hpp"

namespace varinit {

// The four built-in proposed peephole initializations (sigmoid-linearized
// mode), parameterized by input width n. Every variance scales as 1/n inside
// an n-multiplied term, which keeps the condition equality n-invariant.
//
//            vf,vi,vo   wf      uf      wi    ui    wo    uo    wc,uc
//   1        1          1/n     1/n     2/n   2/n   3/n   3/n   1/(4n)
//   2        1/2        1/n     1/n     2/n   2/n   1/n   1/n   1/(2n)
//   3        1          3/(4n)  1/(4n)  3/n   1/n   4/n   2/n   1/(4n)
//   4        1          1/(4n)  3/(4n)  1/n   3/n   2/n   4/n   1/(4n)
inline VarianceConfig proposed_config(int index, std::size_t n) {
    if (index < 1 || index > 4)
        throw std::invalid_argument("proposed_config: index must be 1..4");
    if (n < 1) throw std::invalid_argument("proposed_config: n must be >= 1");
    const double nd = static_cast<double>(n);

    VarianceConfig c;
    c.kind = "peephole";
    c.gate_mode = GateMode::sigmoid_linearized;
    c.n = n;
    c.var_vf = c.var_vi = c.var_vo = index == 2 ? 0.5 : 1.0;
    switch (index) {
        case 1:
            c.var_wf = c.var_uf = 1.0 / nd;
            c.var_wi = c.var_ui = 2.0 / nd;
            c.var_wo = c.var_uo = 3.0 / nd;
            c.var_wc = c.var_uc = 0.25 / nd;
            break;
        case 2:
            c.var_wf = c.var_uf = 1.0 / nd;
            c.var_wi = c.var_ui = 2.0 / nd;
            c.var_wo = c.var_uo = 1.0 / nd;
            c.var_wc = c.var_uc = 0.5 / nd;
            break;
        case 3:
            c.var_wf = 0.75 / nd;
            c.var_uf = 0.25 / nd;
            c.var_wi = 3.0 / nd;
            c.var_ui = 1.0 / nd;
            c.var_wo = 4.0 / nd;
            c.var_uo = 2.0 / nd;
            c.var_wc = c.var_uc = 0.25 / nd;
            break;
        case 4:
            c.var_wf = 0.25 / nd;
            c.var_uf = 0.75 / nd;
            c.var_wi = 1.0 / nd;
            c.var_ui = 3.0 / nd;
            c.var_wo = 2.0 / nd;
            c.var_uo = 4.0 / nd;
            c.var_wc = c.var_uc = 0.25 / nd;
            break;
    }
    return c;
}

// Variance profile of the normalized baseline: every weight, peepholes
// included, drawn with variance 1/n. Does not satisfy the peephole condition;
// exists so the baseline can be probed and benchmarked on equal footing.
inline VarianceConfig normalized_config(std::size_t n, bool peephole = true) {
    if (n < 1) throw std::invalid_argument("normalized_config: n must be >= 1");
    const double v = 1.0 / static_cast<double>(n);
    VarianceConfig c;
    c.kind = peephole ? "peephole" : "traditional";
    c.gate_mode = GateMode::sigmoid_linearized;
    c.n = n;
    c.var_wf = c.var_uf = c.var_wi = c.var_ui = v;
    c.var_wc = c.var_uc = c.var_wo = c.var_uo = v;
    if (peephole) c.var_vf = c.var_vi = c.var_vo = v;
    return c;
}

}  // namespace varinit
