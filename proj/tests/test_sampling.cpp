#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <varinit/presets.hpp>
#include <varinit/sampling.hpp>

using namespace varinit;

namespace {

double entry_variance(const std::vector<double>& v) {
    double mu = 0;
    for (double x : v) mu += x;
    mu /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("sample_weights honors the declared variances") {
    // pool the wf entry over many redraws; se of the variance estimate at
    // 2e4 samples is var * sqrt(2/n) ~ 1%, so 5% is a wide gate
    const VarianceConfig cfg = proposed_config(1, 1);
    std::vector<double> wf_draws, vo_draws, wc_draws;
    for (int k = 0; k < 20000; ++k) {
        Rng rng(derive_seed(42, k));
        const LstmWeights w = sample_weights(cfg, rng);
        wf_draws.push_back(w.wf(0, 0));
        vo_draws.push_back(w.vo[0]);
        wc_draws.push_back(w.wc(0, 0));
    }
    CHECK(entry_variance(wf_draws) == Catch::Approx(1.0).epsilon(0.05));
    CHECK(entry_variance(vo_draws) == Catch::Approx(1.0).epsilon(0.05));
    CHECK(entry_variance(wc_draws) == Catch::Approx(0.25).epsilon(0.05));
}

TEST_CASE("sampled weights have the right shape and zero biases") {
    const VarianceConfig cfg = proposed_config(3, 5);
    Rng rng(7);
    const LstmWeights w = sample_weights(cfg, rng);
    CHECK(w.kind == CellKind::peephole);
    CHECK(w.m() == 5);
    CHECK(w.n() == 5);
    CHECK(w.vf.size() == 5);
    for (double b : w.bf) CHECK(b == 0.0);
    for (double b : w.bo) CHECK(b == 0.0);
}

TEST_CASE("sampling is deterministic per seed") {
    const VarianceConfig cfg = proposed_config(2, 3);
    Rng a(99), b(99), c(100);
    const LstmWeights wa = sample_weights(cfg, a);
    const LstmWeights wb = sample_weights(cfg, b);
    const LstmWeights wc_ = sample_weights(cfg, c);
    CHECK(wa.wf.data() == wb.wf.data());
    CHECK(wa.vo == wb.vo);
    CHECK(wa.wf.data() != wc_.wf.data());
}

TEST_CASE("uniform draws match the gaussian variances on bounded support") {
    const VarianceConfig cfg = proposed_config(1, 1);
    std::vector<double> wi_draws;
    double worst = 0;
    for (int k = 0; k < 20000; ++k) {
        Rng rng(derive_seed(43, k));
        const LstmWeights w = sample_weights(cfg, rng, WeightDist::uniform);
        wi_draws.push_back(w.wi(0, 0));
        worst = std::max(worst, std::abs(w.wi(0, 0)));
    }
    CHECK(entry_variance(wi_draws) == Catch::Approx(2.0).epsilon(0.05));
    CHECK(worst <= std::sqrt(3.0 * 2.0) + 1e-12);
}

TEST_CASE("rejection symmetry: a config the validator rejects cannot be sampled") {
    Rng rng(1);
    try {
        sample_weights(normalized_config(3), rng);
        FAIL("expected config_rejected");
    } catch (const config_rejected& e) {
        CHECK_FALSE(e.report().satisfied);
        CHECK(e.report().equality_residual > 0.1);
    }

    // a violating traditional config carries its report too
    VarianceConfig t;
    t.kind = "traditional";
    t.gate_mode = GateMode::identity;
    t.n = 1;
    t.var_wf = t.var_uf = 0.25;
    t.var_wi = t.var_ui = t.var_wc = t.var_uc = t.var_wo = t.var_uo = 0.5;
    CHECK_THROWS_AS(sample_weights(t, rng), config_rejected);
}

TEST_CASE("baseline_normalized: flat 1/n variances, both kinds") {
    std::vector<double> uf_draws, vo_draws;
    for (int k = 0; k < 20000; ++k) {
        Rng rng(derive_seed(44, k));
        const LstmWeights w = baseline_normalized(4, 4, CellKind::peephole, rng);
        uf_draws.push_back(w.uf(1, 2));
        vo_draws.push_back(w.vo[3]);
    }
    CHECK(entry_variance(uf_draws) == Catch::Approx(0.25).epsilon(0.05));
    CHECK(entry_variance(vo_draws) == Catch::Approx(0.25).epsilon(0.05));

    Rng rng(5);
    const LstmWeights t = baseline_normalized(3, 3, CellKind::traditional, rng);
    CHECK(t.kind == CellKind::traditional);
    CHECK(t.vf.empty());
    CHECK_THROWS_AS(baseline_normalized(3, 4, CellKind::peephole, rng), std::invalid_argument);
}

TEST_CASE("baseline_orthogonal: recurrent matrices are orthogonal") {
    Rng rng(6);
    const LstmWeights w = baseline_orthogonal(5, 5, CellKind::peephole, rng);
    for (const Matrix* u : {&w.uf, &w.ui, &w.uc, &w.uo}) {
        const Matrix g = matmul(transpose(*u), *u);
        for (std::size_t r = 0; r < 5; ++r)
            for (std::size_t c = 0; c < 5; ++c)
                CHECK(g(r, c) == Catch::Approx(r == c ? 1.0 : 0.0).margin(1e-10));
    }
    // m = 1: the recurrent weight is a sign
    Rng rng2(7);
    const LstmWeights w1 = baseline_orthogonal(1, 1, CellKind::peephole, rng2);
    CHECK((w1.uf(0, 0) == 1.0 || w1.uf(0, 0) == -1.0));
}
