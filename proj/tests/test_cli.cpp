#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <varinit/data.hpp>
#include <varinit/variance_config.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

fs::path work_dir() {
    static const fs::path p = [] {
        fs::path d = fs::temp_directory_path() / ("varinit_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path capture = work_dir() / ("capture" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(VARINIT_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.output = slurp(capture);
    return r;
}

std::string write_file(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << content;
    return p.string();
}

struct EnvSeedGuard {
    EnvSeedGuard() { ::unsetenv("VARINIT_SEED"); }
    ~EnvSeedGuard() { ::unsetenv("VARINIT_SEED"); }
    void set(const char* v) { ::setenv("VARINIT_SEED", v, 1); }
};

}  // namespace

TEST_CASE("init-check: satisfied configs exit 0, violated ones exit 1") {
    EnvSeedGuard env;
    const CliResult ok = run_cli("init-check proposed-1 --n 2");
    CHECK(ok.code == 0);
    CHECK(ok.output.find("satisfied          yes") != std::string::npos);
    CHECK(ok.output.find("equality_residual  0") != std::string::npos);

    const CliResult bad = run_cli("init-check normalized --n 4");
    CHECK(bad.code == 1);
    CHECK(bad.output.find("satisfied          no") != std::string::npos);
    CHECK(bad.output.find("delta2") != std::string::npos);
}

TEST_CASE("init-check: usage errors exit 2") {
    EnvSeedGuard env;
    CHECK(run_cli("init-check").code == 2);
    CHECK(run_cli("init-check does-not-exist.json").code == 2);
    CHECK(run_cli("init-check proposed-5 --n 2").code == 2);  // resolves as a missing file
    const std::string mangled = write_file("mangled.json", "{ not json");
    CHECK(run_cli("init-check " + mangled).code == 2);
}

TEST_CASE("init-check --emit round-trips through the file form") {
    EnvSeedGuard env;
    const fs::path emitted = work_dir() / "p2.json";
    const CliResult first = run_cli("init-check proposed-2 --n 3 --emit " + emitted.string());
    REQUIRE(first.code == 0);
    const varinit::VarianceConfig cfg = varinit::config_from_string(slurp(emitted));
    CHECK(cfg.n == 3);
    CHECK(cfg.kind == "peephole");

    const CliResult second = run_cli("init-check " + emitted.string());
    CHECK(second.code == 0);
    CHECK(second.output.find("satisfied          yes") != std::string::npos);

    CHECK(run_cli("init-check " + emitted.string() + " --n 5").code == 2);  // n contradiction
    CHECK(run_cli("init-check " + emitted.string() + " --n 3").code == 0);
}

TEST_CASE("var-probe: reports both variances and honours --json") {
    EnvSeedGuard env;
    const fs::path js = work_dir() / "probe.json";
    const CliResult r =
        run_cli("var-probe proposed-1 --n 1 --trials 2000 --seed 7 --json " + js.string());
    REQUIRE(r.code == 0);
    CHECK(r.output.find("var(h)") != std::string::npos);
    CHECK(r.output.find("var(c)") != std::string::npos);
    CHECK(r.output.find("predicted var(c)") != std::string::npos);

    const nlohmann::json parsed = nlohmann::json::parse(slurp(js));
    CHECK(parsed["single_step"]["trials"] == 2000);
    CHECK(parsed["single_step"]["predicted_var_c"].get<double>() == 2.0);
    CHECK(parsed["config"]["n"] == 1);

    const fs::path js2 = work_dir() / "probe2.json";
    const CliResult again =
        run_cli("var-probe proposed-1 --n 1 --trials 2000 --seed 7 --json " + js2.string());
    REQUIRE(again.code == 0);
    CHECK(slurp(js) == slurp(js2));  // byte-identical on identical arguments
}

TEST_CASE("var-probe: stationarity block appears with --steps") {
    EnvSeedGuard env;
    const CliResult r = run_cli("var-probe proposed-2 --n 2 --trials 1000 --steps 3 --seed 5");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("stationarity probe") != std::string::npos);
    CHECK(r.output.find("step") != std::string::npos);
}

TEST_CASE("var-probe: too few trials is a usage error") {
    EnvSeedGuard env;
    const CliResult r = run_cli("var-probe proposed-1 --n 1 --trials 500");
    CHECK(r.code == 2);
    CHECK(r.output.find("1000") != std::string::npos);
}

TEST_CASE("gradcheck: passes clean, fails under an injected fault") {
    EnvSeedGuard env;
    const CliResult ok = run_cli("gradcheck --kind peephole --m 2 --t 4 --seqs 2 --seed 3");
    CHECK(ok.code == 0);
    CHECK(ok.output.find("PASS") != std::string::npos);

    const CliResult trad =
        run_cli("gradcheck --kind traditional --act linearized --m 2 --t 4 --seqs 2");
    CHECK(trad.code == 0);

    const CliResult broken =
        run_cli("gradcheck --kind peephole --m 2 --t 4 --seqs 2 --seed 3 --inject-fault 1e-3");
    CHECK(broken.code == 1);
    CHECK(broken.output.find("FAIL") != std::string::npos);

    CHECK(run_cli("gradcheck --t 1").code == 2);
    CHECK(run_cli("gradcheck --act mystery").code == 2);
    CHECK(run_cli("gradcheck --eps 0").code == 2);
}

TEST_CASE("synth: univariate TSV reloads to the exact generated values") {
    EnvSeedGuard env;
    const fs::path out = work_dir() / "mem.tsv";
    const CliResult r =
        run_cli("synth --kind memory --count 3 --t 4 --n 1 --noise-var 0.25 --seed 9 --out " +
                out.string());
    REQUIRE(r.code == 0);
    const varinit::SeriesBatch loaded = varinit::load_ucr(out.string(), varinit::Delimiter::tab);
    const varinit::SeriesBatch direct = varinit::synth(varinit::SynthKind::memory, 3, 4, 1, 0.25, 9);
    REQUIRE(loaded.sequences.size() == 3);
    for (std::size_t s = 0; s < 3; ++s)
        CHECK(loaded.sequences[s] == direct.sequences[s]);  // %.17g round-trips doubles
}

TEST_CASE("synth: multivariate panel CSV reloads exactly") {
    EnvSeedGuard env;
    const fs::path out = work_dir() / "panel.csv";
    const CliResult r = run_cli("synth --kind ar1 --count 2 --t 5 --n 3 --noise-var 0.1 --seed 4 --out " +
                                out.string());
    REQUIRE(r.code == 0);
    const varinit::SeriesBatch loaded = varinit::load_panel(out.string());
    const varinit::SeriesBatch direct = varinit::synth(varinit::SynthKind::ar1, 2, 5, 3, 0.1, 4);
    REQUIRE(loaded.n_features == 3);
    REQUIRE(loaded.sequences.size() == 2);
    for (std::size_t s = 0; s < 2; ++s) CHECK(loaded.sequences[s] == direct.sequences[s]);
}

TEST_CASE("synth: bad kinds and shapes exit 2") {
    EnvSeedGuard env;
    const std::string out = (work_dir() / "junk.tsv").string();
    CHECK(run_cli("synth --kind triangle --count 2 --t 4 --out " + out).code == 2);
    CHECK(run_cli("synth --kind sine --count 0 --t 4 --out " + out).code == 2);
    CHECK(run_cli("synth --kind sine --count 2 --t 1 --out " + out).code == 2);
}

TEST_CASE("VARINIT_SEED stands in for a missing --seed") {
    EnvSeedGuard env;
    const fs::path a = work_dir() / "seed_a.json";
    const fs::path b = work_dir() / "seed_b.json";
    const fs::path c = work_dir() / "seed_c.json";

    env.set("123");
    REQUIRE(run_cli("var-probe proposed-1 --n 1 --trials 1000 --json " + a.string()).code == 0);
    ::unsetenv("VARINIT_SEED");
    REQUIRE(run_cli("var-probe proposed-1 --n 1 --trials 1000 --seed 123 --json " + b.string())
                .code == 0);
    CHECK(slurp(a) == slurp(b));

    // an explicit --seed wins over the environment
    env.set("999");
    REQUIRE(run_cli("var-probe proposed-1 --n 1 --trials 1000 --seed 123 --json " + c.string())
                .code == 0);
    CHECK(slurp(b) == slurp(c));

    env.set("not-a-number");
    CHECK(run_cli("var-probe proposed-1 --n 1 --trials 1000").code == 2);
}

TEST_CASE("bench: micro run writes per-run artifacts and a deterministic summary") {
    EnvSeedGuard env;
    const fs::path out1 = work_dir() / "bench1";
    const fs::path out2 = work_dir() / "bench2";
    const std::string spec = write_file("bench_spec.json", R"({
      "dataset": {"type": "synth", "kind": "memory", "count": 12, "t": 5,
                  "n_features": 1, "noise_var": 0.1, "seed": 2, "test_count": 4},
      "cell": "peephole",
      "initializers": ["normalized", "proposed-1"],
      "seeds": [1, 2],
      "epochs": 3
    })");

    const CliResult r1 = run_cli("bench " + spec + " --out " + out1.string());
    REQUIRE(r1.code == 0);
    for (const char* f : {"proposed-1_seed1.csv", "proposed-1_seed2.csv", "normalized_seed1.csv",
                          "normalized_seed2.csv", "proposed-1_seed1.json", "summary.csv"})
        CHECK(fs::exists(out1 / f));

    const std::string summary = slurp(out1 / "summary.csv");
    CHECK(summary.find("initializer,median_final_train_loss") != std::string::npos);
    // canonical ordering puts proposed-1 before normalized regardless of spec order
    CHECK(summary.find("proposed-1") < summary.find("normalized"));

    const std::string curve = slurp(out1 / "proposed-1_seed1.csv");
    CHECK(curve.find("epoch,train_loss,val_loss") == 0);
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 4);  // header + 3 epochs

    const CliResult r2 = run_cli("bench " + spec + " --out " + out2.string());
    REQUIRE(r2.code == 0);
    CHECK(slurp(out1 / "summary.csv") == slurp(out2 / "summary.csv"));
    CHECK(slurp(out1 / "proposed-1_seed2.csv") == slurp(out2 / "proposed-1_seed2.csv"));
}

TEST_CASE("bench: spec validation exits 2") {
    EnvSeedGuard env;
    const std::string no_out = (work_dir() / "nope").string();
    const std::string bad1 = write_file("bad_field.json", R"({
      "dataset": {"type": "synth", "kind": "memory", "count": 6, "t": 4},
      "initializers": ["normalized"], "seeds": [1], "epochs": 1, "typo_field": 3
    })");
    CHECK(run_cli("bench " + bad1 + " --out " + no_out).code == 2);

    const std::string bad2 = write_file("bad_seeds.json", R"({
      "dataset": {"type": "synth", "kind": "memory", "count": 6, "t": 4},
      "initializers": ["normalized"], "seeds": [-3], "epochs": 1
    })");
    CHECK(run_cli("bench " + bad2 + " --out " + no_out).code == 2);

    const std::string bad3 = write_file("bad_cell.json", R"({
      "dataset": {"type": "synth", "kind": "memory", "count": 6, "t": 4},
      "cell": "traditional",
      "initializers": ["proposed-1"], "seeds": [1], "epochs": 1
    })");
    CHECK(run_cli("bench " + bad3 + " --out " + no_out).code == 2);

    CHECK(run_cli("bench " + bad1).code == 2);  // no output dir anywhere
}

TEST_CASE("top-level usage errors exit 2, help exits 0") {
    EnvSeedGuard env;
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("init-check --help").code == 0);
}
