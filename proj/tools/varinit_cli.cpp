// varinit: variance-preserving LSTM initialization toolkit.
//
// Exit codes, all subcommands: 0 success (condition satisfied, check passed,
// run completed), 1 domain failure (condition violated, gradient check
// failed), 2 usage or input errors. VARINIT_SEED overrides the default seed
// everywhere an explicit --seed / spec seed list is not given.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <varinit/varinit.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::uint64_t env_seed_or(std::uint64_t fallback) {
    const char* s = std::getenv("VARINIT_SEED");
    if (!s || !*s) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw varinit::parse_error("VARINIT_SEED must be an unsigned integer");
    return static_cast<std::uint64_t>(v);
}

bool env_seed_set() {
    const char* s = std::getenv("VARINIT_SEED");
    return s && *s;
}

varinit::VarianceConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw varinit::parse_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return varinit::config_from_string(ss.str());
}

// CONFIG argument: proposed-1..4 / normalized (built-ins, sized by n) or a
// JSON file path.
varinit::VarianceConfig resolve_config(const std::string& spec, std::size_t n,
                                       bool n_given) {
    if (spec == "proposed-1" || spec == "proposed-2" || spec == "proposed-3" ||
        spec == "proposed-4")
        return varinit::proposed_config(spec[9] - '0', n);
    if (spec == "normalized") return varinit::normalized_config(n);
    const varinit::VarianceConfig cfg = load_config_file(spec);
    if (n_given && cfg.n != n)
        throw varinit::parse_error("--n " + std::to_string(n) + " contradicts the file's n = " +
                                   std::to_string(cfg.n));
    return cfg;
}

void print_report(const varinit::ConditionReport& r) {
    std::printf("satisfied          %s\n", r.satisfied ? "yes" : "no");
    std::printf("range_ok           %s\n", r.range_ok ? "yes" : "no");
    std::printf("equality_residual  %s\n", fmt17(r.equality_residual).c_str());
    if (r.delta2) std::printf("delta2             %s\n", fmt17(*r.delta2).c_str());
    std::printf("%s\n", r.details.c_str());
}

int cmd_init_check(const std::string& config, std::size_t n, bool n_given, double tol,
                   const std::string& emit) {
    const varinit::VarianceConfig cfg = resolve_config(config, n, n_given);
    if (!emit.empty()) {
        std::ofstream out(emit);
        if (!out) throw varinit::parse_error("cannot write '" + emit + "'");
        out << varinit::to_json(cfg).dump(2) << "\n";
    }
    const varinit::ConditionReport rep = varinit::validate(cfg, tol);
    std::printf("config  %s  kind=%s  gate_mode=%s  n=%zu\n", config.c_str(), cfg.kind.c_str(),
                varinit::to_string(cfg.gate_mode).c_str(), cfg.n);
    print_report(rep);
    return rep.satisfied ? kExitOk : kExitDomain;
}

int cmd_var_probe(const std::string& config, std::size_t n, bool n_given, std::size_t trials,
                  std::size_t steps, std::uint64_t seed, bool nonlinear,
                  const std::string& json_path) {
    const varinit::VarianceConfig cfg = resolve_config(config, n, n_given);
    const bool linearized = !nonlinear;

    const varinit::SingleStepProbe single =
        varinit::probe_single_step(cfg, trials, seed, linearized);
    std::printf("%-22s %14s %14s\n", "single-step probe", "estimate", "std.err");
    std::printf("%-22s %14s %14s\n", "  var(h)", fmt6(single.est_var_h).c_str(),
                fmt6(single.se_var_h).c_str());
    std::printf("%-22s %14s %14s\n", "  var(c)", fmt6(single.est_var_c).c_str(),
                fmt6(single.se_var_c).c_str());
    std::printf("%-22s %14s\n", "  predicted var(c)", fmt6(single.predicted_var_c).c_str());
    std::printf("%-22s %14s\n", "  rel_err_h", fmt6(single.rel_err_h).c_str());
    std::printf("%-22s %14s\n", "  rel_err_c", fmt6(single.rel_err_c).c_str());

    ordered_json out;
    out["config"] = varinit::to_json(cfg);
    out["single_step"] = varinit::to_json(single);

    if (steps > 0) {
        const varinit::StationarityProbe st =
            varinit::probe_stationarity(cfg, trials, steps, seed, linearized);
        std::printf("%-22s %zu trials x %zu steps\n", "stationarity probe", trials, steps);
        std::printf("%-22s %14s\n", "  diverged", st.diverged ? "yes" : "no");
        if (st.diverged) std::printf("%-22s %14zu\n", "  diverged_at", st.diverged_at);
        std::printf("%-22s %14s\n", "  max_rel_err_c", fmt6(st.max_rel_err_c).c_str());
        std::printf("%-8s %16s %16s\n", "step", "var(c)", "var(h)");
        for (std::size_t k = 0; k < st.var_c_by_step.size(); ++k)
            std::printf("%-8zu %16s %16s\n", k + 1, fmt6(st.var_c_by_step[k]).c_str(),
                        fmt6(st.var_h_by_step[k]).c_str());
        out["stationarity"] = varinit::to_json(st);
    }

    if (!json_path.empty()) {
        std::ofstream jf(json_path);
        if (!jf) throw varinit::parse_error("cannot write '" + json_path + "'");
        jf << out.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_gradcheck(const std::string& kind_s, const std::string& act_s, std::size_t m,
                  std::size_t t, std::size_t seqs, std::uint64_t seed, double eps,
                  double threshold, double fault) {
    if (m == 0) throw varinit::parse_error("--m must be positive");
    if (t < 2) throw varinit::parse_error("--t must be >= 2");
    if (seqs == 0) throw varinit::parse_error("--seqs must be positive");

    const varinit::CellKind kind = kind_s == "peephole" ? varinit::CellKind::peephole
                                                        : varinit::CellKind::traditional;
    varinit::ActivationSpec act;
    if (act_s == "sigmoid-tanh")
        act = varinit::ActivationSpec::sigmoid_tanh();
    else if (act_s == "identity")
        act = varinit::ActivationSpec::identity_all();
    else if (act_s == "linearized")
        act = varinit::ActivationSpec::linearized();
    else
        throw varinit::parse_error("--act must be sigmoid-tanh, identity or linearized");

    varinit::Rng rng(seed);
    const varinit::LstmWeights w = varinit::baseline_normalized(m, m, kind, rng);
    std::vector<varinit::Sequence> inputs(seqs), targets(seqs);
    for (std::size_t s = 0; s < seqs; ++s) {
        for (std::size_t k = 0; k + 1 < t; ++k)
            inputs[s].push_back(rng.gaussian_vector(0.0, 1.0, m));
        for (std::size_t k = 0; k + 1 < t; ++k)
            targets[s].push_back(rng.gaussian_vector(0.0, 1.0, m));
    }

    const varinit::GradcheckResult res =
        varinit::gradcheck(w, inputs, targets, act, eps, fault);
    std::printf("max_rel_err  %s\n", fmt17(res.max_rel_err).c_str());
    std::printf("worst_param  %s  analytic=%s  numeric=%s\n", res.worst_param.c_str(),
                fmt17(res.analytic).c_str(), fmt17(res.numeric).c_str());
    const bool ok = res.max_rel_err < threshold;
    std::printf("gradcheck    %s (threshold %s)\n", ok ? "PASS" : "FAIL", fmt17(threshold).c_str());
    return ok ? kExitOk : kExitDomain;
}

int cmd_synth(const std::string& kind_s, std::size_t count, std::size_t t, std::size_t n,
              double noise_var, std::uint64_t seed, const std::string& out_path) {
    const varinit::SynthKind kind = varinit::synth_kind_from_string(kind_s);
    const varinit::SeriesBatch batch = varinit::synth(kind, count, t, n, noise_var, seed);

    std::ofstream out(out_path);
    if (!out) throw varinit::parse_error("cannot write '" + out_path + "'");
    if (n == 1) {
        // label-first TSV, one series per row; label 0 is a placeholder
        for (const varinit::Sequence& s : batch.sequences) {
            out << "0";
            for (const varinit::Vector& row : s) out << "\t" << fmt17(row[0]);
            out << "\n";
        }
    } else {
        out << "subject_id,t";
        for (std::size_t j = 1; j <= n; ++j) out << ",f" << j;
        out << "\n";
        for (std::size_t s = 0; s < batch.sequences.size(); ++s)
            for (std::size_t k = 0; k < batch.sequences[s].size(); ++k) {
                out << "s" << s + 1 << "," << k + 1;
                for (double v : batch.sequences[s][k]) out << "," << fmt17(v);
                out << "\n";
            }
    }
    std::printf("wrote %zu sequences (t=%zu, n=%zu) to %s\n", batch.sequences.size(), t, n,
                out_path.c_str());
    return kExitOk;
}

// --- bench -------------------------------------------------------------------

struct RunOutcome {
    double final_train_loss = std::numeric_limits<double>::infinity();
    double final_test_mse = std::numeric_limits<double>::infinity();
    bool diverged = true;
};

struct BenchSpec {
    json dataset;
    std::string cell = "peephole";
    std::string activations = "sigmoid-tanh";
    std::vector<json> initializers;
    std::vector<std::uint64_t> seeds;
    std::size_t epochs = 150;
    double learning_rate = 0.1, momentum = 0.9, weight_decay = 1e-4;
    double val_fraction = 0.15;
    std::string output_dir;
};

BenchSpec parse_bench_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw varinit::parse_error("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw varinit::parse_error(std::string("experiment spec: ") + e.what());
    }
    if (!j.is_object()) throw varinit::parse_error("experiment spec: top level must be an object");

    static const char* known[] = {"dataset",      "cell",         "activations", "initializers",
                                  "seeds",        "epochs",       "learning_rate", "momentum",
                                  "weight_decay", "val_fraction", "output_dir"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw varinit::parse_error("experiment spec: unknown field '" + it.key() + "'");
    }

    BenchSpec s;
    if (!j.contains("dataset") || !j["dataset"].is_object())
        throw varinit::parse_error("experiment spec: missing object field 'dataset'");
    s.dataset = j["dataset"];
    if (!j.contains("initializers") || !j["initializers"].is_array() || j["initializers"].empty())
        throw varinit::parse_error("experiment spec: 'initializers' must be a non-empty array");
    for (const auto& e : j["initializers"]) s.initializers.push_back(e);
    if (!j.contains("seeds") || !j["seeds"].is_array() || j["seeds"].empty())
        throw varinit::parse_error("experiment spec: 'seeds' must be a non-empty array");
    for (const auto& e : j["seeds"]) {
        if (!e.is_number_unsigned())
            throw varinit::parse_error("experiment spec: seeds must be unsigned integers");
        s.seeds.push_back(e.get<std::uint64_t>());
    }
    if (j.contains("cell")) s.cell = j["cell"].get<std::string>();
    if (s.cell != "peephole" && s.cell != "traditional")
        throw varinit::parse_error("experiment spec: cell must be 'peephole' or 'traditional'");
    if (j.contains("activations")) s.activations = j["activations"].get<std::string>();
    if (j.contains("epochs")) s.epochs = j["epochs"].get<std::size_t>();
    if (s.epochs == 0) throw varinit::parse_error("experiment spec: epochs must be positive");
    if (j.contains("learning_rate")) s.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("momentum")) s.momentum = j["momentum"].get<double>();
    if (j.contains("weight_decay")) s.weight_decay = j["weight_decay"].get<double>();
    if (j.contains("val_fraction")) s.val_fraction = j["val_fraction"].get<double>();
    if (j.contains("output_dir")) s.output_dir = j["output_dir"].get<std::string>();
    if (env_seed_set()) s.seeds = {env_seed_or(0)};
    return s;
}

std::string initializer_name(const json& e) {
    if (e.is_string()) return e.get<std::string>();
    if (e.is_object() && e.contains("config") && e["config"].is_string())
        return fs::path(e["config"].get<std::string>()).stem().string();
    throw varinit::parse_error(
        "experiment spec: initializer entries must be names or {\"config\": path}");
}

varinit::LstmWeights make_weights(const json& e, std::size_t n, varinit::CellKind kind,
                                  varinit::Rng& rng) {
    if (e.is_string()) {
        const std::string name = e.get<std::string>();
        if (name.rfind("proposed-", 0) == 0 && name.size() == 10 && name[9] >= '1' &&
            name[9] <= '4') {
            if (kind != varinit::CellKind::peephole)
                throw varinit::parse_error("initializer '" + name + "' requires the peephole cell");
            return varinit::sample_weights(varinit::proposed_config(name[9] - '0', n), rng);
        }
        if (name == "normalized") return varinit::baseline_normalized(n, n, kind, rng);
        if (name == "orthogonal") return varinit::baseline_orthogonal(n, n, kind, rng);
        throw varinit::parse_error("unknown initializer '" + name + "'");
    }
    const varinit::VarianceConfig cfg = load_config_file(e["config"].get<std::string>());
    if (cfg.n != n)
        throw varinit::parse_error("initializer config n=" + std::to_string(cfg.n) +
                                   " does not match data n=" + std::to_string(n));
    if ((cfg.kind == "peephole") != (kind == varinit::CellKind::peephole))
        throw varinit::parse_error("initializer config kind does not match the cell kind");
    return varinit::sample_weights(cfg, rng);
}

struct BenchData {
    varinit::SeriesBatch train_raw;  // pre-split, unstandardized
    varinit::SeriesBatch test_raw;
};

BenchData load_bench_data(const json& d) {
    BenchData out;
    const std::string type = d.value("type", "");
    if (type == "synth") {
        const auto kind = varinit::synth_kind_from_string(d.value("kind", ""));
        const std::size_t count = d.value("count", std::size_t{0});
        const std::size_t t = d.value("t", std::size_t{0});
        const std::size_t n = d.value("n_features", std::size_t{1});
        const double noise = d.value("noise_var", 0.0);
        const std::uint64_t seed = d.value("seed", std::uint64_t{1});
        const std::size_t test_count = d.value("test_count", std::max<std::size_t>(1, count / 5));
        out.train_raw = varinit::synth(kind, count, t, n, noise, seed);
        out.test_raw = varinit::synth(kind, test_count, t, n, noise, seed + 1);
        return out;
    }
    if (type == "ucr-file") {
        const auto delim = d.value("delimiter", std::string("tab")) == "comma"
                               ? varinit::Delimiter::comma
                               : varinit::Delimiter::tab;
        if (!d.contains("path") || !d.contains("test_path"))
            throw varinit::parse_error("ucr-file dataset needs 'path' and 'test_path'");
        out.train_raw = varinit::load_ucr(d["path"].get<std::string>(), delim);
        out.test_raw = varinit::load_ucr(d["test_path"].get<std::string>(), delim);
        return out;
    }
    if (type == "panel-file") {
        if (!d.contains("path") || !d.contains("test_path"))
            throw varinit::parse_error("panel-file dataset needs 'path' and 'test_path'");
        out.train_raw = varinit::load_panel(d["path"].get<std::string>());
        out.test_raw = varinit::load_panel(d["test_path"].get<std::string>());
        return out;
    }
    throw varinit::parse_error("dataset type must be synth, ucr-file or panel-file");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

int cmd_bench(const std::string& spec_path, std::string out_dir) {
    const BenchSpec spec = parse_bench_spec(spec_path);
    if (out_dir.empty()) out_dir = spec.output_dir;
    if (out_dir.empty())
        throw varinit::parse_error("no output directory (spec 'output_dir' or --out)");
    fs::create_directories(out_dir);

    const BenchData data = load_bench_data(spec.dataset);
    const std::size_t n = data.train_raw.n_features;
    const varinit::CellKind kind = spec.cell == "peephole" ? varinit::CellKind::peephole
                                                           : varinit::CellKind::traditional;
    varinit::ActivationSpec act;
    if (spec.activations == "sigmoid-tanh")
        act = varinit::ActivationSpec::sigmoid_tanh();
    else if (spec.activations == "identity")
        act = varinit::ActivationSpec::identity_all();
    else if (spec.activations == "linearized")
        act = varinit::ActivationSpec::linearized();
    else
        throw varinit::parse_error("activations must be sigmoid-tanh, identity or linearized");

    std::map<std::string, std::vector<RunOutcome>> outcomes;
    std::vector<std::string> order;

    for (const json& init : spec.initializers) {
        const std::string name = initializer_name(init);
        order.push_back(name);
        for (const std::uint64_t run_seed : spec.seeds) {
            auto [train_part, val_part] =
                varinit::split(data.train_raw, spec.val_fraction, varinit::derive_seed(run_seed, 2));
            const varinit::FeatureStats stats = varinit::fit_stats(train_part);
            train_part = varinit::apply_stats(train_part, stats);
            val_part = val_part.sequences.empty() ? val_part
                                                  : varinit::apply_stats(val_part, stats);
            const varinit::SeriesBatch test_part = varinit::apply_stats(data.test_raw, stats);

            varinit::Rng wrng(varinit::derive_seed(run_seed, 1));
            const varinit::LstmWeights w0 = make_weights(init, n, kind, wrng);

            varinit::TrainConfig tc;
            tc.learning_rate = spec.learning_rate;
            tc.momentum = spec.momentum;
            tc.weight_decay = spec.weight_decay;
            tc.epochs = spec.epochs;
            // the 15% validation share was already carved off by split()
            tc.batch_fraction = 1.0;
            tc.seed = varinit::derive_seed(run_seed, 3);

            const varinit::TrainResult res =
                varinit::train(w0, train_part.sequences, val_part.sequences, tc, act);

            RunOutcome oc;
            oc.diverged = res.trace.diverged;
            if (!res.trace.train_loss.empty() && !oc.diverged)
                oc.final_train_loss = res.trace.train_loss.back();
            if (!oc.diverged)
                oc.final_test_mse = varinit::evaluate_mse(res.weights, test_part.sequences, act);
            outcomes[name].push_back(oc);

            const std::string base = out_dir + "/" + name + "_seed" + std::to_string(run_seed);
            {
                std::ofstream csv(base + ".csv");
                csv << "epoch,train_loss,val_loss\n";
                for (std::size_t e = 0; e < res.trace.train_loss.size(); ++e)
                    csv << e + 1 << "," << fmt17(res.trace.train_loss[e]) << ","
                        << fmt17(res.trace.val_loss[e]) << "\n";
            }
            {
                ordered_json sj;
                sj["initializer"] = name;
                sj["seed"] = run_seed;
                sj["dataset"] = spec.dataset;
                sj["cell"] = spec.cell;
                sj["activations"] = spec.activations;
                sj["epochs"] = spec.epochs;
                sj["learning_rate"] = spec.learning_rate;
                sj["momentum"] = spec.momentum;
                sj["weight_decay"] = spec.weight_decay;
                sj["val_fraction"] = spec.val_fraction;
                sj["batch_fraction"] = tc.batch_fraction;
                sj["diverged"] = res.trace.diverged;
                sj["aborted_epoch"] = res.trace.aborted_epoch;
                sj["final_train_loss"] =
                    res.trace.train_loss.empty() ? json() : json(res.trace.train_loss.back());
                sj["final_val_loss"] =
                    res.trace.val_loss.empty() ? json() : json(res.trace.val_loss.back());
                sj["final_test_mse"] =
                    oc.diverged ? json() : json(oc.final_test_mse);
                std::ofstream jf(base + ".json");
                jf << sj.dump(2) << "\n";
            }
            std::printf("%-14s seed %-6" PRIu64 " final_train=%s test_mse=%s%s\n", name.c_str(),
                        run_seed, fmt6(oc.final_train_loss).c_str(),
                        fmt6(oc.final_test_mse).c_str(), oc.diverged ? "  DIVERGED" : "");
        }
    }

    // canonical row order, then anything custom in listed order
    std::vector<std::string> canonical = {"proposed-1", "proposed-2", "proposed-3",
                                          "proposed-4", "normalized", "orthogonal"};
    std::vector<std::string> rows;
    for (const std::string& c : canonical)
        for (const std::string& o : order)
            if (o == c && std::find(rows.begin(), rows.end(), o) == rows.end()) rows.push_back(o);
    for (const std::string& o : order)
        if (std::find(rows.begin(), rows.end(), o) == rows.end()) rows.push_back(o);

    std::ofstream sum(out_dir + "/summary.csv");
    sum << "initializer,median_final_train_loss,mean_final_train_loss,median_test_mse,"
           "mean_test_mse,seeds,diverged\n";
    std::printf("\n%-14s %18s %18s %9s\n", "initializer", "median_train", "median_test_mse",
                "diverged");
    for (const std::string& name : rows) {
        const auto& runs = outcomes[name];
        std::vector<double> train_losses, test_mses;
        std::size_t diverged = 0;
        for (const RunOutcome& oc : runs) {
            train_losses.push_back(oc.final_train_loss);
            test_mses.push_back(oc.final_test_mse);
            if (oc.diverged) ++diverged;
        }
        sum << name << "," << fmt17(median(train_losses)) << "," << fmt17(mean(train_losses))
            << "," << fmt17(median(test_mses)) << "," << fmt17(mean(test_mses)) << ","
            << runs.size() << "," << diverged << "\n";
        std::printf("%-14s %18s %18s %6zu/%zu\n", name.c_str(),
                    fmt6(median(train_losses)).c_str(), fmt6(median(test_mses)).c_str(), diverged,
                    runs.size());
    }
    std::printf("\nwrote %s/summary.csv\n", out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variance-preserving LSTM initialization toolkit"};
    app.require_subcommand(1);

    std::string config, emit, json_path, out_path, spec_path, out_dir;
    std::size_t n = 1, trials = 100000, steps = 0, m = 2, t = 5, seqs = 3, count = 100, tlen = 50,
                nf = 1;
    double tol = 1e-9, eps = 1e-5, threshold = 1e-5, noise_var = 0.0, fault = 0.0;
    std::uint64_t seed = 1;
    bool nonlinear = false;
    std::string kind = "peephole", act = "sigmoid-tanh", synth_kind = "sine";

    auto* ic = app.add_subcommand("init-check", "validate a variance config");
    ic->add_option("config", config,
                   "proposed-1..4, normalized, or a JSON config file")
        ->required();
    auto* ic_n = ic->add_option("--n", n, "width for built-in configs (must match a file's n)");
    ic->add_option("--tol", tol, "equality tolerance");
    ic->add_option("--emit", emit, "also write the resolved config JSON here");

    auto* vp = app.add_subcommand("var-probe", "Monte-Carlo variance probe");
    vp->add_option("config", config, "proposed-1..4, normalized, or a JSON config file")
        ->required();
    auto* vp_n = vp->add_option("--n", n, "width for built-in configs");
    vp->add_option("--trials", trials, "Monte-Carlo trials (>= 1000)");
    vp->add_option("--steps", steps, "also run a stationarity trajectory of this many steps");
    auto* vp_seed = vp->add_option("--seed", seed, "master seed");
    vp->add_flag("--nonlinear", nonlinear, "probe the real sigmoid/tanh cell instead");
    vp->add_option("--json", json_path, "write the reports as JSON here");

    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient check");
    gc->add_option("--kind", kind, "traditional | peephole");
    gc->add_option("--act", act, "sigmoid-tanh | identity | linearized");
    gc->add_option("--m", m, "hidden/input width");
    gc->add_option("--t", t, "sequence length");
    gc->add_option("--seqs", seqs, "number of sequences");
    auto* gc_seed = gc->add_option("--seed", seed, "master seed");
    gc->add_option("--eps", eps, "central-difference step");
    gc->add_option("--threshold", threshold, "pass threshold on max relative error");
    gc->add_option("--inject-fault", fault, "")->group("");  // test hook: corrupt the gradient

    auto* sy = app.add_subcommand("synth", "emit a synthetic dataset");
    sy->add_option("--kind", synth_kind, "sine | ar1 | memory")->required();
    sy->add_option("--count", count, "sequences")->required();
    sy->add_option("--t", tlen, "timesteps per sequence")->required();
    sy->add_option("--n", nf, "features (1 emits label-first TSV, >1 emits panel CSV)");
    sy->add_option("--noise-var", noise_var, "noise variance");
    auto* sy_seed = sy->add_option("--seed", seed, "master seed");
    sy->add_option("--out", out_path, "output file")->required();

    auto* be = app.add_subcommand("bench", "train/compare initializers per an experiment spec");
    be->add_option("spec", spec_path, "experiment spec JSON")->required();
    be->add_option("--out", out_dir, "output directory (overrides the spec)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ic->parsed()) return cmd_init_check(config, n, !ic_n->empty(), tol, emit);
        if (vp->parsed()) {
            if (vp_seed->empty()) seed = env_seed_or(seed);
            return cmd_var_probe(config, n, !vp_n->empty(), trials, steps, seed, nonlinear,
                                 json_path);
        }
        if (gc->parsed()) {
            if (gc_seed->empty()) seed = env_seed_or(seed);
            return cmd_gradcheck(kind, act, m, t, seqs, seed, eps, threshold, fault);
        }
        if (sy->parsed()) {
            if (sy_seed->empty()) seed = env_seed_or(seed);
            return cmd_synth(synth_kind, count, tlen, nf, noise_var, seed, out_path);
        }
        if (be->parsed()) return cmd_bench(spec_path, out_dir);
    } catch (const varinit::parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const varinit::config_rejected& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    } catch (const varinit::condition_violation& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
