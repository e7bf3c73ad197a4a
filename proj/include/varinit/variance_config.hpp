#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <json.hpp>

#include "errors.hpp"

namespace varinit {

// Which closed-form regime a gate variance condition is stated in.
enum class GateMode { identity, sigmoid_linearized };

inline std::string to_string(GateMode m) {
    return m == GateMode::identity ? "identity" : "sigmoid-linearized";
}

// Per-gate weight variances for one initialization scheme. Variances are for
// individual weight entries; the conditions below only ever consume the sums
// var_w* + var_u* and the peephole variances.
struct VarianceConfig {
    std::string kind = "traditional";  // "traditional" | "peephole"
    GateMode gate_mode = GateMode::identity;
    std::size_t n = 1;  // input (and hidden) width the variances are tuned for

    double var_wf = 0, var_uf = 0;
    double var_wi = 0, var_ui = 0;
    double var_wc = 0, var_uc = 0;
    double var_wo = 0, var_uo = 0;

    // peephole variances; meaningful only when kind == "peephole"
    double var_vf = 0, var_vi = 0, var_vo = 0;

    bool peephole() const noexcept { return kind == "peephole"; }

    double sum_f() const noexcept { return var_wf + var_uf; }
    double sum_i() const noexcept { return var_wi + var_ui; }
    double sum_c() const noexcept { return var_wc + var_uc; }
    double sum_o() const noexcept { return var_wo + var_uo; }
};

namespace detail {

inline double get_number(const nlohmann::json& j, const std::string& key) {
    const auto it = j.find(key);
    if (it == j.end()) throw parse_error("variance config: missing field '" + key + "'");
    if (!it->is_number()) throw parse_error("variance config: field '" + key + "' must be a number");
    const double v = it->get<double>();
    if (!(v >= 0.0) || !std::isfinite(v))
        throw parse_error("variance config: field '" + key + "' must be finite and >= 0");
    return v;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const VarianceConfig& c) {
    nlohmann::ordered_json j;
    j["kind"] = c.kind;
    j["gate_mode"] = to_string(c.gate_mode);
    j["n"] = c.n;
    j["var_wf"] = c.var_wf;
    j["var_uf"] = c.var_uf;
    j["var_wi"] = c.var_wi;
    j["var_ui"] = c.var_ui;
    j["var_wc"] = c.var_wc;
    j["var_uc"] = c.var_uc;
    j["var_wo"] = c.var_wo;
    j["var_uo"] = c.var_uo;
    if (c.peephole()) {
        j["var_vf"] = c.var_vf;
        j["var_vi"] = c.var_vi;
        j["var_vo"] = c.var_vo;
    }
    return j;
}

// Strict parser: every field required for the declared kind, unknown keys are
// errors (a typo like "var_vo " or "var_ov" must not silently zero a term).
inline VarianceConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw parse_error("variance config: top level must be a JSON object");

    VarianceConfig c;
    const auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string())
        throw parse_error("variance config: missing string field 'kind'");
    c.kind = kind->get<std::string>();
    if (c.kind != "traditional" && c.kind != "peephole")
        throw parse_error("variance config: kind must be 'traditional' or 'peephole'");

    const auto mode = j.find("gate_mode");
    if (mode == j.end() || !mode->is_string())
        throw parse_error("variance config: missing string field 'gate_mode'");
    const std::string ms = mode->get<std::string>();
    if (ms == "identity")
        c.gate_mode = GateMode::identity;
    else if (ms == "sigmoid-linearized")
        c.gate_mode = GateMode::sigmoid_linearized;
    else
        throw parse_error("variance config: gate_mode must be 'identity' or 'sigmoid-linearized'");

    const auto n = j.find("n");
    if (n == j.end() || !n->is_number_integer() || n->get<long long>() < 1)
        throw parse_error("variance config: 'n' must be a positive integer");
    c.n = n->get<std::size_t>();

    c.var_wf = detail::get_number(j, "var_wf");
    c.var_uf = detail::get_number(j, "var_uf");
    c.var_wi = detail::get_number(j, "var_wi");
    c.var_ui = detail::get_number(j, "var_ui");
    c.var_wc = detail::get_number(j, "var_wc");
    c.var_uc = detail::get_number(j, "var_uc");
    c.var_wo = detail::get_number(j, "var_wo");
    c.var_uo = detail::get_number(j, "var_uo");
    if (c.peephole()) {
        c.var_vf = detail::get_number(j, "var_vf");
        c.var_vi = detail::get_number(j, "var_vi");
        c.var_vo = detail::get_number(j, "var_vo");
    }

    static const char* known[] = {"kind",   "gate_mode", "n",      "var_wf", "var_uf",
                                  "var_wi", "var_ui",    "var_wc", "var_uc", "var_wo",
                                  "var_uo", "var_vf",    "var_vi", "var_vo"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw parse_error("variance config: unknown field '" + it.key() + "'");
        if (!c.peephole() && (it.key() == "var_vf" || it.key() == "var_vi" || it.key() == "var_vo"))
            throw parse_error("variance config: peephole field '" + it.key() +
                              "' not allowed for kind 'traditional'");
    }
    return c;
}

inline VarianceConfig config_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("variance config: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace varinit
