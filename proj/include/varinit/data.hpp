#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bptt.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace varinit {

struct FeatureStats {
    Vector mean, stddev;  // per feature; population convention (divisor n)
};

struct SeriesBatch {
    std::vector<Sequence> sequences;
    std::size_t n_features = 0;
    std::optional<FeatureStats> stats;  // set once standardization has been applied
};

enum class Delimiter { comma, tab };

namespace detail {

inline std::vector<std::string> split_cells(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.push_back("");
    return cells;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool missing_token(const std::string& t) {
    return t.empty() || t == "NA" || t == "NaN" || t == "nan" || t == "?";
}

inline double parse_value(const std::string& raw, std::size_t line_no) {
    const std::string t = trim(raw);
    if (missing_token(t))
        throw parse_error("missing values are not supported (empty or NA cell)", line_no);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw parse_error("cell '" + t + "' is not numeric", line_no);
    }
    if (used != t.size()) throw parse_error("cell '" + t + "' is not numeric", line_no);
    if (!std::isfinite(v)) throw parse_error("cell '" + t + "' is not finite", line_no);
    return v;
}

}  // namespace detail

// Label-first delimited series file: each row is `label v1 ... vT`, one series
// per row. Labels must parse as numbers and are discarded (this library does
// next-step regression). Every row must have the same T >= 2. Univariate:
// the result has n_features = 1.
inline SeriesBatch load_ucr(const std::string& path, Delimiter delim = Delimiter::tab) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    const char d = delim == Delimiter::comma ? ',' : '\t';

    SeriesBatch batch;
    batch.n_features = 1;
    std::string line;
    std::size_t line_no = 0, expected_t = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_cells(line, d);
        if (cells.size() < 2)
            throw parse_error("row has a label but no values", line_no);
        detail::parse_value(cells[0], line_no);  // label: numeric, discarded
        const std::size_t t = cells.size() - 1;
        if (t < 2) throw parse_error("series too short for a next-step pair (T < 2)", line_no);
        if (expected_t == 0)
            expected_t = t;
        else if (t != expected_t)
            throw parse_error("ragged row: expected " + std::to_string(expected_t) + " values, got " +
                                  std::to_string(t),
                              line_no);
        Sequence s;
        s.reserve(t);
        for (std::size_t k = 1; k < cells.size(); ++k)
            s.push_back(Vector{detail::parse_value(cells[k], line_no)});
        batch.sequences.push_back(std::move(s));
    }
    if (batch.sequences.empty()) throw parse_error("'" + path + "' contains no series");
    return batch;
}

// Long-format panel CSV: header `subject_id,t,<feature columns...>`, rows
// grouped by subject with t running 1, 2, ... consecutively. Subjects with a
// single row cannot form a next-step pair; they are dropped and noted in
// `diagnostics` (when given) rather than failing the whole file.
inline SeriesBatch load_panel(const std::string& path,
                              std::vector<std::string>* diagnostics = nullptr) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw parse_error("'" + path + "' is empty");
    auto header = detail::split_cells(line, ',');
    for (auto& h : header) h = detail::trim(h);
    if (header.size() < 3 || header[0] != "subject_id" || header[1] != "t")
        throw parse_error("header must be 'subject_id,t,<features...>'", 1);
    const std::size_t n = header.size() - 2;

    SeriesBatch batch;
    batch.n_features = n;
    std::vector<std::string> seen;
    std::string current;
    Sequence current_seq;
    long long expected_t = 1;

    auto flush = [&](std::size_t line_no) {
        if (current.empty()) return;
        if (current_seq.size() < 2) {
            if (diagnostics)
                diagnostics->push_back("subject '" + current + "' has fewer than 2 rows; dropped");
        } else {
            batch.sequences.push_back(std::move(current_seq));
        }
        current_seq.clear();
        (void)line_no;
    };

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_cells(line, ',');
        if (cells.size() != header.size())
            throw parse_error("expected " + std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()),
                              line_no);
        const std::string subject = detail::trim(cells[0]);
        if (subject.empty()) throw parse_error("empty subject_id", line_no);

        if (subject != current) {
            flush(line_no);
            if (std::find(seen.begin(), seen.end(), subject) != seen.end())
                throw parse_error("subject '" + subject + "' reappears; rows must be contiguous",
                                  line_no);
            seen.push_back(subject);
            current = subject;
            expected_t = 1;
        }
        const double traw = detail::parse_value(cells[1], line_no);
        if (traw != static_cast<double>(expected_t))
            throw parse_error("subject '" + subject + "': t must run 1, 2, ... ; expected " +
                                  std::to_string(expected_t),
                              line_no);
        ++expected_t;

        Vector row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = detail::parse_value(cells[2 + j], line_no);
        current_seq.push_back(std::move(row));
    }
    flush(line_no + 1);
    if (batch.sequences.empty()) throw parse_error("'" + path + "' contains no usable subjects");
    return batch;
}

// --- synthetic tasks --------------------------------------------------------

enum class SynthKind { sine, ar1, memory };

inline SynthKind synth_kind_from_string(const std::string& s) {
    if (s == "sine") return SynthKind::sine;
    if (s == "ar1") return SynthKind::ar1;
    if (s == "memory") return SynthKind::memory;
    throw std::invalid_argument("synth kind must be sine, ar1 or memory");
}

// Deterministic synthetic batches; sequence s draws from derive_seed(seed, s)
// so the content of sequence s does not depend on count.
//
//   sine:   x_t = sin(2 pi f (t-1) + phi) + noise, f ~ U[0.02, 0.08]
//           cycles/step and phi ~ U[0, 2 pi) per (sequence, feature); the
//           band keeps step-to-step correlation >= cos(0.16 pi) so next-step
//           prediction is attainable for small networks
//   ar1:    x_{t+1} = rho x_t + e, rho ~ U[0.5, 0.95] per (sequence,
//           feature), e ~ N(0, noise_var), stationary start
//   memory: x_t = a + noise with a ~ N(0, 1) per (sequence, feature): a pure
//           copy task, perfectly predictable at noise_var = 0
inline SeriesBatch synth(SynthKind kind, std::size_t count, std::size_t t, std::size_t n_features,
                         double noise_var, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("synth: count must be positive");
    if (t < 2) throw std::invalid_argument("synth: t must be >= 2");
    if (n_features == 0) throw std::invalid_argument("synth: n_features must be positive");
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
        throw std::invalid_argument("synth: noise_var must be finite and >= 0");

    constexpr double two_pi = 6.283185307179586476925286766559;
    SeriesBatch batch;
    batch.n_features = n_features;
    batch.sequences.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Rng rng(derive_seed(seed, s));
        Sequence seq(t, Vector(n_features, 0.0));
        for (std::size_t j = 0; j < n_features; ++j) {
            switch (kind) {
                case SynthKind::sine: {
                    const double f = rng.uniform(0.02, 0.08);
                    const double phi = rng.uniform(0.0, two_pi);
                    for (std::size_t k = 0; k < t; ++k)
                        seq[k][j] = std::sin(two_pi * f * static_cast<double>(k) + phi) +
                                    rng.gaussian(0.0, noise_var);
                    break;
                }
                case SynthKind::ar1: {
                    const double rho = rng.uniform(0.5, 0.95);
                    double x = rng.gaussian(0.0, noise_var / (1.0 - rho * rho));
                    seq[0][j] = x;
                    for (std::size_t k = 1; k < t; ++k) {
                        x = rho * x + rng.gaussian(0.0, noise_var);
                        seq[k][j] = x;
                    }
                    break;
                }
                case SynthKind::memory: {
                    const double a = rng.gaussian(0.0, 1.0);
                    for (std::size_t k = 0; k < t; ++k)
                        seq[k][j] = a + rng.gaussian(0.0, noise_var);
                    break;
                }
            }
        }
        batch.sequences.push_back(std::move(seq));
    }
    return batch;
}

// --- standardization and splitting ------------------------------------------

// Per-feature stats pooled over every timestep of every sequence, population
// variance convention (divisor n, not n-1).
inline FeatureStats fit_stats(const SeriesBatch& batch) {
    if (batch.sequences.empty()) throw std::invalid_argument("fit_stats: empty batch");
    const std::size_t n = batch.n_features;
    Vector sum(n, 0.0), sumsq(n, 0.0);
    std::size_t count = 0;
    for (const Sequence& s : batch.sequences)
        for (const Vector& row : s) {
            for (std::size_t j = 0; j < n; ++j) {
                sum[j] += row[j];
                sumsq[j] += row[j] * row[j];
            }
            ++count;
        }
    FeatureStats st;
    st.mean.resize(n);
    st.stddev.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        st.mean[j] = sum[j] / count;
        const double var = sumsq[j] / count - st.mean[j] * st.mean[j];
        if (!(var > 1e-12))
            throw std::invalid_argument("standardize: feature " + std::to_string(j) +
                                        " is (near-)constant");
        st.stddev[j] = std::sqrt(var);
    }
    return st;
}

// Transforms with the given stats (used for validation/test data, which must
// be scaled by the statistics fitted on the training part only).
inline SeriesBatch apply_stats(SeriesBatch batch, const FeatureStats& st) {
    if (st.mean.size() != batch.n_features || st.stddev.size() != batch.n_features)
        throw std::invalid_argument("apply_stats: stats width mismatch");
    for (Sequence& s : batch.sequences)
        for (Vector& row : s)
            for (std::size_t j = 0; j < batch.n_features; ++j)
                row[j] = (row[j] - st.mean[j]) / st.stddev[j];
    batch.stats = st;
    return batch;
}

// Fits on the batch itself and transforms it.
inline SeriesBatch standardize(const SeriesBatch& batch) {
    return apply_stats(batch, fit_stats(batch));
}

// Shuffles sequence indices by seed and carves off the first round(frac n) as
// the validation part; the remainder is the training part. Every sequence
// lands in exactly one side.
inline std::pair<SeriesBatch, SeriesBatch> split(const SeriesBatch& batch, double val_fraction,
                                                 std::uint64_t seed) {
    if (!(val_fraction >= 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("split: val_fraction must be in [0, 1)");
    const std::size_t total = batch.sequences.size();
    if (total == 0) throw std::invalid_argument("split: empty batch");

    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = total; i > 1; --i) std::swap(idx[i - 1], idx[rng.next_u64() % i]);

    const std::size_t val_count =
        static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(total)));
    if (val_count >= total) throw std::invalid_argument("split: training part would be empty");

    SeriesBatch train, val;
    train.n_features = val.n_features = batch.n_features;
    train.stats = val.stats = batch.stats;
    for (std::size_t k = 0; k < total; ++k)
        (k < val_count ? val : train).sequences.push_back(batch.sequences[idx[k]]);
    return {std::move(train), std::move(val)};
}

}  // namespace varinit
