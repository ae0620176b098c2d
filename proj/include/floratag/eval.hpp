// SPDX-License-Identifier: Apache-2.0
#pragma once

// Token-level confusion counts and macro-averaged precision/recall/F1
// over the three tag classes (O included), plus report rendering as a
// markdown table (percentages, 4 decimals) or loss-free JSON.

#include <array>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floratag/dataset.hpp"
#include "floratag/errors.hpp"
#include "floratag/iob.hpp"

namespace floratag {

struct ConfusionCounts {
    // Indexed by Tag value: O=0, B=1, I=2.
    std::array<std::size_t, kNumTags> tp{};
    std::array<std::size_t, kNumTags> fp{};
    std::array<std::size_t, kNumTags> fn{};

    std::size_t total_gold() const {
        std::size_t n = 0;
        for (std::size_t c = 0; c < kNumTags; ++c) n += tp[c] + fn[c];
        return n;
    }
    std::size_t total_predicted() const {
        std::size_t n = 0;
        for (std::size_t c = 0; c < kNumTags; ++c) n += tp[c] + fp[c];
        return n;
    }
};

inline ConfusionCounts token_confusion(const Dataset& gold,
                                       const std::vector<LabeledSentence>& pred) {
    if (gold.sentences.size() != pred.size()) {
        throw DataError("token_confusion: " + std::to_string(gold.sentences.size()) +
                        " gold sentences vs " + std::to_string(pred.size()) + " predictions");
    }
    ConfusionCounts counts;
    for (std::size_t s = 0; s < pred.size(); ++s) {
        const auto& g = gold.sentences[s].tags;
        const auto& p = pred[s].tags;
        if (g.size() != p.size()) {
            throw DataError("token_confusion: sentence " + std::to_string(s) + " has " +
                            std::to_string(g.size()) + " gold tokens vs " +
                            std::to_string(p.size()) + " predicted");
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] == p[i]) {
                ++counts.tp[static_cast<std::size_t>(g[i])];
            } else {
                ++counts.fp[static_cast<std::size_t>(p[i])];
                ++counts.fn[static_cast<std::size_t>(g[i])];
            }
        }
    }
    return counts;
}

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const Prf& other) const = default;
};

// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); 0/0 is defined as 0.
inline Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    Prf m;
    const auto safe_div = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
    m.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    m.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

struct MacroPrf {
    Prf macro;                       // unweighted mean over O, B, I
    std::array<Prf, kNumTags> per_class;
};

inline MacroPrf macro_prf(const ConfusionCounts& c) {
    MacroPrf out;
    for (std::size_t k = 0; k < kNumTags; ++k) {
        out.per_class[k] = prf_from_counts(c.tp[k], c.fp[k], c.fn[k]);
        out.macro.precision += out.per_class[k].precision;
        out.macro.recall += out.per_class[k].recall;
        out.macro.f1 += out.per_class[k].f1;
    }
    out.macro.precision /= static_cast<double>(kNumTags);
    out.macro.recall /= static_cast<double>(kNumTags);
    out.macro.f1 /= static_cast<double>(kNumTags);
    return out;
}

// Exact span match, a secondary diagnostic over B I* runs. Not the
// headline metric; token-level macro scores are.
inline Prf span_exact_prf(const Dataset& gold, const std::vector<LabeledSentence>& pred) {
    if (gold.sentences.size() != pred.size()) {
        throw DataError("span_exact_prf: sentence count mismatch");
    }
    std::size_t tp = 0;
    std::size_t n_gold = 0;
    std::size_t n_pred = 0;
    for (std::size_t s = 0; s < pred.size(); ++s) {
        const auto gs = extract_spans({gold.sentences[s].tokens, repair_iob(gold.sentences[s].tags)});
        const auto ps = extract_spans({pred[s].tokens, repair_iob(pred[s].tags)});
        n_gold += gs.size();
        n_pred += ps.size();
        for (const auto& a : gs) {
            for (const auto& b : ps) {
                if (a.begin == b.begin && a.end == b.end) {
                    ++tp;
                    break;
                }
            }
        }
    }
    return prf_from_counts(tp, n_pred - tp, n_gold - tp);
}

struct EvalReport {
    std::string model_name;
    Prf macro;                                // fractions in [0,1]
    std::map<std::string, Prf> per_class;     // keys "O", "B", "I"
    std::size_t n_sentences = 0;
    std::size_t n_tokens = 0;
    std::optional<Prf> span_exact;            // diagnostic, not a headline metric

    bool operator==(const EvalReport& other) const = default;
};

inline EvalReport make_report(const std::string& model_name, const Dataset& gold,
                              const std::vector<LabeledSentence>& pred,
                              bool with_span_diagnostic = true) {
    const auto counts = token_confusion(gold, pred);
    const auto metrics = macro_prf(counts);
    EvalReport r;
    r.model_name = model_name;
    r.macro = metrics.macro;
    r.per_class["O"] = metrics.per_class[static_cast<std::size_t>(Tag::O)];
    r.per_class["B"] = metrics.per_class[static_cast<std::size_t>(Tag::B)];
    r.per_class["I"] = metrics.per_class[static_cast<std::size_t>(Tag::I)];
    r.n_sentences = gold.sentences.size();
    r.n_tokens = counts.total_gold();
    if (with_span_diagnostic) r.span_exact = span_exact_prf(gold, pred);
    return r;
}

// Percentage with 4 decimals, the table layout used for results.
inline std::string percent4(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", fraction * 100.0);
    return buf;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json per_class;
    for (const auto& [cls, m] : r.per_class) {
        per_class[cls] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    }
    nlohmann::json j = {
        {"model", r.model_name},
        {"precision", r.macro.precision},
        {"recall", r.macro.recall},
        {"f1", r.macro.f1},
        {"per_class", per_class},
        {"n_sentences", r.n_sentences},
        {"n_tokens", r.n_tokens},
    };
    if (r.span_exact) {
        j["span_exact_diagnostic"] = {{"precision", r.span_exact->precision},
                                      {"recall", r.span_exact->recall},
                                      {"f1", r.span_exact->f1}};
    }
    return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.model_name = j.at("model").get<std::string>();
    r.macro.precision = j.at("precision").get<double>();
    r.macro.recall = j.at("recall").get<double>();
    r.macro.f1 = j.at("f1").get<double>();
    for (const auto& [cls, m] : j.at("per_class").items()) {
        r.per_class[cls] = {m.at("precision").get<double>(), m.at("recall").get<double>(),
                            m.at("f1").get<double>()};
    }
    r.n_sentences = j.at("n_sentences").get<std::size_t>();
    r.n_tokens = j.at("n_tokens").get<std::size_t>();
    if (j.contains("span_exact_diagnostic")) {
        const auto& s = j.at("span_exact_diagnostic");
        r.span_exact = Prf{s.at("precision").get<double>(), s.at("recall").get<double>(),
                           s.at("f1").get<double>()};
    }
    return r;
}

inline std::string render_report_markdown(const std::vector<EvalReport>& reports) {
    std::string out = "| Model | Precision | Recall | F1 |\n|---|---|---|---|\n";
    for (const auto& r : reports) {
        out += "| " + r.model_name + " | " + percent4(r.macro.precision) + " | " +
               percent4(r.macro.recall) + " | " + percent4(r.macro.f1) + " |\n";
    }
    return out;
}

inline std::string render_report_json(const std::vector<EvalReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr.dump(2) + "\n";
}

inline std::string render_report(const std::vector<EvalReport>& reports, const std::string& format) {
    if (format == "markdown") return render_report_markdown(reports);
    if (format == "json") return render_report_json(reports);
    throw UsageError("render_report: unknown format \"" + format + "\" (use markdown or json)");
}

} // namespace floratag
