#include "relret/metrics.hpp"

#include <nlohmann/json.hpp>

#include "relret/error.hpp"

namespace relret {

std::string Metrics::to_json() const {
    nlohmann::json j;
    j["accuracy"] = accuracy;
    j["precision"] = precision;
    j["recall"] = recall;
    j["f1"] = f1;
    j["counts"] = {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"n", n}};
    j["convention"] = convention;
    return j.dump();
}

Metrics compute_metrics(const std::vector<std::string>& gold,
                        const std::vector<std::string>& pred,
                        const std::string& none_label) {
    if (gold.empty()) throw UsageError("compute_metrics: no instances");
    if (gold.size() != pred.size())
        throw UsageError("compute_metrics: gold/prediction count mismatch");

    Metrics m;
    m.n = gold.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool gold_pos = gold[i] != none_label;
        const bool pred_pos = pred[i] != none_label;
        if (gold[i] == pred[i]) ++correct;
        if (gold_pos && pred[i] == gold[i]) ++m.tp;
        if (pred_pos && pred[i] != gold[i]) ++m.fp;
        if (gold_pos && pred[i] != gold[i]) ++m.fn;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n);
    if (m.tp == 0 && m.fp == 0 && m.fn == 0) {
        m.precision = m.recall = m.f1 = 1.0;
    } else {
        m.precision = m.tp + m.fp > 0
                          ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                          : 0.0;
        m.recall = m.tp + m.fn > 0
                       ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                       : 0.0;
        m.f1 = m.precision + m.recall > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
    }
    return m;
}

} // namespace relret
