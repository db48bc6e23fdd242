#include "relret/predict.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"
#include "relret/losses.hpp"
#include "relret/pair_encoder.hpp"

namespace relret {

namespace {

void check_version(const CatalogMatrix& matrix, const RelationCatalog& catalog,
                   const ParamSet& params) {
    if (matrix.version != catalog_version_hash(catalog, params.version()))
        throw UsageError("catalog matrix is stale; re-encode the catalog for the "
                         "current parameters");
}

Tensor2D matrix_row(const CatalogMatrix& m, std::size_t k) {
    Tensor2D row(1, m.rows.cols);
    for (std::size_t c = 0; c < m.rows.cols; ++c) row.data[c] = m.rows.at(k, c);
    return row;
}

/// Indices sorted by descending score, catalog order inside ties.
std::vector<std::size_t> rank_desc(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

std::vector<double> classifier_logits(const Tensor2D& h_e, const ParamSet& params) {
    const Tensor2D& w = params.get("cls.w");
    const Tensor2D& b = params.get("cls.b");
    std::vector<double> logits(w.cols);
    for (std::size_t k = 0; k < w.cols; ++k) {
        double z = b.data[k];
        for (std::size_t c = 0; c < w.rows; ++c) z += h_e.data[c] * w.at(c, k);
        logits[k] = z;
    }
    return logits;
}

} // namespace

std::string Prediction::to_json() const {
    nlohmann::json j;
    j["instance_id"] = instance_id;
    j["predicted_label"] = predicted_label;
    j["score"] = score;
    j["ranked"] = nlohmann::json::array();
    for (const auto& [label, s] : ranked) j["ranked"].push_back({{"label", label}, {"score", s}});
    return j.dump();
}

Prediction predict(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                   const EncoderConfig& config, const RelationCatalog& catalog,
                   const CatalogMatrix& matrix, std::optional<double> tau_infer,
                   std::size_t topk, const Lexicon& lexicon) {
    check_version(matrix, catalog, params);
    if (tau_infer && !(*tau_infer > 0.0))
        throw ConfigError("predict: tau_infer must be > 0");

    const PairEmbedding pe = encode_pair(inst, vocab, params, config, false, lexicon);
    std::vector<double> scores(catalog.size());
    for (std::size_t k = 0; k < catalog.size(); ++k)
        scores[k] = cosine_sim(pe.h_e, matrix_row(matrix, k));

    const std::vector<std::size_t> order = rank_desc(scores);
    const double rescale = tau_infer ? 1.0 / *tau_infer : 1.0;

    Prediction out;
    out.instance_id = inst.instance_id;
    out.predicted_label = catalog.entry(order[0]).label;
    out.score = scores[order[0]] * rescale;
    for (std::size_t i = 0; i < order.size() && i < topk; ++i)
        out.ranked.emplace_back(catalog.entry(order[i]).label, scores[order[i]] * rescale);
    return out;
}

Prediction predict_restricted(const Instance& inst, const Vocab& vocab,
                              const ParamSet& params, const EncoderConfig& config,
                              const RelationCatalog& catalog, const CatalogMatrix& matrix,
                              const std::array<std::string, 2>& candidates,
                              const Lexicon& lexicon) {
    check_version(matrix, catalog, params);
    if (candidates[0] == candidates[1])
        throw UsageError("predict_restricted: candidate labels must be distinct");
    std::array<std::size_t, 2> ks{catalog.index_of(candidates[0]),
                                  catalog.index_of(candidates[1])};
    if (ks[0] > ks[1]) std::swap(ks[0], ks[1]); // catalog-order tie-break

    const PairEmbedding pe = encode_pair(inst, vocab, params, config, false, lexicon);
    const double s0 = cosine_sim(pe.h_e, matrix_row(matrix, ks[0]));
    const double s1 = cosine_sim(pe.h_e, matrix_row(matrix, ks[1]));

    Prediction out;
    out.instance_id = inst.instance_id;
    const bool first = s0 >= s1;
    out.predicted_label = catalog.entry(first ? ks[0] : ks[1]).label;
    out.score = first ? s0 : s1;
    out.ranked.emplace_back(catalog.entry(first ? ks[0] : ks[1]).label, first ? s0 : s1);
    out.ranked.emplace_back(catalog.entry(first ? ks[1] : ks[0]).label, first ? s1 : s0);
    return out;
}

std::string predict_label(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                          const EncoderConfig& config, const RelationCatalog& catalog,
                          const CatalogMatrix& matrix, const Lexicon& lexicon) {
    if (config.head == HeadKind::classification) {
        const PairEmbedding pe = encode_pair(inst, vocab, params, config, false, lexicon);
        const std::vector<double> logits = classifier_logits(pe.h_e, params);
        if (logits.size() != catalog.size())
            throw UsageError("predict_label: classifier width does not match the catalog");
        std::size_t best = 0;
        for (std::size_t k = 1; k < logits.size(); ++k)
            if (logits[k] > logits[best]) best = k;
        return catalog.entry(best).label;
    }
    return predict(inst, vocab, params, config, catalog, matrix, std::nullopt, 1, lexicon)
        .predicted_label;
}

Metrics evaluate(const std::vector<Instance>& instances, const Vocab& vocab,
                 const ParamSet& params, const EncoderConfig& config,
                 const RelationCatalog& catalog, const Lexicon& lexicon) {
    if (instances.empty()) throw UsageError("evaluate: empty instance list");
    const CatalogMatrix matrix = encode_catalog(catalog, vocab, params, config);
    std::vector<std::string> gold, pred;
    gold.reserve(instances.size());
    pred.reserve(instances.size());
    for (const Instance& inst : instances) {
        if (!catalog.has(inst.gold_relation))
            throw DataError("evaluate: gold relation not in catalog: " + inst.gold_relation);
        gold.push_back(inst.gold_relation);
        pred.push_back(predict_label(inst, vocab, params, config, catalog, matrix, lexicon));
    }
    return compute_metrics(gold, pred);
}

} // namespace relret
