#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relret/catalog.hpp"
#include "relret/lexicon.hpp"
#include "relret/metrics.hpp"
#include "relret/model.hpp"
#include "relret/rel_encoder.hpp"
#include "relret/vocab.hpp"

namespace relret {

struct Prediction {
    std::string instance_id;
    std::string predicted_label;
    double score = 0.0;
    std::vector<std::pair<std::string, double>> ranked; // top-k, descending
    std::string to_json() const;
};

/// Nearest catalog description by cosine similarity; ties break toward the
/// lower catalog index. tau_infer rescales the reported scores and never
/// the ranking. The catalog matrix must match the current parameter version.
Prediction predict(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                   const EncoderConfig& config, const RelationCatalog& catalog,
                   const CatalogMatrix& matrix,
                   std::optional<double> tau_infer = std::nullopt, std::size_t topk = 5,
                   const Lexicon& lexicon = {});

/// Argmax over exactly two distinct catalog labels (case-study mode).
Prediction predict_restricted(const Instance& inst, const Vocab& vocab,
                              const ParamSet& params, const EncoderConfig& config,
                              const RelationCatalog& catalog, const CatalogMatrix& matrix,
                              const std::array<std::string, 2>& candidates,
                              const Lexicon& lexicon = {});

/// Head-aware metrics over a whole split: retrieval ranks catalog
/// descriptions, classification takes the classifier-head argmax. Builds a
/// fresh catalog matrix internally.
Metrics evaluate(const std::vector<Instance>& instances, const Vocab& vocab,
                 const ParamSet& params, const EncoderConfig& config,
                 const RelationCatalog& catalog, const Lexicon& lexicon = {});

/// The label the model assigns one instance (rank-1 only, either head).
std::string predict_label(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                          const EncoderConfig& config, const RelationCatalog& catalog,
                          const CatalogMatrix& matrix, const Lexicon& lexicon = {});

} // namespace relret
