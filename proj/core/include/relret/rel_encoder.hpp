#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relret/catalog.hpp"
#include "relret/model.hpp"
#include "relret/tape.hpp"
#include "relret/vocab.hpp"

namespace relret {

struct RelationEmbedding {
    std::string label;
    Tensor2D h_r; // 1 x H
    std::size_t description_len = 0;
};

/// Catalog-order matrix of relation embeddings, stamped with a version hash
/// so retrieval against outdated parameters is caught instead of silently
/// mis-scoring.
struct CatalogMatrix {
    Tensor2D rows; // K x H
    std::vector<std::string> labels;
    std::uint64_t version = 0;
};

std::uint64_t catalog_version_hash(const RelationCatalog& catalog,
                                   std::uint64_t params_version);

/// Tape builder: encodes already-tokenized description ids with the
/// parameter-disjoint relation encoder ("rel." parameter prefix) and
/// mean-pools over non-pad rows. Descriptions longer than max_rel_len are
/// truncated.
Tape::Id encode_relation(Tape& t, const std::vector<std::size_t>& desc_ids,
                         const EncoderConfig& config,
                         const std::vector<bool>* pad_mask = nullptr);

RelationEmbedding encode_relation(const std::string& label, const std::string& description,
                                  const Vocab& vocab, const ParamSet& params,
                                  const EncoderConfig& config);

CatalogMatrix encode_catalog(const RelationCatalog& catalog, const Vocab& vocab,
                             const ParamSet& params, const EncoderConfig& config);

} // namespace relret
