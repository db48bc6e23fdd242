#include "relret/rel_encoder.hpp"

#include <numeric>

#include "relret/error.hpp"
#include "relret/nn_ops.hpp"

namespace relret {

std::uint64_t catalog_version_hash(const RelationCatalog& catalog,
                                   std::uint64_t params_version) {
    std::uint64_t h = catalog.content_hash();
    for (int i = 0; i < 8; ++i) {
        h ^= (params_version >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
    }
    return h;
}

Tape::Id encode_relation(Tape& t, const std::vector<std::size_t>& desc_ids,
                         const EncoderConfig& config, const std::vector<bool>* pad_mask) {
    if (desc_ids.empty()) throw DataError("encode_relation: empty description");
    std::vector<std::size_t> ids = desc_ids;
    if (ids.size() > config.max_rel_len) ids.resize(config.max_rel_len);
    std::vector<bool> mask;
    if (pad_mask) {
        mask = *pad_mask;
        mask.resize(ids.size(), true);
    } else {
        mask.assign(ids.size(), true);
    }

    Tape::Id tok = t.embedding_rows(t.param("rel.tok_emb"), ids);
    std::vector<std::size_t> pos_ids(ids.size());
    std::iota(pos_ids.begin(), pos_ids.end(), std::size_t{0});
    Tape::Id x = t.add(tok, t.embedding_rows(t.param("rel.pos_emb"), pos_ids));
    for (std::size_t i = 0; i < config.rel_layers; ++i)
        x = transformer_layer(t, x, "rel." + std::to_string(i) + ".", config.num_heads,
                              &mask);
    return t.mean_rows(x, &mask);
}

RelationEmbedding encode_relation(const std::string& label, const std::string& description,
                                  const Vocab& vocab, const ParamSet& params,
                                  const EncoderConfig& config) {
    const std::vector<std::size_t> ids = vocab.encode_text(description);
    if (ids.empty()) throw DataError("encode_relation: description has no tokens: " + label);
    Tape t(&params);
    RelationEmbedding out;
    out.label = label;
    out.h_r = t.value(encode_relation(t, ids, config));
    out.description_len = std::min(ids.size(), config.max_rel_len);
    return out;
}

CatalogMatrix encode_catalog(const RelationCatalog& catalog, const Vocab& vocab,
                             const ParamSet& params, const EncoderConfig& config) {
    CatalogMatrix m;
    m.rows = Tensor2D(catalog.size(), config.hidden);
    for (std::size_t k = 0; k < catalog.size(); ++k) {
        const RelationEntry& e = catalog.entry(k);
        const RelationEmbedding r = encode_relation(e.label, e.description, vocab, params, config);
        for (std::size_t c = 0; c < config.hidden; ++c) m.rows.at(k, c) = r.h_r.data[c];
        m.labels.push_back(e.label);
    }
    m.version = catalog_version_hash(catalog, params.version());
    return m;
}

} // namespace relret
