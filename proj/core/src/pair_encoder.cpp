#include "relret/pair_encoder.hpp"

#include <numeric>

#include "relret/error.hpp"

namespace relret {

namespace {

std::vector<std::size_t> iota_ids(std::size_t n) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return ids;
}

} // namespace

Tape::Id encode_text(Tape& t, const MarkedSequence& marked, const EncoderConfig& config) {
    if (marked.token_ids.empty()) throw UsageError("encode_text: empty sequence");
    if (marked.token_ids.size() > config.max_text_len)
        throw UsageError("encode_text: sequence exceeds max_text_len");
    Tape::Id tok = t.embedding_rows(t.param("tok_emb"), marked.token_ids);
    Tape::Id pos = t.embedding_rows(t.param("pos_emb"), iota_ids(marked.token_ids.size()));
    return t.add(tok, pos);
}

Tape::Id adapt_visual(Tape& t, const VisualFeatures& v, const EncoderConfig& config) {
    if (!config.use_visual || config.visual_dim == 0 || v.patches() == 0)
        return t.constant(Tensor2D(0, config.hidden));
    if (v.dim() != config.visual_dim)
        throw DataError("adapt_visual: feature dim " + std::to_string(v.dim()) +
                        " does not match configured " + std::to_string(config.visual_dim));
    if (v.patches() > config.max_patches)
        throw DataError("adapt_visual: " + std::to_string(v.patches()) +
                        " patches exceed max_patches");
    Tape::Id proj = t.matmul(t.constant(v.patch_vectors), t.param("vis_proj"));
    Tape::Id pos = t.embedding_rows(t.param("vis_pos_emb"), iota_ids(v.patches()));
    return t.add(proj, pos);
}

Tape::Id fuse(Tape& t, Tape::Id x_t, Tape::Id x_i, const std::vector<bool>& pad_mask,
              const EncoderConfig& config, std::vector<AttentionCapture>* capture) {
    Tape::Id x = t.concat_rows(x_t, x_i);
    if (pad_mask.size() != t.value(x).rows)
        throw UsageError("fuse: pad mask length does not match sequence length");
    for (std::size_t i = 0; i < config.effective_fusion_layers(); ++i) {
        AttentionCapture* cap = nullptr;
        if (capture) {
            capture->emplace_back();
            cap = &capture->back();
        }
        x = transformer_layer(t, x, "fusion." + std::to_string(i) + ".", config.num_heads,
                              &pad_mask, cap);
    }
    return x;
}

std::pair<Tape::Id, Tape::Id> extract_entity_states(Tape& t, Tape::Id h_x,
                                                    const MarkedSequence& marked,
                                                    const std::vector<bool>& pad_mask) {
    const std::size_t total = t.value(h_x).rows;
    if (!marked.has_positions) {
        Tape::Id mean = t.mean_rows(h_x, &pad_mask);
        return {mean, mean};
    }
    if (marked.s_tilde >= total)
        throw UsageError("extract_entity_states: subject index out of range");
    if (marked.o_tilde >= total)
        throw UsageError("extract_entity_states: object index out of range");
    return {t.slice_rows(h_x, marked.s_tilde, 1), t.slice_rows(h_x, marked.o_tilde, 1)};
}

Tape::Id fuse_pair(Tape& t, Tape::Id h_s, Tape::Id h_o, const EncoderConfig& config) {
    Tape::Id joint = t.concat_cols({h_s, h_o});
    Tape::Id pre = t.add_row(t.matmul(joint, t.param("pair.we")), t.param("pair.be"));
    return config.activation == "tanh" ? t.tanh_act(pre) : pre;
}

Tape::Id encode_pair(Tape& t, const MarkedSequence& marked, const VisualFeatures& visual,
                     const EncoderConfig& config, std::vector<AttentionCapture>* capture,
                     std::vector<bool>* pad_mask_out) {
    Tape::Id x_t = encode_text(t, marked, config);
    Tape::Id x_i = adapt_visual(t, visual, config);
    const std::size_t patches = t.value(x_i).rows;

    if (marked.pad_mask.size() != marked.token_ids.size())
        throw UsageError("encode_pair: text pad mask length mismatch");
    std::vector<bool> mask = marked.pad_mask;
    mask.insert(mask.end(), patches, true);

    if (marked.has_positions && marked.obj_visual &&
        marked.o_tilde >= marked.token_ids.size() + patches)
        throw DataError("encode_pair: visual object index beyond the patch rows");

    Tape::Id h_x = fuse(t, x_t, x_i, mask, config, capture);
    auto [h_s, h_o] = extract_entity_states(t, h_x, marked, mask);
    Tape::Id h_e = fuse_pair(t, h_s, h_o, config);
    if (pad_mask_out) *pad_mask_out = std::move(mask);
    return h_e;
}

Tensor2D encode_text(const MarkedSequence& marked, const ParamSet& params,
                     const EncoderConfig& config) {
    Tape t(&params);
    return t.value(encode_text(t, marked, config));
}

Tensor2D adapt_visual(const VisualFeatures& v, const ParamSet& params,
                      const EncoderConfig& config) {
    Tape t(&params);
    return t.value(adapt_visual(t, v, config));
}

Tensor2D fuse(const Tensor2D& x_t, const Tensor2D& x_i, const std::vector<bool>& pad_mask,
              const ParamSet& params, const EncoderConfig& config,
              std::vector<AttentionCapture>* capture) {
    if (x_t.cols != config.hidden || (x_i.size() > 0 && x_i.cols != config.hidden))
        throw UsageError("fuse: segment widths must equal hidden");
    Tape t(&params);
    return t.value(fuse(t, t.constant(x_t), t.constant(x_i), pad_mask, config, capture));
}

std::pair<Tensor2D, Tensor2D> extract_entity_states(const Tensor2D& h_x,
                                                    const MarkedSequence& marked,
                                                    const std::vector<bool>& pad_mask) {
    Tape t;
    auto [s, o] = extract_entity_states(t, t.constant(h_x), marked, pad_mask);
    return {t.value(s), t.value(o)};
}

Tensor2D fuse_pair(const Tensor2D& h_s, const Tensor2D& h_o, const ParamSet& params,
                   const EncoderConfig& config) {
    Tape t(&params);
    return t.value(fuse_pair(t, t.constant(h_s), t.constant(h_o), config));
}

PairEmbedding encode_pair(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                          const EncoderConfig& config, bool keep_attention,
                          const Lexicon& lexicon) {
    MarkConfig mc;
    mc.use_types = config.use_types;
    mc.use_positions = config.use_positions;
    mc.max_text_len = config.max_text_len;
    const MarkedSequence marked = inject_type_prompts(inst, vocab, mc, lexicon);

    Tape t(&params);
    PairEmbedding out;
    std::vector<AttentionCapture>* cap = keep_attention ? &out.attention_maps : nullptr;

    Tape::Id x_t = encode_text(t, marked, config);
    Tape::Id x_i = adapt_visual(t, inst.visual, config);
    const std::size_t patches = t.value(x_i).rows;
    std::vector<bool> mask = marked.pad_mask;
    mask.insert(mask.end(), patches, true);
    if (marked.has_positions && marked.obj_visual &&
        marked.o_tilde >= marked.token_ids.size() + patches)
        throw DataError("encode_pair: visual object index beyond the patch rows");

    Tape::Id h_x = fuse(t, x_t, x_i, mask, config, cap);
    auto [h_s, h_o] = extract_entity_states(t, h_x, marked, mask);
    Tape::Id h_e = fuse_pair(t, h_s, h_o, config);

    out.h_e = t.value(h_e);
    out.h_s = t.value(h_s);
    out.h_o = t.value(h_o);
    return out;
}

} // namespace relret
