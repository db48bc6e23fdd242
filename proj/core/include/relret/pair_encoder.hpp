#pragma once

#include <utility>
#include <vector>

#include "relret/corpus.hpp"
#include "relret/markers.hpp"
#include "relret/model.hpp"
#include "relret/nn_ops.hpp"
#include "relret/tape.hpp"

namespace relret {

/// One encoded entity pair. attention_maps holds one capture per fusion
/// layer when retention was requested, else stays empty.
struct PairEmbedding {
    Tensor2D h_e; // 1 x H
    Tensor2D h_s;
    Tensor2D h_o;
    std::vector<AttentionCapture> attention_maps;
};

// Tape builders; the trainer composes these into a differentiable loss.

/// L_T x H: token embeddings plus positional rows.
Tape::Id encode_text(Tape& t, const MarkedSequence& marked, const EncoderConfig& config);

/// P x H: patch vectors through the visual adapter plus visual positional
/// rows. Returns a 0 x H tensor when the segment is off or empty.
Tape::Id adapt_visual(Tape& t, const VisualFeatures& v, const EncoderConfig& config);

/// Concatenates the segments along the sequence axis and runs the fusion
/// encoder; depth 0 (or use_fusion_encoder off) returns the concatenation
/// unchanged.
Tape::Id fuse(Tape& t, Tape::Id x_t, Tape::Id x_i, const std::vector<bool>& pad_mask,
              const EncoderConfig& config,
              std::vector<AttentionCapture>* capture = nullptr);

/// Rows s_tilde and o_tilde of the fused sequence; when positions are
/// absent, both slots take the mean of non-pad rows.
std::pair<Tape::Id, Tape::Id> extract_entity_states(Tape& t, Tape::Id h_x,
                                                    const MarkedSequence& marked,
                                                    const std::vector<bool>& pad_mask);

/// sigma([h_s ; h_o] W_e + b_e), 1 x H.
Tape::Id fuse_pair(Tape& t, Tape::Id h_s, Tape::Id h_o, const EncoderConfig& config);

/// Full pipeline over an already-marked instance. pad_mask_out, when given,
/// receives the concatenated text+visual mask.
Tape::Id encode_pair(Tape& t, const MarkedSequence& marked, const VisualFeatures& visual,
                     const EncoderConfig& config,
                     std::vector<AttentionCapture>* capture = nullptr,
                     std::vector<bool>* pad_mask_out = nullptr);

// Plain forward wrappers over the builders.

Tensor2D encode_text(const MarkedSequence& marked, const ParamSet& params,
                     const EncoderConfig& config);
Tensor2D adapt_visual(const VisualFeatures& v, const ParamSet& params,
                      const EncoderConfig& config);
Tensor2D fuse(const Tensor2D& x_t, const Tensor2D& x_i, const std::vector<bool>& pad_mask,
              const ParamSet& params, const EncoderConfig& config,
              std::vector<AttentionCapture>* capture = nullptr);
std::pair<Tensor2D, Tensor2D> extract_entity_states(const Tensor2D& h_x,
                                                    const MarkedSequence& marked,
                                                    const std::vector<bool>& pad_mask);
Tensor2D fuse_pair(const Tensor2D& h_s, const Tensor2D& h_o, const ParamSet& params,
                   const EncoderConfig& config);

/// Marks the instance and encodes it with frozen parameters.
PairEmbedding encode_pair(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                          const EncoderConfig& config, bool keep_attention = false,
                          const Lexicon& lexicon = {});

} // namespace relret
