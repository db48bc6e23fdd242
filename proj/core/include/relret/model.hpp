#pragma once

#include <cstdint>
#include <string>

#include "relret/param_set.hpp"

namespace relret {

enum class HeadKind { retrieval, classification };

std::string head_name(HeadKind head);
HeadKind head_from_name(const std::string& name);

/// Architecture plus the ablation switches that change what the forward
/// pass reads. vocab_size and num_relations are filled from data before
/// parameters are built.
struct EncoderConfig {
    std::size_t hidden = 64;
    std::size_t num_fusion_layers = 2;
    std::size_t num_heads = 4;
    std::size_t ffn_width = 128;
    std::size_t max_text_len = 64;
    std::size_t visual_dim = 8;
    std::size_t max_patches = 16;
    std::size_t rel_layers = 2;
    std::size_t rel_ffn_width = 128;
    std::size_t max_rel_len = 32;
    std::string activation = "tanh"; // sigma of the pair fusion layer
    bool use_visual = true;
    bool use_fusion_encoder = true; // off = the w/o-entity-encoder ablation
    bool use_types = true;
    bool use_positions = true;
    HeadKind head = HeadKind::retrieval;
    std::size_t vocab_size = 0;
    std::size_t num_relations = 0;

    /// Layers the forward pass actually runs; the w/o-encoder ablation and
    /// an explicit depth of zero are the same computation by construction.
    std::size_t effective_fusion_layers() const {
        return use_fusion_encoder ? num_fusion_layers : 0;
    }

    void validate() const; // throws ConfigError

    std::string to_json() const;
    static EncoderConfig from_json(const std::string& json_text);
};

/// Builds every trainable tensor in a fixed, config-determined order:
/// embeddings and positional tables are truncated-normal (sigma 0.02, cut at
/// 2 sigma), projection/attention/FFN weights Xavier-uniform, biases zero,
/// layer-norm scales one. Visual adapter parameters are materialized
/// whenever visual_dim > 0 regardless of use_visual, and relation-encoder
/// parameters regardless of head, so ablation variants of one architecture
/// share identical initializations under a shared seed (the classifier head
/// is drawn last for the same reason).
ParamSet build_params(const EncoderConfig& config, std::uint64_t seed);

} // namespace relret
