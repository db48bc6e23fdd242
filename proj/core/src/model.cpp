#include "relret/model.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"
#include "relret/rng.hpp"

namespace relret {

using nlohmann::json;

std::string head_name(HeadKind head) {
    return head == HeadKind::retrieval ? "retrieval" : "classification";
}

HeadKind head_from_name(const std::string& name) {
    if (name == "retrieval") return HeadKind::retrieval;
    if (name == "classification") return HeadKind::classification;
    throw ConfigError("unknown head: " + name + " (expected retrieval|classification)");
}

void EncoderConfig::validate() const {
    if (hidden == 0) throw ConfigError("hidden must be positive");
    if (num_heads == 0 || hidden % num_heads != 0)
        throw ConfigError("hidden " + std::to_string(hidden) + " not divisible by " +
                          std::to_string(num_heads) + " heads");
    if (ffn_width == 0 || rel_ffn_width == 0) throw ConfigError("ffn width must be positive");
    if (max_text_len < 2) throw ConfigError("max_text_len too small");
    if (max_rel_len < 1) throw ConfigError("max_rel_len must be positive");
    if (use_visual && visual_dim > 0 && max_patches == 0)
        throw ConfigError("max_patches must be positive when visual input is enabled");
    if (activation != "tanh" && activation != "identity")
        throw ConfigError("unknown activation: " + activation);
    if (vocab_size == 0) throw ConfigError("vocab_size not set");
    if (head == HeadKind::classification && num_relations == 0)
        throw ConfigError("classification head needs num_relations");
}

std::string EncoderConfig::to_json() const {
    json j;
    j["hidden"] = hidden;
    j["num_fusion_layers"] = num_fusion_layers;
    j["num_heads"] = num_heads;
    j["ffn_width"] = ffn_width;
    j["max_text_len"] = max_text_len;
    j["visual_dim"] = visual_dim;
    j["max_patches"] = max_patches;
    j["rel_layers"] = rel_layers;
    j["rel_ffn_width"] = rel_ffn_width;
    j["max_rel_len"] = max_rel_len;
    j["activation"] = activation;
    j["use_visual"] = use_visual;
    j["use_fusion_encoder"] = use_fusion_encoder;
    j["use_types"] = use_types;
    j["use_positions"] = use_positions;
    j["head"] = head_name(head);
    j["vocab_size"] = vocab_size;
    j["num_relations"] = num_relations;
    return j.dump();
}

EncoderConfig EncoderConfig::from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("encoder config: invalid JSON: ") + e.what());
    }
    EncoderConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("hidden", c.hidden);
    get("num_fusion_layers", c.num_fusion_layers);
    get("num_heads", c.num_heads);
    get("ffn_width", c.ffn_width);
    get("max_text_len", c.max_text_len);
    get("visual_dim", c.visual_dim);
    get("max_patches", c.max_patches);
    get("rel_layers", c.rel_layers);
    get("rel_ffn_width", c.rel_ffn_width);
    get("max_rel_len", c.max_rel_len);
    get("activation", c.activation);
    get("use_visual", c.use_visual);
    get("use_fusion_encoder", c.use_fusion_encoder);
    get("use_types", c.use_types);
    get("use_positions", c.use_positions);
    get("vocab_size", c.vocab_size);
    get("num_relations", c.num_relations);
    if (j.contains("head")) c.head = head_from_name(j["head"].get<std::string>());
    return c;
}

namespace {

Tensor2D trunc_normal(Rng& rng, std::size_t rows, std::size_t cols) {
    Tensor2D t(rows, cols);
    for (double& v : t.data) v = rng.truncated_normal(0.02, 2.0);
    return t;
}

Tensor2D xavier(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor2D t(fan_in, fan_out);
    for (double& v : t.data) v = (2.0 * rng.uniform() - 1.0) * a;
    return t;
}

void add_layer(ParamSet& p, Rng& rng, const std::string& prefix, std::size_t H,
               std::size_t F) {
    p.add(prefix + "ln1.g", Tensor2D(1, H, 1.0));
    p.add(prefix + "ln1.b", Tensor2D(1, H));
    p.add(prefix + "wq", xavier(rng, H, H));
    p.add(prefix + "wk", xavier(rng, H, H));
    p.add(prefix + "wv", xavier(rng, H, H));
    p.add(prefix + "wo", xavier(rng, H, H));
    p.add(prefix + "ln2.g", Tensor2D(1, H, 1.0));
    p.add(prefix + "ln2.b", Tensor2D(1, H));
    p.add(prefix + "ffn.w1", xavier(rng, H, F));
    p.add(prefix + "ffn.b1", Tensor2D(1, F));
    p.add(prefix + "ffn.w2", xavier(rng, F, H));
    p.add(prefix + "ffn.b2", Tensor2D(1, H));
}

} // namespace

ParamSet build_params(const EncoderConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t H = config.hidden;
    Rng rng(seed);
    ParamSet p;
    p.add("tok_emb", trunc_normal(rng, config.vocab_size, H));
    p.add("pos_emb", trunc_normal(rng, config.max_text_len, H));
    if (config.visual_dim > 0) {
        p.add("vis_proj", xavier(rng, config.visual_dim, H));
        p.add("vis_pos_emb", trunc_normal(rng, config.max_patches, H));
    }
    for (std::size_t i = 0; i < config.effective_fusion_layers(); ++i)
        add_layer(p, rng, "fusion." + std::to_string(i) + ".", H, config.ffn_width);
    p.add("pair.we", xavier(rng, 2 * H, H));
    p.add("pair.be", Tensor2D(1, H));
    p.add("rel.tok_emb", trunc_normal(rng, config.vocab_size, H));
    p.add("rel.pos_emb", trunc_normal(rng, config.max_rel_len, H));
    for (std::size_t i = 0; i < config.rel_layers; ++i)
        add_layer(p, rng, "rel." + std::to_string(i) + ".", H, config.rel_ffn_width);
    if (config.head == HeadKind::classification) {
        p.add("cls.w", xavier(rng, H, config.num_relations));
        p.add("cls.b", Tensor2D(1, config.num_relations));
    }
    return p;
}

} // namespace relret
