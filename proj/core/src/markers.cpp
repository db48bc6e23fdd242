#include "relret/markers.hpp"

#include "relret/error.hpp"

namespace relret {

MarkedSequence inject_type_prompts(const Instance& inst, const Vocab& vocab,
                                   const MarkConfig& config, const Lexicon& lexicon) {
    const std::size_t L = inst.tokens.size();
    if (L == 0) throw DataError("inject_type_prompts: empty token list");
    if (inst.subj.start > inst.subj.end || inst.subj.end >= L)
        throw DataError("inject_type_prompts: subject span out of range");
    const bool obj_textual = !inst.obj_is_visual;
    if (obj_textual) {
        if (inst.obj.start > inst.obj.end || inst.obj.end >= L)
            throw DataError("inject_type_prompts: object span out of range");
        const bool disjoint =
            inst.subj.end < inst.obj.start || inst.obj.end < inst.subj.start;
        if (!disjoint) throw DataError("inject_type_prompts: overlapping entity spans");
    }
    if (config.max_text_len < 2)
        throw ConfigError("inject_type_prompts: max_text_len too small");

    const auto [subj_type, obj_type] = tag_entity_types(inst, lexicon);
    const std::vector<std::size_t> base = vocab.encode(inst.tokens);

    MarkedSequence out;
    out.obj_visual = inst.obj_is_visual;
    out.has_positions = config.use_positions;

    std::size_t s_open = 0, s_close = 0, o_open = 0, o_close = 0;
    bool have_obj_markers = false;
    if (config.use_positions) {
        for (std::size_t i = 0; i < L; ++i) {
            if (i == inst.subj.start) {
                s_open = out.token_ids.size();
                out.token_ids.push_back(vocab.subj_open(subj_type, config.use_types));
            }
            if (obj_textual && i == inst.obj.start) {
                o_open = out.token_ids.size();
                out.token_ids.push_back(vocab.obj_open(obj_type, config.use_types));
            }
            out.token_ids.push_back(base[i]);
            if (i == inst.subj.end) {
                s_close = out.token_ids.size();
                out.token_ids.push_back(vocab.subj_close());
            }
            if (obj_textual && i == inst.obj.end) {
                o_close = out.token_ids.size();
                out.token_ids.push_back(vocab.obj_close());
            }
        }
        have_obj_markers = obj_textual;
    } else {
        out.token_ids = base;
    }

    out.token_ids.insert(out.token_ids.begin(), Vocab::kCls);
    s_open += 1;
    s_close += 1;
    o_open += 1;
    o_close += 1;

    if (out.token_ids.size() > config.max_text_len) {
        if (config.use_positions) {
            std::size_t last_marker = std::max(s_open, s_close);
            if (have_obj_markers) last_marker = std::max({last_marker, o_open, o_close});
            if (last_marker >= config.max_text_len)
                throw DataError("inject_type_prompts: truncation to " +
                                std::to_string(config.max_text_len) +
                                " would remove entity markers");
        }
        out.token_ids.resize(config.max_text_len);
    }

    out.text_len = out.token_ids.size();
    out.pad_mask.assign(out.text_len, true);
    if (config.use_positions) {
        out.s_tilde = s_open;
        out.o_tilde = obj_textual ? o_open : out.text_len + inst.obj_visual_index;
    }
    return out;
}

} // namespace relret
