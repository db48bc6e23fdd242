#include "relret/attention_dump.hpp"

#include <cstdio>
#include <fstream>

#include "relret/error.hpp"
#include "relret/pair_encoder.hpp"

namespace relret {

std::size_t dump_attention(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                           const EncoderConfig& config, const std::string& out_path,
                           bool retain, const Lexicon& lexicon) {
    if (!retain)
        throw UsageError("attention retention is disabled; run with --dump-attention");
    if (config.effective_fusion_layers() == 0)
        throw UsageError("no fusion layers to dump; configure --fusion-layers >= 1");

    MarkConfig mc;
    mc.use_types = config.use_types;
    mc.use_positions = config.use_positions;
    mc.max_text_len = config.max_text_len;
    const MarkedSequence marked = inject_type_prompts(inst, vocab, mc, lexicon);

    const PairEmbedding pe = encode_pair(inst, vocab, params, config, true, lexicon);

    std::ofstream os(out_path, std::ios::trunc);
    if (!os) throw DataError("cannot open attention dump for writing: " + out_path);
    os << "layer,head,query_index,query_token,key_index,key_token,weight\n";

    auto position_name = [&](std::size_t i) {
        if (i < marked.token_ids.size()) return vocab.token(marked.token_ids[i]);
        return std::string("[vis:") + std::to_string(i - marked.token_ids.size()) + "]";
    };

    std::size_t rows = 0;
    char buf[64];
    for (std::size_t layer = 0; layer < pe.attention_maps.size(); ++layer) {
        const AttentionCapture& cap = pe.attention_maps[layer];
        for (std::size_t head = 0; head < cap.head_weights.size(); ++head) {
            const Tensor2D& w = cap.head_weights[head];
            for (std::size_t q = 0; q < w.rows; ++q) {
                for (std::size_t k = 0; k < w.cols; ++k) {
                    std::snprintf(buf, sizeof buf, "%.17g", w.at(q, k));
                    os << layer << ',' << head << ',' << q << ',' << position_name(q)
                       << ',' << k << ',' << position_name(k) << ',' << buf << '\n';
                    ++rows;
                }
            }
        }
    }
    os.flush();
    if (!os) throw DataError("failed writing attention dump: " + out_path);
    return rows;
}

} // namespace relret
