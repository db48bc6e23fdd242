#pragma once

#include <string>

#include "relret/corpus.hpp"
#include "relret/lexicon.hpp"
#include "relret/model.hpp"
#include "relret/vocab.hpp"

namespace relret {

/// Writes the fusion-encoder attention weights for one instance as CSV with
/// columns layer,head,query_index,query_token,key_index,key_token,weight.
/// Visual positions are labeled [vis:p]. Returns the number of data rows,
/// layers * heads * (L_T+P)^2. Retention must be requested by the caller
/// (the --dump-attention flag on the CLI); passing retain=false is an error
/// so a disabled flag fails loudly instead of writing an empty file.
std::size_t dump_attention(const Instance& inst, const Vocab& vocab, const ParamSet& params,
                           const EncoderConfig& config, const std::string& out_path,
                           bool retain = true, const Lexicon& lexicon = {});

} // namespace relret
