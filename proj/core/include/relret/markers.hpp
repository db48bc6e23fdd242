#pragma once

#include <cstddef>
#include <vector>

#include "relret/corpus.hpp"
#include "relret/lexicon.hpp"
#include "relret/vocab.hpp"

namespace relret {

struct MarkConfig {
    bool use_types = true;
    bool use_positions = true;
    std::size_t max_text_len = 64; // cap on the final text segment, CLS included
};

/// Token ids of the marked text segment plus the entity anchor indices into
/// the eventual text+visual concatenation. o_tilde addresses the visual
/// segment (text_len + patch index) when the object lives in the image.
struct MarkedSequence {
    std::vector<std::size_t> token_ids;
    std::vector<bool> pad_mask;  // true = real position
    std::size_t text_len = 0;    // == token_ids.size() as produced here
    bool has_positions = true;   // false in the w/o-position ablation
    std::size_t s_tilde = 0;
    std::size_t o_tilde = 0;
    bool obj_visual = false;
};

/// Realizes the type prompts: wraps the subject span in <s:TYPE> ... </s>
/// and a textual object span in <o:TYPE> ... </o> (untyped markers when
/// use_types is off), prepends CLS, and records the opening-marker indices
/// as s_tilde/o_tilde. Entity types fall back to the lexicon via
/// tag_entity_types. With use_positions off no markers are inserted and the
/// indices are flagged absent. Truncation to max_text_len drops trailing
/// plain tokens only; a truncation that would remove a marker is an error.
MarkedSequence inject_type_prompts(const Instance& inst, const Vocab& vocab,
                                   const MarkConfig& config,
                                   const Lexicon& lexicon = {});

} // namespace relret
