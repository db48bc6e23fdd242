#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relret/corpus.hpp"

namespace relret {

/// Lowercased entity surface string -> type tag (PER/ORG/LOC/MISC by default).
using Lexicon = std::map<std::string, std::string>;

Lexicon load_lexicon(const std::string& path);
void save_lexicon(const std::string& path, const Lexicon& lexicon);

/// Type for one entity: the gold tag when present, else the lexicon entry
/// for the span's lowercased surface (tokens joined by single spaces), else
/// "MISC". Total function.
std::string tag_entity_type(const std::vector<std::string>& tokens, const EntitySpan& span,
                            const std::string& gold_type, const Lexicon& lexicon);

/// (subj_type, obj_type) for an instance. A visual object without a gold
/// type defaults to MISC.
std::pair<std::string, std::string> tag_entity_types(const Instance& inst,
                                                     const Lexicon& lexicon);

} // namespace relret
