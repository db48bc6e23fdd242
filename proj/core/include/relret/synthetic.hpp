#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relret/catalog.hpp"
#include "relret/corpus.hpp"
#include "relret/lexicon.hpp"

namespace relret {

struct SynthConfig {
    std::size_t K = 6;        // catalog size including None
    std::size_t n_train = 600;
    std::size_t n_eval = 200;
    double noise = 0.05;      // sigma of the visual patch noise
    double visual_informative_fraction = 0.0;
    std::uint64_t seed = 648;
    std::size_t visual_dim = 8;
    std::size_t patches = 4;
    bool type_confusable = false; // pair relations sharing triggers, differing in types
    double none_fraction = -1.0;  // P(gold = None); < 0 draws uniformly over the catalog
};

/// Exact generator semantics for one relation; the test-suite Bayes oracle
/// is computed from this.
struct RelationTruth {
    std::string label;
    std::string subj_type;
    std::string obj_type;
    std::vector<std::string> triggers;        // empty for None
    bool visual_informative = false;          // trigger omitted from text
    std::vector<double> visual_signature;     // D_v, present iff informative
};

struct SynthTruth {
    std::vector<RelationTruth> relations; // catalog order
    double noise = 0.0;
    std::size_t patches = 0;
    std::size_t visual_dim = 0;
    double signature_scale = 2.0;
    double none_fraction = -1.0; // < 0 means the uniform draw
    std::string to_json() const;
};

struct SynthData {
    std::vector<Instance> train;
    std::vector<Instance> eval;
    RelationCatalog catalog;
    Lexicon lexicon;
    SynthTruth truth;
};

/// Seed-deterministic corpus. Each non-None relation gets a type signature
/// (shared by roughly two relations so types alone underdetermine the
/// label), a disjoint two-word trigger set, and a label built from both.
/// A sample draws a relation uniformly, emits entity names from a shared
/// type-ambiguous pool with gold types attached, filler tokens, and --
/// for textual relations -- one trigger. For a visual_informative_fraction
/// of relations the trigger never appears: one random patch carries the
/// relation's signature vector instead, on top of noise*N(0,I) patches
/// everyone gets. "None" draws a type signature from the active pool and
/// emits neither trigger nor signature. In type_confusable mode relations
/// are paired: identical triggers, distinct type signatures, so entity
/// types carry the deciding bit.
SynthData generate_synthetic(const SynthConfig& config);

} // namespace relret
