#pragma once

#include <map>
#include <string>
#include <vector>

#include "relret/catalog.hpp"
#include "relret/corpus.hpp"

namespace relret {

/// Token table with a fixed reserved prefix:
///   0 <pad>, 1 <unk>, 2 <cls>, 3 <s>, 4 </s>, 5 <o>, 6 </o>,
/// then one subject-open and one object-open marker per entity type in
/// sorted type order. Corpus tokens follow in frequency-then-lexicographic
/// order. All lookups are over lowercased tokens.
class Vocab {
  public:
    static constexpr std::size_t kPad = 0;
    static constexpr std::size_t kUnk = 1;
    static constexpr std::size_t kCls = 2;

    static std::vector<std::string> default_types() { return {"LOC", "MISC", "ORG", "PER"}; }

    /// Counts lowercased instance tokens; tokens with count >= min_freq get
    /// ids. Catalog description tokens (when a catalog is given) are always
    /// included so every relation description is encodable, and contribute
    /// to the counts.
    static Vocab build(const std::vector<Instance>& instances, std::size_t min_freq,
                       const RelationCatalog* catalog = nullptr,
                       std::vector<std::string> types = default_types());

    std::size_t size() const { return tokens_.size(); }
    std::size_t id(const std::string& token) const; // unk for unknown
    const std::string& token(std::size_t id) const;
    bool is_marker(std::size_t id) const { return id >= 3 && id < first_corpus_id_; }

    std::size_t subj_open(const std::string& type, bool use_types) const;
    std::size_t subj_close() const { return 4; }
    std::size_t obj_open(const std::string& type, bool use_types) const;
    std::size_t obj_close() const { return 6; }

    /// Lowercase + lookup, unknown tokens map to <unk>.
    std::vector<std::size_t> encode(const std::vector<std::string>& tokens) const;
    /// Whitespace-split then encode; for relation descriptions.
    std::vector<std::size_t> encode_text(const std::string& text) const;

    const std::vector<std::string>& types() const { return types_; }

    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

    /// JSON round-trip used to embed the vocab in checkpoint configs.
    std::string to_json() const;
    static Vocab from_json(const std::string& json_text);

    bool operator==(const Vocab& o) const {
        return tokens_ == o.tokens_ && types_ == o.types_;
    }

  private:
    void finish(); // rebuilds the map and marker indices from tokens_/types_

    std::vector<std::string> tokens_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> types_; // sorted
    std::size_t first_corpus_id_ = 0;
};

} // namespace relret
