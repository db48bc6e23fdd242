#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace relret {

struct RelationEntry {
    std::string label;
    std::string description;
    std::vector<std::string> subj_types; // empty means unconstrained
    std::vector<std::string> obj_types;
};

/// Ordered relation set. Order is lexicographic by label and defines the
/// relation index used by the classification head and every report.
class RelationCatalog {
  public:
    /// Sorts, validates uniqueness, non-empty descriptions, and the
    /// mandatory "None" entry.
    static RelationCatalog from_entries(std::vector<RelationEntry> entries);

    std::size_t size() const { return entries_.size(); }
    const RelationEntry& entry(std::size_t k) const { return entries_[k]; }
    const std::vector<RelationEntry>& entries() const { return entries_; }

    bool has(const std::string& label) const { return index_.count(label) != 0; }
    std::size_t index_of(const std::string& label) const;

    /// FNV-1a over labels and descriptions; feeds catalog-matrix versioning.
    std::uint64_t content_hash() const;

  private:
    std::vector<RelationEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

/// JSON object: label -> {"description": str, "subj_types": [..], "obj_types": [..]}.
/// Duplicate labels and a missing "None" entry are errors.
RelationCatalog load_relation_catalog(const std::string& path);
void save_relation_catalog(const std::string& path, const RelationCatalog& catalog);

} // namespace relret
