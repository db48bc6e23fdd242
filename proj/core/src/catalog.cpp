#include "relret/catalog.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"

namespace relret {

using nlohmann::json;

RelationCatalog RelationCatalog::from_entries(std::vector<RelationEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const RelationEntry& a, const RelationEntry& b) { return a.label < b.label; });
    RelationCatalog cat;
    for (auto& e : entries) {
        if (e.label.empty()) throw DataError("catalog: empty relation label");
        if (e.description.empty())
            throw DataError("catalog: missing description for " + e.label);
        if (!cat.index_.emplace(e.label, cat.entries_.size()).second)
            throw DataError("catalog: duplicate label " + e.label);
        cat.entries_.push_back(std::move(e));
    }
    if (!cat.has("None")) throw DataError("catalog: required \"None\" entry is missing");
    return cat;
}

std::size_t RelationCatalog::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw DataError("catalog: unknown relation " + label);
    return it->second;
}

std::uint64_t RelationCatalog::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const RelationEntry& e : entries_) {
        mix(e.label);
        mix(e.description);
    }
    return h;
}

RelationCatalog load_relation_catalog(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open catalog: " + path);

    // json::parse with a callback merges duplicate keys silently, so top-level
    // keys are collected during the parse to reject duplicates.
    std::vector<std::string> top_keys;
    int level = 0;
    json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::object_start) {
            ++level;
        } else if (event == json::parse_event_t::object_end) {
            --level;
        } else if (event == json::parse_event_t::key && level == 1) {
            top_keys.push_back(parsed.get<std::string>());
        }
        return true;
    };

    json j;
    try {
        j = json::parse(is, cb);
    } catch (const json::exception& e) {
        throw DataError("catalog " + path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError("catalog " + path + ": expected an object");

    {
        std::vector<std::string> sorted = top_keys;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end())
            throw DataError("catalog: duplicate label " + *dup);
    }

    std::vector<RelationEntry> entries;
    for (const auto& [label, body] : j.items()) {
        if (!body.is_object())
            throw DataError("catalog: entry for " + label + " must be an object");
        RelationEntry e;
        e.label = label;
        if (!body.contains("description") || !body["description"].is_string())
            throw DataError("catalog: missing description for " + label);
        e.description = body["description"].get<std::string>();
        if (body.contains("subj_types"))
            e.subj_types = body["subj_types"].get<std::vector<std::string>>();
        if (body.contains("obj_types"))
            e.obj_types = body["obj_types"].get<std::vector<std::string>>();
        entries.push_back(std::move(e));
    }
    return RelationCatalog::from_entries(std::move(entries));
}

void save_relation_catalog(const std::string& path, const RelationCatalog& catalog) {
    json j = json::object();
    for (const RelationEntry& e : catalog.entries()) {
        j[e.label] = {{"description", e.description},
                      {"subj_types", e.subj_types},
                      {"obj_types", e.obj_types}};
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open catalog for writing: " + path);
    os << j.dump(2) << "\n";
    os.flush();
    if (!os) throw DataError("failed writing catalog: " + path);
}

} // namespace relret
