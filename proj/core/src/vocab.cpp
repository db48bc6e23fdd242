#include "relret/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"

namespace relret {

using nlohmann::json;

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> whitespace_split(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

} // namespace

void Vocab::finish() {
    index_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = i;
    first_corpus_id_ = 7 + 2 * types_.size();
    if (tokens_.size() < first_corpus_id_)
        throw DataError("vocab: reserved prefix incomplete");
}

Vocab Vocab::build(const std::vector<Instance>& instances, std::size_t min_freq,
                   const RelationCatalog* catalog, std::vector<std::string> types) {
    if (min_freq < 1) throw UsageError("build_vocab: min_freq must be >= 1");
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());

    std::map<std::string, std::size_t> counts;
    for (const Instance& inst : instances)
        for (const std::string& t : inst.tokens) ++counts[lower(t)];

    std::set<std::string> keep_always;
    if (catalog) {
        for (const RelationEntry& e : catalog->entries()) {
            for (const std::string& t : whitespace_split(e.description)) {
                const std::string lt = lower(t);
                ++counts[lt];
                keep_always.insert(lt);
            }
        }
    }

    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [tok, n] : counts)
        if (n >= min_freq || keep_always.count(tok)) kept.emplace_back(tok, n);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    v.types_ = std::move(types);
    v.tokens_ = {"<pad>", "<unk>", "<cls>", "<s>", "</s>", "<o>", "</o>"};
    for (const std::string& t : v.types_) {
        v.tokens_.push_back("<s:" + lower(t) + ">");
        v.tokens_.push_back("<o:" + lower(t) + ">");
    }
    for (const auto& [tok, n] : kept) {
        (void)n;
        if (std::find(v.tokens_.begin(), v.tokens_.end(), tok) == v.tokens_.end())
            v.tokens_.push_back(tok);
    }
    v.finish();
    return v;
}

std::size_t Vocab::id(const std::string& token) const {
    auto it = index_.find(lower(token));
    return it != index_.end() ? it->second : kUnk;
}

const std::string& Vocab::token(std::size_t id) const {
    if (id >= tokens_.size()) throw UsageError("vocab: token id out of range");
    return tokens_[id];
}

std::size_t Vocab::subj_open(const std::string& type, bool use_types) const {
    if (!use_types) return 3;
    auto it = index_.find("<s:" + lower(type) + ">");
    if (it == index_.end()) throw DataError("vocab: no subject marker for type " + type);
    return it->second;
}

std::size_t Vocab::obj_open(const std::string& type, bool use_types) const {
    if (!use_types) return 5;
    auto it = index_.find("<o:" + lower(type) + ">");
    if (it == index_.end()) throw DataError("vocab: no object marker for type " + type);
    return it->second;
}

std::vector<std::size_t> Vocab::encode(const std::vector<std::string>& tokens) const {
    std::vector<std::size_t> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens) out.push_back(id(t));
    return out;
}

std::vector<std::size_t> Vocab::encode_text(const std::string& text) const {
    return encode(whitespace_split(text));
}

std::string Vocab::to_json() const {
    json j;
    j["types"] = types_;
    j["tokens"] = tokens_;
    return j.dump();
}

Vocab Vocab::from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("vocab: invalid JSON: ") + e.what());
    }
    Vocab v;
    if (!j.contains("tokens") || !j["tokens"].is_array() || !j.contains("types"))
        throw DataError("vocab: expected {types, tokens}");
    v.types_ = j["types"].get<std::vector<std::string>>();
    v.tokens_ = j["tokens"].get<std::vector<std::string>>();
    v.finish();
    for (std::size_t i = 0; i + 1 < v.tokens_.size(); ++i)
        for (std::size_t k = i + 1; k < v.tokens_.size(); ++k)
            if (v.tokens_[i] == v.tokens_[k])
                throw DataError("vocab: duplicate token " + v.tokens_[i]);
    return v;
}

void Vocab::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open vocab for writing: " + path);
    os << to_json() << "\n";
    os.flush();
    if (!os) throw DataError("failed writing vocab: " + path);
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open vocab: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_json(ss.str());
}

} // namespace relret
