#include "relret/lexicon.hpp"

#include <cctype>
#include <fstream>

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
} // namespace

Lexicon load_lexicon(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open lexicon: " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw DataError("lexicon " + path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError("lexicon " + path + ": expected an object");
    Lexicon lex;
    for (const auto& [surface, tag] : j.items()) {
        if (!tag.is_string())
            throw DataError("lexicon: tag for " + surface + " must be a string");
        lex[lower(surface)] = tag.get<std::string>();
    }
    return lex;
}

void save_lexicon(const std::string& path, const Lexicon& lexicon) {
    json j = json::object();
    for (const auto& [surface, tag] : lexicon) j[surface] = tag;
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open lexicon for writing: " + path);
    os << j.dump(2) << "\n";
    os.flush();
    if (!os) throw DataError("failed writing lexicon: " + path);
}

std::string tag_entity_type(const std::vector<std::string>& tokens, const EntitySpan& span,
                            const std::string& gold_type, const Lexicon& lexicon) {
    if (!gold_type.empty()) return gold_type;
    std::string surface;
    for (std::size_t i = span.start; i <= span.end && i < tokens.size(); ++i) {
        if (!surface.empty()) surface += ' ';
        surface += lower(tokens[i]);
    }
    auto it = lexicon.find(surface);
    return it != lexicon.end() ? it->second : "MISC";
}

std::pair<std::string, std::string> tag_entity_types(const Instance& inst,
                                                     const Lexicon& lexicon) {
    const std::string subj =
        tag_entity_type(inst.tokens, inst.subj, inst.subj.type, lexicon);
    std::string obj;
    if (inst.obj_is_visual)
        obj = inst.obj.type.empty() ? "MISC" : inst.obj.type;
    else
        obj = tag_entity_type(inst.tokens, inst.obj, inst.obj.type, lexicon);
    return {subj, obj};
}

} // namespace relret
