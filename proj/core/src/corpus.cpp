#include "relret/corpus.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"

namespace relret {

using nlohmann::json;

namespace {

std::uint32_t read_u32(std::istream& is, const std::string& path, const char* what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw DataError(path + ": truncated reading " + what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::string line_tag(std::size_t line_no) { return "line " + std::to_string(line_no); }

EntitySpan parse_span_entity(const json& j, std::size_t line_no, const char* field,
                             std::size_t n_tokens) {
    if (!j.contains("span") || !j["span"].is_array() || j["span"].size() != 2 ||
        !j["span"][0].is_number_unsigned() || !j["span"][1].is_number_unsigned())
        throw DataError(line_tag(line_no) + ": " + field + ".span must be [start,end]");
    EntitySpan e;
    e.start = j["span"][0].get<std::size_t>();
    e.end = j["span"][1].get<std::size_t>();
    if (e.start > e.end || e.end >= n_tokens)
        throw DataError(line_tag(line_no) + ": " + field + ".span out of range");
    if (j.contains("type")) e.type = j["type"].get<std::string>();
    return e;
}

} // namespace

VisualFeatures load_visual_features(const std::string& path, const std::string& source_id) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open visual features: " + path);
    const std::uint32_t P = read_u32(is, path, "patch count");
    const std::uint32_t Dv = read_u32(is, path, "feature dim");
    VisualFeatures v;
    v.source_id = source_id;
    v.patch_vectors = Tensor2D(P, Dv);
    for (double& x : v.patch_vectors.data) {
        const std::uint32_t bits = read_u32(is, path, "patch values");
        float f;
        std::memcpy(&f, &bits, 4);
        x = static_cast<double>(f);
    }
    ensure_finite(v.patch_vectors, "visual features");
    return v;
}

void save_visual_features(const std::string& path, const VisualFeatures& v) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open visual features for writing: " + path);
    write_u32(os, static_cast<std::uint32_t>(v.patch_vectors.rows));
    write_u32(os, static_cast<std::uint32_t>(v.patch_vectors.cols));
    for (double x : v.patch_vectors.data) {
        const float f = static_cast<float>(x);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        write_u32(os, bits);
    }
    os.flush();
    if (!os) throw DataError("failed writing visual features: " + path);
}

std::vector<Instance> load_corpus(const std::string& path, const std::string& visual_dir) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open corpus: " + path);

    std::string stem = path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);

    std::vector<Instance> out;
    std::map<std::string, VisualFeatures> cache;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(line_tag(line_no) + ": invalid JSON: " + e.what());
        }
        if (!j.is_object()) throw DataError(line_tag(line_no) + ": expected an object");

        Instance inst;
        inst.instance_id = stem + ":" + std::to_string(line_no);
        try {
            if (!j.contains("tokens") || !j["tokens"].is_array() || j["tokens"].empty())
                throw DataError(line_tag(line_no) + ": tokens must be a non-empty array");
            for (const auto& t : j["tokens"]) inst.tokens.push_back(t.get<std::string>());

            if (!j.contains("subj") || !j["subj"].is_object())
                throw DataError(line_tag(line_no) + ": subj missing");
            inst.subj = parse_span_entity(j["subj"], line_no, "subj", inst.tokens.size());

            if (!j.contains("obj") || !j["obj"].is_object())
                throw DataError(line_tag(line_no) + ": obj missing");
            const json& jo = j["obj"];
            if (jo.contains("visual_index")) {
                inst.obj_is_visual = true;
                inst.obj_visual_index = jo["visual_index"].get<std::size_t>();
                if (jo.contains("type")) inst.obj.type = jo["type"].get<std::string>();
            } else {
                inst.obj = parse_span_entity(jo, line_no, "obj", inst.tokens.size());
                const bool disjoint =
                    inst.subj.end < inst.obj.start || inst.obj.end < inst.subj.start;
                if (!disjoint)
                    throw DataError(line_tag(line_no) + ": subj and obj spans overlap");
            }

            if (!j.contains("relation") || !j["relation"].is_string() ||
                j["relation"].get<std::string>().empty())
                throw DataError(line_tag(line_no) + ": relation missing");
            inst.gold_relation = j["relation"].get<std::string>();

            if (j.contains("visual_id")) inst.visual_id = j["visual_id"].get<std::string>();
        } catch (const json::exception& e) {
            throw DataError(line_tag(line_no) + ": " + e.what());
        }

        if (!inst.visual_id.empty() && !visual_dir.empty()) {
            auto it = cache.find(inst.visual_id);
            if (it == cache.end()) {
                const std::string vpath = visual_dir + "/" + inst.visual_id + ".bin";
                it = cache.emplace(inst.visual_id,
                                   load_visual_features(vpath, inst.visual_id))
                         .first;
            }
            inst.visual = it->second;
        }
        if (inst.obj_is_visual) {
            if (inst.visual_id.empty())
                throw DataError(line_tag(line_no) +
                                ": obj.visual_index requires a visual_id");
            if (visual_dir.empty())
                throw DataError(line_tag(line_no) +
                                ": obj.visual_index requires loading with a visual dir");
            if (inst.obj_visual_index >= inst.visual.patches())
                throw DataError(line_tag(line_no) + ": obj.visual_index out of range");
        }
        out.push_back(std::move(inst));
    }
    return out;
}

void save_corpus(const std::string& path, const std::vector<Instance>& instances) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open corpus for writing: " + path);
    for (const Instance& inst : instances) {
        json j;
        j["tokens"] = inst.tokens;
        j["subj"] = {{"span", {inst.subj.start, inst.subj.end}}, {"type", inst.subj.type}};
        if (inst.obj_is_visual)
            j["obj"] = {{"visual_index", inst.obj_visual_index}, {"type", inst.obj.type}};
        else
            j["obj"] = {{"span", {inst.obj.start, inst.obj.end}}, {"type", inst.obj.type}};
        j["relation"] = inst.gold_relation;
        if (!inst.visual_id.empty()) j["visual_id"] = inst.visual_id;
        os << j.dump() << "\n";
    }
    os.flush();
    if (!os) throw DataError("failed writing corpus: " + path);
}

} // namespace relret
