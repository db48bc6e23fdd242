#include "relret/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"
#include "relret/rng.hpp"

namespace relret {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, std::string>>& trigger_pairs() {
    static const std::vector<std::pair<std::string, std::string>> v = {
        {"visits", "tours"},     {"founded", "launched"}, {"leads", "chairs"},
        {"acquired", "bought"},  {"hosts", "stages"},     {"joined", "entered"},
        {"backs", "funds"},      {"praised", "lauded"},   {"signed", "inked"},
        {"opened", "unveiled"},  {"filmed", "recorded"},  {"borders", "abuts"},
        {"married", "wed"},      {"coached", "mentored"}, {"owns", "keeps"},
        {"debated", "disputed"}, {"toppled", "ousted"},   {"powers", "drives"},
        {"guards", "patrols"},   {"maps", "charts"}};
    return v;
}

const std::vector<std::pair<std::string, std::string>>& signature_pool() {
    static const std::vector<std::pair<std::string, std::string>> v = {
        {"PER", "LOC"}, {"ORG", "LOC"}, {"PER", "ORG"},  {"ORG", "ORG"},
        {"PER", "PER"}, {"LOC", "LOC"}, {"ORG", "PER"},  {"LOC", "ORG"},
        {"PER", "MISC"}, {"ORG", "MISC"}, {"LOC", "MISC"}, {"MISC", "LOC"}};
    return v;
}

const std::vector<std::string>& name_pool() {
    static const std::vector<std::string> v = {
        "arden",  "bellamy", "corin",  "devon",  "ellery", "finley",
        "harlow", "jules",   "kendall", "lennox", "marlow", "noble",
        "oakes",  "paxton",  "quincy", "rowan",  "sable",  "tatum"};
    return v;
}

const std::vector<std::string>& filler_pool() {
    static const std::vector<std::string> v = {
        "the",    "a",      "near",   "with",  "after",  "before",
        "during", "report", "meeting", "city",  "team",   "event",
        "crowd",  "local",  "annual", "early", "late",   "public",
        "quiet",  "brief",  "formal", "joint", "small",  "major"};
    return v;
}

std::string type_word(const std::string& type) {
    if (type == "PER") return "person";
    if (type == "ORG") return "organization";
    if (type == "LOC") return "place";
    return "thing";
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct Spec {
    std::string label;
    std::string subj_type, obj_type;
    std::vector<std::string> triggers;
    bool visual_informative = false;
    std::vector<double> signature;
};

} // namespace

std::string SynthTruth::to_json() const {
    json j;
    j["noise"] = noise;
    j["patches"] = patches;
    j["visual_dim"] = visual_dim;
    j["signature_scale"] = signature_scale;
    j["none_fraction"] = none_fraction;
    j["relations"] = json::array();
    for (const RelationTruth& r : relations) {
        json jr;
        jr["label"] = r.label;
        jr["subj_type"] = r.subj_type;
        jr["obj_type"] = r.obj_type;
        jr["triggers"] = r.triggers;
        jr["visual_informative"] = r.visual_informative;
        jr["visual_signature"] = r.visual_signature;
        j["relations"].push_back(std::move(jr));
    }
    return j.dump(2);
}

SynthData generate_synthetic(const SynthConfig& config) {
    if (config.K < 2) throw ConfigError("generate_synthetic: K must be >= 2");
    const std::size_t R = config.K - 1; // non-None relations
    if (R > trigger_pairs().size())
        throw ConfigError("generate_synthetic: K exceeds the trigger pool (max " +
                          std::to_string(trigger_pairs().size() + 1) + ")");
    if (config.type_confusable && R % 2 != 0)
        throw ConfigError("generate_synthetic: type_confusable needs an even relation count");
    if (config.visual_informative_fraction < 0.0 || config.visual_informative_fraction > 1.0)
        throw ConfigError("generate_synthetic: visual_informative_fraction outside [0,1]");
    if (config.noise < 0.0) throw ConfigError("generate_synthetic: negative noise");
    if (config.none_fraction >= 1.0)
        throw ConfigError("generate_synthetic: none_fraction must be below 1");

    const std::size_t n_vis = static_cast<std::size_t>(
        std::lround(config.visual_informative_fraction * static_cast<double>(R)));
    if (n_vis > 0 && config.visual_dim == 0)
        throw ConfigError("generate_synthetic: visual fraction > 0 with visual_dim = 0");
    if (n_vis > 0 && config.patches == 0)
        throw ConfigError("generate_synthetic: visual fraction > 0 with no patches");
    if (n_vis > config.visual_dim)
        throw ConfigError("generate_synthetic: need visual_dim >= " + std::to_string(n_vis) +
                          " for distinct visual signatures");

    std::vector<Spec> specs(R);
    std::vector<std::size_t> used_sigs;
    for (std::size_t m = 0; m < R; ++m) {
        Spec& s = specs[m];
        const std::size_t trig_idx = config.type_confusable ? m / 2 : m;
        s.triggers = {trigger_pairs()[trig_idx].first, trigger_pairs()[trig_idx].second};
        // confusable pairs get distinct signatures; otherwise neighbors share one
        const std::size_t sig_idx =
            (config.type_confusable ? m : m / 2) % signature_pool().size();
        s.subj_type = signature_pool()[sig_idx].first;
        s.obj_type = signature_pool()[sig_idx].second;
        used_sigs.push_back(sig_idx);
        s.label = "/" + lower(s.subj_type) + "/" + lower(s.obj_type) + "/" + s.triggers[0];
    }
    std::sort(used_sigs.begin(), used_sigs.end());
    used_sigs.erase(std::unique(used_sigs.begin(), used_sigs.end()), used_sigs.end());

    std::sort(specs.begin(), specs.end(),
              [](const Spec& a, const Spec& b) { return a.label < b.label; });
    std::size_t assigned = 0;
    for (Spec& s : specs) {
        if (assigned >= n_vis) break;
        s.visual_informative = true;
        s.signature.assign(config.visual_dim, 0.0);
        s.signature[assigned] = 2.0;
        ++assigned;
    }

    std::vector<RelationEntry> entries;
    for (const Spec& s : specs) {
        RelationEntry e;
        e.label = s.label;
        e.description = "the subject " + type_word(s.subj_type) + " " + s.triggers[0] +
                        " or " + s.triggers[1] + " the object " + type_word(s.obj_type);
        if (s.visual_informative) e.description += " as shown in the image";
        e.subj_types = {s.subj_type};
        e.obj_types = {s.obj_type};
        entries.push_back(std::move(e));
    }
    {
        RelationEntry none;
        none.label = "None";
        none.description = "no relation holds between the subject entity and the object entity";
        none.subj_types = {"LOC", "MISC", "ORG", "PER"};
        none.obj_types = {"LOC", "MISC", "ORG", "PER"};
        entries.push_back(std::move(none));
    }

    SynthData out;
    out.catalog = RelationCatalog::from_entries(std::move(entries));

    out.truth.noise = config.noise;
    out.truth.none_fraction = config.none_fraction;
    out.truth.patches = config.visual_dim > 0 ? config.patches : 0;
    out.truth.visual_dim = config.visual_dim;
    out.truth.relations.resize(out.catalog.size());
    for (const Spec& s : specs) {
        RelationTruth t;
        t.label = s.label;
        t.subj_type = s.subj_type;
        t.obj_type = s.obj_type;
        t.triggers = s.triggers;
        t.visual_informative = s.visual_informative;
        t.visual_signature = s.signature;
        out.truth.relations[out.catalog.index_of(s.label)] = std::move(t);
    }
    {
        RelationTruth none;
        none.label = "None";
        out.truth.relations[out.catalog.index_of("None")] = std::move(none);
    }

    out.lexicon = {{"paris", "LOC"},  {"lyon", "LOC"},    {"tokyo", "LOC"},
                   {"acme", "ORG"},   {"globex", "ORG"},  {"initech", "ORG"},
                   {"alice", "PER"},  {"bernard", "PER"}, {"clara", "PER"},
                   {"comet", "MISC"}, {"relic", "MISC"},  {"prism", "MISC"}};

    Rng rng(config.seed);
    auto sample = [&](const std::string& prefix, std::size_t index) {
        Instance inst;
        inst.instance_id = prefix + ":" + std::to_string(index + 1);

        const std::size_t none_index = out.catalog.index_of("None");
        std::size_t k;
        if (config.none_fraction < 0.0) {
            k = rng.below(out.catalog.size());
        } else if (rng.uniform() < config.none_fraction) {
            k = none_index;
        } else {
            k = rng.below(out.catalog.size() - 1);
            if (k >= none_index) ++k;
        }
        const RelationTruth& rel = out.truth.relations[k];
        inst.gold_relation = rel.label;

        std::string subj_type = rel.subj_type, obj_type = rel.obj_type;
        if (rel.label == "None") {
            const auto& sig = signature_pool()[used_sigs[rng.below(used_sigs.size())]];
            subj_type = sig.first;
            obj_type = sig.second;
        }

        const std::size_t n1 = rng.below(name_pool().size());
        std::size_t n2 = rng.below(name_pool().size() - 1);
        if (n2 >= n1) ++n2;
        const std::string subj_name = name_pool()[n1];
        const std::string obj_name = name_pool()[n2];

        const bool subj_first = rng.uniform() >= 0.3;
        const bool emit_trigger = !rel.triggers.empty() && !rel.visual_informative;
        std::string trigger;
        if (emit_trigger) trigger = rel.triggers[rng.below(rel.triggers.size())];

        auto filler = [&] { return filler_pool()[rng.below(filler_pool().size())]; };
        std::vector<std::string>& toks = inst.tokens;
        std::size_t first_pos = 0, second_pos = 0;
        for (std::size_t i = 0, n = 1 + rng.below(2); i < n; ++i) toks.push_back(filler());
        first_pos = toks.size();
        toks.push_back(subj_first ? subj_name : obj_name);
        for (std::size_t i = 0, n = 1 + rng.below(2); i < n; ++i) toks.push_back(filler());
        if (emit_trigger) toks.push_back(trigger);
        for (std::size_t i = 0, n = 1 + rng.below(2); i < n; ++i) toks.push_back(filler());
        second_pos = toks.size();
        toks.push_back(subj_first ? obj_name : subj_name);
        for (std::size_t i = 0, n = rng.below(2); i < n; ++i) toks.push_back(filler());

        inst.subj.start = inst.subj.end = subj_first ? first_pos : second_pos;
        inst.subj.type = subj_type;
        inst.obj.start = inst.obj.end = subj_first ? second_pos : first_pos;
        inst.obj.type = obj_type;

        if (config.visual_dim > 0) {
            inst.visual_id = "img_" + prefix + "_" + std::to_string(index + 1);
            Tensor2D v(config.patches, config.visual_dim);
            for (double& x : v.data)
                x = static_cast<double>(static_cast<float>(config.noise * rng.normal()));
            if (rel.visual_informative) {
                const std::size_t p = rng.below(config.patches);
                for (std::size_t d = 0; d < config.visual_dim; ++d)
                    v.at(p, d) = static_cast<double>(
                        static_cast<float>(v.at(p, d) + rel.visual_signature[d]));
            }
            inst.visual.patch_vectors = std::move(v);
            inst.visual.source_id = inst.visual_id;
        }
        return inst;
    };

    out.train.reserve(config.n_train);
    for (std::size_t i = 0; i < config.n_train; ++i) out.train.push_back(sample("train", i));
    out.eval.reserve(config.n_eval);
    for (std::size_t i = 0; i < config.n_eval; ++i) out.eval.push_back(sample("eval", i));
    return out;
}

} // namespace relret
