#include <doctest.h>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "relret/error.hpp"
#include "relret/lexicon.hpp"
#include "relret/markers.hpp"
#include "relret/vocab.hpp"

using namespace relret;
using relret::testing::fixture;

namespace {

Vocab toy_vocab() {
    Instance inst;
    inst.tokens = {"peter", "married", "mary", "lives", "in", "berlin", "filler"};
    inst.subj = {0, 0, "PER"};
    inst.obj = {2, 2, "PER"};
    inst.gold_relation = "r";
    return Vocab::build({inst}, 1);
}

Instance subj_then_obj() {
    Instance inst;
    inst.tokens = {"peter", "married", "mary"};
    inst.subj = {0, 0, "PER"};
    inst.obj = {2, 2, "PER"};
    inst.gold_relation = "r";
    return inst;
}

} // namespace

TEST_SUITE_BEGIN("markers");

TEST_CASE("subject-first sentence gets typed markers and anchor indices") {
    Vocab v = toy_vocab();
    MarkedSequence m = inject_type_prompts(subj_then_obj(), v, {});
    std::vector<std::size_t> want = {
        Vocab::kCls,       v.id("<s:per>"), v.id("peter"), v.id("</s>"),
        v.id("married"),   v.id("<o:per>"), v.id("mary"),  v.id("</o>"),
    };
    CHECK(m.token_ids == want);
    CHECK(m.s_tilde == 1);
    CHECK(m.o_tilde == 5);
    CHECK(m.text_len == 8);
    CHECK(m.has_positions);
    CHECK_FALSE(m.obj_visual);
    CHECK(m.pad_mask == std::vector<bool>(8, true));
}

TEST_CASE("untyped markers when use_types is off") {
    Vocab v = toy_vocab();
    MarkConfig cfg;
    cfg.use_types = false;
    MarkedSequence m = inject_type_prompts(subj_then_obj(), v, cfg);
    std::vector<std::size_t> want = {
        Vocab::kCls,     v.id("<s>"),  v.id("peter"), v.id("</s>"),
        v.id("married"), v.id("<o>"),  v.id("mary"),  v.id("</o>"),
    };
    CHECK(m.token_ids == want);
    CHECK(m.s_tilde == 1);
    CHECK(m.o_tilde == 5);
}

TEST_CASE("no markers at all when use_positions is off") {
    Vocab v = toy_vocab();
    MarkConfig cfg;
    cfg.use_positions = false;
    MarkedSequence m = inject_type_prompts(subj_then_obj(), v, cfg);
    std::vector<std::size_t> want = {Vocab::kCls, v.id("peter"), v.id("married"),
                                     v.id("mary")};
    CHECK(m.token_ids == want);
    CHECK_FALSE(m.has_positions);
}

TEST_CASE("object before subject keeps every marker at its own span") {
    Vocab v = toy_vocab();
    Instance inst;
    inst.tokens = {"berlin", "is", "where", "peter", "lives"};
    inst.subj = {3, 3, "PER"};
    inst.obj = {0, 0, "LOC"};
    inst.gold_relation = "r";
    MarkedSequence m = inject_type_prompts(inst, v, {});
    // CLS <o:loc> berlin </o> is where <s:per> peter </s> lives
    REQUIRE(m.token_ids.size() == 10);
    CHECK(m.token_ids[1] == v.id("<o:loc>"));
    CHECK(m.token_ids[2] == v.id("berlin"));
    CHECK(m.token_ids[3] == v.id("</o>"));
    CHECK(m.token_ids[6] == v.id("<s:per>"));
    CHECK(m.token_ids[7] == v.id("peter"));
    CHECK(m.token_ids[8] == v.id("</s>"));
    CHECK(m.o_tilde == 1);
    CHECK(m.s_tilde == 6);
}

TEST_CASE("multi-token spans wrap the whole span") {
    Vocab v = Vocab::build(
        []() {
            Instance i;
            i.tokens = {"the", "red", "square", "hosted", "it"};
            i.subj = {1, 2, "LOC"};
            i.obj = {4, 4, "MISC"};
            i.gold_relation = "r";
            return std::vector<Instance>{i};
        }(),
        1);
    Instance inst;
    inst.tokens = {"the", "red", "square", "hosted", "it"};
    inst.subj = {1, 2, "LOC"};
    inst.obj = {4, 4, "MISC"};
    inst.gold_relation = "r";
    MarkedSequence m = inject_type_prompts(inst, v, {});
    std::vector<std::size_t> want = {
        Vocab::kCls,    v.id("the"),    v.id("<s:loc>"),  v.id("red"),
        v.id("square"), v.id("</s>"),   v.id("hosted"),   v.id("<o:misc>"),
        v.id("it"),     v.id("</o>"),
    };
    CHECK(m.token_ids == want);
    CHECK(m.s_tilde == 2);
    CHECK(m.o_tilde == 7);
}

TEST_CASE("marked sequence strips back to the original tokens") {
    Vocab v = toy_vocab();
    Instance inst = subj_then_obj();
    MarkedSequence m = inject_type_prompts(inst, v, {});
    std::vector<std::string> recovered;
    for (std::size_t id : m.token_ids) {
        if (id == Vocab::kCls || v.is_marker(id)) continue;
        recovered.push_back(v.token(id));
    }
    CHECK(recovered == inst.tokens);
}

TEST_CASE("visual object anchors into the patch segment") {
    Vocab v = toy_vocab();
    Instance inst;
    inst.tokens = {"peter", "lives", "in", "berlin"};
    inst.subj = {0, 0, "PER"};
    inst.obj_is_visual = true;
    inst.obj_visual_index = 2;
    inst.obj.type = "LOC";
    inst.gold_relation = "r";
    inst.visual_id = "img";
    MarkedSequence m = inject_type_prompts(inst, v, {});
    // CLS <s:per> peter </s> lives in berlin
    CHECK(m.text_len == 7);
    CHECK(m.obj_visual);
    CHECK(m.s_tilde == 1);
    CHECK(m.o_tilde == 7 + 2);
    for (std::size_t id : m.token_ids) {
        CHECK(id != v.id("<o:loc>"));
        CHECK(id != v.obj_close());
    }
}

TEST_CASE("types fall back to the lexicon") {
    Vocab v = toy_vocab();
    Lexicon lex = load_lexicon(fixture("lexicon.json"));
    Instance inst = subj_then_obj();
    inst.subj.type.clear();
    inst.obj.type.clear();
    inst.tokens = {"peter", "visited", "berlin"};
    inst.obj = {2, 2, ""};
    MarkedSequence m = inject_type_prompts(inst, v, {}, lex);
    CHECK(m.token_ids[1] == v.id("<s:per>"));
    CHECK(m.token_ids[m.o_tilde] == v.id("<o:loc>"));

    // without the lexicon the fallback is MISC
    MarkedSequence f = inject_type_prompts(inst, v, {});
    CHECK(f.token_ids[1] == v.id("<s:misc>"));
    CHECK(f.token_ids[f.o_tilde] == v.id("<o:misc>"));
}

TEST_CASE("truncation drops trailing plain tokens but never markers") {
    Vocab v = toy_vocab();
    Instance inst;
    inst.tokens = {"peter", "married", "mary", "lives", "in", "berlin", "filler"};
    inst.subj = {0, 0, "PER"};
    inst.obj = {2, 2, "PER"};
    inst.gold_relation = "r";

    MarkConfig cfg;
    cfg.max_text_len = 9;
    MarkedSequence m = inject_type_prompts(inst, v, cfg);
    CHECK(m.text_len == 9);
    CHECK(m.token_ids.back() == v.id("lives"));
    CHECK(m.s_tilde == 1);
    CHECK(m.o_tilde == 5);

    // cutting into the object close marker is refused
    cfg.max_text_len = 7;
    CHECK_THROWS_AS(inject_type_prompts(inst, v, cfg), DataError);
}

TEST_CASE("span validation") {
    Vocab v = toy_vocab();
    Instance inst = subj_then_obj();

    SUBCASE("empty tokens") {
        inst.tokens.clear();
        CHECK_THROWS_AS(inject_type_prompts(inst, v, {}), DataError);
    }
    SUBCASE("subject span past the end") {
        inst.subj = {0, 9, "PER"};
        CHECK_THROWS_AS(inject_type_prompts(inst, v, {}), DataError);
    }
    SUBCASE("overlapping spans") {
        inst.subj = {0, 2, "PER"};
        inst.obj = {2, 2, "PER"};
        CHECK_THROWS_AS(inject_type_prompts(inst, v, {}), DataError);
    }
    SUBCASE("max_text_len too small to hold anything") {
        MarkConfig cfg;
        cfg.max_text_len = 1;
        CHECK_THROWS_AS(inject_type_prompts(inst, v, cfg), ConfigError);
    }
}

TEST_SUITE_END();
