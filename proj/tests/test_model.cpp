#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "relret/error.hpp"
#include "relret/model.hpp"

using namespace relret;

namespace {

EncoderConfig tiny_config() {
    EncoderConfig c;
    c.hidden = 8;
    c.num_fusion_layers = 1;
    c.num_heads = 2;
    c.ffn_width = 16;
    c.max_text_len = 12;
    c.visual_dim = 4;
    c.max_patches = 3;
    c.rel_layers = 1;
    c.rel_ffn_width = 16;
    c.max_rel_len = 10;
    c.vocab_size = 40;
    c.num_relations = 5;
    return c;
}

std::vector<std::string> names(const ParamSet& p) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < p.count(); ++i) out.push_back(p.name_at(i));
    return out;
}

} // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("parameter inventory follows the fixed order") {
    ParamSet p = build_params(tiny_config(), 1);
    std::vector<std::string> want = {
        "tok_emb",        "pos_emb",        "vis_proj",       "vis_pos_emb",
        "fusion.0.ln1.g", "fusion.0.ln1.b", "fusion.0.wq",    "fusion.0.wk",
        "fusion.0.wv",    "fusion.0.wo",    "fusion.0.ln2.g", "fusion.0.ln2.b",
        "fusion.0.ffn.w1", "fusion.0.ffn.b1", "fusion.0.ffn.w2", "fusion.0.ffn.b2",
        "pair.we",        "pair.be",        "rel.tok_emb",    "rel.pos_emb",
        "rel.0.ln1.g",    "rel.0.ln1.b",    "rel.0.wq",       "rel.0.wk",
        "rel.0.wv",       "rel.0.wo",       "rel.0.ln2.g",    "rel.0.ln2.b",
        "rel.0.ffn.w1",   "rel.0.ffn.b1",   "rel.0.ffn.w2",   "rel.0.ffn.b2",
    };
    CHECK(names(p) == want);
    CHECK(p.get("tok_emb").rows == 40);
    CHECK(p.get("tok_emb").cols == 8);
    CHECK(p.get("vis_proj").rows == 4);
    CHECK(p.get("pair.we").rows == 16);
    CHECK(p.get("fusion.0.ffn.w1").cols == 16);
}

TEST_CASE("use_visual does not change which tensors exist or their values") {
    EncoderConfig on = tiny_config();
    EncoderConfig off = tiny_config();
    off.use_visual = false;
    ParamSet a = build_params(on, 648);
    ParamSet b = build_params(off, 648);
    CHECK(names(a) == names(b));
    CHECK(a.flatten() == b.flatten());
}

TEST_CASE("visual tensors vanish only when visual_dim is zero") {
    EncoderConfig c = tiny_config();
    c.visual_dim = 0;
    ParamSet p = build_params(c, 1);
    CHECK_FALSE(p.has("vis_proj"));
    CHECK_FALSE(p.has("vis_pos_emb"));
}

TEST_CASE("classification head extends the retrieval parameters in place") {
    EncoderConfig ret = tiny_config();
    EncoderConfig cls = tiny_config();
    cls.head = HeadKind::classification;
    ParamSet a = build_params(ret, 648);
    ParamSet b = build_params(cls, 648);
    REQUIRE(b.count() == a.count() + 2);
    CHECK(b.name_at(b.count() - 2) == "cls.w");
    CHECK(b.name_at(b.count() - 1) == "cls.b");
    for (std::size_t i = 0; i < a.count(); ++i) {
        CHECK(b.name_at(i) == a.name_at(i));
        CHECK(b.tensor_at(i) == a.tensor_at(i));
    }
    CHECK(b.get("cls.w").rows == 8);
    CHECK(b.get("cls.w").cols == 5);
}

TEST_CASE("disabling the fusion encoder equals an explicit depth of zero") {
    EncoderConfig off = tiny_config();
    off.use_fusion_encoder = false;
    off.num_fusion_layers = 2;
    EncoderConfig zero = tiny_config();
    zero.num_fusion_layers = 0;
    CHECK(off.effective_fusion_layers() == 0);
    CHECK(zero.effective_fusion_layers() == 0);
    ParamSet a = build_params(off, 648);
    ParamSet b = build_params(zero, 648);
    CHECK(names(a) == names(b));
    CHECK(a.flatten() == b.flatten());
    CHECK(tiny_config().effective_fusion_layers() == 1);
}

TEST_CASE("seed determines everything") {
    ParamSet a = build_params(tiny_config(), 7);
    ParamSet b = build_params(tiny_config(), 7);
    ParamSet c = build_params(tiny_config(), 8);
    CHECK(a.flatten() == b.flatten());
    CHECK(a.flatten() != c.flatten());
}

TEST_CASE("initialization follows the stated families") {
    ParamSet p = build_params(tiny_config(), 3);
    for (double v : p.get("tok_emb").data) CHECK(std::abs(v) <= 0.04);
    for (double v : p.get("pos_emb").data) CHECK(std::abs(v) <= 0.04);
    for (double v : p.get("fusion.0.ln1.g").data) CHECK(v == 1.0);
    for (double v : p.get("fusion.0.ln1.b").data) CHECK(v == 0.0);
    for (double v : p.get("pair.be").data) CHECK(v == 0.0);
    const double bound_wq = std::sqrt(6.0 / (8.0 + 8.0));
    for (double v : p.get("fusion.0.wq").data) CHECK(std::abs(v) <= bound_wq);
    const double bound_we = std::sqrt(6.0 / (16.0 + 8.0));
    for (double v : p.get("pair.we").data) CHECK(std::abs(v) <= bound_we);
    // not degenerate
    double sum = 0.0;
    for (double v : p.get("fusion.0.wq").data) sum += std::abs(v);
    CHECK(sum > 0.0);
}

TEST_CASE("config validation rejects inconsistent settings") {
    auto expect_bad = [](EncoderConfig c) {
        CHECK_THROWS_AS(build_params(c, 1), ConfigError);
    };
    EncoderConfig base = tiny_config();
    CHECK_NOTHROW(base.validate());

    EncoderConfig c = base;
    c.hidden = 0;
    expect_bad(c);

    c = base;
    c.hidden = 6;
    c.num_heads = 4;
    expect_bad(c);

    c = base;
    c.ffn_width = 0;
    expect_bad(c);

    c = base;
    c.max_text_len = 1;
    expect_bad(c);

    c = base;
    c.max_rel_len = 0;
    expect_bad(c);

    c = base;
    c.max_patches = 0;
    expect_bad(c);

    c = base;
    c.max_patches = 0;
    c.use_visual = false;
    CHECK_NOTHROW(c.validate());

    c = base;
    c.activation = "relu";
    expect_bad(c);

    c = base;
    c.vocab_size = 0;
    expect_bad(c);

    c = base;
    c.head = HeadKind::classification;
    c.num_relations = 0;
    expect_bad(c);
}

TEST_CASE("config json round trip") {
    EncoderConfig c = tiny_config();
    c.activation = "identity";
    c.use_visual = false;
    c.use_fusion_encoder = false;
    c.use_types = false;
    c.use_positions = false;
    c.head = HeadKind::classification;
    EncoderConfig back = EncoderConfig::from_json(c.to_json());
    CHECK(back.hidden == c.hidden);
    CHECK(back.num_fusion_layers == c.num_fusion_layers);
    CHECK(back.num_heads == c.num_heads);
    CHECK(back.ffn_width == c.ffn_width);
    CHECK(back.max_text_len == c.max_text_len);
    CHECK(back.visual_dim == c.visual_dim);
    CHECK(back.max_patches == c.max_patches);
    CHECK(back.rel_layers == c.rel_layers);
    CHECK(back.rel_ffn_width == c.rel_ffn_width);
    CHECK(back.max_rel_len == c.max_rel_len);
    CHECK(back.activation == c.activation);
    CHECK(back.use_visual == c.use_visual);
    CHECK(back.use_fusion_encoder == c.use_fusion_encoder);
    CHECK(back.use_types == c.use_types);
    CHECK(back.use_positions == c.use_positions);
    CHECK(back.head == c.head);
    CHECK(back.vocab_size == c.vocab_size);
    CHECK(back.num_relations == c.num_relations);

    CHECK_THROWS_AS(EncoderConfig::from_json("{bad"), ConfigError);
    CHECK_THROWS_AS(EncoderConfig::from_json(R"({"head": "softmax"})"), ConfigError);
}

TEST_CASE("head names round trip") {
    CHECK(head_name(HeadKind::retrieval) == "retrieval");
    CHECK(head_name(HeadKind::classification) == "classification");
    CHECK(head_from_name("retrieval") == HeadKind::retrieval);
    CHECK(head_from_name("classification") == HeadKind::classification);
    CHECK_THROWS_AS(head_from_name("other"), ConfigError);
}

TEST_SUITE_END();
