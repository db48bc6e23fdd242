#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "relret/error.hpp"
#include "relret/markers.hpp"
#include "relret/pair_encoder.hpp"
#include "relret/vocab.hpp"

using namespace relret;

namespace {

Vocab toy_vocab() {
    Instance inst;
    inst.tokens = {"peter", "married", "mary", "near", "berlin", "filler"};
    inst.subj = {0, 0, "PER"};
    inst.obj = {2, 2, "PER"};
    inst.gold_relation = "r";
    return Vocab::build({inst}, 1);
}

EncoderConfig toy_config(const Vocab& v) {
    EncoderConfig c;
    c.hidden = 8;
    c.num_fusion_layers = 1;
    c.num_heads = 2;
    c.ffn_width = 16;
    c.max_text_len = 16;
    c.visual_dim = 4;
    c.max_patches = 4;
    c.rel_layers = 1;
    c.rel_ffn_width = 16;
    c.max_rel_len = 8;
    c.vocab_size = v.size();
    c.num_relations = 3;
    return c;
}

Instance text_instance() {
    Instance inst;
    inst.tokens = {"peter", "married", "mary"};
    inst.subj = {0, 0, "PER"};
    inst.obj = {2, 2, "PER"};
    inst.gold_relation = "r";
    return inst;
}

Instance visual_instance() {
    Instance inst;
    inst.tokens = {"peter", "near", "berlin"};
    inst.subj = {0, 0, "PER"};
    inst.obj_is_visual = true;
    inst.obj_visual_index = 1;
    inst.obj.type = "LOC";
    inst.gold_relation = "r";
    inst.visual_id = "img";
    inst.visual.source_id = "img";
    inst.visual.patch_vectors = Tensor2D::from_rows({{0.5, -0.25, 1.0, 0.0},
                                                     {1.5, 0.25, -0.75, 2.0},
                                                     {-1.0, 0.5, 0.125, -0.5}});
    return inst;
}

} // namespace

TEST_SUITE_BEGIN("pair_encoder");

TEST_CASE("text rows are token plus positional embeddings") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    ParamSet params = build_params(cfg, 17);
    MarkedSequence m = inject_type_prompts(text_instance(), v, {true, true, cfg.max_text_len});
    Tensor2D x = encode_text(m, params, cfg);
    REQUIRE(x.rows == m.token_ids.size());
    REQUIRE(x.cols == cfg.hidden);
    const Tensor2D& tok = params.get("tok_emb");
    const Tensor2D& pos = params.get("pos_emb");
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            CHECK(x.at(i, j) == tok.at(m.token_ids[i], j) + pos.at(i, j));
}

TEST_CASE("visual adapter projects patches and adds visual positions") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    ParamSet params = build_params(cfg, 17);
    Instance inst = visual_instance();
    Tensor2D x = adapt_visual(inst.visual, params, cfg);
    REQUIRE(x.rows == 3);
    REQUIRE(x.cols == cfg.hidden);
    Tensor2D proj = matmul(inst.visual.patch_vectors, params.get("vis_proj"));
    const Tensor2D& vpos = params.get("vis_pos_emb");
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            CHECK(x.at(i, j) == proj.at(i, j) + vpos.at(i, j));

    SUBCASE("disabled segment is empty") {
        EncoderConfig off = cfg;
        off.use_visual = false;
        Tensor2D e = adapt_visual(inst.visual, params, off);
        CHECK(e.rows == 0);
        CHECK(e.cols == cfg.hidden);
    }
    SUBCASE("dim mismatch") {
        VisualFeatures bad = inst.visual;
        bad.patch_vectors = Tensor2D(2, 3, 1.0);
        CHECK_THROWS_AS(adapt_visual(bad, params, cfg), DataError);
    }
    SUBCASE("too many patches") {
        VisualFeatures bad = inst.visual;
        bad.patch_vectors = Tensor2D(cfg.max_patches + 1, cfg.visual_dim, 0.5);
        CHECK_THROWS_AS(adapt_visual(bad, params, cfg), DataError);
    }
}

TEST_CASE("disabling visual input equals encoding without patches") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    ParamSet params = build_params(cfg, 648);

    Instance with_patches = text_instance();
    with_patches.visual_id = "img";
    with_patches.visual.patch_vectors = Tensor2D(2, 4, 0.7);

    Instance bare = text_instance();

    EncoderConfig off = cfg;
    off.use_visual = false;
    PairEmbedding a = encode_pair(with_patches, v, params, off);
    PairEmbedding b = encode_pair(bare, v, params, cfg);
    CHECK(a.h_e == b.h_e);
    CHECK(a.h_s == b.h_s);
    CHECK(a.h_o == b.h_o);
}

TEST_CASE("entity states are the marker rows of the fused sequence") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    cfg.num_fusion_layers = 0; // fusion is the identity, rows stay inspectable
    ParamSet params = build_params(cfg, 21);
    Instance inst = text_instance();
    MarkedSequence m = inject_type_prompts(inst, v, {true, true, cfg.max_text_len});
    Tensor2D x = encode_text(m, params, cfg);
    PairEmbedding e = encode_pair(inst, v, params, cfg);
    REQUIRE(e.h_s.rows == 1);
    for (std::size_t j = 0; j < cfg.hidden; ++j) {
        CHECK(e.h_s.at(0, j) == x.at(m.s_tilde, j));
        CHECK(e.h_o.at(0, j) == x.at(m.o_tilde, j));
    }
}

TEST_CASE("a visual object anchors at its patch row") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    cfg.num_fusion_layers = 0;
    ParamSet params = build_params(cfg, 21);
    Instance inst = visual_instance();
    MarkedSequence m = inject_type_prompts(inst, v, {true, true, cfg.max_text_len});
    Tensor2D xi = adapt_visual(inst.visual, params, cfg);
    PairEmbedding e = encode_pair(inst, v, params, cfg);
    REQUIRE(m.o_tilde == m.text_len + inst.obj_visual_index);
    for (std::size_t j = 0; j < cfg.hidden; ++j)
        CHECK(e.h_o.at(0, j) == xi.at(inst.obj_visual_index, j));
}

TEST_CASE("without positions both states are the masked mean") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    cfg.num_fusion_layers = 0;
    cfg.use_positions = false;
    ParamSet params = build_params(cfg, 33);
    Instance inst = visual_instance();
    PairEmbedding e = encode_pair(inst, v, params, cfg);
    CHECK(e.h_s == e.h_o);

    MarkedSequence m =
        inject_type_prompts(inst, v, {cfg.use_types, false, cfg.max_text_len});
    Tensor2D xt = encode_text(m, params, cfg);
    Tensor2D xi = adapt_visual(inst.visual, params, cfg);
    const std::size_t total = xt.rows + xi.rows;
    for (std::size_t j = 0; j < cfg.hidden; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < xt.rows; ++i) sum += xt.at(i, j);
        for (std::size_t i = 0; i < xi.rows; ++i) sum += xi.at(i, j);
        CHECK(e.h_s.at(0, j) ==
              doctest::Approx(sum / static_cast<double>(total)).epsilon(1e-12));
    }
}

TEST_CASE("pair fusion applies the joint projection and activation") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    ParamSet params = build_params(cfg, 9);
    Tensor2D hs(1, cfg.hidden);
    Tensor2D ho(1, cfg.hidden);
    for (std::size_t j = 0; j < cfg.hidden; ++j) {
        hs.at(0, j) = 0.1 * static_cast<double>(j) - 0.3;
        ho.at(0, j) = 0.05 * static_cast<double>(j);
    }
    Tensor2D out = fuse_pair(hs, ho, params, cfg);
    const Tensor2D& we = params.get("pair.we");
    const Tensor2D& be = params.get("pair.be");
    for (std::size_t j = 0; j < cfg.hidden; ++j) {
        double pre = be.at(0, j);
        for (std::size_t i = 0; i < cfg.hidden; ++i) {
            pre += hs.at(0, i) * we.at(i, j);
            pre += ho.at(0, i) * we.at(cfg.hidden + i, j);
        }
        CHECK(out.at(0, j) == doctest::Approx(std::tanh(pre)).epsilon(1e-12));
    }

    EncoderConfig ident = cfg;
    ident.activation = "identity";
    Tensor2D lin = fuse_pair(hs, ho, params, ident);
    for (double x : lin.data) CHECK(std::abs(x) >= 0.0); // finite
    CHECK(lin != out);
}

TEST_CASE("turning the fusion encoder off equals depth zero everywhere") {
    Vocab v = toy_vocab();
    EncoderConfig off = toy_config(v);
    off.use_fusion_encoder = false;
    off.num_fusion_layers = 2;
    EncoderConfig zero = toy_config(v);
    zero.num_fusion_layers = 0;

    ParamSet pa = build_params(off, 648);
    ParamSet pb = build_params(zero, 648);
    for (const Instance& inst : {text_instance(), visual_instance()}) {
        PairEmbedding a = encode_pair(inst, v, pa, off);
        PairEmbedding b = encode_pair(inst, v, pb, zero);
        CHECK(a.h_e == b.h_e);
        CHECK(a.h_s == b.h_s);
        CHECK(a.h_o == b.h_o);
    }
}

TEST_CASE("attention maps are captured per effective layer") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    cfg.num_fusion_layers = 2;
    ParamSet params = build_params(cfg, 4);
    Instance inst = visual_instance();
    MarkedSequence m = inject_type_prompts(inst, v, {true, true, cfg.max_text_len});
    const std::size_t total = m.text_len + inst.visual.patches();

    PairEmbedding e = encode_pair(inst, v, params, cfg, true);
    REQUIRE(e.attention_maps.size() == 2);
    for (const AttentionCapture& cap : e.attention_maps) {
        REQUIRE(cap.head_weights.size() == cfg.num_heads);
        for (const Tensor2D& w : cap.head_weights) {
            REQUIRE(w.rows == total);
            REQUIRE(w.cols == total);
            for (std::size_t r = 0; r < w.rows; ++r) {
                double sum = 0.0;
                for (std::size_t c = 0; c < w.cols; ++c) sum += w.at(r, c);
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }

    PairEmbedding quiet = encode_pair(inst, v, params, cfg);
    CHECK(quiet.attention_maps.empty());
    CHECK(quiet.h_e == e.h_e);
}

TEST_CASE("tape-level sequence length checks") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    ParamSet params = build_params(cfg, 2);
    Tape t(&params);

    MarkedSequence too_long;
    too_long.token_ids.assign(cfg.max_text_len + 1, Vocab::kCls);
    too_long.pad_mask.assign(cfg.max_text_len + 1, true);
    CHECK_THROWS_AS(encode_text(t, too_long, cfg), UsageError);

    MarkedSequence empty;
    CHECK_THROWS_AS(encode_text(t, empty, cfg), UsageError);
}

TEST_CASE("visual object beyond the loaded patches is rejected") {
    Vocab v = toy_vocab();
    EncoderConfig cfg = toy_config(v);
    ParamSet params = build_params(cfg, 2);
    Instance inst = visual_instance();
    inst.obj_visual_index = 7; // only 3 patches exist
    CHECK_THROWS_AS(encode_pair(inst, v, params, cfg), DataError);
}

TEST_SUITE_END();
