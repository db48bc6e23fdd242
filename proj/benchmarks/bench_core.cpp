#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "relret/losses.hpp"
#include "relret/markers.hpp"
#include "relret/model.hpp"
#include "relret/pair_encoder.hpp"
#include "relret/predict.hpp"
#include "relret/rel_encoder.hpp"
#include "relret/rng.hpp"
#include "relret/synthetic.hpp"
#include "relret/tape.hpp"

using namespace relret;

namespace {

Tensor2D random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Tensor2D t(rows, cols);
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    return t;
}

struct BenchWorld {
    SynthData data;
    Vocab vocab;
    EncoderConfig config;
    ParamSet params;
    std::vector<MarkedSequence> marked;
    std::vector<std::vector<std::size_t>> desc_ids;
    CatalogMatrix matrix;
};

/// Default-architecture model over a small synthetic corpus, built once.
const BenchWorld& world() {
    static const BenchWorld w = [] {
        SynthConfig sc;
        sc.n_train = 64;
        sc.n_eval = 8;
        SynthData data = generate_synthetic(sc);
        Vocab vocab = Vocab::build(data.train, 1, &data.catalog);
        EncoderConfig config;
        config.vocab_size = vocab.size();
        config.num_relations = data.catalog.size();
        ParamSet params = build_params(config, 648);
        MarkConfig mark{config.use_types, config.use_positions, config.max_text_len};
        std::vector<MarkedSequence> marked;
        std::vector<std::vector<std::size_t>> desc_ids;
        for (const Instance& inst : data.train) {
            marked.push_back(inject_type_prompts(inst, vocab, mark));
            const std::size_t k = data.catalog.index_of(inst.gold_relation);
            desc_ids.push_back(vocab.encode_text(data.catalog.entry(k).description));
        }
        CatalogMatrix matrix = encode_catalog(data.catalog, vocab, params, config);
        return BenchWorld{std::move(data),   std::move(vocab),    config,
                          std::move(params), std::move(marked),   std::move(desc_ids),
                          std::move(matrix)};
    }();
    return w;
}

void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Tensor2D a = random_tensor(n, n, 1);
    Tensor2D b = random_tensor(n, n, 2);
    for (auto _ : state) {
        Tape t;
        Tape::Id c = t.matmul(t.constant(a), t.constant(b));
        benchmark::DoNotOptimize(t.value(c).data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_matmul)->Arg(16)->Arg(64)->Arg(256);

void BM_softmax_rows(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Tensor2D a = random_tensor(n, n, 3);
    for (auto _ : state) {
        Tape t;
        Tape::Id s = t.softmax_rows(t.constant(a));
        benchmark::DoNotOptimize(t.value(s).data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_softmax_rows)->Arg(16)->Arg(64)->Arg(256);

void BM_encode_pair(benchmark::State& state) {
    const BenchWorld& w = world();
    for (auto _ : state) {
        Tape t(&w.params);
        Tape::Id z = encode_pair(t, w.marked[0], w.data.train[0].visual, w.config);
        benchmark::DoNotOptimize(t.value(z).data.data());
    }
}
BENCHMARK(BM_encode_pair);

/// One contrastive training step over a batch, minus the Adam update:
/// forward build of both towers plus the full backward sweep.
void BM_batch_grad(benchmark::State& state) {
    const BenchWorld& w = world();
    const auto batch = static_cast<std::size_t>(state.range(0));
    ParamSet params = w.params;
    for (auto _ : state) {
        Tape t(&params);
        std::vector<Tape::Id> pair_ids;
        std::vector<Tape::Id> rel_ids;
        for (std::size_t i = 0; i < batch; ++i) {
            pair_ids.push_back(encode_pair(t, w.marked[i], w.data.train[i].visual, w.config));
            rel_ids.push_back(encode_relation(t, w.desc_ids[i], w.config));
        }
        Tape::Id loss =
            contrastive_loss(t, t.stack_rows(pair_ids), t.stack_rows(rel_ids), 0.07);
        GradResult g = t.backward(loss);
        benchmark::DoNotOptimize(g.loss);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_batch_grad)->Arg(8)->Arg(32);

void BM_encode_catalog(benchmark::State& state) {
    const BenchWorld& w = world();
    for (auto _ : state) {
        CatalogMatrix m = encode_catalog(w.data.catalog, w.vocab, w.params, w.config);
        benchmark::DoNotOptimize(m.rows.data.data());
    }
}
BENCHMARK(BM_encode_catalog);

void BM_predict(benchmark::State& state) {
    const BenchWorld& w = world();
    for (auto _ : state) {
        Prediction p = predict(w.data.eval[0], w.vocab, w.params, w.config,
                               w.data.catalog, w.matrix);
        benchmark::DoNotOptimize(p.score);
    }
}
BENCHMARK(BM_predict);

} // namespace

BENCHMARK_MAIN();
