#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relret/adam.hpp"
#include "relret/catalog.hpp"
#include "relret/corpus.hpp"
#include "relret/metrics.hpp"
#include "relret/model.hpp"
#include "relret/vocab.hpp"

namespace relret {

struct TrainConfig {
    EncoderConfig model;
    std::size_t batch_size = 32;
    std::size_t epochs = 50;
    double tau = 0.07;
    AdamHyper adam;
    std::uint64_t seed = 648;
    std::size_t eval_every = 5;   // epochs between held-out evals; the final epoch always evals
    double early_stop_f1 = -1.0;  // >= 0 stops once the best eval F1 reaches it
    bool dedup_batches = false;   // opt-in sampler that avoids in-batch gold collisions
    bool record_batches = false;  // keep emitted batch compositions in the report

    std::string to_json() const;
    static TrainConfig from_json(const std::string& json_text);
};

struct TrainReport {
    std::vector<double> loss_curve; // per-epoch mean loss over instances
    std::vector<std::pair<std::size_t, Metrics>> eval_history; // (epoch, metrics)
    Metrics final_metrics;          // of the selected (best-F1) checkpoint
    std::size_t best_epoch = 0;
    std::size_t steps_total = 0;
    double collision_rate = 0.0;    // fraction of batches with duplicate gold labels
    std::string config_echo;
    double wall_time_seconds = 0.0;
    std::vector<std::vector<std::vector<std::size_t>>> batches; // epoch -> batch -> indices

    /// include_wall_time=false yields the representation compared across
    /// runs: wall time is the one legitimately nondeterministic field.
    std::string to_json(bool include_wall_time = true) const;
};

struct TrainResult {
    ParamSet params;   // best checkpoint
    Vocab vocab;
    EncoderConfig config; // with vocab_size/num_relations filled
    std::uint64_t best_step = 0;
    TrainReport report;
};

/// Seed-deterministic training of the selected head. Retrieval encodes each
/// batch's gold descriptions on the same tape (in-batch negatives);
/// classification trains the softmax head over catalog indices. Keeps the
/// parameters of the best eval F1 (ties resolved to the earlier epoch).
/// A non-finite loss aborts with step and batch diagnostics.
TrainResult train(const TrainConfig& config, const std::vector<Instance>& train_set,
                  const RelationCatalog& catalog, const std::vector<Instance>& eval_set);

struct AblationRow {
    std::string name;
    Metrics metrics;
    double delta_accuracy = 0.0; // full minus this variant
    double delta_precision = 0.0;
    double delta_recall = 0.0;
    double delta_f1 = 0.0;
    std::vector<double> loss_curve;
};

struct AblationReport {
    std::vector<AblationRow> rows; // full, wo_encoder, wo_position, wo_type, wo_relation_embedding
    std::string to_csv() const;
};

/// Runs the full model and the four single-switch variants under one seed
/// and data; the w/o-relation-embedding row is the classification head by
/// construction.
AblationReport run_ablation_suite(const TrainConfig& base,
                                  const std::vector<Instance>& train_set,
                                  const RelationCatalog& catalog,
                                  const std::vector<Instance>& eval_set);

struct DepthRow {
    std::size_t depth = 0;
    Metrics metrics;
};

std::vector<DepthRow> sweep_depth(const TrainConfig& base,
                                  const std::vector<std::size_t>& depths,
                                  const std::vector<Instance>& train_set,
                                  const RelationCatalog& catalog,
                                  const std::vector<Instance>& eval_set);
std::string depth_csv(const std::vector<DepthRow>& rows);

struct HeadComparison {
    Metrics retrieval;
    Metrics classification;
    std::string to_csv() const;
};

/// Same seed, data, and budget for both heads.
HeadComparison compare_heads(const TrainConfig& base, const std::vector<Instance>& train_set,
                             const RelationCatalog& catalog,
                             const std::vector<Instance>& eval_set);

} // namespace relret
