#include "relret/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "relret/error.hpp"
#include "relret/losses.hpp"
#include "relret/markers.hpp"
#include "relret/pair_encoder.hpp"
#include "relret/predict.hpp"
#include "relret/rel_encoder.hpp"
#include "relret/rng.hpp"
#include "relret/tape.hpp"

namespace relret {

using nlohmann::json;

std::string TrainConfig::to_json() const {
    json j;
    j["model"] = json::parse(model.to_json());
    j["batch_size"] = batch_size;
    j["epochs"] = epochs;
    j["tau"] = tau;
    j["adam"] = {{"lr", adam.lr},
                 {"beta1", adam.beta1},
                 {"beta2", adam.beta2},
                 {"eps", adam.eps},
                 {"weight_decay", adam.weight_decay}};
    j["seed"] = seed;
    j["eval_every"] = eval_every;
    j["early_stop_f1"] = early_stop_f1;
    j["dedup_batches"] = dedup_batches;
    j["record_batches"] = record_batches;
    return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad train config JSON: ") + e.what());
    }
    TrainConfig c;
    try {
        if (j.contains("model")) c.model = EncoderConfig::from_json(j.at("model").dump());
        c.batch_size = j.value("batch_size", c.batch_size);
        c.epochs = j.value("epochs", c.epochs);
        c.tau = j.value("tau", c.tau);
        if (j.contains("adam")) {
            const json& a = j.at("adam");
            c.adam.lr = a.value("lr", c.adam.lr);
            c.adam.beta1 = a.value("beta1", c.adam.beta1);
            c.adam.beta2 = a.value("beta2", c.adam.beta2);
            c.adam.eps = a.value("eps", c.adam.eps);
            c.adam.weight_decay = a.value("weight_decay", c.adam.weight_decay);
        }
        c.seed = j.value("seed", c.seed);
        c.eval_every = j.value("eval_every", c.eval_every);
        c.early_stop_f1 = j.value("early_stop_f1", c.early_stop_f1);
        c.dedup_batches = j.value("dedup_batches", c.dedup_batches);
        c.record_batches = j.value("record_batches", c.record_batches);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad train config JSON: ") + e.what());
    }
    return c;
}

std::string TrainReport::to_json(bool include_wall_time) const {
    json j;
    j["loss_curve"] = loss_curve;
    json evals = json::array();
    for (const auto& [epoch, m] : eval_history)
        evals.push_back({{"epoch", epoch}, {"metrics", json::parse(m.to_json())}});
    j["eval_history"] = evals;
    j["final_metrics"] = json::parse(final_metrics.to_json());
    j["best_epoch"] = best_epoch;
    j["steps_total"] = steps_total;
    j["collision_rate"] = collision_rate;
    j["config"] = config_echo.empty() ? json(nullptr) : json::parse(config_echo);
    if (include_wall_time) j["wall_time_seconds"] = wall_time_seconds;
    if (!batches.empty()) j["batches"] = batches;
    return j.dump(2);
}

namespace {

std::vector<std::string> collect_types(const std::vector<Instance>& a,
                                       const std::vector<Instance>& b) {
    std::set<std::string> types;
    for (const std::string& t : Vocab::default_types()) types.insert(t);
    auto take = [&types](const std::vector<Instance>& set) {
        for (const Instance& inst : set) {
            if (!inst.subj.type.empty()) types.insert(inst.subj.type);
            if (!inst.obj.type.empty()) types.insert(inst.obj.type);
        }
    };
    take(a);
    take(b);
    return {types.begin(), types.end()};
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                   const std::vector<std::size_t>& gold_idx,
                                                   std::size_t batch_size, bool dedup) {
    std::vector<std::vector<std::size_t>> batches;
    if (!dedup) {
        for (std::size_t pos = 0; pos < order.size(); pos += batch_size) {
            std::size_t end = std::min(order.size(), pos + batch_size);
            batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
        }
        return batches;
    }
    std::vector<std::set<std::size_t>> seen;
    for (std::size_t idx : order) {
        std::size_t k = gold_idx[idx];
        bool placed = false;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            if (batches[b].size() < batch_size && seen[b].insert(k).second) {
                batches[b].push_back(idx);
                placed = true;
                break;
            }
        }
        if (!placed) {
            batches.push_back({idx});
            seen.push_back({k});
        }
    }
    return batches;
}

std::string join_ids(const std::vector<Instance>& set, const std::vector<std::size_t>& batch) {
    std::string out;
    for (std::size_t i : batch) {
        if (!out.empty()) out += ", ";
        out += set[i].instance_id.empty() ? ("#" + std::to_string(i)) : set[i].instance_id;
    }
    return out;
}

double max_abs_grad(const ParamSet& grads) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grads.count(); ++i)
        for (double v : grads.tensor_at(i).data) worst = std::max(worst, std::abs(v));
    return worst;
}

void append_metrics_csv(std::ostringstream& out, const Metrics& m) {
    out << std::fixed << std::setprecision(6) << m.accuracy << ',' << m.precision << ','
        << m.recall << ',' << m.f1;
}

} // namespace

TrainResult train(const TrainConfig& config, const std::vector<Instance>& train_set,
                  const RelationCatalog& catalog, const std::vector<Instance>& eval_set) {
    if (train_set.empty()) throw DataError("train(): empty training set");
    if (eval_set.empty()) throw DataError("train(): empty eval set");
    if (config.batch_size == 0) throw ConfigError("train(): batch_size must be positive");
    if (config.eval_every == 0) throw ConfigError("train(): eval_every must be positive");
    if (!(config.tau > 0.0)) throw ConfigError("train(): tau must be positive");

    const auto t_start = std::chrono::steady_clock::now();

    Vocab vocab =
        Vocab::build(train_set, 1, &catalog, collect_types(train_set, eval_set));
    EncoderConfig mc = config.model;
    mc.vocab_size = vocab.size();
    mc.num_relations = catalog.size();
    mc.validate();

    ParamSet params = build_params(mc, config.seed);
    AdamState state = AdamState::init(params);

    MarkConfig mark{mc.use_types, mc.use_positions, mc.max_text_len};
    std::vector<MarkedSequence> marked;
    marked.reserve(train_set.size());
    std::vector<std::size_t> gold_idx;
    gold_idx.reserve(train_set.size());
    for (const Instance& inst : train_set) {
        marked.push_back(inject_type_prompts(inst, vocab, mark));
        gold_idx.push_back(catalog.index_of(inst.gold_relation));
    }

    std::vector<std::vector<std::size_t>> desc_ids;
    desc_ids.reserve(catalog.size());
    for (const RelationEntry& entry : catalog.entries())
        desc_ids.push_back(vocab.encode_text(entry.description));

    TrainReport report;
    const bool retrieval = mc.head == HeadKind::retrieval;
    double best_f1 = -1.0;
    Metrics best_metrics;
    ParamSet best_params = params;
    std::uint64_t best_step = 0;
    std::size_t best_epoch = 0;
    bool stop = false;

    auto run_eval = [&](std::size_t epoch) {
        Metrics m = evaluate(eval_set, vocab, params, mc, catalog);
        report.eval_history.emplace_back(epoch, m);
        if (m.f1 > best_f1) {
            best_f1 = m.f1;
            best_metrics = m;
            best_params = params;
            best_step = state.step;
            best_epoch = epoch;
        }
        if (config.early_stop_f1 >= 0.0 && best_f1 >= config.early_stop_f1) stop = true;
    };

    Rng shuffle_rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::size_t steps = 0;
    std::size_t batches_total = 0;
    std::size_t batches_with_collision = 0;
    double last_grad = 0.0;

    if (config.epochs == 0) run_eval(0);

    for (std::size_t epoch = 0; epoch < config.epochs && !stop; ++epoch) {
        shuffle_rng.shuffle(order);
        auto batches = make_batches(order, gold_idx, config.batch_size, config.dedup_batches);
        if (config.record_batches) report.batches.push_back(batches);

        double loss_sum = 0.0;
        for (const auto& batch : batches) {
            ++batches_total;
            std::set<std::size_t> golds;
            for (std::size_t i : batch)
                if (!golds.insert(gold_idx[i]).second) {
                    ++batches_with_collision;
                    break;
                }

            try {
                Tape t(&params);
                std::vector<Tape::Id> pair_ids;
                pair_ids.reserve(batch.size());
                for (std::size_t i : batch)
                    pair_ids.push_back(encode_pair(t, marked[i], train_set[i].visual, mc));
                Tape::Id pair_batch = t.stack_rows(pair_ids);

                Tape::Id loss;
                if (retrieval) {
                    std::map<std::size_t, Tape::Id> cache; // gold index -> shared node
                    std::vector<Tape::Id> rel_rows;
                    rel_rows.reserve(batch.size());
                    for (std::size_t i : batch) {
                        std::size_t k = gold_idx[i];
                        auto it = cache.find(k);
                        if (it == cache.end())
                            it = cache.emplace(k, encode_relation(t, desc_ids[k], mc)).first;
                        rel_rows.push_back(it->second);
                    }
                    loss = contrastive_loss(t, pair_batch, t.stack_rows(rel_rows), config.tau);
                } else {
                    std::vector<std::size_t> targets;
                    targets.reserve(batch.size());
                    for (std::size_t i : batch) targets.push_back(gold_idx[i]);
                    loss = classification_loss(t, pair_batch, targets);
                }

                double loss_val = t.scalar(loss);
                if (!std::isfinite(loss_val)) throw NumericError("non-finite loss");
                GradResult g = t.backward(loss);
                adam_step(params, g.grads, state, config.adam);
                last_grad = max_abs_grad(g.grads);
                loss_sum += loss_val * static_cast<double>(batch.size());
            } catch (const NumericError& e) {
                std::ostringstream msg;
                msg << e.what() << " at step " << (steps + 1) << " (epoch " << (epoch + 1)
                    << "); batch [" << join_ids(train_set, batch)
                    << "]; max |grad| of previous step " << std::setprecision(17) << last_grad;
                throw NumericError(msg.str());
            }
            ++steps;
        }
        report.loss_curve.push_back(loss_sum / static_cast<double>(train_set.size()));

        bool final_epoch = epoch + 1 == config.epochs;
        if ((epoch + 1) % config.eval_every == 0 || final_epoch) run_eval(epoch + 1);
    }

    report.final_metrics = best_metrics;
    report.best_epoch = best_epoch;
    report.steps_total = steps;
    report.collision_rate =
        batches_total == 0
            ? 0.0
            : static_cast<double>(batches_with_collision) / static_cast<double>(batches_total);
    TrainConfig echo = config;
    echo.model = mc;
    report.config_echo = echo.to_json();
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    TrainResult result;
    result.params = std::move(best_params);
    result.vocab = std::move(vocab);
    result.config = mc;
    result.best_step = best_step;
    result.report = std::move(report);
    return result;
}

AblationReport run_ablation_suite(const TrainConfig& base,
                                  const std::vector<Instance>& train_set,
                                  const RelationCatalog& catalog,
                                  const std::vector<Instance>& eval_set) {
    struct Variant {
        const char* name;
        void (*tweak)(EncoderConfig&);
    };
    static const Variant variants[] = {
        {"full", [](EncoderConfig&) {}},
        {"wo_encoder", [](EncoderConfig& c) { c.use_fusion_encoder = false; }},
        {"wo_position", [](EncoderConfig& c) { c.use_positions = false; }},
        {"wo_type", [](EncoderConfig& c) { c.use_types = false; }},
        {"wo_relation_embedding",
         [](EncoderConfig& c) { c.head = HeadKind::classification; }},
    };

    AblationReport report;
    for (const Variant& v : variants) {
        TrainConfig cfg = base;
        v.tweak(cfg.model);
        TrainResult r = train(cfg, train_set, catalog, eval_set);
        AblationRow row;
        row.name = v.name;
        row.metrics = r.report.final_metrics;
        row.loss_curve = r.report.loss_curve;
        report.rows.push_back(std::move(row));
    }
    const Metrics& full = report.rows.front().metrics;
    for (AblationRow& row : report.rows) {
        row.delta_accuracy = full.accuracy - row.metrics.accuracy;
        row.delta_precision = full.precision - row.metrics.precision;
        row.delta_recall = full.recall - row.metrics.recall;
        row.delta_f1 = full.f1 - row.metrics.f1;
    }
    return report;
}

std::string AblationReport::to_csv() const {
    std::ostringstream out;
    out << "variant,accuracy,precision,recall,f1,delta_accuracy,delta_precision,"
           "delta_recall,delta_f1\n";
    for (const AblationRow& row : rows) {
        out << row.name << ',';
        append_metrics_csv(out, row.metrics);
        out << ',' << std::fixed << std::setprecision(6) << row.delta_accuracy << ','
            << row.delta_precision << ',' << row.delta_recall << ',' << row.delta_f1 << '\n';
    }
    return out.str();
}

std::vector<DepthRow> sweep_depth(const TrainConfig& base,
                                  const std::vector<std::size_t>& depths,
                                  const std::vector<Instance>& train_set,
                                  const RelationCatalog& catalog,
                                  const std::vector<Instance>& eval_set) {
    std::vector<DepthRow> rows;
    rows.reserve(depths.size());
    for (std::size_t depth : depths) {
        TrainConfig cfg = base;
        cfg.model.use_fusion_encoder = true;
        cfg.model.num_fusion_layers = depth;
        TrainResult r = train(cfg, train_set, catalog, eval_set);
        rows.push_back({depth, r.report.final_metrics});
    }
    return rows;
}

std::string depth_csv(const std::vector<DepthRow>& rows) {
    std::ostringstream out;
    out << "fusion_layers,accuracy,precision,recall,f1\n";
    for (const DepthRow& row : rows) {
        out << row.depth << ',';
        append_metrics_csv(out, row.metrics);
        out << '\n';
    }
    return out.str();
}

HeadComparison compare_heads(const TrainConfig& base, const std::vector<Instance>& train_set,
                             const RelationCatalog& catalog,
                             const std::vector<Instance>& eval_set) {
    HeadComparison cmp;
    TrainConfig ret = base;
    ret.model.head = HeadKind::retrieval;
    cmp.retrieval = train(ret, train_set, catalog, eval_set).report.final_metrics;
    TrainConfig cls = base;
    cls.model.head = HeadKind::classification;
    cmp.classification = train(cls, train_set, catalog, eval_set).report.final_metrics;
    return cmp;
}

std::string HeadComparison::to_csv() const {
    std::ostringstream out;
    out << "head,accuracy,precision,recall,f1\n";
    out << "retrieval,";
    append_metrics_csv(out, retrieval);
    out << "\nclassification,";
    append_metrics_csv(out, classification);
    out << '\n';
    return out.str();
}

} // namespace relret
