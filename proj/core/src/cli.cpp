#include "relret/cli.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "relret/attention_dump.hpp"
#include "relret/catalog.hpp"
#include "relret/checkpoint.hpp"
#include "relret/corpus.hpp"
#include "relret/error.hpp"
#include "relret/lexicon.hpp"
#include "relret/predict.hpp"
#include "relret/synthetic.hpp"
#include "relret/trainer.hpp"
#include "relret/vocab.hpp"

namespace relret {
namespace {

using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct LoadedModel {
    EncoderConfig config;
    Vocab vocab;
    ParamSet params;
    std::uint64_t step = 0;
};

LoadedModel load_model(const std::string& path) {
    Checkpoint ck = load_checkpoint(path);
    LoadedModel m;
    try {
        json j = json::parse(ck.config_json);
        m.config = EncoderConfig::from_json(j.at("model").dump());
        m.vocab = Vocab::from_json(j.at("vocab").dump());
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint config block: ") + e.what());
    }
    m.params = std::move(ck.params);
    m.step = ck.step;
    return m;
}

std::string model_config_json(const EncoderConfig& config, const Vocab& vocab) {
    json j;
    j["model"] = json::parse(config.to_json());
    j["vocab"] = json::parse(vocab.to_json());
    return j.dump();
}

struct DataOptions {
    std::string train_path;
    std::string eval_path;
    std::string catalog_path;
    std::string visual_dir;
};

void add_data_options(CLI::App* sub, DataOptions& d) {
    sub->add_option("--train", d.train_path, "training corpus JSONL")->required();
    sub->add_option("--eval", d.eval_path, "held-out corpus JSONL")->required();
    sub->add_option("--catalog", d.catalog_path, "relation catalog JSON")->required();
    sub->add_option("--visual-dir", d.visual_dir, "directory of <visual_id>.bin features");
}

struct TrainOverrides {
    std::string config_path;
    std::uint64_t seed = 648;
    std::string head = "retrieval";
    bool no_visual = false;
    bool no_types = false;
    bool no_positions = false;
    std::size_t fusion_layers = 2;
    double tau = 0.07;
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double lr = 1e-3;
    std::size_t eval_every = 5;
    double early_stop_f1 = -1.0;
    bool dedup_batches = false;
    bool record_batches = false;
    std::size_t hidden = 64;
};

void add_train_options(CLI::App* sub, TrainOverrides& t) {
    sub->add_option("--config", t.config_path, "train config JSON; flags override it");
    sub->add_option("--seed", t.seed, "run seed");
    sub->add_option("--head", t.head, "retrieval or classification");
    sub->add_flag("--no-visual", t.no_visual, "drop the visual segment");
    sub->add_flag("--no-types", t.no_types, "untyped entity markers");
    sub->add_flag("--no-positions", t.no_positions, "no markers; mean-pooled entity states");
    sub->add_option("--fusion-layers", t.fusion_layers, "fusion encoder depth");
    sub->add_option("--tau", t.tau, "contrastive temperature");
    sub->add_option("--epochs", t.epochs, "training epochs");
    sub->add_option("--batch-size", t.batch_size, "batch size");
    sub->add_option("--lr", t.lr, "Adam learning rate");
    sub->add_option("--eval-every", t.eval_every, "epochs between evals");
    sub->add_option("--early-stop-f1", t.early_stop_f1, "stop once best eval F1 reaches this");
    sub->add_flag("--dedup-batches", t.dedup_batches, "avoid in-batch gold collisions");
    sub->add_flag("--record-batches", t.record_batches, "keep batch compositions in the report");
    sub->add_option("--hidden", t.hidden, "model width");
}

TrainConfig resolve_train_config(const CLI::App* sub, const TrainOverrides& t) {
    TrainConfig cfg;
    if (!t.config_path.empty()) cfg = TrainConfig::from_json(read_file(t.config_path));
    if (sub->count("--seed")) cfg.seed = t.seed;
    if (sub->count("--head")) cfg.model.head = head_from_name(t.head);
    if (sub->count("--no-visual")) cfg.model.use_visual = false;
    if (sub->count("--no-types")) cfg.model.use_types = false;
    if (sub->count("--no-positions")) cfg.model.use_positions = false;
    if (sub->count("--fusion-layers")) cfg.model.num_fusion_layers = t.fusion_layers;
    if (sub->count("--tau")) cfg.tau = t.tau;
    if (sub->count("--epochs")) cfg.epochs = t.epochs;
    if (sub->count("--batch-size")) cfg.batch_size = t.batch_size;
    if (sub->count("--lr")) cfg.adam.lr = t.lr;
    if (sub->count("--eval-every")) cfg.eval_every = t.eval_every;
    if (sub->count("--early-stop-f1")) cfg.early_stop_f1 = t.early_stop_f1;
    if (sub->count("--dedup-batches")) cfg.dedup_batches = t.dedup_batches;
    if (sub->count("--record-batches")) cfg.record_batches = t.record_batches;
    if (sub->count("--hidden")) cfg.model.hidden = t.hidden;
    return cfg;
}

std::filesystem::path ensure_out_dir(const std::string& out) {
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

void save_visuals(const std::filesystem::path& dir, const std::vector<Instance>& instances) {
    std::map<std::string, const VisualFeatures*> by_id;
    for (const Instance& inst : instances)
        if (!inst.visual_id.empty() && inst.visual.patches() > 0)
            by_id.emplace(inst.visual_id, &inst.visual);
    for (const auto& [id, v] : by_id) save_visual_features((dir / (id + ".bin")).string(), *v);
}

int run_gen_synth(const SynthConfig& sc, const std::string& out) {
    SynthData data = generate_synthetic(sc);
    auto dir = ensure_out_dir(out);
    save_corpus((dir / "train.jsonl").string(), data.train);
    save_corpus((dir / "eval.jsonl").string(), data.eval);
    save_relation_catalog((dir / "catalog.json").string(), data.catalog);
    save_lexicon((dir / "lexicon.json").string(), data.lexicon);
    auto visual_dir = dir / "visual";
    std::filesystem::create_directories(visual_dir);
    save_visuals(visual_dir, data.train);
    save_visuals(visual_dir, data.eval);
    write_file(dir / "truth.json", data.truth.to_json());
    std::cout << "wrote " << data.train.size() << " train / " << data.eval.size()
              << " eval instances, " << data.catalog.size() << " relations, to " << dir.string()
              << "\n";
    return 0;
}

struct LoadedData {
    std::vector<Instance> train;
    std::vector<Instance> eval;
    RelationCatalog catalog;
};

LoadedData load_data(const DataOptions& d) {
    LoadedData data;
    data.train = load_corpus(d.train_path, d.visual_dir);
    data.eval = load_corpus(d.eval_path, d.visual_dir);
    data.catalog = load_relation_catalog(d.catalog_path);
    return data;
}

int run_train(const DataOptions& d, const TrainConfig& cfg, const std::string& out) {
    LoadedData data = load_data(d);
    TrainResult r = train(cfg, data.train, data.catalog, data.eval);
    auto dir = ensure_out_dir(out);
    write_file(dir / "report.json", r.report.to_json());
    write_file(dir / "metrics.json", r.report.final_metrics.to_json());
    write_file(dir / "config.json", r.report.config_echo);
    r.vocab.save((dir / "vocab.json").string());
    Checkpoint ck;
    ck.config_json = model_config_json(r.config, r.vocab);
    ck.seed = cfg.seed;
    ck.step = r.best_step;
    ck.params = r.params;
    save_checkpoint((dir / "checkpoint.bin").string(), ck);
    std::cout << "best epoch " << r.report.best_epoch << ": " << r.report.final_metrics.to_json()
              << "\n";
    return 0;
}

int run_eval(const std::string& checkpoint, const std::string& data_path,
             const std::string& catalog_path, const std::string& visual_dir,
             const std::string& out) {
    LoadedModel m = load_model(checkpoint);
    auto instances = load_corpus(data_path, visual_dir);
    RelationCatalog catalog = load_relation_catalog(catalog_path);
    Metrics metrics = evaluate(instances, m.vocab, m.params, m.config, catalog);
    if (!out.empty()) write_file(ensure_out_dir(out) / "metrics.json", metrics.to_json());
    std::cout << metrics.to_json() << "\n";
    return 0;
}

int run_predict(const std::string& checkpoint, const std::string& data_path,
                const std::string& catalog_path, const std::string& visual_dir,
                std::size_t topk, std::optional<double> tau_infer,
                const std::vector<std::string>& restrict_labels, const std::string& out) {
    LoadedModel m = load_model(checkpoint);
    auto instances = load_corpus(data_path, visual_dir);
    RelationCatalog catalog = load_relation_catalog(catalog_path);
    CatalogMatrix matrix = encode_catalog(catalog, m.vocab, m.params, m.config);

    std::ostringstream lines;
    for (const Instance& inst : instances) {
        Prediction p;
        if (!restrict_labels.empty()) {
            if (restrict_labels.size() != 2)
                throw UsageError("--restrict takes exactly two labels");
            p = predict_restricted(inst, m.vocab, m.params, m.config, catalog, matrix,
                                   {restrict_labels[0], restrict_labels[1]});
        } else {
            p = predict(inst, m.vocab, m.params, m.config, catalog, matrix, tau_infer, topk);
        }
        lines << p.to_json() << "\n";
    }
    if (!out.empty())
        write_file(ensure_out_dir(out) / "predictions.jsonl", lines.str());
    else
        std::cout << lines.str();
    return 0;
}

int run_ablate(const DataOptions& d, const TrainConfig& cfg, const std::string& out) {
    LoadedData data = load_data(d);
    AblationReport report = run_ablation_suite(cfg, data.train, data.catalog, data.eval);
    std::string csv = report.to_csv();
    if (!out.empty()) {
        auto dir = ensure_out_dir(out);
        write_file(dir / "ablation.csv", csv);
        json rows = json::array();
        for (const AblationRow& row : report.rows)
            rows.push_back({{"variant", row.name},
                            {"metrics", json::parse(row.metrics.to_json())},
                            {"delta_f1", row.delta_f1},
                            {"loss_curve", row.loss_curve}});
        write_file(dir / "ablation.json", rows.dump(2));
    }
    std::cout << csv;
    return 0;
}

int run_sweep_depth(const DataOptions& d, const TrainConfig& cfg,
                    const std::vector<std::size_t>& depths, const std::string& out) {
    LoadedData data = load_data(d);
    auto rows = sweep_depth(cfg, depths, data.train, data.catalog, data.eval);
    std::string csv = depth_csv(rows);
    if (!out.empty()) write_file(ensure_out_dir(out) / "depth.csv", csv);
    std::cout << csv;
    return 0;
}

int run_dump_attention(const std::string& checkpoint, const std::string& data_path,
                       const std::string& visual_dir, std::size_t index,
                       const std::string& out_file, bool retain) {
    LoadedModel m = load_model(checkpoint);
    auto instances = load_corpus(data_path, visual_dir);
    if (index >= instances.size())
        throw UsageError("--index " + std::to_string(index) + " out of range (corpus has " +
                         std::to_string(instances.size()) + " instances)");
    std::size_t n = dump_attention(instances[index], m.vocab, m.params, m.config, out_file, retain);
    std::cout << "wrote " << n << " attention rows to " << out_file << "\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"entity-pair / relation-description retrieval toolkit"};
    app.require_subcommand(1);

    // gen-synth
    auto* gen = app.add_subcommand("gen-synth", "generate a synthetic corpus");
    SynthConfig sc;
    std::string gen_out;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--k", sc.K, "catalog size including None");
    gen->add_option("--n-train", sc.n_train, "training instances");
    gen->add_option("--n-eval", sc.n_eval, "eval instances");
    gen->add_option("--noise", sc.noise, "visual noise sigma");
    gen->add_option("--visual-informative-fraction", sc.visual_informative_fraction,
                    "fraction of relations whose evidence is visual only");
    gen->add_option("--seed", sc.seed, "generator seed");
    gen->add_option("--visual-dim", sc.visual_dim, "patch feature dimension");
    gen->add_option("--patches", sc.patches, "patches per image");
    gen->add_flag("--type-confusable", sc.type_confusable,
                  "pair relations sharing triggers, split by entity types");
    gen->add_option("--none-fraction", sc.none_fraction,
                    "P(gold = None); negative draws uniformly over the catalog");

    // train / ablate / sweep-depth share data + train options
    auto* tr = app.add_subcommand("train", "train a model");
    DataOptions tr_data;
    TrainOverrides tr_over;
    std::string tr_out;
    add_data_options(tr, tr_data);
    add_train_options(tr, tr_over);
    tr->add_option("--out", tr_out, "run directory")->required();

    auto* ab = app.add_subcommand("ablate", "train the ablation grid");
    DataOptions ab_data;
    TrainOverrides ab_over;
    std::string ab_out;
    add_data_options(ab, ab_data);
    add_train_options(ab, ab_over);
    ab->add_option("--out", ab_out, "run directory");

    auto* sw = app.add_subcommand("sweep-depth", "train at several fusion depths");
    DataOptions sw_data;
    TrainOverrides sw_over;
    std::string sw_out;
    std::vector<std::size_t> sw_depths{0, 1, 2, 3};
    add_data_options(sw, sw_data);
    add_train_options(sw, sw_over);
    sw->add_option("--depths", sw_depths, "fusion depths to sweep");
    sw->add_option("--out", sw_out, "run directory");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string ev_ck, ev_data, ev_catalog, ev_visual, ev_out;
    ev->add_option("--checkpoint", ev_ck, "checkpoint file")->required();
    ev->add_option("--data", ev_data, "corpus JSONL")->required();
    ev->add_option("--catalog", ev_catalog, "relation catalog JSON")->required();
    ev->add_option("--visual-dir", ev_visual, "directory of <visual_id>.bin features");
    ev->add_option("--out", ev_out, "directory for metrics.json");

    // predict
    auto* pr = app.add_subcommand("predict", "rank catalog descriptions per instance");
    std::string pr_ck, pr_data, pr_catalog, pr_visual, pr_out;
    std::size_t pr_topk = 5;
    double pr_tau = 0.0;
    std::vector<std::string> pr_restrict;
    pr->add_option("--checkpoint", pr_ck, "checkpoint file")->required();
    pr->add_option("--data", pr_data, "corpus JSONL")->required();
    pr->add_option("--catalog", pr_catalog, "relation catalog JSON")->required();
    pr->add_option("--visual-dir", pr_visual, "directory of <visual_id>.bin features");
    pr->add_option("--topk", pr_topk, "ranked labels to keep");
    pr->add_option("--tau-infer", pr_tau, "score rescale, never changes ranking");
    pr->add_option("--restrict", pr_restrict, "two labels for restricted argmax")
        ->delimiter(',');
    pr->add_option("--out", pr_out, "directory for predictions.jsonl");

    // dump-attention
    auto* da = app.add_subcommand("dump-attention", "write fusion attention maps as CSV");
    std::string da_ck, da_data, da_visual, da_out;
    std::size_t da_index = 0;
    bool da_retain = false;
    da->add_option("--checkpoint", da_ck, "checkpoint file")->required();
    da->add_option("--data", da_data, "corpus JSONL")->required();
    da->add_option("--visual-dir", da_visual, "directory of <visual_id>.bin features");
    da->add_option("--index", da_index, "instance index into the corpus");
    da->add_option("--out", da_out, "CSV output path")->required();
    da->add_flag("--dump-attention", da_retain, "retain attention weights during the pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*gen) return run_gen_synth(sc, gen_out);
    if (*tr) return run_train(tr_data, resolve_train_config(tr, tr_over), tr_out);
    if (*ab) return run_ablate(ab_data, resolve_train_config(ab, ab_over), ab_out);
    if (*sw) return run_sweep_depth(sw_data, resolve_train_config(sw, sw_over), sw_depths, sw_out);
    if (*ev) return run_eval(ev_ck, ev_data, ev_catalog, ev_visual, ev_out);
    if (*pr)
        return run_predict(pr_ck, pr_data, pr_catalog, pr_visual, pr_topk,
                           pr->count("--tau-infer") ? std::optional<double>(pr_tau)
                                                    : std::nullopt,
                           pr_restrict, pr_out);
    if (*da) return run_dump_attention(da_ck, da_data, da_visual, da_index, da_out, da_retain);
    return 0;
}

} // namespace

int run_cli(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace relret
