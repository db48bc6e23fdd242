#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "relret/catalog.hpp"
#include "relret/corpus.hpp"
#include "relret/synthetic.hpp"

namespace relret::testing {

inline std::string fixture(const std::string& name) {
    return std::string(RELRET_FIXTURE_DIR) + "/" + name;
}

/// Scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::mt19937_64 gen(std::random_device{}());
        for (;;) {
            auto candidate = base / ("relret_test_" + std::to_string(gen()));
            if (std::filesystem::create_directory(candidate)) {
                path_ = candidate;
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

/// Exact-knowledge Bayes classifier over the synthetic generator's
/// semantics, computed by brute force from SynthTruth. Channels can be
/// switched off to get e.g. the text-only oracle.
class BayesOracle {
  public:
    BayesOracle(const RelationCatalog& catalog, const SynthTruth& truth, bool use_text = true,
                bool use_types = true, bool use_visual = true)
        : catalog_(&catalog), truth_(&truth), use_text_(use_text), use_types_(use_types),
          use_visual_(use_visual) {
        for (const RelationTruth& r : truth.relations) {
            if (r.label == "None" || r.triggers.empty()) continue;
            sigs_.insert(r.subj_type + "|" + r.obj_type);
        }
    }

    std::string predict(const Instance& inst) const {
        const auto& rels = truth_->relations;
        const std::size_t K = rels.size();
        std::vector<double> logp(K, 0.0);

        // priors
        for (std::size_t k = 0; k < K; ++k) {
            if (truth_->none_fraction >= 0.0) {
                bool is_none = rels[k].label == "None";
                double p = is_none ? truth_->none_fraction
                                   : (1.0 - truth_->none_fraction) /
                                         static_cast<double>(K - 1);
                logp[k] = p > 0.0 ? std::log(p) : -1e300;
            }
        }

        if (use_text_) {
            std::string trigger_word;
            for (const std::string& tok : inst.tokens)
                for (const RelationTruth& r : rels)
                    if (std::find(r.triggers.begin(), r.triggers.end(), tok) !=
                        r.triggers.end())
                        trigger_word = tok;
            for (std::size_t k = 0; k < K; ++k) {
                const RelationTruth& r = rels[k];
                bool emits = !r.triggers.empty() && !r.visual_informative;
                if (!trigger_word.empty()) {
                    bool mine = std::find(r.triggers.begin(), r.triggers.end(),
                                          trigger_word) != r.triggers.end();
                    logp[k] += (emits && mine) ? std::log(0.5) : -1e300;
                } else if (emits) {
                    logp[k] = -1e300;
                }
            }
        }

        if (use_types_) {
            std::string sig = inst.subj.type + "|" + inst.obj.type;
            for (std::size_t k = 0; k < K; ++k) {
                const RelationTruth& r = rels[k];
                if (r.label == "None") {
                    if (sigs_.count(sig))
                        logp[k] += std::log(1.0 / static_cast<double>(sigs_.size()));
                    else
                        logp[k] = -1e300;
                } else if (sig != r.subj_type + "|" + r.obj_type) {
                    logp[k] = -1e300;
                }
            }
        }

        if (use_visual_ && inst.visual.patches() > 0) {
            for (std::size_t k = 0; k < K; ++k) {
                const RelationTruth& r = rels[k];
                if (!r.visual_informative) continue; // noise-only term is common
                logp[k] += signature_log_ratio(inst.visual, r.visual_signature);
            }
        }

        std::size_t best = 0;
        for (std::size_t k = 1; k < K; ++k)
            if (logp[k] > logp[best]) best = k;
        return rels[best].label;
    }

    std::vector<std::string> predict_all(const std::vector<Instance>& instances) const {
        std::vector<std::string> out;
        out.reserve(instances.size());
        for (const Instance& inst : instances) out.push_back(predict(inst));
        return out;
    }

  private:
    // log P(X | signature in one uniform patch) - log P(X | noise only)
    double signature_log_ratio(const VisualFeatures& v, const std::vector<double>& sig) const {
        const double noise = truth_->noise;
        const std::size_t P = v.patches();
        if (noise <= 0.0) {
            // degenerate: signature either matches a patch exactly (up to f32
            // rounding) or the hypothesis is impossible
            for (std::size_t p = 0; p < P; ++p) {
                double diff = 0.0;
                for (std::size_t q = 0; q < v.dim(); ++q)
                    diff = std::max(diff, std::abs(v.patch_vectors.at(p, q) - sig[q]));
                if (diff < 1e-4) return 1e300;
            }
            return -1e300;
        }
        const double inv2 = 1.0 / (2.0 * noise * noise);
        double max_term = -1e300;
        std::vector<double> terms(P);
        for (std::size_t p = 0; p < P; ++p) {
            double t = 0.0;
            for (std::size_t q = 0; q < v.dim(); ++q) {
                double x = v.patch_vectors.at(p, q);
                double d = x - sig[q];
                t += (x * x - d * d) * inv2; // logN(x; sig) - logN(x; 0)
            }
            terms[p] = t;
            max_term = std::max(max_term, t);
        }
        double sum = 0.0;
        for (double t : terms) sum += std::exp(t - max_term);
        return max_term + std::log(sum) - std::log(static_cast<double>(P));
    }

    const RelationCatalog* catalog_;
    const SynthTruth* truth_;
    bool use_text_;
    bool use_types_;
    bool use_visual_;
    std::set<std::string> sigs_; // distinct type signatures of textual+visual relations
};

inline std::vector<std::string> gold_labels(const std::vector<Instance>& instances) {
    std::vector<std::string> out;
    out.reserve(instances.size());
    for (const Instance& inst : instances) out.push_back(inst.gold_relation);
    return out;
}

} // namespace relret::testing
