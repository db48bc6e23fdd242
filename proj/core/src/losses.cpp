#include "relret/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relret/error.hpp"

namespace relret {

double cosine_sim(const Tensor2D& a, const Tensor2D& b) {
    if (a.size() != b.size() || a.size() == 0)
        throw UsageError("cosine_sim: vector lengths differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a.data[i] * b.data[i];
        na += a.data[i] * a.data[i];
        nb += b.data[i] * b.data[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-12 || nb < 1e-12)
        throw NumericError("cosine_sim: near-zero vector norm");
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

Tape::Id contrastive_loss(Tape& t, Tape::Id pair_batch, Tape::Id rel_batch, double tau) {
    if (!(tau > 0.0)) throw ConfigError("contrastive_loss: tau must be > 0");
    const Tensor2D& p = t.value(pair_batch);
    const Tensor2D& r = t.value(rel_batch);
    if (p.rows != r.rows || p.cols != r.cols)
        throw UsageError("contrastive_loss: batch shapes differ");
    if (p.rows == 0) throw UsageError("contrastive_loss: empty batch");
    Tape::Id sims = t.matmul(t.l2_normalize_rows(pair_batch),
                             t.transpose(t.l2_normalize_rows(rel_batch)));
    Tape::Id logits = t.scale(sims, 1.0 / tau);
    std::vector<std::size_t> diag(p.rows);
    std::iota(diag.begin(), diag.end(), std::size_t{0});
    return t.cross_entropy_rows(logits, diag);
}

double contrastive_loss(const Tensor2D& pair_batch, const Tensor2D& rel_batch, double tau) {
    Tape t;
    return t.scalar(contrastive_loss(t, t.constant(pair_batch), t.constant(rel_batch), tau));
}

Tape::Id classification_loss(Tape& t, Tape::Id pair_batch,
                             const std::vector<std::size_t>& gold_indices) {
    Tape::Id logits = t.add_row(t.matmul(pair_batch, t.param("cls.w")), t.param("cls.b"));
    return t.cross_entropy_rows(logits, gold_indices);
}

double classification_loss(const Tensor2D& pair_batch,
                           const std::vector<std::size_t>& gold_indices,
                           const ParamSet& classifier_params) {
    Tape t(&classifier_params);
    return t.scalar(classification_loss(t, t.constant(pair_batch), gold_indices));
}

} // namespace relret
