#pragma once

#include <vector>

#include "relret/param_set.hpp"
#include "relret/tape.hpp"

namespace relret {

/// a.b / (|a||b|), clamped to [-1,1]. Inputs are 1xH (or Hx1) tensors;
/// norms below 1e-12 are degenerate-input errors.
double cosine_sim(const Tensor2D& a, const Tensor2D& b);

/// In-batch InfoNCE over row-normalized embeddings: S = P_hat R_hat^T,
/// loss = mean_i [logsumexp_j(S_ij/tau) - S_ii/tau]. Row i of rel_batch
/// must embed sample i's gold description.
Tape::Id contrastive_loss(Tape& t, Tape::Id pair_batch, Tape::Id rel_batch, double tau);
double contrastive_loss(const Tensor2D& pair_batch, const Tensor2D& rel_batch, double tau);

/// Softmax cross-entropy of pair embeddings against gold catalog indices
/// through the classifier head ("cls.w", "cls.b").
Tape::Id classification_loss(Tape& t, Tape::Id pair_batch,
                             const std::vector<std::size_t>& gold_indices);
double classification_loss(const Tensor2D& pair_batch,
                           const std::vector<std::size_t>& gold_indices,
                           const ParamSet& classifier_params);

} // namespace relret
