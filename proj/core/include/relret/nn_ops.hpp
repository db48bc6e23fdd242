#pragma once

#include <string>
#include <vector>

#include "relret/param_set.hpp"
#include "relret/tape.hpp"
#include "relret/tensor.hpp"

namespace relret {

/// Plain forward row softmax with max-subtraction. Errors on non-finite input.
Tensor2D softmax_rows(const Tensor2D& x);

/// Attention weights recorded during a forward pass: one TxT matrix per head,
/// row = query position, col = key position.
struct AttentionCapture {
    std::vector<Tensor2D> head_weights;
};

/// Multi-head self-attention built on a tape. Parameter names are
/// prefix+"wq", +"wk", +"wv", +"wo"; no projection biases. With a pad mask,
/// masked key positions get exactly zero weight from every query. Pure
/// attention block: no residual, norm, or feed-forward.
Tape::Id mhsa(Tape& t, Tape::Id x, const std::string& prefix, std::size_t num_heads,
              const std::vector<bool>* pad_mask = nullptr,
              AttentionCapture* capture = nullptr);

/// Plain forward wrapper over mhsa for a standalone layer ParamSet holding
/// "wq", "wk", "wv", "wo".
Tensor2D multi_head_self_attention(const Tensor2D& x, const ParamSet& layer_params,
                                   std::size_t num_heads,
                                   const std::vector<bool>* pad_mask = nullptr,
                                   AttentionCapture* capture = nullptr);

/// One pre-norm transformer encoder layer:
///   x + mhsa(ln1(x)), then + ffn(ln2(.)) with a GELU hidden layer.
/// Parameter names under prefix: ln1.g ln1.b wq wk wv wo ln2.g ln2.b
/// ffn.w1 ffn.b1 ffn.w2 ffn.b2.
Tape::Id transformer_layer(Tape& t, Tape::Id x, const std::string& prefix,
                           std::size_t num_heads,
                           const std::vector<bool>* pad_mask = nullptr,
                           AttentionCapture* capture = nullptr);

} // namespace relret
