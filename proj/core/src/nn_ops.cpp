#include "relret/nn_ops.hpp"

#include <cmath>

#include "relret/error.hpp"

namespace relret {

Tensor2D softmax_rows(const Tensor2D& x) {
    ensure_finite(x, "softmax_rows input");
    Tensor2D out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.row_ptr(r);
        double mx = xr[0];
        for (std::size_t c = 1; c < x.cols; ++c) mx = std::max(mx, xr[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) {
            const double e = std::exp(xr[c] - mx);
            out.at(r, c) = e;
            sum += e;
        }
        for (std::size_t c = 0; c < x.cols; ++c) out.at(r, c) /= sum;
    }
    return out;
}

Tape::Id mhsa(Tape& t, Tape::Id x, const std::string& prefix, std::size_t num_heads,
              const std::vector<bool>* pad_mask, AttentionCapture* capture) {
    const std::size_t hidden = t.value(x).cols;
    if (num_heads == 0 || hidden % num_heads != 0)
        throw ConfigError("attention: hidden size " + std::to_string(hidden) +
                          " not divisible by " + std::to_string(num_heads) + " heads");
    const std::size_t dh = hidden / num_heads;
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

    Tape::Id q = t.matmul(x, t.param(prefix + "wq"));
    Tape::Id k = t.matmul(x, t.param(prefix + "wk"));
    Tape::Id v = t.matmul(x, t.param(prefix + "wv"));

    std::vector<Tape::Id> ctx;
    ctx.reserve(num_heads);
    for (std::size_t h = 0; h < num_heads; ++h) {
        Tape::Id qh = t.slice_cols(q, h * dh, dh);
        Tape::Id kh = t.slice_cols(k, h * dh, dh);
        Tape::Id vh = t.slice_cols(v, h * dh, dh);
        Tape::Id scores = t.scale(t.matmul(qh, t.transpose(kh)), inv_sqrt_dh);
        Tape::Id att = t.softmax_rows(scores, pad_mask);
        if (capture) capture->head_weights.push_back(t.value(att));
        ctx.push_back(t.matmul(att, vh));
    }
    Tape::Id merged = num_heads == 1 ? ctx[0] : t.concat_cols(ctx);
    return t.matmul(merged, t.param(prefix + "wo"));
}

Tensor2D multi_head_self_attention(const Tensor2D& x, const ParamSet& layer_params,
                                   std::size_t num_heads,
                                   const std::vector<bool>* pad_mask,
                                   AttentionCapture* capture) {
    ensure_finite(x, "attention input");
    if (pad_mask && pad_mask->size() != x.rows)
        throw UsageError("attention: pad mask length must equal sequence length");
    Tape t(&layer_params);
    Tape::Id out = mhsa(t, t.constant(x), "", num_heads, pad_mask, capture);
    return t.value(out);
}

Tape::Id transformer_layer(Tape& t, Tape::Id x, const std::string& prefix,
                           std::size_t num_heads, const std::vector<bool>* pad_mask,
                           AttentionCapture* capture) {
    Tape::Id n1 = t.layer_norm(x, t.param(prefix + "ln1.g"), t.param(prefix + "ln1.b"));
    Tape::Id x1 = t.add(x, mhsa(t, n1, prefix, num_heads, pad_mask, capture));
    Tape::Id n2 = t.layer_norm(x1, t.param(prefix + "ln2.g"), t.param(prefix + "ln2.b"));
    Tape::Id h = t.gelu(t.add_row(t.matmul(n2, t.param(prefix + "ffn.w1")),
                                  t.param(prefix + "ffn.b1")));
    Tape::Id f = t.add_row(t.matmul(h, t.param(prefix + "ffn.w2")),
                           t.param(prefix + "ffn.b2"));
    return t.add(x1, f);
}

} // namespace relret
