#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "relret/param_set.hpp"
#include "relret/tensor.hpp"

namespace relret {

/// Reverse-mode autodiff over Tensor2D values.
///
/// Ops append nodes to the tape; backward() walks the tape in reverse and
/// returns the gradient of every parameter of the bound ParamSet. All work
/// is sequential with fixed iteration order, so results are deterministic
/// and bit-stable for a given build.
class Tape {
  public:
    using Id = std::uint32_t;

    explicit Tape(const ParamSet* params = nullptr) : params_(params) {}

    /// Leaf holding a fixed value. No gradient flows into it.
    Id constant(Tensor2D v);

    /// Leaf bound to a named parameter. Repeated calls share one node.
    Id param(const std::string& name);

    // Elementwise / broadcast arithmetic.
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id mul(Id a, Id b);
    Id scale(Id a, double c);
    Id add_row(Id a, Id row); // row is 1xC, broadcast over rows of a

    // Linear algebra.
    Id matmul(Id a, Id b);
    Id transpose(Id a);

    // Activations and normalization.
    Id tanh_act(Id a);
    Id gelu(Id a);
    Id layer_norm(Id x, Id gamma, Id beta); // gamma/beta 1xC, eps 1e-5

    /// Row softmax with max-subtraction. When key_mask is given, false
    /// columns get probability exactly zero. Errors if a row has no
    /// unmasked column.
    Id softmax_rows(Id a, const std::vector<bool>* key_mask = nullptr);

    // Shape surgery.
    Id slice_rows(Id a, std::size_t start, std::size_t count);
    Id slice_cols(Id a, std::size_t start, std::size_t count);
    Id concat_rows(Id a, Id b);
    Id concat_cols(const std::vector<Id>& parts);
    Id stack_rows(const std::vector<Id>& rows); // each input 1xC

    /// Mean over rows (1xC). With a mask, only true rows participate.
    Id mean_rows(Id a, const std::vector<bool>* row_mask = nullptr);

    /// Row-wise x / ||x||. Errors on rows with norm < 1e-12.
    Id l2_normalize_rows(Id a);

    /// Gather rows of a table by index. Backward scatter-adds.
    Id embedding_rows(Id table, const std::vector<std::size_t>& ids);

    /// Mean over rows of (logsumexp(row) - row[target]), log-sum-exp
    /// stabilized. The shared loss head for both training objectives.
    Id cross_entropy_rows(Id logits, const std::vector<std::size_t>& targets);

    Id sum_all(Id a); // 1x1

    const Tensor2D& value(Id id) const { return nodes_[id].val; }
    double scalar(Id id) const;
    std::size_t node_count() const { return nodes_.size(); }

    /// Gradient of a 1x1 root with respect to every bound parameter.
    GradResult backward(Id root);

  private:
    struct Node {
        Tensor2D val;
        Tensor2D grad; // allocated on demand during backward
        bool needs_grad = false;
        std::string param_name; // nonempty only for param leaves
        std::function<void(Tape&)> back;
    };

    Id push(Tensor2D val, bool needs_grad, std::function<void(Tape&)> back);
    Tensor2D& grad_ref(Id id); // lazily allocates a zero tensor
    bool wants(Id id) const { return nodes_[id].needs_grad; }

    std::deque<Node> nodes_;
    std::map<std::string, Id> param_nodes_;
    const ParamSet* params_;
};

} // namespace relret
