#include "relret/adam.hpp"

#include <cmath>

#include "relret/error.hpp"

namespace relret {

AdamState AdamState::init(const ParamSet& params) {
    AdamState s;
    s.m = params.zeros_like();
    s.v = params.zeros_like();
    return s;
}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state,
               const AdamHyper& hyper) {
    if (grads.count() != params.count() || state.m.count() != params.count() ||
        state.v.count() != params.count())
        throw UsageError("adam_step: gradient/state entry count mismatch");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));

    for (std::size_t i = 0; i < params.count(); ++i) {
        Tensor2D& theta = params.tensor_at(i);
        const Tensor2D& g = grads.tensor_at(i);
        Tensor2D& m = state.m.tensor_at(i);
        Tensor2D& v = state.v.tensor_at(i);
        if (!theta.same_shape(g) || !theta.same_shape(m) || !theta.same_shape(v))
            throw UsageError("adam_step: shape mismatch for " + params.name_at(i));
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double gj = g.data[j];
            m.data[j] = hyper.beta1 * m.data[j] + (1.0 - hyper.beta1) * gj;
            v.data[j] = hyper.beta2 * v.data[j] + (1.0 - hyper.beta2) * gj * gj;
            const double mhat = m.data[j] / bc1;
            const double vhat = v.data[j] / bc2;
            theta.data[j] -= hyper.lr * (mhat / (std::sqrt(vhat) + hyper.eps) +
                                         hyper.weight_decay * theta.data[j]);
        }
    }
    params.bump_version();
}

} // namespace relret
