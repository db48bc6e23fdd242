#pragma once

#include <cstdint>

#include "relret/param_set.hpp"

namespace relret {

struct AdamHyper {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

/// First/second moment estimates plus the step counter. Shapes mirror the
/// parameter set they were initialized from.
struct AdamState {
    std::uint64_t step = 0;
    ParamSet m;
    ParamSet v;

    static AdamState init(const ParamSet& params);
};

/// One bias-corrected AdamW update. Weight decay is decoupled: it scales the
/// parameter directly and never enters the moment estimates. Bumps the
/// parameter-set version.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state,
               const AdamHyper& hyper);

} // namespace relret
