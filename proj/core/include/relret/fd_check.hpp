#pragma once

#include <functional>
#include <string>

#include "relret/param_set.hpp"
#include "relret/tape.hpp"

namespace relret {

/// Builds a scalar loss on the given tape. The tape is bound to the ParamSet
/// under check; the builder must reach parameters only through Tape::param.
using LossBuilder = std::function<Tape::Id(Tape&)>;

struct FdReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// Central-difference gradient check over every scalar of `params`.
/// Relative error denominator is max(|analytic|, |numeric|, 1e-8).
/// Perturbs parameters in place and restores them exactly.
FdReport finite_difference_check(const LossBuilder& build, ParamSet& params,
                                 double epsilon);

} // namespace relret
