#include "relret/fd_check.hpp"

#include <algorithm>
#include <cmath>

#include "relret/error.hpp"

namespace relret {

namespace {
double eval_loss(const LossBuilder& build, const ParamSet& params) {
    Tape t(&params);
    return t.scalar(build(t));
}
} // namespace

FdReport finite_difference_check(const LossBuilder& build, ParamSet& params,
                                 double epsilon) {
    if (!(epsilon > 0.0)) throw UsageError("finite_difference_check: epsilon must be > 0");

    GradResult analytic;
    {
        Tape t(&params);
        analytic = t.backward(build(t));
    }

    FdReport report;
    for (std::size_t i = 0; i < params.count(); ++i) {
        Tensor2D& theta = params.tensor_at(i);
        const Tensor2D& g = analytic.grads.tensor_at(i);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double saved = theta.data[j];
            theta.data[j] = saved + epsilon;
            const double lp = eval_loss(build, params);
            theta.data[j] = saved - epsilon;
            const double lm = eval_loss(build, params);
            theta.data[j] = saved;

            const double numeric = (lp - lm) / (2.0 * epsilon);
            const double a = g.data[j];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            const double rel = std::fabs(a - numeric) / denom;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = params.name_at(i);
                report.worst_index = j;
                report.analytic = a;
                report.numeric = numeric;
            }
        }
    }
    return report;
}

} // namespace relret
