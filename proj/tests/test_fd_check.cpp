#include <doctest.h>

#include "relret/fd_check.hpp"
#include "relret/rng.hpp"

using namespace relret;

TEST_SUITE_BEGIN("fd_check");

TEST_CASE("quadratic loss checks out to near machine precision") {
    ParamSet p;
    Tensor2D w(2, 3);
    Rng rng(1);
    for (double& v : w.data) v = rng.uniform(-1.0, 1.0);
    p.add("w", w);
    FdReport rep = finite_difference_check(
        [](Tape& t) {
            auto x = t.param("w");
            return t.sum_all(t.mul(x, x));
        },
        p, 1e-5);
    CHECK(rep.max_rel_error < 1e-9);
    CHECK(rep.worst_param == "w");
    CHECK(rep.worst_index < 6);
}

TEST_CASE("parameters are restored bitwise after the sweep") {
    ParamSet p;
    Tensor2D w(3, 3);
    Rng rng(2);
    for (double& v : w.data) v = rng.uniform(-1.0, 1.0);
    p.add("w", w);
    auto before = p.flatten();
    finite_difference_check(
        [](Tape& t) {
            auto h = t.tanh_act(t.param("w"));
            return t.sum_all(t.mul(h, h));
        },
        p, 1e-6);
    CHECK(p.flatten() == before);
}

TEST_CASE("report points at the analytic/numeric pair it measured") {
    ParamSet p;
    p.add("w", Tensor2D(1, 1, 0.7));
    FdReport rep = finite_difference_check(
        [](Tape& t) {
            auto x = t.param("w");
            return t.sum_all(t.mul(x, x));
        },
        p, 1e-5);
    CHECK(rep.analytic == doctest::Approx(1.4).epsilon(1e-10));
    CHECK(rep.numeric == doctest::Approx(1.4).epsilon(1e-8));
}

TEST_SUITE_END();
