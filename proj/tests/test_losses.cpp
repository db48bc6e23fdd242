#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "relret/error.hpp"
#include "relret/losses.hpp"
#include "relret/rng.hpp"
#include "relret/tape.hpp"

using namespace relret;

namespace {

// rows drawn on the unit sphere
Tensor2D random_unit_rows(std::size_t n, std::size_t h, std::uint64_t seed) {
    Rng rng(seed);
    Tensor2D t(n, h);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t j = 0; j < h; ++j) {
            t.at(i, j) = rng.normal();
            norm += t.at(i, j) * t.at(i, j);
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < h; ++j) t.at(i, j) /= norm;
    }
    return t;
}

} // namespace

TEST_SUITE_BEGIN("losses");

TEST_CASE("a single-sample batch has exactly zero loss") {
    // one row: the only candidate is the positive, so log softmax is log 1
    Tensor2D p = random_unit_rows(1, 16, 3);
    Tensor2D r = random_unit_rows(1, 16, 4);
    CHECK(contrastive_loss(p, r, 0.07) == 0.0);
    CHECK(contrastive_loss(p, r, 1.0) == 0.0);
}

TEST_CASE("identical rows give the uniform loss ln N") {
    for (std::size_t n : {2, 8, 32}) {
        Tensor2D one = random_unit_rows(1, 12, 99);
        Tensor2D p(n, 12);
        Tensor2D r(n, 12);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 12; ++j) {
                p.at(i, j) = one.at(0, j);
                r.at(i, j) = one.at(0, j);
            }
        const double want = std::log(static_cast<double>(n));
        CHECK(contrastive_loss(p, r, 0.07) == doctest::Approx(want).epsilon(1e-9));
        CHECK(contrastive_loss(p, r, 0.37) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("an identity similarity matrix at tau 1 gives ln(1 + (N-1)/e)") {
    // orthonormal rows paired with themselves: S = I
    for (std::size_t n : {2, 6}) {
        Tensor2D p(n, n);
        for (std::size_t i = 0; i < n; ++i) p.at(i, i) = 1.0;
        const double want =
            std::log(1.0 + static_cast<double>(n - 1) * std::exp(-1.0));
        CHECK(contrastive_loss(p, p, 1.0) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("the loss matches a hand-rolled reference on random batches") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        const std::size_t n = 3 + trial;
        const double tau = 0.05 + 0.1 * static_cast<double>(trial);
        Tensor2D p = random_unit_rows(n, 10, 100 + trial);
        Tensor2D r = random_unit_rows(n, 10, 200 + trial);
        double want = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mx = -1e300;
            std::vector<double> row(n);
            for (std::size_t j = 0; j < n; ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < 10; ++k) dot += p.at(i, k) * r.at(j, k);
                row[j] = dot / tau;
                mx = std::max(mx, row[j]);
            }
            double lse = 0.0;
            for (double x : row) lse += std::exp(x - mx);
            want += mx + std::log(lse) - row[i];
        }
        want /= static_cast<double>(n);
        CHECK(contrastive_loss(p, r, tau) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("normalization happens inside the loss") {
    Tensor2D p = random_unit_rows(4, 8, 7);
    Tensor2D r = random_unit_rows(4, 8, 8);
    Tensor2D p_scaled = p;
    for (double& x : p_scaled.data) x *= 37.5;
    Tensor2D r_scaled = r;
    for (double& x : r_scaled.data) x *= 0.004;
    CHECK(contrastive_loss(p_scaled, r_scaled, 0.07) ==
          doctest::Approx(contrastive_loss(p, r, 0.07)).epsilon(1e-12));
}

TEST_CASE("contrastive loss input validation") {
    Tensor2D p = random_unit_rows(3, 8, 1);
    Tensor2D r = random_unit_rows(3, 8, 2);
    CHECK_THROWS_AS(contrastive_loss(p, r, 0.0), ConfigError);
    CHECK_THROWS_AS(contrastive_loss(p, r, -0.5), ConfigError);
    Tensor2D wrong = random_unit_rows(2, 8, 3);
    CHECK_THROWS_AS(contrastive_loss(p, wrong, 0.07), UsageError);
    Tensor2D empty(0, 8);
    CHECK_THROWS_AS(contrastive_loss(empty, empty, 0.07), UsageError);
    Tensor2D zero_row = p;
    for (std::size_t j = 0; j < 8; ++j) zero_row.at(1, j) = 0.0;
    CHECK_THROWS_AS(contrastive_loss(zero_row, r, 0.07), NumericError);
}

TEST_CASE("cosine similarity") {
    Tensor2D a = Tensor2D::from_rows({{1.0, 0.0, 0.0}});
    Tensor2D b = Tensor2D::from_rows({{0.0, 1.0, 0.0}});
    CHECK(cosine_sim(a, a) == 1.0);
    CHECK(cosine_sim(a, b) == 0.0);
    Tensor2D neg = Tensor2D::from_rows({{-2.0, 0.0, 0.0}});
    CHECK(cosine_sim(a, neg) == -1.0);

    // the clamp keeps rounding from escaping [-1, 1]
    Tensor2D c = Tensor2D::from_rows({{0.1, 0.1, 0.1}});
    Tensor2D d = Tensor2D::from_rows({{0.3, 0.3, 0.3}});
    CHECK(cosine_sim(c, d) <= 1.0);
    CHECK(cosine_sim(c, d) >= 0.999999999999);

    Tensor2D column(3, 1);
    column.at(0, 0) = 1.0;
    CHECK(cosine_sim(column, transposed(a)) == 1.0);

    Tensor2D zero(1, 3);
    CHECK_THROWS_AS(cosine_sim(a, zero), NumericError);
    Tensor2D longer(1, 4, 0.5);
    CHECK_THROWS_AS(cosine_sim(a, longer), UsageError);
    Tensor2D none;
    CHECK_THROWS_AS(cosine_sim(none, none), UsageError);
}

TEST_CASE("classification loss equals hand-computed cross entropy") {
    ParamSet params;
    params.add("cls.w", Tensor2D::from_rows({{1.0, -1.0, 0.5},
                                             {0.0, 2.0, -0.5}}));
    params.add("cls.b", Tensor2D::from_rows({{0.1, -0.2, 0.0}}));
    Tensor2D h = Tensor2D::from_rows({{0.5, -1.0}, {2.0, 0.25}});
    std::vector<std::size_t> gold = {2, 0};

    double want = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        std::vector<double> logits(3);
        for (std::size_t k = 0; k < 3; ++k)
            logits[k] = h.at(i, 0) * params.get("cls.w").at(0, k) +
                        h.at(i, 1) * params.get("cls.w").at(1, k) +
                        params.get("cls.b").at(0, k);
        double mx = std::max({logits[0], logits[1], logits[2]});
        double lse = 0.0;
        for (double x : logits) lse += std::exp(x - mx);
        want += mx + std::log(lse) - logits[gold[i]];
    }
    want /= 2.0;
    CHECK(classification_loss(h, gold, params) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("classification gradients flow into the head") {
    ParamSet params;
    params.add("cls.w", Tensor2D(4, 3, 0.1));
    params.add("cls.b", Tensor2D(1, 3));
    Tape t(&params);
    Tensor2D h = random_unit_rows(2, 4, 42);
    Tape::Id loss = classification_loss(t, t.constant(h), {0, 2});
    GradResult g = t.backward(loss);
    double total = 0.0;
    for (double x : g.grads.get("cls.w").data) total += std::abs(x);
    for (double x : g.grads.get("cls.b").data) total += std::abs(x);
    CHECK(total > 0.0);
    CHECK(g.loss == doctest::Approx(classification_loss(h, {0, 2}, params)).epsilon(1e-15));
}

TEST_SUITE_END();
