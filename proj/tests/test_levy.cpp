#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "gammagibbs/levy.hpp"
#include "gammagibbs/rng.hpp"
#include "gammagibbs/special.hpp"
#include "gammagibbs/stats.hpp"
#include "support/oracles.hpp"

using namespace gammagibbs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("test-side E1 agrees with quadrature", "[oracle]") {
    for (double x : {1e-6, 1e-3, 0.1, 1.0, 2.0, 2.5, 5.0, 20.0}) {
        const double q = oracle::quad_tail([](double t) { return std::exp(-t) / t; }, x);
        CHECK_THAT(oracle::e1(x), WithinRel(q, 1e-11));
    }
}

TEST_CASE("expint_e1 matches the oracle", "[special]") {
    for (double x : {1e-8, 1e-6, 1e-3, 0.3, 1.0, 1.999, 2.001, 7.0, 40.0})
        CHECK_THAT(special::expint_e1(x), WithinRel(oracle::e1(x), 1e-12));
    CHECK_THROWS_AS(special::expint_e1(0.0), std::domain_error);
}

TEST_CASE("gamma_p matches quadrature to 1e-10", "[special]") {
    for (double a : {0.05, 0.5, 1.0, 2.5, 10.0, 40.0}) {
        for (double x : {0.01, 0.5, 1.0, 3.0, 12.0, 50.0}) {
            const double q = oracle::quad([a](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, 0.0, x) /
                             std::tgamma(a);
            CHECK_THAT(special::gamma_p(a, x), WithinAbs(q, 1e-10));
            CHECK_THAT(special::gamma_p(a, x) + special::gamma_q(a, x), WithinAbs(1.0, 1e-14));
        }
    }
}

TEST_CASE("KS statistic and p-value on exact uniforms", "[special]") {
    std::vector<double> u;
    for (int i = 0; i < 1000; ++i) u.push_back((i + 0.5) / 1000.0);
    const double d = special::ks_statistic(u, [](double x) { return x; });
    CHECK_THAT(d, WithinAbs(0.0005, 1e-12));
    CHECK(special::ks_pvalue(d, u.size()) > 0.99);
    CHECK(special::ks_pvalue(0.1, 1000) < 1e-6);
    CHECK_THAT(special::kolmogorov_sf(1.3581), WithinAbs(0.05, 1e-4));
}

TEST_CASE("truncated_mass examples", "[levy]") {
    CHECK_THAT(truncated_mass(LevySpec::gamma(1.0, 1.0)), WithinAbs(0.219384, 1e-6));
    CHECK_THAT(truncated_mass(LevySpec::gamma(2.0, 1.0)), WithinAbs(0.438768, 1e-6));
    const double q = oracle::quad_tail([](double s) { return std::exp(-s) / s; }, 1.0);
    CHECK_THAT(truncated_mass(LevySpec::gamma(1.0, 1.0)), WithinRel(q, 1e-12));
    CHECK(truncated_mass(LevySpec::gamma(1.0, 800.0)) == 0.0);
    CHECK_THROWS_AS(truncated_mass(LevySpec::gamma(1.0, 0.0)), InfiniteMassError);
}

TEST_CASE("truncation_bias examples", "[levy]") {
    auto b = truncation_bias(LevySpec::gamma(1.0, 1e-3), 1.0);
    CHECK_THAT(b.mean_loss, WithinRel(1.0 - std::exp(-1e-3), 1e-12));
    CHECK_THAT(b.mean_loss, WithinAbs(9.995e-4, 1e-7));
    b = truncation_bias(LevySpec::gamma(3.0, 1e-3), 2.0);
    CHECK_THAT(b.mean_loss, WithinAbs(5.997e-3, 1e-6));
    // variance loss: theta m int_0^eps s e^{-s} ds
    const double v = oracle::quad([](double s) { return s * std::exp(-s); }, 0.0, 1e-3);
    CHECK_THAT(b.variance_loss, WithinRel(6.0 * v, 1e-9));
    b = truncation_bias(LevySpec::gamma(1.0, 0.0), 1.0);
    CHECK(b.mean_loss == 0.0);
    CHECK(b.variance_loss == 0.0);
}

TEST_CASE("gamma moments of the untruncated intensity", "[levy]") {
    const auto spec = LevySpec::gamma(2.5, 1e-6);
    CHECK(spec.first_moment() == 2.5);
    CHECK(spec.second_moment() == 2.5);
    const double m1 = oracle::quad_tail([](double s) { return 2.5 * std::exp(-s); }, 0.0);
    CHECK_THAT(spec.first_moment(), WithinRel(m1, 1e-12));
    CHECK_THAT(truncated_first_moment(spec), WithinRel(2.5 * std::exp(-1e-6), 1e-12));
}

TEST_CASE("sample_mark mean, support and law", "[levy][statistical]") {
    const double eps = 1e-3;
    const auto spec = LevySpec::gamma(1.0, eps);
    Rng rng(101);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = sample_mark(spec, rng);
    CHECK(*std::min_element(xs.begin(), xs.end()) >= eps);
    const auto est = iid_estimate(xs);
    const double target = std::exp(-eps) / oracle::e1(eps);
    CHECK_THAT(target, WithinAbs(0.1578, 1e-4));
    CHECK(std::abs(est.mean - target) < 3.0 * est.se());

    const double e1eps = oracle::e1(eps);
    const auto cdf = [&](double x) { return x <= eps ? 0.0 : 1.0 - oracle::e1(x) / e1eps; };
    const std::vector<double> sub(xs.begin(), xs.begin() + 100000);
    const double d = special::ks_statistic(sub, cdf);
    INFO("D = " << d);
    CHECK(special::ks_pvalue(d, sub.size()) > 0.01);
}

TEST_CASE("size-biased marks are shifted exponentials", "[levy][statistical]") {
    const auto spec = LevySpec::gamma(1.0, 0.2);
    Rng rng(5);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = sample_size_biased_mark(spec, rng);
    CHECK(*std::min_element(xs.begin(), xs.end()) >= 0.2);
    const double d = special::ks_statistic(xs, [](double x) { return x < 0.2 ? 0.0 : 1.0 - std::exp(-(x - 0.2)); });
    CHECK(special::ks_pvalue(d, xs.size()) > 0.01);
}

TEST_CASE("generic intensity", "[levy]") {
    // e^{-2s}/s: first moment 1/2, second moment 1/4.
    const auto density = [](double s) { return std::exp(-2.0 * s) / s; };
    const auto spec = LevySpec::generic(density, 0.5, 0.25, 1e-3);
    CHECK_FALSE(spec.is_gamma());
    CHECK(spec.table_max_error() < 1e-6);
    CHECK_THAT(truncated_mass(spec), WithinRel(oracle::e1(2e-3), 1e-8));

    Rng rng(17);
    std::vector<double> xs(50000);
    for (auto& x : xs) x = sample_mark(spec, rng);
    CHECK(*std::min_element(xs.begin(), xs.end()) >= 1e-3);
    const double z = oracle::e1(2e-3);
    const double d = special::ks_statistic(xs, [&](double x) { return x <= 1e-3 ? 0.0 : 1.0 - oracle::e1(2.0 * x) / z; });
    CHECK(special::ks_pvalue(d, xs.size()) > 0.01);

    CHECK_THROWS_AS(LevySpec::generic(density, 0.6, 0.25, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(LevySpec::generic(density, 0.5, INFINITY, 1e-3), std::invalid_argument);
}

TEST_CASE("sample_gamma_measure counts, mass and Laplace transform", "[levy][statistical]") {
    CubeGrid grid(1, 1.0, 1.0);
    const auto window = Window::centered_block(grid, 0);
    const auto spec = LevySpec::gamma(1.0, 1e-3);
    Rng rng(2024);
    const int n = 100000;
    std::vector<double> counts(n), mass(n), lap(n);
    for (int i = 0; i < n; ++i) {
        const auto eta = sample_gamma_measure(spec, window, rng);
        counts[i] = double(eta.size());
        mass[i] = eta.total_mass();
        lap[i] = std::exp(-mass[i]);
        for (std::size_t a = 0; a < eta.size(); ++a) {
            REQUIRE(eta.mark(a) >= 1e-3);
            REQUIRE(window.contains(eta.position(a)));
        }
        REQUIRE_FALSE(eta.has_duplicate_positions());
    }
    const auto c = iid_estimate(counts), m = iid_estimate(mass), l = iid_estimate(lap);
    CHECK_THAT(oracle::e1(1e-3), WithinAbs(6.3315, 1e-4));
    CHECK(std::abs(c.mean - oracle::e1(1e-3)) < 3.0 * c.se());
    const double loss = 1.0 - std::exp(-1e-3);
    CHECK(std::abs(m.mean - (1.0 - loss)) < 3.0 * m.se());
    // Laplace target 0.5; truncation can only raise E e^{-eta}, by at most loss.
    CHECK(std::abs(l.mean - 0.5) < 3.0 * l.se() + loss);
}

TEST_CASE("to_marked and from_marked", "[measure]") {
    DiscreteMeasure empty(2);
    CHECK(to_marked(empty).points.empty());
    CHECK(from_marked(to_marked(empty)) == empty);

    DiscreteMeasure one(1);
    one.add(std::vector{0.0}, 2.5);
    const auto g = to_marked(one);
    REQUIRE(g.points.size() == 1);
    CHECK(g.points[0].mark == 2.5);
    CHECK(from_marked(g) == one);

    Rng rng(8);
    DiscreteMeasure big(3);
    for (int i = 0; i < 1000; ++i)
        big.add(std::vector{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}, rng.exponential());
    big.canonicalize();
    CHECK(from_marked(to_marked(big)) == big);

    MarkedConfiguration dup{1, {{1.0, {0.25}}, {1.0, {0.25}}}};
    CHECK(from_marked(dup).size() == 1);
    MarkedConfiguration clash{1, {{1.0, {0.25}}, {2.0, {0.25}}}};
    CHECK_THROWS_AS(from_marked(clash), PinpointingError);
}
