#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gammagibbs/interaction.hpp"
#include "gammagibbs/rng.hpp"
#include "support/oracles.hpp"

using namespace gammagibbs;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const CubeGrid kLine(1, 1.0, 1.0);

PotentialSpec unit_step() { return certify_or_throw(PairPotential::step(1.0, 1.0), kLine); }
PotentialSpec default_core_shell() { return certify_or_throw(PairPotential::core_shell(10.0, 1.0, 1.0, 1.0), kLine); }
// Attraction shell (1, 1.5] is populated on this grid.
PotentialSpec attractive() {
    return certify_or_throw(PairPotential::core_shell(12.0, 1.0, 1.0, 1.5), CubeGrid(1, 1.0, 1.5));
}

DiscreteMeasure random_measure(const Window& w, std::size_t n, Rng& rng) {
    DiscreteMeasure eta(w.dimension());
    std::vector<double> x(static_cast<std::size_t>(w.dimension()));
    for (std::size_t i = 0; i < n; ++i) {
        w.sample_point(rng, x);
        eta.add(x, 0.05 + rng.exponential());
    }
    return eta;
}

DiscreteMeasure random_boundary(const Window& w, double reach, std::size_t n, Rng& rng) {
    DiscreteMeasure xi(w.dimension());
    while (xi.size() < n) {
        std::vector<double> x(static_cast<std::size_t>(w.dimension()));
        for (int a = 0; a < w.dimension(); ++a)
            x[static_cast<std::size_t>(a)] = rng.uniform(-reach, reach);
        if (!w.contains(x)) xi.add(x, 0.05 + rng.exponential());
    }
    return xi;
}

}  // namespace

TEST_CASE("certification of built-in families", "[interaction]") {
    const auto step = unit_step();
    CHECK(step.certified);
    CHECK(step.A_delta == 1.0);
    CHECK(step.b == 0.0);

    const auto cs = default_core_shell();
    CHECK(cs.certified);
    CHECK(cs.A_delta == 10.0);
    CHECK(cs.b == 1.0);
    CHECK_THAT(cs.m_phi, WithinRel(4.0, 1e-14));
    CHECK(cs.sup_norm == 10.0);

    auto r = certify(PairPotential::zero(), kLine);
    REQUIRE(std::holds_alternative<Rejection>(r));
    CHECK(std::get<Rejection>(r).clause == "repulsion_condition");

    r = certify(PairPotential::core_shell(7.0, 1.0, 1.0, 1.0), kLine);
    REQUIRE(std::holds_alternative<Rejection>(r));
    const auto& rej = std::get<Rejection>(r);
    CHECK(rej.clause == "repulsion_condition");
    CHECK(rej.value == 7.0);
    CHECK_THAT(rej.threshold, WithinRel(8.0, 1e-14));
    CHECK_THROWS_WITH(certify_or_throw(PairPotential::core_shell(7.0, 1.0, 1.0, 1.0), kLine),
                      ContainsSubstring("repulsion_condition"));

    r = certify(PairPotential::step(5.0, 2.0), kLine);
    REQUIRE(std::holds_alternative<Rejection>(r));
    CHECK(std::get<Rejection>(r).clause == "finite_range");

    CHECK_FALSE(uncertified(PairPotential::zero(), kLine).certified);
}

TEST_CASE("certification of custom potentials", "[interaction]") {
    const auto bump = PairPotential::custom([](std::span<const double> x, std::span<const double> y) {
        const double r = std::abs(x[0] - y[0]);
        return r <= 1.0 ? 20.0 * (1.0 - 0.5 * r) : 0.0;
    });
    const auto spec = certify_or_throw(bump, kLine);
    CHECK(spec.numeric);
    CHECK_THAT(spec.sup_norm, WithinAbs(20.0, 1e-9));
    CHECK(spec.A_delta >= 10.0 - 1e-9);

    const auto lopsided = PairPotential::custom([](std::span<const double> x, std::span<const double> y) {
        return std::abs(x[0] - y[0]) <= 1.0 ? 10.0 + (x[0] < y[0] ? 1.0 : 0.0) : 0.0;
    });
    auto r = certify(lopsided, kLine);
    REQUIRE(std::holds_alternative<Rejection>(r));
    CHECK(std::get<Rejection>(r).clause == "symmetry");

    const auto long_tail = PairPotential::custom([](std::span<const double> x, std::span<const double> y) {
        return std::abs(x[0] - y[0]) <= 1.7 ? 10.0 : 0.0;
    });
    r = certify(long_tail, kLine);
    REQUIRE(std::holds_alternative<Rejection>(r));
    CHECK(std::get<Rejection>(r).clause == "finite_range");
}

TEST_CASE("potential symmetry and range", "[interaction][property]") {
    const auto spec = attractive();
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x{rng.uniform(-3.0, 3.0)}, y{rng.uniform(-3.0, 3.0)};
        CHECK(spec.phi(x, y) == spec.phi(y, x));
        if (std::abs(x[0] - y[0]) > 1.5) CHECK(spec.phi(x, y) == 0.0);
    }
}

TEST_CASE("hamiltonian examples", "[interaction]") {
    const auto spec = unit_step();
    const auto w = Window::centered_block(kLine, 1);
    DiscreteMeasure none(1);
    CHECK(hamiltonian(none, none, w, spec) == 0.0);

    DiscreteMeasure one(1);
    one.add(std::vector{0.0}, 2.0);
    CHECK(hamiltonian(one, none, w, spec) == 4.0);

    DiscreteMeasure two(1);
    two.add(std::vector{0.0}, 1.0);
    two.add(std::vector{0.5}, 1.0);
    CHECK(hamiltonian(two, none, w, spec) == 4.0);
}

TEST_CASE("hamiltonian matches brute force", "[interaction][property]") {
    Rng rng(12);
    for (const auto& spec : {default_core_shell(), attractive()}) {
        const auto w = Window::centered_block(spec.grid, 2);
        for (int rep = 0; rep < 50; ++rep) {
            const auto eta = random_measure(w, 1 + rng.index(60), rng);
            const auto xi = random_boundary(w, 5.0, rng.index(15), rng);
            const double ref = oracle::hamiltonian(eta, xi, w, spec);
            CHECK_THAT(hamiltonian(eta, xi, w, spec), WithinAbs(ref, 1e-10 * (1.0 + std::abs(ref))));
        }
    }
}

TEST_CASE("hamiltonian is a quadratic form invariant under relabeling", "[interaction][property]") {
    const auto spec = attractive();
    const auto w = Window::centered_block(spec.grid, 2);
    Rng rng(21);
    for (int rep = 0; rep < 30; ++rep) {
        const auto eta = random_measure(w, 40, rng);
        const auto xi = random_boundary(w, 5.0, 10, rng);
        const double h = hamiltonian(eta, xi, w, spec);

        DiscreteMeasure doubled(1), doubled_xi(1);
        for (std::size_t i = 0; i < eta.size(); ++i) doubled.add(eta.position(i), 2.0 * eta.mark(i));
        for (std::size_t i = 0; i < xi.size(); ++i) doubled_xi.add(xi.position(i), 2.0 * xi.mark(i));
        CHECK(hamiltonian(doubled, doubled_xi, w, spec) == 4.0 * h);

        std::vector<std::size_t> perm(eta.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        DiscreteMeasure shuffled(1);
        for (auto i : perm) shuffled.add(eta.position(i), eta.mark(i));
        CHECK_THAT(hamiltonian(shuffled, xi, w, spec), WithinAbs(h, 1e-12 * (1.0 + std::abs(h))));
    }
}

TEST_CASE("far boundary atoms leave H unchanged", "[interaction][property]") {
    const auto spec = attractive();
    const auto w = Window::centered_block(spec.grid, 1);  // [-1.5, 1.5)
    Rng rng(33);
    for (int rep = 0; rep < 30; ++rep) {
        const auto eta = random_measure(w, 30, rng);
        const auto xi = random_boundary(w, 2.5, 5, rng);
        DiscreteMeasure xi_far = xi;
        xi_far.add(std::vector{1.5 + 1.5 + 1e-9 + rng.uniform(0.0, 3.0)}, 5.0);
        xi_far.add(std::vector{-1.5 - 1.5 - 1e-9 - rng.uniform(0.0, 3.0)}, 5.0);
        CHECK(hamiltonian(eta, xi_far, w, spec) == hamiltonian(eta, xi, w, spec));
    }
}

TEST_CASE("energy increments", "[interaction]") {
    const auto spec = default_core_shell();
    const auto w = Window::centered_block(kLine, 2);
    DiscreteMeasure none(1);
    CHECK(energy_increment(none, none, w, spec, Birth{{0.3}, 1.5}) == 10.0 * 1.5 * 1.5);

    Rng rng(41);
    const auto eta = random_measure(w, 20, rng);
    const auto xi = random_boundary(w, 4.0, 5, rng);
    LocalEnergy e(spec, w, xi);
    DiscreteMeasure state = eta;
    e.reset(state);
    const std::size_t id = 7;
    const auto x = state.position(id);
    const double s = state.mark(id);
    const double d = e.increment(state, Death{id});
    e.apply(state, Death{id});
    const double b = e.increment(state, Birth{x, s});
    CHECK_THAT(d + b, WithinAbs(0.0, 1e-10));
}

TEST_CASE("incremental energy tracks full recomputation", "[interaction][property]") {
    Rng rng(55);
    for (const auto& spec : {default_core_shell(), attractive()}) {
        const auto w = Window::centered_block(spec.grid, 3);
        const auto xi = random_boundary(w, 6.0, 20, rng);
        DiscreteMeasure eta = random_measure(w, 200, rng);
        LocalEnergy e(spec, w, xi);
        e.reset(eta);
        double h = e.hamiltonian(eta);
        for (int step = 0; step < 1000; ++step) {
            Move mv;
            const double u = rng.uniform();
            if (u < 0.35 || eta.size() < 2) {
                std::vector<double> x(1);
                w.sample_point(rng, x);
                mv = Birth{x, 0.05 + rng.exponential()};
            } else if (u < 0.7) {
                mv = Death{rng.index(eta.size())};
            } else {
                mv = Resize{rng.index(eta.size()), 0.05 + rng.exponential()};
            }
            h += e.increment(eta, mv);
            e.apply(eta, mv);
            if (step % 50 == 0 || step == 999) {
                const double ref = oracle::hamiltonian(eta, xi, w, spec);
                REQUIRE_THAT(h, WithinAbs(ref, 1e-9 * std::max(1.0, std::abs(ref))));
            }
        }
    }
}

TEST_CASE("stability lower bound", "[interaction][property]") {
    const auto cs = default_core_shell();
    const auto q0 = Window::centered_block(kLine, 0);
    DiscreteMeasure none(1);
    CHECK(stability_lower_bound(none, none, q0, cs) == 0.0);

    DiscreteMeasure one(1);
    one.add(std::vector{0.1}, 1.5);
    one.add(std::vector{-0.2}, 0.5);
    // [A - 2 m b] eta(Q_0)^2 with A = 10, m = 4, b = 1.
    CHECK_THAT(stability_lower_bound(one, none, q0, cs), WithinRel(2.0 * 4.0, 1e-12));
    CHECK_THAT(stability_lower_bound_cube(one, none, CubeIndex{0}, cs), WithinRel(6.0 * 4.0, 1e-12));

    Rng rng(77);
    for (const auto& spec : {cs, attractive()}) {
        for (int rep = 0; rep < 2000; ++rep) {
            const auto w = Window::centered_block(spec.grid, static_cast<int>(rng.index(3)));
            const auto eta = random_measure(w, rng.index(30), rng);
            const auto xi = random_boundary(w, 6.0, rng.index(20), rng);
            const double h = oracle::hamiltonian(eta, xi, w, spec);
            const double bound = stability_lower_bound(eta, xi, w, spec);
            INFO("H " << h << " bound " << bound);
            REQUIRE(h >= bound - 1e-9 * (1.0 + std::abs(h)));
        }
    }
}

TEST_CASE("gnz weight", "[interaction]") {
    const auto spec = unit_step();
    DiscreteMeasure none(1);
    CHECK(gnz_weight(2.0, std::vector{0.5}, none, spec) == 0.0);
    DiscreteMeasure eta(1);
    eta.add(std::vector{0.0}, 1.0);
    CHECK(gnz_weight(2.0, std::vector{0.5}, eta, spec) == 4.0);
    CHECK(gnz_weight(2.0, std::vector{0.5}, eta, spec, GnzWeight::Literal) == 8.0);

    Rng rng(9);
    const auto cs = attractive();
    for (int i = 0; i < 100; ++i) {
        const auto w = Window::centered_block(cs.grid, 2);
        const auto m = random_measure(w, 10, rng);
        const std::vector<double> x{rng.uniform(-3.0, 3.0)};
        const double s = rng.exponential();
        CHECK_THAT(gnz_weight(2.0 * s, x, m, cs), WithinAbs(2.0 * gnz_weight(s, x, m, cs), 1e-12));
    }
}

TEST_CASE("bound constants examples", "[interaction]") {
    const auto cs = default_core_shell();
    const auto q0 = Window::centered_block(kLine, 0);
    auto c = bound_constants(cs, 1.0, 1.0, q0);
    CHECK_THAT(c.lambda0, WithinRel(6.0, 1e-12));
    CHECK_THAT(c.lambda0_zero_bc, WithinRel(2.0, 1e-12));
    CHECK_THAT(c.C_phi, WithinRel(10.0, 1e-14));
    CHECK_THAT(c.Upsilon_eps, WithinRel(80.0, 1e-12));
    CHECK_THAT(c.B_eps, WithinRel((1.0 + 10.0) * 4.0, 1e-12));
    CHECK_FALSE(c.eps_admissible);

    const auto step = certify_or_throw(PairPotential::step(10.0, 1.0), kLine);
    c = bound_constants(step, 1.0, 0.1, q0);
    CHECK_THAT(c.B_eps, WithinRel(0.1 * 10.0 * 4.0, 1e-12));
    CHECK(c.lambda_min == 0.0);
    CHECK(c.lambda0 == 10.0);
    CHECK(c.eps_admissible);

    // Default eps_h and the log C_lambda formula with the midpoint fraction.
    const double eps = default_eps_h(cs, 1.0);
    CHECK_THAT(eps, WithinRel(0.025, 1e-12));
    c = bound_constants(cs, 1.0, eps, q0);
    CHECK_THAT(c.Upsilon_eps, WithinRel(10.0 * (4.0 + 4.0 / 0.025), 1e-12));
    CHECK_THAT(c.B_eps, WithinRel(5.0, 1e-12));
    const double frac = 0.5 * (1.0 + 5.0 / 6.0);
    CHECK_THAT(c.log_C_lambda(6.0), WithinRel(c.Upsilon_eps / (1.0 - frac), 1e-12));
    // Below B_eps the lambda0 value is used.
    CHECK(c.log_C_lambda(1.0) == c.log_C_lambda(6.0));
    CHECK_THROWS_AS(c.log_C_lambda(7.0), BoundsError);
    CHECK_THROWS_AS(c.log_C_lambda(6.0, 0.5), BoundsError);
    CHECK_THAT(c.dobrushin_bound(3.0, 2.0), WithinRel((c.Upsilon_eps + 5.0 / 4.0 * 2.0) / 3.0, 1e-12));
    CHECK_THROWS_AS(bound_constants(cs, 1.0, 0.0, q0), BoundsError);
}
