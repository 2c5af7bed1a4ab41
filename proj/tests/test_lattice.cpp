#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gammagibbs/lattice.hpp"
#include "gammagibbs/measure.hpp"
#include "gammagibbs/rng.hpp"

using namespace gammagibbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<CubeIndex> sorted(std::vector<CubeIndex> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<CubeIndex> ids1(std::initializer_list<std::int64_t> ks) {
    std::vector<CubeIndex> out;
    for (auto k : ks) out.push_back(CubeIndex{k});
    return out;
}

// Every j != k with box distance <= R, by scanning a generous cube of offsets.
std::vector<CubeIndex> brute_neighbors(const CubeIndex& k, const CubeGrid& grid) {
    const int d = grid.dimension();
    const auto reach = static_cast<std::int64_t>(std::ceil(grid.range() / grid.edge())) + 2;
    std::vector<CubeIndex> out;
    std::vector<std::int64_t> o(static_cast<std::size_t>(d), -reach);
    for (;;) {
        CubeIndex j = k + CubeIndex(o);
        if (j != k && grid.cube_distance(j, k) <= grid.range()) out.push_back(j);
        int i = 0;
        while (i < d && ++o[static_cast<std::size_t>(i)] > reach) o[static_cast<std::size_t>(i++)] = -reach;
        if (i == d) break;
    }
    return sorted(out);
}

}  // namespace

TEST_CASE("cube edge gives diameter delta", "[lattice]") {
    for (int d = 1; d <= 8; ++d) {
        for (double delta : {0.3, 1.0, 2.5}) {
            CubeGrid g(d, delta, delta);
            CHECK_THAT(g.edge(), WithinRel(delta / std::sqrt(double(d)), 1e-15));
            CHECK_THAT(std::sqrt(double(d)) * g.edge(), WithinRel(delta, 1e-12));
        }
    }
}

TEST_CASE("cube_index uses the half-open convention", "[lattice]") {
    CubeGrid g1(1, 1.0, 1.0);
    CHECK(cube_index(std::vector{0.3}, g1) == CubeIndex{0});
    CHECK(cube_index(std::vector{0.5}, g1) == CubeIndex{1});
    CHECK(cube_index(std::vector{-0.5}, g1) == CubeIndex{0});
    CHECK(cube_index(std::vector{-0.5000001}, g1) == CubeIndex{-1});

    CubeGrid g2(2, 0.5 * std::sqrt(2.0), 1.0);
    REQUIRE_THAT(g2.edge(), WithinRel(0.5, 1e-15));
    CHECK(cube_index(std::vector{0.74, -0.26}, g2) == CubeIndex{1, -1});
}

TEST_CASE("every point lies in the cube it is assigned to", "[lattice][property]") {
    Rng rng(7);
    for (int d = 1; d <= 4; ++d) {
        CubeGrid g(d, 0.7, 1.1);
        for (int n = 0; n < 2000; ++n) {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (auto& v : x) v = rng.uniform(-5.0, 5.0);
            const auto k = cube_index(x, g);
            for (int i = 0; i < d; ++i) {
                CHECK(g.lower(k, i) <= x[static_cast<std::size_t>(i)]);
                CHECK(x[static_cast<std::size_t>(i)] < g.upper(k, i));
            }
        }
    }
}

TEST_CASE("interaction_parameter examples", "[lattice]") {
    CHECK_THAT(interaction_parameter(1, 1.0, 1.0), WithinRel(4.0, 1e-14));
    CHECK_THAT(interaction_parameter(1, 2.0, 1.0), WithinRel(6.0, 1e-14));
    CHECK_THAT(interaction_parameter(2, 1.0, 1.0), WithinRel(8.0 * std::numbers::pi, 1e-14));
    // nu_3 = 4 pi / 3, d^{3/2} = 3 sqrt 3, (R/delta + 1)^3 = 8.
    CHECK_THAT(interaction_parameter(3, 0.5, 0.5), WithinRel(4.0 * std::numbers::pi / 3.0 * 3.0 * std::sqrt(3.0) * 8.0, 1e-14));
}

TEST_CASE("neighbor_indices on the unit line", "[lattice]") {
    CubeGrid g(1, 1.0, 1.0);
    CHECK(sorted(neighbor_indices(CubeIndex{0}, g)) == ids1({-2, -1, 1, 2}));
    CHECK(sorted(neighbor_indices(CubeIndex{5}, g)) == ids1({3, 4, 6, 7}));
}

TEST_CASE("neighbor_indices matches exhaustive enumeration", "[lattice][property]") {
    for (int d = 1; d <= 3; ++d) {
        for (double ratio : {1.0, 1.5, 2.0, 4.0}) {
            CubeGrid g(d, 1.0, ratio);
            const CubeIndex k(std::vector<std::int64_t>(static_cast<std::size_t>(d), 3));
            const auto got = sorted(neighbor_indices(k, g));
            CHECK(got == brute_neighbors(k, g));
            // Touching cubes are always present.
            CHECK(got.size() >= static_cast<std::size_t>(std::pow(3, d)) - 1);
            CHECK(double(got.size()) <= interaction_parameter(d, ratio, 1.0) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("neighbor relation is symmetric", "[lattice][property]") {
    CubeGrid g(2, 1.0, 1.7);
    Rng rng(11);
    for (int n = 0; n < 100; ++n) {
        CubeIndex a{std::int64_t(rng.index(9)) - 4, std::int64_t(rng.index(9)) - 4};
        CubeIndex b{std::int64_t(rng.index(9)) - 4, std::int64_t(rng.index(9)) - 4};
        const auto na = neighbor_indices(a, g), nb = neighbor_indices(b, g);
        const bool ab = std::find(na.begin(), na.end(), b) != na.end();
        const bool ba = std::find(nb.begin(), nb.end(), a) != nb.end();
        CHECK(ab == ba);
    }
}

TEST_CASE("index_hull examples", "[lattice]") {
    CubeGrid g(1, 1.0, 1.0);
    auto h = index_hull(Window::from_cubes(g, {CubeIndex{0}}), g);
    CHECK(sorted(h.interior) == ids1({0}));
    CHECK(sorted(h.shell) == ids1({-2, -1, 1, 2}));

    h = index_hull(Window::from_cubes(g, {CubeIndex{0}, CubeIndex{1}}), g);
    CHECK(sorted(h.interior) == ids1({0, 1}));
    CHECK(sorted(h.shell) == ids1({-2, -1, 2, 3}));

    h = index_hull(Window::from_cubes(g, {}), g);
    CHECK(h.interior.empty());
    CHECK(h.shell.empty());
}

TEST_CASE("tempered_norm examples", "[lattice]") {
    CubeGrid g(1, 1.0, 1.0);
    DiscreteMeasure eta(1);
    CHECK(tempered_norm(eta, 1.0, g) == 0.0);
    eta.add(std::vector{0.1}, 2.5);
    CHECK_THAT(tempered_norm(eta, 3.0, g), WithinRel(2.5, 1e-15));

    DiscreteMeasure two(1);
    two.add(std::vector{0.0}, 1.0);
    two.add(std::vector{1.0}, 2.0);
    CHECK_THAT(tempered_norm(two, 1.0, g), WithinRel(std::sqrt(1.0 + 4.0 * std::exp(-1.0)), 1e-14));
}

TEST_CASE("tempered_norm decreases in alpha", "[lattice][property]") {
    CubeGrid g(2, 1.0, 1.0);
    Rng rng(3);
    for (int n = 0; n < 200; ++n) {
        DiscreteMeasure eta(2);
        const auto atoms = 1 + rng.index(20);
        for (std::size_t i = 0; i < atoms; ++i)
            eta.add(std::vector{rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)}, rng.exponential());
        const double a = rng.uniform(0.0, 2.0), b = a + rng.uniform(0.0, 2.0);
        CHECK(tempered_norm(eta, b, g) <= tempered_norm(eta, a, g));
    }
}

TEST_CASE("window volume and membership", "[lattice]") {
    CubeGrid g(2, std::sqrt(2.0), 1.5);
    const auto w = Window::centered_block(g, 1);
    CHECK(w.cubes().size() == 9);
    CHECK_THAT(w.volume(), WithinRel(9.0, 1e-14));
    CHECK(w.contains(std::vector{1.49, -1.5}));
    CHECK_FALSE(w.contains(std::vector{1.5, 0.0}));

    const auto box = Window::box({0.0, 0.0}, {2.0, 0.5});
    CHECK_THAT(box.volume(), WithinRel(1.0, 1e-15));
    CHECK(box.contains(std::vector{0.0, 0.0}));
    CHECK_FALSE(box.contains(std::vector{2.0, 0.1}));
}
