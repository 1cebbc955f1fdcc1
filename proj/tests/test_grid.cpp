#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parlab/grid.hpp"
#include "test_helpers.hpp"

using namespace parlab;

TEST_CASE("grid spec snapping and node layout") {
    GridSpec g = GridSpec::make(1, 0.02, 1.0);
    CHECK(g.nodes_per_axis() == 101);
    CHECK(g.nodes_per_axis() % 2 == 1);
    CHECK(g.axis_coord(0, 50) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.axis_coord(0, 0) == doctest::Approx(-1.0));
    CHECK(g.axis_coord(0, 100) == doctest::Approx(1.0));

    GridSpec g2 = GridSpec::make(2, 0.1, 0.5);
    CHECK(g2.node_count() == 21 * 21);
    CHECK(g2.is_boundary(g2.index(0, 5)));
    CHECK(g2.is_boundary(g2.index(5, 20)));
    CHECK(!g2.is_boundary(g2.index(5, 5)));

    CHECK_THROWS_AS(GridSpec::make(3, 0.1, 1.0), InvalidGrid);
    CHECK_THROWS_AS(GridSpec::make(1, 0.48, 1.0), InvalidGrid); // not near any 1/m
}

TEST_CASE("intrinsic cylinder time depth") {
    // depth = r^2 lambda^-gamma
    IntrinsicCylinder c{{0, 0}, 0.0, 0.5, 0.5, 2.0};
    CHECK(c.depth() == doctest::Approx(0.25 * 4.0));
    c.lambda = 1.0;
    c.gamma = 1.7;
    CHECK(c.depth() == doctest::Approx(0.25));
    c.gamma = 0.0;
    c.lambda = 0.3;
    CHECK(c.depth() == doctest::Approx(0.25)); // gamma = 0: independent of lambda
}

TEST_CASE("nodes_in_cylinder membership and resolution errors") {
    GridSpec g = GridSpec::make(1, 0.1, 1.0, 0.05);
    ScalarField f = ScalarField::from_function(g, [](Vec2, double) { return 0.0; });

    IntrinsicCylinder cyl{{0, 0}, 0.0, 0.35, 1.0, 0.0};
    CylinderNodes cn = nodes_in_cylinder(f, cyl);
    for (int i : cn.nodes) CHECK(std::abs(g.coords(i)[0]) < 0.35);
    for (int s : cn.slice_ids) {
        CHECK(f.times[s] > -cyl.depth() - 1e-15);
        CHECK(f.times[s] <= 1e-15);
    }
    CHECK(cn.nodes.size() == 7); // x = -0.3 .. 0.3, strict inequality

    // under-resolved: fewer than 4 spatial nodes
    IntrinsicCylinder tiny{{0, 0}, 0.0, 0.12, 1.0, 0.0};
    CHECK_THROWS_AS(nodes_in_cylinder(f, tiny), EmptyCylinder);
    // under-resolved in time: depth smaller than one slice spacing
    IntrinsicCylinder shallow{{0, 0}, 0.0, 0.35, 1.0, 0.0};
    shallow.r = 0.35;
    shallow.lambda = 1.0;
    shallow.gamma = 0.0;
    ScalarField coarse = f;
    coarse.times = {-1.0, 0.0};
    coarse.slices = {f.slices.front(), f.slices.back()};
    CHECK_THROWS_AS(nodes_in_cylinder(coarse, shallow), EmptyCylinder);
}

TEST_CASE("cylinder node count monotone in r and in depth") {
    GridSpec g = GridSpec::make(2, 0.1, 1.0, 0.02);
    ScalarField f = ScalarField::from_function(g, [](Vec2, double) { return 1.0; });
    std::size_t prev = 0;
    for (double r : {0.3, 0.5, 0.7, 0.9}) {
        IntrinsicCylinder cyl{{0, 0}, 0.0, r, 0.8, 1.5};
        std::size_t count = nodes_in_cylinder(f, cyl).pair_count();
        CHECK(count >= prev);
        prev = count;
    }
    // gamma > 0: smaller lambda, deeper cylinder, at least as many slices
    std::size_t shallow_slices =
        nodes_in_cylinder(f, {{0, 0}, 0.0, 0.5, 0.9, 2.0}).slice_ids.size();
    std::size_t deep_slices =
        nodes_in_cylinder(f, {{0, 0}, 0.0, 0.5, 0.4, 2.0}).slice_ids.size();
    CHECK(deep_slices >= shallow_slices);
    // gamma = 0: lambda irrelevant
    CHECK(nodes_in_cylinder(f, {{0, 0}, 0.0, 0.5, 0.9, 0.0}).slice_ids.size() ==
          nodes_in_cylinder(f, {{0, 0}, 0.0, 0.5, 0.1, 0.0}).slice_ids.size());
}

TEST_CASE("sample reproduces affine functions exactly") {
    for (int n : {1, 2}) {
        GridSpec g = GridSpec::make(n, 0.1, 0.5, 0.05);
        auto affine = [](Vec2 x, double t) { return 3.0 * x[0] + 2.0 - 0.7 * t + 0.4 * x[1]; };
        ScalarField f = ScalarField::from_function(g, affine);
        testutil::Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            Vec2 x{rng.uniform(-0.95, 0.95), n == 2 ? rng.uniform(-0.95, 0.95) : 0.0};
            double t = rng.uniform(-0.45, 0.0);
            double expect = affine(x, t);
            CHECK(sample(f, x, t) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("sample at a node returns the stored value exactly") {
    GridSpec g = GridSpec::make(2, 0.125, 0.5, 0.1);
    ScalarField f = ScalarField::from_function(
        g, [](Vec2 x, double t) { return std::sin(3 * x[0]) * std::cos(x[1]) + t; });
    int node = g.index(3, 7);
    double got = sample(f, g.coords(node), f.times[2]);
    CHECK(got == f.slices[2][node]); // bit-exact
}

TEST_CASE("sample midpoint of x^2 shows the h^2/4 interpolation error") {
    GridSpec g = GridSpec::make(1, 0.1, 0.5, 0.1);
    ScalarField f =
        ScalarField::from_function(g, [](Vec2 x, double) { return x[0] * x[0]; });
    double got = sample(f, {0.05, 0.0}, 0.0);
    CHECK(got == doctest::Approx(0.005).epsilon(1e-13)); // true value 0.0025, error h^2/4
}

TEST_CASE("sample rejects points outside the extent") {
    GridSpec g = GridSpec::make(1, 0.1, 0.5, 0.1);
    ScalarField f = ScalarField::from_function(g, [](Vec2, double) { return 0.0; });
    CHECK_THROWS_AS(sample(f, {1.2, 0.0}, -0.1), OutOfDomain);
    CHECK_THROWS_AS(sample(f, {0.0, 0.0}, -0.9), OutOfDomain);
    CHECK_THROWS_AS(sample(f, {0.0, 0.0}, 0.2), OutOfDomain);
}

TEST_CASE("field validation catches malformed inputs") {
    GridSpec g = GridSpec::make(1, 0.1, 0.5, 0.1);
    ScalarField f = ScalarField::from_function(g, [](Vec2, double) { return 0.0; });
    CHECK_NOTHROW(f.validate());
    ScalarField bad = f;
    bad.slices[1][3] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), InvalidGrid);
    bad = f;
    bad.times[1] = bad.times[0];
    CHECK_THROWS_AS(bad.validate(), InvalidGrid);
}
