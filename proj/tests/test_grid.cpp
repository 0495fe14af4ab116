#include <doctest.h>

#include <pwsim/grid.hpp>
#include <pwsim/interp.hpp>

using namespace pwsim;

TEST_CASE("1-D grid spacing") {
    const ConfigurationGrid g = make_grid({{-10.0, 10.0, 256}});
    CHECK(g.dims() == 1);
    CHECK(g.size() == 256);
    CHECK(g.spacing(0) == 0.078125);
    CHECK(g.cell_volume() == doctest::Approx(0.078125));
    CHECK(g.coordinate(0, 0) == -10.0);
}

TEST_CASE("2-D grid size is the product of axis points") {
    const ConfigurationGrid g = make_grid({{-5.0, 5.0, 64}, {-5.0, 5.0, 64}});
    CHECK(g.size() == 4096);
    CHECK(g.stride(0) == 64);
    CHECK(g.stride(1) == 1);
}

TEST_CASE("construction rejections") {
    CHECK_THROWS_AS(make_grid({{0.0, 1.0, 4}}), Error);          // too few points
    CHECK_THROWS_AS(make_grid({{1.0, 0.0, 16}}), Error);         // min >= max
    CHECK_THROWS_AS(make_grid({{0.0, 1.0, 8192}, {0.0, 1.0, 16384}}), Error);  // over cap
    CHECK_NOTHROW(make_grid({{0.0, 1.0, 8192}, {0.0, 1.0, 8192}}));  // exactly at cap
}

TEST_CASE("flatten/unflatten round-trip") {
    const ConfigurationGrid g = make_grid({{-1.0, 1.0, 8}, {0.0, 2.0, 16}, {-3.0, 3.0, 8}});
    std::vector<std::size_t> idx(3);
    for (std::size_t flat = 0; flat < g.size(); flat += 13) {
        g.unflatten(flat, idx);
        CHECK(g.flatten(idx) == flat);
        const BeableConfiguration q = g.node_position(flat);
        const auto node = g.node_at(q);
        REQUIRE(node.has_value());
        CHECK(*node == flat);
    }
}

TEST_CASE("node lookup rejects off-grid points") {
    const ConfigurationGrid g = make_grid({{-1.0, 1.0, 16}});
    CHECK(g.node_at(BeableConfiguration({0.125})).has_value());
    CHECK_FALSE(g.node_at(BeableConfiguration({0.07})).has_value());
}

TEST_CASE("periodic wrap") {
    const ConfigurationGrid g = make_grid({{-1.0, 1.0, 16}});
    CHECK(g.wrap(0, 1.25) == doctest::Approx(-0.75));
    CHECK(g.wrap(0, -1.25) == doctest::Approx(0.75));
}

TEST_CASE("multilinear interpolation is exact on linear fields") {
    const ConfigurationGrid g = make_grid({{0.0, 1.0, 8}, {0.0, 1.0, 8}}, Boundary::reflecting);
    std::vector<double> field(g.size());
    std::vector<std::size_t> idx(2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        field[i] = 2.0 * g.coordinate(0, idx[0]) - 3.0 * g.coordinate(1, idx[1]) + 0.25;
    }
    const BeableConfiguration q({0.3125, 0.41});
    const InterpStencil s = make_stencil(g, q);
    REQUIRE(s.inside);
    CHECK(s.apply(field) == doctest::Approx(2.0 * 0.3125 - 3.0 * 0.41 + 0.25).epsilon(1e-12));

    // Outside the node span on a reflecting grid.
    const InterpStencil out = make_stencil(g, BeableConfiguration({0.95, 0.5}));
    CHECK_FALSE(out.inside);
}
