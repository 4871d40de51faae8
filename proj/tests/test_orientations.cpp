#include "chroma/chromatic.hpp"
#include "chroma/fixtures.hpp"
#include "chroma/orientations.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace chroma;

namespace {

AugmentedGraph star(const std::vector<double>& values)
{
    Graph point;
    point.add_vertex("v");
    return augment_k(point, static_cast<int>(values.size()) - 1, values);
}

// Bit for edge position i such that the edge points from `from` to `to`.
std::uint64_t pointing(const Graph& g, std::size_t i, VertexIndex from)
{
    const auto& e = g.edges()[i];
    return std::min(e.u, e.v) == from ? (std::uint64_t{1} << i) : 0;
}

}  // namespace

TEST_SUITE("orientations")
{
    TEST_CASE("hand-checked star orientations")
    {
        const auto s = star({2.0, 1.0, 0.0});
        const Graph& g = s.graph;
        const VertexIndex v = g.interior_vertices()[0];
        auto edge_to = [&](VertexIndex t) {
            for (std::size_t i = 0; i < g.edges().size(); ++i)
                if (g.edges()[i].touches(t))
                    return i;
            return std::size_t{99};
        };
        const auto t2 = s.terminals[0], t1 = s.terminals[1], t0 = s.terminals[2];

        // 2 -> v, 1 -> v, v -> 0
        Orientation good{pointing(g, edge_to(t2), t2) | pointing(g, edge_to(t1), t1) | pointing(g, edge_to(t0), v)};
        CHECK(is_compatible(g, good, s.boundary_values));
        CHECK(oracle::compatible(g, good.bits, s.boundary_values));

        // v a sink
        Orientation sink{pointing(g, edge_to(t2), t2) | pointing(g, edge_to(t1), t1) | pointing(g, edge_to(t0), t0)};
        CHECK_FALSE(is_compatible(g, sink, s.boundary_values));

        // 0 -> v -> 2 runs uphill
        Orientation uphill{pointing(g, edge_to(t0), t0) | pointing(g, edge_to(t2), v) | pointing(g, edge_to(t1), v)};
        CHECK_FALSE(is_compatible(g, uphill, s.boundary_values));
    }

    TEST_CASE("counts on small augmented graphs")
    {
        const auto s2 = star({2.0, 1.0, 0.0});
        CHECK(count_compatible(s2.graph, s2.boundary_values) == 2);
        const auto s1 = star({1.0, 0.0});
        CHECK(count_compatible(s1.graph, s1.boundary_values) == 1);
        const auto k2 = augment_k(make_fixture("k2").graph, 2, default_boundary_values(2));
        CHECK(count_compatible(k2.graph, k2.boundary_values) == 6);
    }

    TEST_CASE("library check equals the definition on every orientation")
    {
        std::mt19937_64 rng(53);
        for (int trial = 0; trial < 12; ++trial) {
            const Graph g = oracle::random_connected(rng, 1 + trial % 3, 0.5);
            const int k = 1 + trial % 3;
            const auto aug = augment_k(g, k, default_boundary_values(k));
            if (aug.graph.edge_count() > 14)
                continue;
            for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << aug.graph.edge_count()); ++bits)
                REQUIRE(is_compatible(aug.graph, Orientation{bits}, aug.boundary_values) ==
                        oracle::compatible(aug.graph, bits, aug.boundary_values));
        }
    }

    TEST_CASE("orientation count equals |chi(-k)|")
    {
        std::mt19937_64 rng(59);
        for (int trial = 0; trial < 24; ++trial) {
            const Graph g = oracle::random_connected(rng, 1 + trial % 4, 0.5);
            for (int k = 1; k <= 3; ++k) {
                const auto aug = augment_k(g, k, default_boundary_values(k));
                if (aug.graph.edge_count() > 22)
                    continue;
                CHECK(count_compatible(aug.graph, aug.boundary_values) == abs(chi_at_negative(g, k)));
            }
        }
        for (const auto* name : {"point", "k2", "path3", "triangle"})
            for (int k = 1; k <= 3; ++k) {
                const Graph g = make_fixture(name).graph;
                const auto aug = augment_k(g, k, default_boundary_values(k));
                CHECK(count_compatible(aug.graph, aug.boundary_values) == abs(chi_at_negative(g, k)));
            }
    }

    TEST_CASE("five-vertex graphs")
    {
        std::mt19937_64 rng(61);
        for (int trial = 0; trial < 3; ++trial) {
            const Graph g = oracle::random_connected(rng, 5, 0.2);
            const auto aug = augment_k(g, 1, default_boundary_values(1));
            OrientationCountOptions options;
            options.threads = 4;
            CHECK(count_compatible(aug.graph, aug.boundary_values, options) == abs(chi_at_negative(g, 1)));
        }
    }

    TEST_CASE("value independence")
    {
        const auto a = star({2.0, 1.0, 0.0});
        BoundaryValues b;
        const double other[] = {0.0, 7.0, 3.0};
        for (std::size_t i = 0; i < 3; ++i)
            b[a.terminals[i]] = other[i];
        const auto r = value_independence_check(a.graph, a.boundary_values, b);
        CHECK(r.independent);
        CHECK(r.count_a == 2);
        CHECK(r.count_b == 2);
        CHECK(value_independence_check(a.graph, a.boundary_values, a.boundary_values).independent);

        std::mt19937_64 rng(67);
        std::uniform_real_distribution<double> unif(-10.0, 10.0);
        const auto k2 = augment_k(make_fixture("k2").graph, 2, default_boundary_values(2));
        for (int trial = 0; trial < 5; ++trial) {
            BoundaryValues x, y;
            for (auto t : k2.terminals) {
                x[t] = unif(rng);
                y[t] = unif(rng);
            }
            CHECK(value_independence_check(k2.graph, x, y).independent);
        }
    }

    TEST_CASE("reversing every edge pairs u with -u")
    {
        std::mt19937_64 rng(71);
        for (int trial = 0; trial < 8; ++trial) {
            const Graph g = oracle::random_connected(rng, 1 + trial % 3, 0.5);
            const auto aug = augment_k(g, 2, {0.0, 1.0, 2.0});
            BoundaryValues negated;
            for (const auto& [t, x] : aug.boundary_values)
                negated[t] = -x;
            const std::uint64_t all = (std::uint64_t{1} << aug.graph.edge_count()) - 1;
            for (std::uint64_t bits = 0; bits <= all; ++bits)
                REQUIRE(is_compatible(aug.graph, Orientation{bits}, aug.boundary_values) ==
                        is_compatible(aug.graph, Orientation{all ^ bits}, negated));
        }
    }

    TEST_CASE("bad input")
    {
        const auto s = star({2.0, 1.0, 0.0});
        BoundaryValues dup = s.boundary_values;
        dup.begin()->second = std::next(dup.begin())->second;
        CHECK_THROWS_AS(count_compatible(s.graph, dup), std::invalid_argument);
        OrientationCountOptions capped;
        capped.edge_cap = 2;
        CHECK_THROWS_AS(count_compatible(s.graph, s.boundary_values, capped), std::length_error);
    }

    TEST_CASE("thread count does not change the result")
    {
        const auto aug = augment_k(make_fixture("triangle").graph, 2, default_boundary_values(2));
        OrientationCountOptions one, many;
        many.threads = 8;
        std::size_t reported = 0;
        many.progress = [&](std::size_t done, std::size_t) { reported = std::max(reported, done); };
        CHECK(count_compatible(aug.graph, aug.boundary_values, one) ==
              count_compatible(aug.graph, aug.boundary_values, many));
        CHECK(reported > 0);
    }
}
