#include "chroma/chromatic.hpp"
#include "chroma/cross_check.hpp"
#include "chroma/dirichlet.hpp"
#include "chroma/fixtures.hpp"
#include "chroma/integral.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace chroma;

namespace {

// Star with boundary values 2, 1, 0 on t0, t1, t2 (edge i joins v and ti).
AugmentedGraph worked_star()
{
    Graph point;
    point.add_vertex("v");
    return augment_k(point, 2, {2.0, 1.0, 0.0});
}

EdgeMap<double> conductances(const Graph& g, const std::vector<double>& point)
{
    EdgeMap<double> c;
    for (std::size_t i = 0; i < point.size(); ++i)
        c[g.edges()[i].id] = point[i];
    return c;
}

double within_sigmas(const IntegralEstimate& e, double exact)
{
    return std::abs(z_score(e.mean, e.standard_error, exact));
}

}  // namespace

TEST_SUITE("integral")
{
    TEST_CASE("simplex samples")
    {
        for (std::size_t m : {1u, 3u, 7u}) {
            const auto a = sample_simplex(m, 5, 17);
            const auto b = sample_simplex(m, 5, 17);
            CHECK(a.point == b.point);
            double sum = 0.0;
            for (double x : a.point) {
                CHECK(x > 0.0);
                sum += x;
            }
            CHECK(std::abs(sum - 1.0) < 1e-14);
        }
        CHECK(sample_simplex(4, 5, 17).point != sample_simplex(4, 5, 18).point);
        CHECK(sample_simplex(4, 5, 17).point != sample_simplex(4, 6, 17).point);
    }

    TEST_CASE("simplex coordinates are exchangeable")
    {
        const std::size_t m = 5, n = 40000;
        std::vector<double> sum(m, 0.0), sq(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = sample_simplex(m, 99, i);
            for (std::size_t j = 0; j < m; ++j) {
                sum[j] += s.point[j];
                sq[j] += s.point[j] * s.point[j];
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double mean = sum[j] / n;
            const double se = std::sqrt((sq[j] / n - mean * mean) / n);
            CHECK(std::abs(mean - 1.0 / m) < 3 * se);
        }
    }

    TEST_CASE("integrand of the worked star")
    {
        const auto s = worked_star();
        for (std::uint64_t i = 0; i < 50; ++i) {
            const auto p = sample_simplex(3, 1, i).point;
            const double c0 = p[0], c1 = p[1];
            const double h = 2 * c0 + c1;
            const double denom = -4 * c0 * c0 - 4 * c1 * c0 + 4 * c0 - c1 * c1 + c1;
            const double expected = std::pow(h - 2, 2) * std::pow(h - 1, 2) * h * h / std::pow(denom, 3);
            CHECK(integrand(s.graph, conductances(s.graph, p), s.boundary_values) ==
                  doctest::Approx(expected).epsilon(1e-10));
        }
        const double third = 1.0 / 3.0;
        CHECK(integrand(s.graph, conductances(s.graph, {third, third, 1 - 2 * third}), s.boundary_values) ==
              doctest::Approx(0.0).scale(1e-12));
    }

    TEST_CASE("integrand agrees with the Jacobian and is non-negative")
    {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const Graph g = oracle::random_connected(rng, 1 + trial % 3, 0.5);
            const int k = 1 + trial % 3;
            const auto aug = augment_k(g, k, default_boundary_values(k));
            const std::size_t m = aug.graph.edge_count();
            for (std::uint64_t i = 0; i < 10; ++i) {
                const auto c = conductances(aug.graph, sample_simplex(m, 7, i).point);
                const double value = integrand(aug.graph, c, aug.boundary_values);
                CHECK(value >= 0.0);
                const auto h = solve_dirichlet(aug.graph, c, aug.boundary_values);
                const double via_jacobian = psi_jacobian_det(aug.graph, c, aug.boundary_values).magnitude /
                                            std::pow(h.total_energy, static_cast<double>(m));
                CHECK(value == doctest::Approx(via_jacobian).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("integrand preconditions")
    {
        const auto s = worked_star();
        CHECK_THROWS_AS(integrand(s.graph, conductances(s.graph, {0.5, 0.5, 0.5}), s.boundary_values),
                        std::invalid_argument);
        CHECK_THROWS_AS(integrand(s.graph, conductances(s.graph, {0.5, 0.5, 0.0}), s.boundary_values),
                        std::invalid_argument);
        VertexMap<double> flat = s.boundary_values;
        for (auto& [v, x] : flat)
            x = 1.0;
        CHECK_THROWS_AS(integrand(s.graph, conductances(s.graph, {0.2, 0.3, 0.5}), flat), std::domain_error);
    }

    TEST_CASE("estimates are reproducible and thread independent")
    {
        const Graph g = make_fixture("k2").graph;
        for (auto sampler : {Sampler::simplex, Sampler::fiber}) {
            EstimateOptions one, many;
            one.sampler = many.sampler = sampler;
            many.threads = 6;
            const auto a = estimate_chi(g, 2, 20000, 42, one);
            const auto b = estimate_chi(g, 2, 20000, 42, many);
            CHECK(a.mean == b.mean);
            CHECK(a.standard_error == b.standard_error);
            CHECK(a.samples == 20000);
            CHECK(a.k == 2);
            CHECK(a.boundary_values == std::vector<double>{0.0, 1.0, 2.0});
            CHECK(estimate_chi(g, 2, 20000, 43, one).mean != a.mean);
        }
    }

    TEST_CASE("simplex estimates of the small examples")
    {
        const Graph point = make_fixture("point").graph;
        const Graph k2 = make_fixture("k2").graph;
        CHECK(within_sigmas(estimate_chi(point, 2, 100000, 1), 2.0) < 4.0);
        CHECK(within_sigmas(estimate_chi(point, 1, 1000, 1), 1.0) < 3.0);
        CHECK(within_sigmas(estimate_chi(k2, 1, 100000, 1), 2.0) < 3.0);
    }

    TEST_CASE("fiber estimates match |chi(-k)| on the fixtures")
    {
        EstimateOptions options;
        options.sampler = Sampler::fiber;
        options.threads = 4;
        for (const auto* name : {"point", "k2", "path3", "triangle"})
            for (int k = 1; k <= 3; ++k) {
                const Graph g = make_fixture(name).graph;
                const double exact = abs(chi_at_negative(g, k)).convert_to<double>();
                if (exact > 24)
                    continue;
                const auto e = estimate_chi(g, k, 100000, 7, options);
                CAPTURE(name);
                CAPTURE(k);
                CHECK(within_sigmas(e, exact) < 4.0);
                CHECK(e.min_value >= 0.0);
            }
    }

    TEST_CASE("fiber weights")
    {
        const auto s = worked_star();
        for (std::uint64_t i = 0; i < 100; ++i) {
            const double w = fiber_weight(s.graph, s.boundary_values, 3, i);
            CHECK(w >= 0.0);
            CHECK(w == fiber_weight(s.graph, s.boundary_values, 3, i));
        }
        // interior vertices not adjacent to every terminal
        Graph g;
        for (const auto* name : {"a", "b", "c", "d"})
            g.add_vertex(name);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        g.set_boundary(0, true);
        g.set_boundary(3, true);
        CHECK_THROWS_AS(fiber_weight(g, {{0, 0.0}, {3, 1.0}}, 1, 0), std::invalid_argument);
    }

    TEST_CASE("boundary value invariance")
    {
        const Graph point = make_fixture("point").graph;
        const auto r = boundary_value_invariance(point, 2, {2, 1, 0}, {5, 1, 0}, 100000, 9);
        CHECK(r.consistent);
        CHECK(r.a.mean == doctest::Approx(2.0).epsilon(0.1));
        CHECK(r.b.mean == doctest::Approx(2.0).epsilon(0.1));

        const auto same = boundary_value_invariance(point, 2, {2, 1, 0}, {2, 1, 0}, 10000, 9);
        CHECK(same.a.mean == same.b.mean);
        CHECK(same.difference_sigmas == 0.0);

        // Uniform conductances all but miss the orientation through the short
        // gap when the values are skewed; the fiber sampler stratifies by gap.
        const auto skew = boundary_value_invariance(point, 2, {2, 1, 0}, {1e6, 1, 0}, 100000, 9, 1, Sampler::fiber);
        CHECK(skew.consistent);
        CHECK(skew.b.mean == doctest::Approx(2.0).epsilon(0.05));
    }
}
