#include "chroma/chromatic.hpp"
#include "chroma/fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace chroma;

namespace {

IntPolynomial poly(std::initializer_list<long long> cs)
{
    std::vector<BigInt> v;
    for (auto c : cs)
        v.emplace_back(c);
    return IntPolynomial(v);
}

BigInt ipow(long long base, std::size_t e)
{
    BigInt r = 1;
    for (std::size_t i = 0; i < e; ++i)
        r *= base;
    return r;
}

// (-1)^n chi(x) must match the brute-force coloring count at 1..n+1, which
// pins a degree-n polynomial.
void check_against_colorings(const Graph& g)
{
    const auto chi = chromatic_polynomial(g);
    CHECK(chi.degree() == static_cast<int>(g.vertex_count()));
    for (int x = 1; x <= static_cast<int>(g.vertex_count()) + 1; ++x)
        CHECK(chi.evaluate(x) == oracle::count_colorings(g, x));
}

}  // namespace

TEST_SUITE("chromatic")
{
    TEST_CASE("polynomial arithmetic")
    {
        const auto p = poly({0, 2, -3, 1});
        CHECK(p.degree() == 3);
        CHECK(p.evaluate(3) == 6);
        CHECK(p.to_string() == "x^3 - 3x^2 + 2x");
        CHECK((poly({1, 1}) * poly({-1, 1})) == poly({-1, 0, 1}));
        CHECK((poly({1, 1}) - poly({1, 1})).is_zero());
        CHECK(poly({0, 1}).shifted(1) == poly({1, 1}));
        CHECK(poly({1, 1}).pow(3) == poly({1, 3, 3, 1}));
        CHECK(IntPolynomial(std::vector<BigInt>{1, 0, 0}).degree() == 0);
    }

    TEST_CASE("small chromatic polynomials")
    {
        CHECK(chromatic_polynomial(make_fixture("point").graph) == poly({0, 1}));
        CHECK(chromatic_polynomial(make_fixture("triangle").graph) == poly({0, 2, -3, 1}));
        // x (x - 1)^2
        CHECK(chromatic_polynomial(make_fixture("path3").graph) == poly({0, 1, -2, 1}));
        CHECK(chromatic_polynomial(make_fixture("k2").graph) == poly({0, -1, 1}));
    }

    TEST_CASE("loops give zero and parallel edges are merged")
    {
        Graph g;
        g.add_vertex("a");
        g.add_vertex("b");
        g.add_edge(0, 1);
        g.add_edge(0, 1);
        CHECK(chromatic_polynomial(g) == poly({0, -1, 1}));
        g.add_edge(1, 1);
        CHECK(chromatic_polynomial(g).is_zero());
        CHECK(tutte_x_slice(g).is_zero());
    }

    TEST_CASE("deletion-contraction matches brute-force colorings")
    {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 40; ++trial) {
            const Graph g = oracle::random_connected(rng, 1 + trial % 8, 0.45);
            check_against_colorings(g);
            for (const auto& e : g.edges()) {
                if (e.is_loop())
                    continue;
                const auto lhs = chromatic_polynomial(g);
                const auto rhs = chromatic_polynomial(delete_edge(g, e.id)) - chromatic_polynomial(contract_edge(g, e.id));
                CHECK(lhs == rhs);
            }
        }
    }

    TEST_CASE("disconnected graphs multiply")
    {
        Graph g = make_fixture("triangle").graph;
        g.add_vertex("lonely");
        CHECK(chromatic_polynomial(g) == poly({0, 2, -3, 1}) * poly({0, 1}));
        check_against_colorings(g);
    }

    TEST_CASE("Tutte slice")
    {
        CHECK(tutte_x_slice(make_fixture("k2").graph) == poly({0, 1}));
        CHECK(tutte_x_slice(make_fixture("triangle").graph) == poly({0, 1, 1}));
        CHECK(tutte_x_slice(make_fixture("path3").graph) == poly({0, 0, 1}));
    }

    TEST_CASE("negative evaluations")
    {
        CHECK(chi_at_negative(make_fixture("point").graph, 2) == -2);
        CHECK(chi_at_negative(make_fixture("triangle").graph, 1) == -6);
        CHECK(chi_at_negative(make_fixture("k2").graph, 2) == 6);
        CHECK_THROWS_AS(chi_at_negative(make_fixture("k2").graph, 0), std::invalid_argument);
    }

    TEST_CASE("Tutte identity and sign alternation on random graphs")
    {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 30; ++trial) {
            const Graph g = oracle::random_connected(rng, 1 + trial % 7, 0.4);
            const auto chi = chromatic_polynomial(g);
            const auto t = tutte_x_slice(g);
            const BigInt sign = g.vertex_count() % 2 == 0 ? 1 : -1;
            for (int k = 1; k <= 5; ++k) {
                const BigInt value = chi.evaluate(-k);
                CHECK(value == sign * k * t.evaluate(1 + k));
                CHECK(chi_at_negative(g, k) == value);
                CHECK(value * sign > 0);
            }
        }
    }

    TEST_CASE("predicted realizations")
    {
        for (int k = 2; k <= 6; ++k) {
            const auto star = make_fixture("star_k", k - 1).graph;
            CHECK(star.boundary_count() == static_cast<std::size_t>(k));
            CHECK(predicted_realizations(star) == k - 2);
        }
        // single interior vertex with four boundary vertices
        CHECK(predicted_realizations(make_fixture("star_k", 3).graph) == 2);

        Graph g = make_fixture("star_k", 2).graph;
        g.add_vertex("stray");
        CHECK_THROWS_AS(predicted_realizations(g), std::invalid_argument);

        const auto report = count_report(make_fixture("star_k", 3).graph, "star4");
        CHECK(report.k == 4);
        CHECK(report.predicted_realization_count == 2);
        CHECK(abs(report.chi_value) == report.predicted_realization_count);
    }

    TEST_CASE("tree closed form")
    {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 30; ++trial) {
            const int vertices = 1 + trial % 7;
            const Graph tree = oracle::random_tree(rng, vertices);
            for (int k = 2; k <= 5; ++k) {
                const Graph g = oracle::with_full_boundary(tree, k);
                CHECK(predicted_realizations(g) == (k - 2) * ipow(k - 1, tree.edge_count()));
            }
        }
    }

    TEST_CASE("boundary of size two predicts nothing")
    {
        std::mt19937_64 rng(43);
        for (int trial = 0; trial < 10; ++trial)
            CHECK(predicted_realizations(oracle::with_full_boundary(oracle::random_connected(rng, 1 + trial % 5, 0.5), 2)) ==
                  0);
    }
}
