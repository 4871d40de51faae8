#include "chroma/chromatic.hpp"
#include "chroma/fixtures.hpp"
#include "chroma/hqd.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace chroma;

namespace {

Complex random_point(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(rng), n(rng)};
}

VertexMap<Complex> random_boundary(const Graph& g, std::mt19937_64& rng)
{
    VertexMap<Complex> z;
    for (auto v : g.boundary_vertices())
        z[v] = random_point(rng);
    return z;
}

// A solved instance: tree or small graph with k+1 terminals joined to every
// interior vertex, a generic balanced q and one realization.
struct Solved {
    Graph graph;
    QAssignment q;
    Realization z;
};

std::vector<Solved> solved_instances(std::uint64_t seed, std::size_t count)
{
    std::mt19937_64 rng(seed);
    std::vector<Solved> out;
    while (out.size() < count) {
        const Graph g = oracle::with_full_boundary(oracle::random_connected(rng, 1 + out.size() % 2, 0.5), 3);
        const auto q = sample_balanced_q(g, rng());
        SolveOptions options;
        options.starts = 60;
        options.seed = rng();
        const auto result = solve_realizations(g, q, random_boundary(g, rng), options);
        for (const auto& z : result.solutions)
            if (out.size() < count)
                out.push_back({g, q, z});
    }
    return out;
}

double max_distance(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_SUITE("hqd")
{
    TEST_CASE("residuals")
    {
        const Graph g = make_fixture("star_k", 2).graph;
        const VertexIndex v = g.interior_vertices()[0];
        std::vector<Complex> z(g.vertex_count());
        for (auto b : g.boundary_vertices())
            z[b] = Complex(static_cast<double>(b), 1.0);
        z[v] = Complex(0.3, -0.2);

        QAssignment zero;
        for (const auto& e : g.edges())
            zero.values[e.id] = 0.0;
        const auto r0 = residuals(g, zero, z);
        CHECK(r0.max_reciprocal == 0.0);
        CHECK(r0.max_balance == 0.0);

        // q = 1, 1, -2 at v: the sum is explicit
        QAssignment q;
        const double qs[] = {1.0, 1.0, -2.0};
        Complex expected = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& e = g.edges()[i];
            q.values[e.id] = qs[i];
            expected += qs[i] / (z[v] - z[e.other(v)]);
        }
        const auto r = residuals(g, q, z);
        CHECK(std::abs(r.reciprocal.at(v) - expected) < 1e-14);
        CHECK(r.max_balance < 1e-15);
        CHECK(is_balanced(g, q));

        z[v] = z[g.edges()[0].other(v)];
        CHECK_THROWS_AS(residuals(g, q, z), CoincidentVerticesError);
    }

    TEST_CASE("infinite neighbours drop out")
    {
        const Graph g = make_fixture("star_k", 2).graph;
        const VertexIndex v = g.interior_vertices()[0];
        QAssignment q;
        for (const auto& e : g.edges())
            q.values[e.id] = 1.0;
        std::vector<Complex> z(g.vertex_count(), Complex(2.0, 0.0));
        z[v] = 0.0;
        const auto far = g.edges()[2].other(v);
        z[far] = infinity();
        CHECK(is_infinite(z[far]));
        const auto r = residuals(g, q, z);
        CHECK(std::abs(r.reciprocal.at(v) - Complex(-1.0, 0.0)) < 1e-15);

        z[v] = infinity();
        CHECK(residuals(g, q, z).skipped == std::vector<VertexIndex>{v});
    }

    TEST_CASE("balanced q sampling")
    {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const Graph g = oracle::with_full_boundary(oracle::random_connected(rng, 1 + trial % 4, 0.5), 2 + trial % 3);
            const auto q = sample_balanced_q(g, rng());
            CHECK(is_balanced(g, q, 1e-14));
            CHECK(balanced_space_dimension(g) == g.edge_count() - g.interior_count());
            const auto m = incidence_matrix(g);
            CHECK(static_cast<std::size_t>(m.rows()) == g.interior_count());
            CHECK(static_cast<std::size_t>(m.cols()) == g.edge_count());
            for (const auto& [e, x] : q.values)
                CHECK(x.imag() == 0.0);
        }
        const Graph g = make_fixture("star_k", 3).graph;
        CHECK(sample_balanced_q(g, 1).values == sample_balanced_q(g, 1).values);
        CHECK(sample_balanced_q(g, 1).values != sample_balanced_q(g, 2).values);
    }

    TEST_CASE("Mobius transforms")
    {
        const auto m = MobiusTransform::affine(Complex(2, 1), Complex(0, 3));
        CHECK(std::abs(m(Complex(1, 0)) - Complex(2, 4)) < 1e-15);
        const auto inv = MobiusTransform::inversion();
        CHECK(is_infinite(inv(0.0)));
        CHECK(inv(infinity()) == Complex(0.0, 0.0));
        const auto s = MobiusTransform::sending_to_infinity(Complex(1, 1));
        CHECK(is_infinite(s(Complex(1, 1))));
        CHECK(s.pole().has_value());
        CHECK(!MobiusTransform::affine(1.0, 2.0).pole().has_value());
        const Complex w(0.4, -0.7);
        CHECK(std::abs(s.inverse()(s(w)) - w) < 1e-14);
        CHECK(std::abs(m.compose(s)(w) - m(s(w))) < 1e-14);
        CHECK(MobiusTransform::identity()(w) == w);
        CHECK_THROWS(MobiusTransform(1.0, 2.0, 2.0, 4.0));
    }

    TEST_CASE("reciprocal sums are Mobius invariant")
    {
        std::mt19937_64 rng(11);
        for (const auto& s : solved_instances(13, 10)) {
            REQUIRE(s.z.residual < 1e-10);
            const MobiusTransform maps[] = {
                MobiusTransform::identity(),
                MobiusTransform::affine(random_point(rng), random_point(rng)),
                MobiusTransform(random_point(rng), random_point(rng), random_point(rng), random_point(rng)),
                MobiusTransform::inversion().compose(MobiusTransform::affine(1.0, random_point(rng))),
            };
            for (const auto& m : maps) {
                const auto moved = apply_mobius(s.graph, m, s.q, s.z);
                double scale = 0.0;
                for (auto x : moved.z)
                    scale = std::max(scale, std::abs(x));
                CHECK(moved.residual < 1e-8 * std::max(1.0, scale * scale));
            }
        }
    }

    TEST_CASE("sending a terminal to infinity and back")
    {
        for (const auto& s : solved_instances(17, 6)) {
            const VertexIndex v0 = s.graph.boundary_vertices()[0];
            const auto reduced = send_boundary_to_infinity(s.graph, s.q, s.z, v0);
            const auto& inst = reduced.instance;
            CHECK(inst.graph.vertex_count() == s.graph.vertex_count() - 1);
            CHECK(!reduced.vertex_map[v0].has_value());
            CHECK(inst.z.residual < 1e-8);

            const auto back = reattach_infinity(inst.graph, inst.q, inst.z, reduced.removed_name);
            CHECK(is_balanced(back.graph, back.q, 1e-12));
            CHECK(back.z.residual < 1e-8);
            const auto restored = apply_mobius(back.graph, reduced.transform.inverse(), back.q, back.z, true);
            const auto name_of = [&](VertexIndex v) { return back.graph.name(v); };
            for (VertexIndex v = 0; v < back.graph.vertex_count(); ++v) {
                const auto old = s.graph.find_vertex(name_of(v));
                REQUIRE(old.has_value());
                CHECK(std::abs(restored.z[v] - s.z.z[*old]) < 1e-8 * std::max(1.0, std::abs(s.z.z[*old])));
            }
            CHECK(restored.residual < 1e-8);
        }
    }

    TEST_CASE("star counts follow the prediction")
    {
        std::mt19937_64 rng(19);
        for (int k = 1; k <= 4; ++k) {
            const Graph g = make_fixture("star_k", k).graph;
            const auto expected = predicted_realizations(g);
            CHECK(expected == k - 1);
            for (int trial = 0; trial < 3; ++trial) {
                SolveOptions options;
                options.starts = 200 * std::max(1, k - 1);
                options.seed = rng();
                const auto result = solve_realizations(g, sample_balanced_q(g, rng()), random_boundary(g, rng), options);
                CAPTURE(k);
                CHECK(BigInt(result.solutions.size()) == expected);
                for (const auto& z : result.solutions)
                    CHECK(z.residual < 1e-10);
            }
        }
    }

    TEST_CASE("path with two terminals has no realization")
    {
        Graph g = make_fixture("path3").graph;
        g.set_boundary(0, true);
        g.set_boundary(2, true);
        CHECK(predicted_realizations(g) == 0);
        std::mt19937_64 rng(23);
        SolveOptions options;
        options.starts = 100;
        const auto result = solve_realizations(g, sample_balanced_q(g, 3), random_boundary(g, rng), options);
        CHECK(result.solutions.empty());
    }

    TEST_CASE("tree counts follow the prediction")
    {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 3; ++trial) {
            const Graph g = oracle::with_full_boundary(oracle::random_tree(rng, 2), 3);
            const auto expected = predicted_realizations(g).convert_to<std::size_t>();
            SolveOptions options;
            options.starts = 200 * expected;
            options.seed = rng();
            options.threads = 4;
            const auto result = solve_realizations(g, sample_balanced_q(g, rng()), random_boundary(g, rng), options);
            CHECK(result.solutions.size() == expected);
        }
    }

    TEST_CASE("more starts never lose solutions")
    {
        const Graph g = make_fixture("star_k", 4).graph;
        std::mt19937_64 rng(31);
        const auto q = sample_balanced_q(g, 8);
        const auto boundary = random_boundary(g, rng);
        std::size_t previous = 0;
        for (std::size_t starts : {5u, 10u, 40u, 160u}) {
            SolveOptions options;
            options.starts = starts;
            options.seed = 4;
            const auto result = solve_realizations(g, q, boundary, options);
            CHECK(result.solutions.size() >= previous);
            previous = result.solutions.size();
            for (std::size_t i = 0; i < result.solutions.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    CHECK(max_distance(result.solutions[i].z, result.solutions[j].z) > 1e-6);
        }
        SolveOptions one, many;
        one.starts = many.starts = 50;
        many.threads = 5;
        const auto a = solve_realizations(g, q, boundary, one);
        const auto b = solve_realizations(g, q, boundary, many);
        REQUIRE(a.solutions.size() == b.solutions.size());
        CHECK(a.found_by == b.found_by);
    }

    TEST_CASE("Newton converges from a nearby start")
    {
        for (const auto& s : solved_instances(37, 4)) {
            auto z = s.z.z;
            for (auto v : s.graph.interior_vertices())
                z[v] += Complex(1e-3, -1e-3);
            const auto r = newton_polish(s.graph, s.q, z);
            CHECK(r.converged);
            CHECK(max_distance(r.realization.z, s.z.z) < 1e-8);
            CHECK(residuals(s.graph, s.q, z).max_reciprocal > 1e-6);
        }
    }

    TEST_CASE("families")
    {
        const Graph g = fig332();
        CHECK(g.boundary_count() == 3);
        CHECK(g.edge_count() == 15);
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 5; ++trial) {
            const auto q = fig332_balanced_q(g, rng());
            for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
                Complex sum = 0.0;
                for (const auto& e : g.edges())
                    if (e.touches(v))
                        sum += q.at(e.id);
                CHECK(std::abs(sum) < 1e-14);
            }
            const auto z = fig332_family_solution(g, q, random_point(rng), random_point(rng), random_point(rng),
                                                  random_point(rng));
            CHECK(z.residual < 1e-10);
            CHECK(detect_solution_family(g, q, z).corank >= 1);
        }

        for (const auto& s : solved_instances(43, 4)) {
            const auto report = detect_solution_family(s.graph, s.q, s.z);
            CHECK(report.corank == 0);
            CHECK_FALSE(report.family);
        }

        const Graph star = make_fixture("star_k", 3).graph;
        QAssignment zero;
        for (const auto& e : star.edges())
            zero.values[e.id] = 0.0;
        std::vector<Complex> z(star.vertex_count());
        for (VertexIndex v = 0; v < star.vertex_count(); ++v)
            z[v] = Complex(static_cast<double>(v), 0.5);
        const auto flat = detect_solution_family(star, zero, make_realization(star, zero, z));
        CHECK(flat.corank == star.interior_count());
        CHECK(flat.family);
    }
}
