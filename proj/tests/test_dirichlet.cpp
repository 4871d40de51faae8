#include "chroma/dirichlet.hpp"
#include "chroma/fixtures.hpp"
#include "chroma/hqd.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace chroma;

namespace {

struct Instance {
    Graph g;
    EdgeMap<double> c;
    VertexMap<double> b;
};

Instance random_instance(std::mt19937_64& rng, int interior, int boundary, double p)
{
    Instance in;
    in.g = oracle::with_full_boundary(oracle::random_connected(rng, interior, p), boundary);
    std::uniform_real_distribution<double> cond(0.2, 2.0), val(-3.0, 3.0);
    for (const auto& e : in.g.edges())
        in.c[e.id] = cond(rng);
    for (auto v : in.g.boundary_vertices())
        in.b[v] = val(rng);
    return in;
}

// The star of the worked example: boundary values 2, 1, 0 on t0, t1, t2.
Instance worked_star(double c0, double c1, double c2)
{
    Instance in;
    const auto v = in.g.add_vertex("v");
    const double values[] = {2.0, 1.0, 0.0};
    const double cs[] = {c0, c1, c2};
    for (int i = 0; i < 3; ++i) {
        auto t = in.g.add_vertex("t" + std::to_string(i), true);
        in.c[in.g.add_edge(v, t)] = cs[i];
        in.b[t] = values[i];
    }
    return in;
}

}  // namespace

TEST_SUITE("dirichlet")
{
    TEST_CASE("worked star")
    {
        const double c0 = 0.2, c1 = 0.5, c2 = 0.3;
        const auto in = worked_star(c0, c1, c2);
        const auto h = solve_dirichlet(in.g, in.c, in.b);
        const double hv = 2 * c0 + c1;
        CHECK(h.values[0] == doctest::Approx(hv).epsilon(1e-14));
        const auto q = psi_map(in.g, in.c, in.b);
        CHECK(q.at(EdgeId{0}) == doctest::Approx(c0 * (2 - hv) * (2 - hv)));
        CHECK(q.at(EdgeId{1}) == doctest::Approx(c1 * (1 - hv) * (1 - hv)));
        CHECK(q.at(EdgeId{2}) == doctest::Approx(c2 * hv * hv));
        const auto jac = psi_jacobian_det(in.g, in.c, in.b);
        CHECK(jac.magnitude == doctest::Approx(hv * hv * (hv - 1) * (hv - 1) * (hv - 2) * (hv - 2)));

        // unnormalized conductances give the weighted mean
        const auto scaled = worked_star(2.0, 3.0, 5.0);
        CHECK(solve_dirichlet(scaled.g, scaled.c, scaled.b).values[0] == doctest::Approx((4.0 + 3.0) / 10.0));

        // barycenter: h = 1 and the middle energy vanishes
        const auto bary = worked_star(1.0 / 3, 1.0 / 3, 1.0 / 3);
        CHECK(psi_jacobian_det(bary.g, bary.c, bary.b).magnitude == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("constant boundary data")
    {
        std::mt19937_64 rng(3);
        auto in = random_instance(rng, 4, 3, 0.5);
        for (auto& [v, x] : in.b)
            x = 1.25;
        const auto h = solve_dirichlet(in.g, in.c, in.b);
        for (double x : h.values)
            CHECK(x == doctest::Approx(1.25));
        CHECK(h.total_energy == doctest::Approx(0.0));
        for (const auto& [id, q] : h.energies)
            CHECK(q == doctest::Approx(0.0));
        CHECK(psi_jacobian_det(in.g, in.c, in.b).magnitude == 0.0);
    }

    TEST_CASE("series path")
    {
        Graph g;
        g.add_vertex("a", true);
        g.add_vertex("i");
        g.add_vertex("b", true);
        auto e0 = g.add_edge(0, 1), e1 = g.add_edge(1, 2);
        const auto h = solve_dirichlet(g, EdgeMap<double>{{e0, 1.0}, {e1, 1.0}}, VertexMap<double>{{0, 0.0}, {2, 1.0}});
        CHECK(h.values[1] == doctest::Approx(0.5));
        CHECK(h.energies.at(e0) == doctest::Approx(0.25));
        CHECK(h.energies.at(e1) == doctest::Approx(0.25));
        CHECK(h.total_energy == doctest::Approx(0.5));

        // unit current injected at i splits by conductance
        const EdgeMap<double> c{{e0, 3.0}, {e1, 1.0}};
        CHECK(transfer_current(g, c, e0, 1) == doctest::Approx(0.75));
        CHECK(transfer_current(g, c, e1, 1) == doctest::Approx(-0.25));
    }

    TEST_CASE("bad conductances")
    {
        const auto in = worked_star(1, 1, 1);
        auto c = in.c;
        c[EdgeId{0}] = -1.0;
        CHECK_THROWS_AS(solve_dirichlet(in.g, c, in.b), std::invalid_argument);
        c.erase(EdgeId{0});
        CHECK_THROWS_AS(solve_dirichlet(in.g, c, in.b), std::invalid_argument);
        auto b = in.b;
        b.erase(b.begin());
        CHECK_THROWS_AS(solve_dirichlet(in.g, in.c, b), std::invalid_argument);
    }

    TEST_CASE("singular complex Laplacian is reported")
    {
        Graph g;
        g.add_vertex("a", true);
        g.add_vertex("i");
        g.add_vertex("b", true);
        auto e0 = g.add_edge(0, 1), e1 = g.add_edge(1, 2);
        const EdgeMap<Complex> c{{e0, Complex(0, 1)}, {e1, Complex(0, -1)}};
        CHECK_THROWS_AS(solve_dirichlet(g, c, VertexMap<Complex>{{0, 0.0}, {2, 1.0}}), SingularSystemError);
    }

    TEST_CASE("Green's function")
    {
        const auto in = worked_star(0.5, 1.0, 2.5);
        const auto green = greens_function(in.g, in.c);
        CHECK(green.at(0, 0) == doctest::Approx(1.0 / 4.0));
        CHECK(green.at(0, 1) == 0.0);

        // two interior vertices: [[a + x, -x], [-x, b + x]]
        Graph g;
        g.add_vertex("p");
        g.add_vertex("q");
        g.add_vertex("s", true);
        g.add_vertex("t", true);
        const double a = 2.0, b = 3.0, x = 0.5;
        EdgeMap<double> c{{g.add_edge(0, 2), a}, {g.add_edge(1, 3), b}, {g.add_edge(0, 1), x}};
        const auto two = greens_function(g, c);
        const double det = (a + x) * (b + x) - x * x;
        CHECK(two.at(0, 0) == doctest::Approx((b + x) / det));
        CHECK(two.at(0, 1) == doctest::Approx(x / det));
        CHECK(two.at(1, 1) == doctest::Approx((a + x) / det));

        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            const auto r = random_instance(rng, 2 + trial % 5, 2, 0.5);
            const auto gr = greens_function(r.g, r.c);
            const auto n = static_cast<Eigen::Index>(gr.interior.size());
            Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
            for (const auto& e : r.g.edges()) {
                const double ce = r.c.at(e.id);
                auto ru = gr.row[e.u], rv = gr.row[e.v];
                if (ru)
                    lap(*ru, *ru) += ce;
                if (rv)
                    lap(*rv, *rv) += ce;
                if (ru && rv) {
                    lap(*ru, *rv) -= ce;
                    lap(*rv, *ru) -= ce;
                }
            }
            CHECK((lap * gr.matrix - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((gr.matrix - gr.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("maximum principle and energy balance")
    {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 30; ++trial) {
            const auto in = random_instance(rng, 1 + trial % 6, 2 + trial % 3, 0.4);
            const auto h = solve_dirichlet(in.g, in.c, in.b);
            double lo = 1e300, hi = -1e300;
            for (const auto& [v, x] : in.b) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            for (double x : h.values) {
                CHECK(x >= lo - 1e-12);
                CHECK(x <= hi + 1e-12);
            }
            CHECK(h.residual < 1e-12);
            double power = 0.0;
            for (const auto& e : in.g.edges()) {
                const double flow = in.c.at(e.id) * (h.values[e.u] - h.values[e.v]);
                if (in.g.is_boundary(e.u))
                    power += in.b.at(e.u) * flow;
                if (in.g.is_boundary(e.v))
                    power -= in.b.at(e.v) * flow;
            }
            CHECK(power == doctest::Approx(h.total_energy).epsilon(1e-10));
        }
    }

    TEST_CASE("psi is homogeneous of degree one")
    {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            const auto in = random_instance(rng, 1 + trial % 4, 3, 0.5);
            auto scaled = in.c;
            for (auto& [id, x] : scaled)
                x *= 3.7;
            const auto q = psi_map(in.g, in.c, in.b);
            const auto qs = psi_map(in.g, scaled, in.b);
            for (const auto& [id, x] : q)
                CHECK(qs.at(id) == doctest::Approx(3.7 * x).epsilon(1e-12));
        }
    }

    TEST_CASE("Jacobian of psi against finite differences")
    {
        std::mt19937_64 rng(19);
        int tested = 0;
        while (tested < 20) {
            // at most five edges: one interior vertex and 2..5 terminals, or
            // two interior vertices and two terminals
            const int interior = tested % 3 == 2 ? 2 : 1;
            const auto in = random_instance(rng, interior, interior == 2 ? 2 : 2 + tested % 4, 0.5);
            const auto m = static_cast<Eigen::Index>(in.g.edge_count());
            REQUIRE(m <= 5);
            Eigen::MatrixXd jac(m, m);
            for (Eigen::Index j = 0; j < m; ++j) {
                const EdgeId id = in.g.edges()[static_cast<std::size_t>(j)].id;
                const double step = 1e-5 * in.c.at(id);
                auto plus = in.c, minus = in.c;
                plus[id] += step;
                minus[id] -= step;
                const auto qp = psi_map(in.g, plus, in.b), qm = psi_map(in.g, minus, in.b);
                for (Eigen::Index i = 0; i < m; ++i) {
                    const EdgeId row = in.g.edges()[static_cast<std::size_t>(i)].id;
                    jac(i, j) = (qp.at(row) - qm.at(row)) / (2 * step);
                }
            }
            const auto det = psi_jacobian_det(in.g, in.c, in.b, true);
            CHECK(std::abs(jac.determinant()) == doctest::Approx(det.magnitude).epsilon(1e-6));
            CHECK(det.sign == (jac.determinant() < 0 ? -1 : 1));
            ++tested;
        }
    }

    TEST_CASE("derivative of positions in q against finite differences")
    {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 10; ++trial) {
            const auto in = random_instance(rng, 1 + trial % 5, 3, 0.5);
            const auto h = solve_dirichlet(in.g, in.c, in.b);
            QAssignment q;
            for (const auto& [id, x] : h.energies)
                q.values[id] = x;
            std::vector<Complex> z(h.values.begin(), h.values.end());
            // keep the step small against q_e so the central difference is accurate
            const double eps = 1e-6;
            std::vector<EdgeId> usable;
            for (const auto& [id, x] : h.energies)
                if (x >= 1e3 * eps)
                    usable.push_back(id);
            if (usable.empty())
                continue;
            const EdgeId e = usable[static_cast<std::size_t>(trial) % usable.size()];
            auto moved = [&](double delta) {
                QAssignment p = q;
                p.values[e] += delta;
                const auto r = newton_polish(in.g, p, z);
                REQUIRE(r.converged);
                return r.realization.z;
            };
            const auto zp = moved(eps), zm = moved(-eps);
            const auto green = greens_function(in.g, in.c);
            for (auto v : in.g.interior_vertices()) {
                const double formula = dz_dq_edge(in.g, green, h.values, v, e);
                const double fd = (zp[v] - zm[v]).real() / (2 * eps);
                CHECK(fd == doctest::Approx(formula).epsilon(1e-4).scale(1e-8));
            }
            for (auto v : in.g.boundary_vertices())
                CHECK(dz_dq_edge(in.g, green, h.values, v, e) == 0.0);
        }
    }

    TEST_CASE("derivative vanishes by symmetry and rejects coincident ends")
    {
        // path t0 - v - t1 with equal conductances, perturb an edge at the far
        // side of a symmetric pair
        Graph g;
        const auto v = g.add_vertex("v");
        const auto a = g.add_vertex("a");
        const auto b = g.add_vertex("b");
        const auto t = g.add_vertex("t", true);
        const auto s = g.add_vertex("s", true);
        EdgeMap<double> c{{g.add_edge(v, a), 1.0}, {g.add_edge(v, b), 1.0}, {g.add_edge(a, t), 1.0},
                          {g.add_edge(b, t), 1.0}, {g.add_edge(v, s), 1.0}};
        const EdgeId ab = g.add_edge(a, b);
        c[ab] = 1.0;
        const std::vector<double> z{0.5, 0.25, 0.75, 0.0, 1.0};
        CHECK(dz_dq_edge(g, c, z, v, ab) == doctest::Approx(0.0).scale(1e-12));
        const std::vector<double> flat{0.5, 0.5, 0.5, 0.0, 1.0};
        CHECK_THROWS_AS(dz_dq_edge(g, c, flat, v, ab), std::domain_error);
    }

    TEST_CASE("transfer currents")
    {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 10; ++trial) {
            const auto in = random_instance(rng, 2 + trial % 4, 2, 0.6);
            const auto green = greens_function(in.g, in.c);
            for (const auto& e : in.g.edges()) {
                if (in.g.is_boundary(e.u) || in.g.is_boundary(e.v))
                    continue;
                // reciprocity: the current through e from a unit source at v
                // equals c_e times the potential at v of a dipole on e
                for (auto v : in.g.interior_vertices()) {
                    const double dipole = green.at(v, e.v) - green.at(v, e.u);
                    const double reverse = green.at(e.v, v) - green.at(e.u, v);
                    CHECK(transfer_current(in.g, in.c, e.id, v) == doctest::Approx(in.c.at(e.id) * reverse));
                    CHECK(dipole == doctest::Approx(reverse));
                }
            }
        }

        // v is cut off from e by the grounded boundary
        Graph g;
        const auto v = g.add_vertex("v");
        const auto w = g.add_vertex("w");
        const auto x = g.add_vertex("x");
        const auto b = g.add_vertex("b", true);
        EdgeMap<double> c{{g.add_edge(v, b), 1.0}, {g.add_edge(w, b), 1.0}, {g.add_edge(x, b), 1.0}};
        const EdgeId far = g.add_edge(w, x);
        c[far] = 2.0;
        CHECK(transfer_current(g, c, far, v) == 0.0);
    }
}
