#include "chroma/fixtures.hpp"

#include "chroma/parallel.hpp"

#include <stdexcept>

namespace chroma {

namespace {

    Graph path_like(int n, bool close)
    {
        Graph g;
        for (int i = 0; i < n; ++i)
            g.add_vertex(std::string(1, static_cast<char>('a' + i)));
        for (int i = 0; i + 1 < n; ++i)
            g.add_edge(static_cast<VertexIndex>(i), static_cast<VertexIndex>(i + 1));
        if (close)
            g.add_edge(0, static_cast<VertexIndex>(n - 1));
        return g;
    }

    VertexIndex vertex(const Graph& g, int i)
    {
        auto v = g.find_vertex("v" + std::to_string(i));
        if (!v)
            throw std::invalid_argument("graph is not the fig332 fixture (missing v" + std::to_string(i) + ")");
        return *v;
    }

    EdgeId edge_between(const Graph& g, VertexIndex a, VertexIndex b)
    {
        for (const auto& e : g.edges())
            if ((e.u == a && e.v == b) || (e.u == b && e.v == a))
                return e.id;
        throw std::invalid_argument("graph is not the fig332 fixture (missing edge)");
    }

}  // namespace

std::vector<std::string> fixture_names() { return {"point", "k2", "path3", "triangle", "star_k", "fig332"}; }

Fixture make_fixture(const std::string& name, int k)
{
    Fixture f;
    f.name = name;
    if (name == "point") {
        f.graph.add_vertex("v");
    }
    else if (name == "k2") {
        f.graph = path_like(2, false);
    }
    else if (name == "path3") {
        f.graph = path_like(3, false);
    }
    else if (name == "triangle") {
        f.graph = path_like(3, true);
    }
    else if (name == "star_k" || name.rfind("star_", 0) == 0) {
        if (name != "star_k")
            k = std::stoi(name.substr(5));
        Graph point;
        point.add_vertex("v");
        auto aug = augment_k(point, k, default_boundary_values(k));
        f.graph = std::move(aug.graph);
        f.boundary_values = std::move(aug.boundary_values);
        f.name = "star_" + std::to_string(k);
    }
    else if (name == "fig332") {
        f.graph = fig332();
    }
    else {
        throw std::invalid_argument("unknown fixture '" + name + "'");
    }
    return f;
}

Graph fig332()
{
    Graph g;
    for (int i = 1; i <= 8; ++i)
        g.add_vertex("v" + std::to_string(i), i <= 3);
    for (VertexIndex i = 5; i < 8; ++i)
        for (VertexIndex j = 0; j < 5; ++j)
            g.add_edge(i, j);
    return g;
}

QAssignment fig332_balanced_q(const Graph& g, std::uint64_t seed)
{
    // 3 x 5 matrix with zero row and column sums: rows v6..v8, columns v1..v5.
    double m[3][5] = {};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j)
            m[i][j] = 2.0 * counter_uniform(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) - 1.0;
    for (int i = 0; i < 2; ++i)
        m[i][4] = -(m[i][0] + m[i][1] + m[i][2] + m[i][3]);
    for (int j = 0; j < 5; ++j)
        m[2][j] = -(m[0][j] + m[1][j]);

    QAssignment q;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j)
            q.values[edge_between(g, vertex(g, 6 + i), vertex(g, 1 + j))] = m[i][j];
    return q;
}

Realization fig332_family_solution(const Graph& g, const QAssignment& q, Complex z1, Complex z2, Complex z3,
                                   Complex b)
{
    const Complex zb[3] = {z1, z2, z3};
    for (const auto& z : zb)
        if (z == b)
            throw std::invalid_argument("family parameter b must differ from the boundary positions");
    auto qq = [&](int i, int j) { return q.at(edge_between(g, vertex(g, i), vertex(g, j))); };

    Eigen::Matrix2cd a;
    Eigen::Vector2cd rhs;
    for (int r = 0; r < 2; ++r) {
        const int i = 6 + r;
        a(r, 0) = qq(i, 4);
        a(r, 1) = qq(i, 5);
        rhs(r) = 0.0;
        for (int j = 1; j <= 3; ++j)
            rhs(r) -= qq(i, j) / (b - zb[j - 1]);
    }
    if (std::abs(a.determinant()) < 1e-14)
        throw std::domain_error("q64 q75 - q65 q74 vanishes; the family equations are not solvable for z4, z5");
    const Eigen::Vector2cd x = a.partialPivLu().solve(rhs);

    std::vector<Complex> z(g.vertex_count());
    z[vertex(g, 1)] = z1;
    z[vertex(g, 2)] = z2;
    z[vertex(g, 3)] = z3;
    z[vertex(g, 4)] = b - 1.0 / x(0);
    z[vertex(g, 5)] = b - 1.0 / x(1);
    for (int i = 6; i <= 8; ++i)
        z[vertex(g, i)] = b;
    return make_realization(g, q, std::move(z));
}

}  // namespace chroma
