#include "chroma/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

namespace chroma {

namespace {

    template <class Scalar>
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    template <class Scalar>
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    template <class Scalar>
    bool finite(const Scalar& x)
    {
        if constexpr (std::is_same_v<Scalar, double>)
            return std::isfinite(x);
        else
            return std::isfinite(x.real()) && std::isfinite(x.imag());
    }

    template <class Scalar>
    Scalar conductance(const Graph& g, const EdgeMap<Scalar>& c, EdgeId e)
    {
        auto it = c.find(e);
        if (it == c.end())
            throw std::invalid_argument("no conductance for edge " + std::to_string(e.value));
        if constexpr (std::is_same_v<Scalar, double>) {
            if (!(it->second > 0.0))
                throw std::invalid_argument("conductance of edge " + std::to_string(e.value) + " must be positive");
        }
        else if (!finite(it->second)) {
            throw SingularSystemError("non-finite conductance on edge " + std::to_string(e.value));
        }
        (void)g;
        return it->second;
    }

    // Interior block of the weighted Laplacian, with the rows of boundary
    // couplings kept aside for the right-hand side.
    template <class Scalar>
    struct InteriorSystem {
        std::vector<VertexIndex> interior;
        std::vector<std::optional<Eigen::Index>> row;
        Matrix<Scalar> block;
        double row_scale = 0.0;
        double rcond = 1.0;
        Eigen::PartialPivLU<Matrix<Scalar>> lu;

        InteriorSystem(const Graph& g, const EdgeMap<Scalar>& c)
            : interior(g.interior_vertices())
            , row(g.vertex_count())
        {
            const auto n = static_cast<Eigen::Index>(interior.size());
            for (Eigen::Index i = 0; i < n; ++i)
                row[interior[static_cast<std::size_t>(i)]] = i;
            block = Matrix<Scalar>::Zero(n, n);
            std::vector<double> weight(interior.size(), 0.0);
            for (const auto& e : g.edges()) {
                const Scalar ce = conductance(g, c, e.id);
                if (e.is_loop())
                    continue;
                const auto ru = row[e.u], rv = row[e.v];
                if (ru) {
                    block(*ru, *ru) += ce;
                    weight[static_cast<std::size_t>(*ru)] += std::abs(ce);
                }
                if (rv) {
                    block(*rv, *rv) += ce;
                    weight[static_cast<std::size_t>(*rv)] += std::abs(ce);
                }
                if (ru && rv) {
                    block(*ru, *rv) -= ce;
                    block(*rv, *ru) -= ce;
                }
            }
            for (double w : weight)
                row_scale = std::max(row_scale, w);
            if (n == 0)
                return;
            lu.compute(block);
            // rcond alone is blind to cancellation in a 1x1 block, so also
            // weigh the smallest pivot against the conductances feeding it
            rcond = lu.rcond();
            const auto& packed = lu.matrixLU();
            for (Eigen::Index i = 0; i < n; ++i)
                rcond = std::min(rcond, static_cast<double>(std::abs(packed(i, i))) / std::max(row_scale, 1e-300));
            if (!(rcond > 1e-15) || !std::isfinite(rcond))
                throw SingularSystemError("interior Laplacian is singular (rcond " + std::to_string(rcond) + ")");
        }
    };

    template <class Scalar>
    double inf_norm(const Vector<Scalar>& v)
    {
        double m = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            m = std::max(m, static_cast<double>(std::abs(v(i))));
        return m;
    }

}  // namespace

template <class Scalar>
Scalar GreensFunction<Scalar>::at(VertexIndex v, VertexIndex w) const
{
    const auto rv = row.at(v), rw = row.at(w);
    if (!rv || !rw)
        return Scalar{};
    return matrix(*rv, *rw);
}

template <class Scalar>
HarmonicSolution<Scalar> solve_dirichlet(const Graph& g, const EdgeMap<Scalar>& c, const VertexMap<Scalar>& boundary)
{
    InteriorSystem<Scalar> sys(g, c);
    const auto n = static_cast<Eigen::Index>(sys.interior.size());

    HarmonicSolution<Scalar> out;
    out.values.assign(g.vertex_count(), Scalar{});
    double bound = 0.0;
    for (auto b : g.boundary_vertices()) {
        auto it = boundary.find(b);
        if (it == boundary.end())
            throw std::invalid_argument("no boundary value for vertex '" + g.name(b) + "'");
        out.values[b] = it->second;
        bound = std::max(bound, static_cast<double>(std::abs(it->second)));
    }

    if (n > 0) {
        Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
        for (const auto& e : g.edges()) {
            const auto ru = sys.row[e.u], rv = sys.row[e.v];
            if (ru && !rv)
                rhs(*ru) += c.at(e.id) * out.values[e.v];
            if (rv && !ru)
                rhs(*rv) += c.at(e.id) * out.values[e.u];
        }
        Vector<Scalar> h = sys.lu.solve(rhs);
        Vector<Scalar> r = rhs - sys.block * h;
        const double tol = 1e-12 * (1.0 + bound) * std::max(sys.row_scale, 1e-300);
        if (inf_norm<Scalar>(r) > tol) {
            h += sys.lu.solve(r);
            r = rhs - sys.block * h;
        }
        out.residual = inf_norm<Scalar>(r);
        out.rcond = sys.rcond;
        if (!(out.residual <= tol) || !finite(h.sum()))
            throw SingularSystemError("Dirichlet solve residual " + std::to_string(out.residual) +
                                      " exceeds tolerance " + std::to_string(tol));
        for (Eigen::Index i = 0; i < n; ++i)
            out.values[sys.interior[static_cast<std::size_t>(i)]] = h(i);
    }

    for (const auto& e : g.edges()) {
        const Scalar d = out.values[e.u] - out.values[e.v];
        const Scalar q = c.at(e.id) * d * d;
        out.energies[e.id] = q;
        out.total_energy += q;
    }
    return out;
}

template <class Scalar>
GreensFunction<Scalar> greens_function(const Graph& g, const EdgeMap<Scalar>& c)
{
    InteriorSystem<Scalar> sys(g, c);
    GreensFunction<Scalar> out;
    out.interior = sys.interior;
    out.row = sys.row;
    const auto n = static_cast<Eigen::Index>(sys.interior.size());
    out.matrix = n > 0 ? Matrix<Scalar>(sys.lu.inverse()) : Matrix<Scalar>(0, 0);
    return out;
}

template <class Scalar>
Scalar dz_dq_edge(const Graph& g, const GreensFunction<Scalar>& green, const std::vector<Scalar>& z, VertexIndex v,
                  EdgeId e)
{
    const Edge& edge = g.edge(e);
    const Scalar gap = z.at(edge.u) - z.at(edge.v);
    if (gap == Scalar{})
        throw std::domain_error("edge " + std::to_string(e.value) + " has coincident endpoint positions");
    return (green.at(v, edge.u) - green.at(v, edge.v)) / gap;
}

template <class Scalar>
Scalar dz_dq_edge(const Graph& g, const EdgeMap<Scalar>& c, const std::vector<Scalar>& z, VertexIndex v, EdgeId e)
{
    return dz_dq_edge(g, greens_function(g, c), z, v, e);
}

template <class Scalar>
Scalar transfer_current(const Graph& g, const EdgeMap<Scalar>& c, EdgeId e, VertexIndex v)
{
    const Edge& edge = g.edge(e);
    const auto green = greens_function(g, c);
    return c.at(e) * (green.at(v, edge.v) - green.at(v, edge.u));
}

EdgeMap<double> psi_map(const Graph& g, const EdgeMap<double>& c, const VertexMap<double>& boundary)
{
    return solve_dirichlet(g, c, boundary).energies;
}

JacobianDeterminant psi_jacobian_det(const Graph& g, const EdgeMap<double>& c, const VertexMap<double>& boundary,
                                     bool with_sign)
{
    const auto h = solve_dirichlet(g, c, boundary);
    JacobianDeterminant out;
    out.magnitude = 1.0;
    for (const auto& e : g.edges()) {
        const double d = h.values[e.u] - h.values[e.v];
        if (d == 0.0) {
            out.magnitude = 0.0;
            break;
        }
        out.magnitude *= d * d;
    }
    if (!with_sign || out.magnitude == 0.0)
        return out;

    const auto m = static_cast<Eigen::Index>(g.edge_count());
    Eigen::MatrixXd jac(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const EdgeId id = g.edges()[static_cast<std::size_t>(j)].id;
        const double step = 1e-6 * c.at(id);
        auto plus = c, minus = c;
        plus[id] += step;
        minus[id] -= step;
        const auto qp = psi_map(g, plus, boundary);
        const auto qm = psi_map(g, minus, boundary);
        for (Eigen::Index i = 0; i < m; ++i) {
            const EdgeId row = g.edges()[static_cast<std::size_t>(i)].id;
            jac(i, j) = (qp.at(row) - qm.at(row)) / (2.0 * step);
        }
    }
    out.sign = jac.determinant() < 0.0 ? -1 : 1;
    return out;
}

template struct GreensFunction<double>;
template struct GreensFunction<Complex>;
template HarmonicSolution<double> solve_dirichlet(const Graph&, const EdgeMap<double>&, const VertexMap<double>&);
template HarmonicSolution<Complex> solve_dirichlet(const Graph&, const EdgeMap<Complex>&, const VertexMap<Complex>&);
template GreensFunction<double> greens_function(const Graph&, const EdgeMap<double>&);
template GreensFunction<Complex> greens_function(const Graph&, const EdgeMap<Complex>&);
template double dz_dq_edge(const Graph&, const GreensFunction<double>&, const std::vector<double>&, VertexIndex,
                           EdgeId);
template Complex dz_dq_edge(const Graph&, const GreensFunction<Complex>&, const std::vector<Complex>&, VertexIndex,
                            EdgeId);
template double dz_dq_edge(const Graph&, const EdgeMap<double>&, const std::vector<double>&, VertexIndex, EdgeId);
template Complex dz_dq_edge(const Graph&, const EdgeMap<Complex>&, const std::vector<Complex>&, VertexIndex, EdgeId);
template double transfer_current(const Graph&, const EdgeMap<double>&, EdgeId, VertexIndex);
template Complex transfer_current(const Graph&, const EdgeMap<Complex>&, EdgeId, VertexIndex);

}  // namespace chroma
