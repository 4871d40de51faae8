#include "chroma/hqd.hpp"

#include "chroma/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chroma {

namespace {

    std::vector<std::vector<const Edge*>> incidence_lists(const Graph& g)
    {
        std::vector<std::vector<const Edge*>> out(g.vertex_count());
        for (const auto& e : g.edges()) {
            if (e.is_loop())
                throw std::invalid_argument("self-loop on edge " + std::to_string(e.id.value) +
                                            ": the reciprocal sum is undefined");
            out[e.u].push_back(&e);
            out[e.v].push_back(&e);
        }
        return out;
    }

    double sup_norm(const Eigen::VectorXcd& v)
    {
        double m = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            m = std::max(m, std::abs(v(i)));
        return m;
    }

    // Reciprocal sums and their Jacobian over the interior vertices, with
    // boundary positions frozen.
    class ReciprocalSystem {
    public:
        ReciprocalSystem(const Graph& g, const QAssignment& q)
            : g_(g)
            , q_(q)
            , interior_(g.interior_vertices())
            , row_(g.vertex_count(), -1)
            , incident_(incidence_lists(g))
        {
            for (std::size_t i = 0; i < interior_.size(); ++i)
                row_[interior_[i]] = static_cast<int>(i);
        }

        std::size_t size() const { return interior_.size(); }
        const std::vector<VertexIndex>& interior() const { return interior_; }

        // nullopt when two adjacent positions coincide.
        std::optional<Eigen::VectorXcd> values(const std::vector<Complex>& z) const
        {
            Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size()));
            for (std::size_t i = 0; i < size(); ++i) {
                const auto u = interior_[i];
                for (const Edge* e : incident_[u]) {
                    const auto w = e->other(u);
                    if (is_infinite(z[w]))
                        continue;
                    const Complex gap = z[u] - z[w];
                    if (gap == Complex{})
                        return std::nullopt;
                    f(static_cast<Eigen::Index>(i)) += q_.at(e->id) / gap;
                }
            }
            return f;
        }

        // Largest |F_u| / sum_e |q_e / (z_u - z_w)|: the cancellation achieved.
        // Drifting to infinity shrinks |F_u| but not this ratio.
        double relative(const std::vector<Complex>& z, const Eigen::VectorXcd& f) const
        {
            double worst = 0.0;
            for (std::size_t i = 0; i < size(); ++i) {
                const auto u = interior_[i];
                double mass = 0.0;
                for (const Edge* e : incident_[u]) {
                    const auto w = e->other(u);
                    if (!is_infinite(z[w]))
                        mass += std::abs(q_.at(e->id) / (z[u] - z[w]));
                }
                const double r = std::abs(f(static_cast<Eigen::Index>(i)));
                if (r > 0.0)
                    worst = std::max(worst, mass > 0.0 ? r / mass : std::numeric_limits<double>::infinity());
            }
            return worst;
        }

        Eigen::MatrixXcd jacobian(const std::vector<Complex>& z) const
        {
            const auto n = static_cast<Eigen::Index>(size());
            Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
            for (std::size_t i = 0; i < size(); ++i) {
                const auto u = interior_[i];
                const auto r = static_cast<Eigen::Index>(i);
                for (const Edge* e : incident_[u]) {
                    const auto w = e->other(u);
                    if (is_infinite(z[w]))
                        continue;
                    const Complex gap = z[u] - z[w];
                    const Complex t = q_.at(e->id) / (gap * gap);
                    j(r, r) -= t;
                    if (row_[w] >= 0)
                        j(r, row_[w]) += t;
                }
            }
            return j;
        }

        // Jacobian of G_u = F_u * prod_e (z_u - z_w), divided row-wise by that
        // product: J_F + diag(F) D with D the logarithmic derivative.
        Eigen::MatrixXcd cleared_jacobian(const std::vector<Complex>& z, const Eigen::VectorXcd& f) const
        {
            Eigen::MatrixXcd j = jacobian(z);
            for (std::size_t i = 0; i < size(); ++i) {
                const auto u = interior_[i];
                const auto r = static_cast<Eigen::Index>(i);
                for (const Edge* e : incident_[u]) {
                    const auto w = e->other(u);
                    if (is_infinite(z[w]))
                        continue;
                    const Complex d = f(r) / (z[u] - z[w]);
                    j(r, r) += d;
                    if (row_[w] >= 0)
                        j(r, row_[w]) -= d;
                }
            }
            return j;
        }

    private:
        const Graph& g_;
        const QAssignment& q_;
        std::vector<VertexIndex> interior_;
        std::vector<int> row_;
        std::vector<std::vector<const Edge*>> incident_;
    };

    double boundary_scale(const Graph& g, const std::vector<Complex>& z)
    {
        double s = 0.0;
        for (auto b : g.boundary_vertices())
            if (!is_infinite(z[b]))
                s = std::max(s, std::abs(z[b]));
        return s > 0.0 ? s : 1.0;
    }

}  // namespace

Complex infinity() { return {std::numeric_limits<double>::infinity(), 0.0}; }

bool is_infinite(Complex z) { return !std::isfinite(z.real()) || !std::isfinite(z.imag()); }

QAssignment QAssignment::real(const EdgeMap<double>& q)
{
    QAssignment out;
    for (const auto& [id, value] : q)
        out.values[id] = value;
    return out;
}

Complex QAssignment::at(EdgeId e) const
{
    auto it = values.find(e);
    if (it == values.end())
        throw std::invalid_argument("no q value for edge " + std::to_string(e.value));
    return it->second;
}

ResidualReport residuals(const Graph& g, const QAssignment& q, const std::vector<Complex>& z)
{
    if (z.size() != g.vertex_count())
        throw std::invalid_argument("realization has " + std::to_string(z.size()) + " positions for " +
                                    std::to_string(g.vertex_count()) + " vertices");
    const auto incident = incidence_lists(g);
    ResidualReport out;
    for (auto u : g.interior_vertices()) {
        if (is_infinite(z[u])) {
            out.skipped.push_back(u);
            continue;
        }
        Complex balance{}, reciprocal{};
        for (const Edge* e : incident[u]) {
            const Complex qe = q.at(e->id);
            balance += qe;
            const auto w = e->other(u);
            if (is_infinite(z[w]))
                continue;
            const Complex gap = z[u] - z[w];
            if (gap == Complex{})
                throw CoincidentVerticesError("vertices '" + g.name(u) + "' and '" + g.name(w) +
                                                  "' coincide across edge " + std::to_string(e->id.value),
                                              e->id);
            reciprocal += qe / gap;
        }
        out.balance[u] = balance;
        out.reciprocal[u] = reciprocal;
        out.max_balance = std::max(out.max_balance, std::abs(balance));
        out.max_reciprocal = std::max(out.max_reciprocal, std::abs(reciprocal));
    }
    return out;
}

Realization make_realization(const Graph& g, const QAssignment& q, std::vector<Complex> z)
{
    Realization r;
    r.residual = residuals(g, q, z).max_reciprocal;
    r.z = std::move(z);
    return r;
}

bool is_balanced(const Graph& g, const QAssignment& q, double tol)
{
    std::vector<Complex> sums(g.vertex_count());
    for (const auto& e : g.edges()) {
        sums[e.u] += q.at(e.id);
        sums[e.v] += q.at(e.id);
    }
    for (auto v : g.interior_vertices())
        if (std::abs(sums[v]) > tol)
            return false;
    return true;
}

Eigen::MatrixXd incidence_matrix(const Graph& g)
{
    const auto interior = g.interior_vertices();
    std::vector<int> row(g.vertex_count(), -1);
    for (std::size_t i = 0; i < interior.size(); ++i)
        row[interior[i]] = static_cast<int>(i);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(interior.size()),
                                              static_cast<Eigen::Index>(g.edge_count()));
    for (std::size_t j = 0; j < g.edge_count(); ++j) {
        const auto& e = g.edges()[j];
        for (auto v : {e.u, e.v})
            if (row[v] >= 0)
                m(row[v], static_cast<Eigen::Index>(j)) += 1.0;
    }
    return m;
}

std::size_t balanced_space_dimension(const Graph& g)
{
    const auto m = incidence_matrix(g);
    if (m.rows() == 0)
        return g.edge_count();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    return g.edge_count() - static_cast<std::size_t>(lu.rank());
}

QAssignment sample_balanced_q(const Graph& g, std::uint64_t seed)
{
    if (g.has_self_loops())
        throw std::invalid_argument("sample_balanced_q: graph has self-loops");
    if (!is_two_connected_to_boundary(g))
        throw std::invalid_argument("sample_balanced_q: graph is not 2-connected to its boundary");

    const auto forest = wired_spanning_forest(g);
    std::vector<bool> in_forest(g.edge_count(), false);
    for (auto id : forest)
        in_forest[g.edge_position(id)] = true;

    EdgeMap<double> q;
    std::vector<double> sum(g.vertex_count(), 0.0);
    std::vector<int> open(g.vertex_count(), 0);
    for (std::size_t j = 0; j < g.edge_count(); ++j) {
        const auto& e = g.edges()[j];
        if (in_forest[j]) {
            open[e.u] += 1;
            open[e.v] += 1;
            continue;
        }
        const double value = 2.0 * counter_uniform(seed, 0, j) - 1.0;
        q[e.id] = value;
        sum[e.u] += value;
        sum[e.v] += value;
    }

    // Peel interior leaves of the forest: the last open edge at a vertex is
    // fixed by its balance.
    std::vector<VertexIndex> leaves;
    for (auto v : g.interior_vertices())
        if (open[v] == 1)
            leaves.push_back(v);
    while (!leaves.empty()) {
        const auto v = leaves.back();
        leaves.pop_back();
        if (open[v] != 1)
            continue;
        for (auto id : forest) {
            const auto& e = g.edge(id);
            if (!e.touches(v) || q.count(id))
                continue;
            const double value = -sum[v];
            q[id] = value;
            sum[e.u] += value;
            sum[e.v] += value;
            for (auto x : {e.u, e.v}) {
                open[x] -= 1;
                if (x != v && !g.is_boundary(x) && open[x] == 1)
                    leaves.push_back(x);
            }
            break;
        }
    }
    if (q.size() != g.edge_count())
        throw std::logic_error("sample_balanced_q: forest back-substitution left edges unsolved");
    return QAssignment::real(q);
}

MobiusTransform::MobiusTransform(Complex a, Complex b, Complex c, Complex d)
    : a_(a)
    , b_(b)
    , c_(c)
    , d_(d)
{
    if (a * d - b * c == Complex{})
        throw std::invalid_argument("Mobius transform needs ad - bc != 0");
}

MobiusTransform MobiusTransform::identity() { return {1.0, 0.0, 0.0, 1.0}; }

MobiusTransform MobiusTransform::affine(Complex a, Complex b) { return {a, b, 0.0, 1.0}; }

MobiusTransform MobiusTransform::inversion() { return {0.0, 1.0, 1.0, 0.0}; }

MobiusTransform MobiusTransform::sending_to_infinity(Complex z0) { return {0.0, 1.0, 1.0, -z0}; }

Complex MobiusTransform::operator()(Complex z) const
{
    if (is_infinite(z))
        return c_ == Complex{} ? infinity() : a_ / c_;
    const Complex den = c_ * z + d_;
    if (den == Complex{})
        return infinity();
    return (a_ * z + b_) / den;
}

MobiusTransform MobiusTransform::compose(const MobiusTransform& o) const
{
    return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
}

MobiusTransform MobiusTransform::inverse() const { return {d_, -b_, -c_, a_}; }

std::optional<Complex> MobiusTransform::pole() const
{
    if (c_ == Complex{})
        return std::nullopt;
    return -d_ / c_;
}

Realization apply_mobius(const Graph& g, const MobiusTransform& m, const QAssignment& q, const Realization& z,
                         bool infinity_aware)
{
    std::vector<Complex> out(z.z.size());
    for (std::size_t v = 0; v < z.z.size(); ++v) {
        out[v] = m(z.z[v]);
        if (is_infinite(out[v]) && !is_infinite(z.z[v]) && !infinity_aware)
            throw std::domain_error("vertex '" + g.name(v) + "' lies on the pole of the Mobius transform");
    }
    return make_realization(g, q, std::move(out));
}

ReducedInstance send_boundary_to_infinity(const Graph& g, const QAssignment& q, const Realization& z,
                                          VertexIndex v0)
{
    if (v0 >= g.vertex_count() || !g.is_boundary(v0))
        throw std::invalid_argument("send_boundary_to_infinity needs a boundary vertex");
    for (auto v : g.interior_vertices())
        if (!g.adjacent(v, v0))
            throw std::invalid_argument("boundary vertex '" + g.name(v0) + "' is not adjacent to interior vertex '" +
                                        g.name(v) + "'");

    ReducedInstance out;
    out.removed_name = g.name(v0);
    if (!is_infinite(z.z.at(v0)))
        out.transform = MobiusTransform::sending_to_infinity(z.z[v0]);

    out.vertex_map.assign(g.vertex_count(), std::nullopt);
    std::vector<Complex> positions;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (v == v0)
            continue;
        out.vertex_map[v] = out.instance.graph.add_vertex(g.name(v), g.is_boundary(v));
        const Complex w = out.transform(z.z[v]);
        if (is_infinite(w))
            throw std::domain_error("vertex '" + g.name(v) + "' shares the position of '" + g.name(v0) + "'");
        positions.push_back(w);
    }
    for (const auto& e : g.edges()) {
        if (e.touches(v0))
            continue;
        out.instance.graph.add_edge(e.id, *out.vertex_map[e.u], *out.vertex_map[e.v]);
        out.instance.q.values[e.id] = q.at(e.id);
    }
    out.instance.q.complex_valued = q.complex_valued;
    out.instance.z = make_realization(out.instance.graph, out.instance.q, std::move(positions));
    return out;
}

HqdInstance reattach_infinity(const Graph& g, const QAssignment& q, const Realization& z, const std::string& name)
{
    HqdInstance out{g, q, {}};
    const auto v0 = out.graph.add_vertex(name, true);
    std::vector<Complex> sums(g.vertex_count());
    for (const auto& e : g.edges()) {
        sums[e.u] += q.at(e.id);
        sums[e.v] += q.at(e.id);
    }
    for (auto v : g.interior_vertices()) {
        const auto id = out.graph.add_edge(v, v0);
        out.q.values[id] = -sums[v];
    }
    auto positions = z.z;
    positions.push_back(infinity());
    out.z = make_realization(out.graph, out.q, std::move(positions));
    return out;
}

Eigen::MatrixXcd reciprocal_jacobian(const Graph& g, const QAssignment& q, const std::vector<Complex>& z)
{
    return ReciprocalSystem(g, q).jacobian(z);
}

NewtonResult newton_polish(const Graph& g, const QAssignment& q, std::vector<Complex> z, const SolveOptions& options)
{
    // Full Newton steps on the cleared system G_u = F_u prod_e (z_u - z_w).
    // It has the same finite roots, but unlike F it does not vanish as
    // interior points run off to infinity, which otherwise swallows most
    // starts.
    const ReciprocalSystem sys(g, q);
    NewtonResult out;
    const double scale = boundary_scale(g, z);
    auto current = sys.values(z);
    if (!current)
        return out;
    auto done = [&] {
        return sup_norm(*current) < options.residual_tol && sys.relative(z, *current) < options.relative_tol;
    };
    auto escaped = [&] {
        for (auto v : sys.interior())
            if (std::abs(z[v]) > options.escape_factor * scale)
                return true;
        return false;
    };

    int polish = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
        out.iterations = it;
        // a couple of extra steps settle the last digits
        if (done() && ++polish > 2)
            break;
        const Eigen::VectorXcd step = sys.cleared_jacobian(z, *current).partialPivLu().solve(-*current);
        if (!step.allFinite())
            break;
        for (std::size_t i = 0; i < sys.size(); ++i)
            z[sys.interior()[i]] += step(static_cast<Eigen::Index>(i));
        current = sys.values(z);
        if (!current || !current->allFinite() || escaped())
            return out;
    }
    out.converged = done();
    out.realization.residual = sup_norm(*current);
    out.realization.z = std::move(z);
    return out;
}

SolveResult solve_realizations(const Graph& g, const QAssignment& q, const VertexMap<Complex>& boundary,
                               const SolveOptions& options)
{
    const auto bvs = g.boundary_vertices();
    std::vector<Complex> base(g.vertex_count());
    Complex centroid{};
    for (auto b : bvs) {
        auto it = boundary.find(b);
        if (it == boundary.end())
            throw std::invalid_argument("no boundary position for '" + g.name(b) + "'");
        base[b] = it->second;
        centroid += it->second;
    }
    for (std::size_t i = 0; i < bvs.size(); ++i)
        for (std::size_t j = i + 1; j < bvs.size(); ++j)
            if (base[bvs[i]] == base[bvs[j]])
                throw std::invalid_argument("boundary positions must be distinct");
    if (!bvs.empty())
        centroid /= static_cast<double>(bvs.size());
    const double scale = boundary_scale(g, base);
    const double radius = 2.0 * scale;
    const auto interior = g.interior_vertices();

    std::vector<std::optional<Realization>> found(options.starts);
    parallel_for(options.starts, options.threads, [&](std::size_t s) {
        std::vector<Complex> z = base;
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const double r = radius * std::sqrt(counter_uniform(options.seed, s, 2 * i));
            const double theta = 2.0 * M_PI * counter_uniform(options.seed, s, 2 * i + 1);
            z[interior[i]] = centroid + std::polar(r, theta);
        }
        auto result = newton_polish(g, q, std::move(z), options);
        if (result.converged)
            found[s] = make_realization(g, q, std::move(result.realization.z));
    });

    SolveResult out;
    const double dedup = options.dedup_tol * std::max(1.0, scale);
    for (std::size_t s = 0; s < found.size(); ++s) {
        if (!found[s] || !(found[s]->residual < options.residual_tol))
            continue;
        ++out.converged_starts;
        bool seen = false;
        for (const auto& known : out.solutions) {
            double dist = 0.0;
            for (auto v : interior)
                dist = std::max(dist, std::abs(known.z[v] - found[s]->z[v]));
            if (dist < dedup) {
                seen = true;
                break;
            }
        }
        if (seen)
            continue;
        out.solutions.push_back(*found[s]);
        out.found_by.push_back(s);

        const auto report = detect_solution_family(g, q, *found[s]);
        const double top = report.singular_values.empty() ? 0.0 : report.singular_values.front();
        const double low = report.singular_values.empty() ? 0.0 : report.singular_values.back();
        if (!report.singular_values.empty() && !(low > 1e-8 * top)) {
            std::ostringstream msg;
            msg << "near-singular Jacobian at solution " << out.solutions.size() - 1 << " (sigma_min/sigma_max = "
                << (top > 0.0 ? low / top : 0.0) << "); q may be nongeneric";
            out.warnings.push_back(msg.str());
        }
    }
    return out;
}

FamilyReport detect_solution_family(const Graph& g, const QAssignment& q, const Realization& solution,
                                    double rank_tol)
{
    const Eigen::MatrixXcd jac = reciprocal_jacobian(g, q, solution.z);
    FamilyReport out;
    if (jac.rows() == 0)
        return out;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        out.singular_values.push_back(sv(i));
    const double top = sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (top > 0.0 && sv(i) > rank_tol * top)
            ++out.rank;
    out.corank = static_cast<std::size_t>(jac.rows()) - out.rank;
    out.family = out.corank > 0;
    return out;
}

}  // namespace chroma
