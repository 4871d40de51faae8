#include "chroma/lc_circuit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace chroma {

namespace {

    const ElementStack& stack_of(const Netlist& stacks, EdgeId e)
    {
        auto it = stacks.find(e);
        if (it == stacks.end())
            throw std::invalid_argument("no circuit elements on edge " + std::to_string(e.value));
        return it->second;
    }

    void check_positive(const std::optional<double>& x, const char* what)
    {
        if (x && !(*x > 0.0))
            throw std::invalid_argument(std::string(what) + " must be positive");
    }

    // Each spanning tree weight is coefficient * z^power.
    struct EdgeWeight {
        double coefficient = 1.0;
        int power = 0;
    };

    struct SmallGraph {
        int vertices = 0;
        std::vector<std::pair<int, int>> edges;
        std::vector<EdgeWeight> weights;
    };

    struct UnionFind {
        std::vector<int> parent;
        std::vector<std::pair<int, int>> history;

        explicit UnionFind(int n)
            : parent(static_cast<std::size_t>(n))
        {
            std::iota(parent.begin(), parent.end(), 0);
        }
        int find(int x) const
        {
            while (parent[static_cast<std::size_t>(x)] != x)
                x = parent[static_cast<std::size_t>(x)];
            return x;
        }
        bool unite(int a, int b)
        {
            a = find(a);
            b = find(b);
            if (a == b)
                return false;
            history.emplace_back(b, parent[static_cast<std::size_t>(b)]);
            parent[static_cast<std::size_t>(b)] = a;
            return true;
        }
        void undo()
        {
            auto [b, old] = history.back();
            history.pop_back();
            parent[static_cast<std::size_t>(b)] = old;
        }
    };

    bool connected_with(const SmallGraph& g, const std::vector<bool>& usable)
    {
        UnionFind uf(g.vertices);
        int parts = g.vertices;
        for (std::size_t i = 0; i < g.edges.size(); ++i)
            if (usable[i] && uf.unite(g.edges[i].first, g.edges[i].second))
                --parts;
        return parts <= 1;
    }

    // Sum over spanning trees of the product of edge weights, by include /
    // exclude branching with a connectivity cut.
    RealPolynomial enumerate_trees(const SmallGraph& g)
    {
        RealPolynomial out;
        if (g.vertices <= 1) {
            out.coefficients = {1.0};
            return out;
        }
        std::vector<bool> usable(g.edges.size(), true);
        for (std::size_t i = 0; i < g.edges.size(); ++i)
            usable[i] = g.edges[i].first != g.edges[i].second;
        if (!connected_with(g, usable))
            return out;

        UnionFind uf(g.vertices);
        std::function<void(std::size_t, int, double, int)> walk = [&](std::size_t i, int taken, double coef,
                                                                     int power) {
            if (taken == g.vertices - 1) {
                if (out.coefficients.size() <= static_cast<std::size_t>(power))
                    out.coefficients.resize(static_cast<std::size_t>(power) + 1, 0.0);
                out.coefficients[static_cast<std::size_t>(power)] += coef;
                return;
            }
            if (i == g.edges.size())
                return;
            if (usable[i] && uf.unite(g.edges[i].first, g.edges[i].second)) {
                walk(i + 1, taken + 1, coef * g.weights[i].coefficient, power + g.weights[i].power);
                uf.undo();
            }
            if (!usable[i]) {
                walk(i + 1, taken, coef, power);
                return;
            }
            usable[i] = false;
            if (connected_with(g, usable))
                walk(i + 1, taken, coef, power);
            usable[i] = true;
        };
        walk(0, 0, 1.0, 0);
        return out;
    }

    // Matrix-tree theorem evaluated on a circle and interpolated by DFT, for
    // graphs too large to enumerate.
    RealPolynomial interpolate_trees(const SmallGraph& g)
    {
        const int n = g.vertices - 1;
        int degree = 0;
        for (const auto& w : g.weights)
            degree = std::max(degree, w.power);
        const int points = n * degree + 1;
        std::vector<Complex> values(static_cast<std::size_t>(points));
        for (int j = 0; j < points; ++j) {
            const Complex z = std::polar(1.0, 2.0 * M_PI * j / points);
            Eigen::MatrixXcd lap = Eigen::MatrixXcd::Zero(n, n);
            for (std::size_t e = 0; e < g.edges.size(); ++e) {
                const auto [a, b] = g.edges[e];
                if (a == b)
                    continue;
                const Complex w = g.weights[e].coefficient * std::pow(z, g.weights[e].power);
                // vertex 0 is the deleted row
                if (a > 0)
                    lap(a - 1, a - 1) += w;
                if (b > 0)
                    lap(b - 1, b - 1) += w;
                if (a > 0 && b > 0) {
                    lap(a - 1, b - 1) -= w;
                    lap(b - 1, a - 1) -= w;
                }
            }
            values[static_cast<std::size_t>(j)] = n > 0 ? lap.partialPivLu().determinant() : Complex{1.0};
        }
        RealPolynomial out;
        out.coefficients.assign(static_cast<std::size_t>(points), 0.0);
        for (int k = 0; k < points; ++k) {
            Complex c{};
            for (int j = 0; j < points; ++j)
                c += values[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * M_PI * j * k / points);
            out.coefficients[static_cast<std::size_t>(k)] = c.real() / points;
        }
        double top = 0.0;
        for (double c : out.coefficients)
            top = std::max(top, std::abs(c));
        for (double& c : out.coefficients)
            if (std::abs(c) < 1e-12 * top)
                c = 0.0;
        while (!out.coefficients.empty() && out.coefficients.back() == 0.0)
            out.coefficients.pop_back();
        return out;
    }

    RealPolynomial tree_polynomial(const SmallGraph& g)
    {
        return g.edges.size() <= 16 ? enumerate_trees(g) : interpolate_trees(g);
    }

    void require_pure(const Graph& g, const Netlist& stacks)
    {
        for (const auto& e : g.edges()) {
            const auto& s = stack_of(stacks, e.id);
            if (!s.pure_inductor() && !s.pure_capacitor())
                throw std::invalid_argument("edge " + std::to_string(e.id.value) +
                                            " is not a pure inductor or a pure capacitor");
            check_positive(s.L, "inductance");
            check_positive(s.C, "capacitance");
        }
    }

    // Boundary vertices collapse to vertex 0 of the result.
    SmallGraph grounded(const Graph& g)
    {
        SmallGraph out;
        std::vector<int> image(g.vertex_count(), -1);
        const auto boundary = g.boundary_vertices();
        int next = 1;
        if (boundary.empty()) {
            if (g.vertex_count() > 0)
                image[0] = 0;
        }
        else {
            for (auto b : boundary)
                image[b] = 0;
        }
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            if (image[v] < 0)
                image[v] = next++;
        out.vertices = g.vertex_count() == 0 ? 0 : next;
        for (const auto& e : g.edges())
            out.edges.emplace_back(image[e.u], image[e.v]);
        return out;
    }

    double magnitude_bound(const RealPolynomial& p, double x)
    {
        double s = 0.0, xp = 1.0;
        for (double c : p.coefficients) {
            s += std::abs(c) * xp;
            xp *= std::abs(x);
        }
        return s;
    }

    double derivative_at(const RealPolynomial& p, double x)
    {
        double d = 0.0;
        for (std::size_t i = p.coefficients.size(); i-- > 1;)
            d = d * x + static_cast<double>(i) * p.coefficients[i];
        return d;
    }

}  // namespace

Complex impedance(const ElementStack& e, double omega)
{
    if (!(omega > 0.0))
        throw std::invalid_argument("angular frequency must be positive");
    if (e.empty())
        throw std::invalid_argument("edge carries no circuit element");
    check_positive(e.L, "inductance");
    check_positive(e.C, "capacitance");
    check_positive(e.R, "resistance");
    Complex z{};
    if (e.L)
        z += Complex(0.0, omega * *e.L);
    if (e.C)
        z += 1.0 / Complex(0.0, omega * *e.C);
    if (e.R)
        z += *e.R;
    return z;
}

CircuitSolution solve_circuit(const Graph& g, const Netlist& stacks, const PhasorDrive& drive)
{
    EdgeMap<Complex> admittance;
    for (const auto& e : g.edges()) {
        const Complex z = impedance(stack_of(stacks, e.id), drive.omega);
        if (z == Complex{}) {
            std::ostringstream msg;
            msg << "edge " << e.id.value << " is in series resonance at omega = " << drive.omega;
            throw ResonanceError(msg.str(), drive.omega);
        }
        admittance[e.id] = 1.0 / z;
    }

    HarmonicSolution<Complex> h;
    try {
        h = solve_dirichlet(g, admittance, drive.u);
    }
    catch (const SingularSystemError& err) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "circuit is resonant at omega = " << drive.omega << " (" << err.what() << ")";
        throw ResonanceError(msg.str(), drive.omega);
    }
    // A computed resonance is only singular to rounding, so the generic gate
    // is too lax here.
    if (h.rcond < resonance_rcond) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "circuit is resonant at omega = " << drive.omega << " (rcond " << h.rcond << ")";
        throw ResonanceError(msg.str(), drive.omega);
    }

    CircuitSolution out;
    out.u = h.values;
    std::vector<Complex> net(g.vertex_count());
    for (const auto& e : g.edges()) {
        EdgePower p;
        p.voltage_drop = out.u[e.v] - out.u[e.u];
        p.current = p.voltage_drop * admittance.at(e.id);
        p.complex_power = p.voltage_drop * std::conj(p.current);
        p.real_power = 0.5 * p.complex_power.real();
        p.reactive_power = p.complex_power.imag();
        out.power.edges[e.id] = p;
        // current from v towards u leaves v... i.e. enters u
        net[e.u] += p.current;
        net[e.v] -= p.current;
    }
    for (auto v : g.interior_vertices())
        out.kirchhoff_residual = std::max(out.kirchhoff_residual, std::abs(net[v]));
    return out;
}

double time_voltage(Complex u, double omega, double t) { return (u * std::polar(1.0, omega * t)).real(); }

double instantaneous_power(Complex voltage_drop, Complex z, double omega, double t)
{
    const Complex phase = std::polar(1.0, omega * t);
    return (phase * voltage_drop).real() * (phase * voltage_drop / z).real();
}

double instantaneous_power_from_s(Complex s, Complex voltage_drop, double omega, double t)
{
    const double angle = 2.0 * omega * t + 2.0 * std::arg(voltage_drop);
    return 0.5 * (s.real() * (1.0 + std::cos(angle)) + s.imag() * std::sin(angle));
}

ReactiveHqd reactive_power_as_hqd(const Graph& g, const Netlist& stacks, const PhasorDrive& drive)
{
    for (const auto& e : g.edges())
        if (stack_of(stacks, e.id).R)
            throw std::invalid_argument("edge " + std::to_string(e.id.value) +
                                        " has a resistor; reactive power is an HQD only for LC circuits");
    const auto sol = solve_circuit(g, stacks, drive);
    ReactiveHqd out;
    for (const auto& [id, p] : sol.power.edges)
        out.q.values[id] = p.reactive_power;
    out.report = residuals(g, out.q, sol.u);
    out.z.z = sol.u;
    out.z.residual = out.report.max_reciprocal;
    return out;
}

double RealPolynomial::evaluate(double x) const
{
    double r = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;)
        r = r * x + coefficients[i];
    return r;
}

Complex RealPolynomial::evaluate(Complex x) const
{
    Complex r{};
    for (std::size_t i = coefficients.size(); i-- > 0;)
        r = r * x + coefficients[i];
    return r;
}

int RealPolynomial::valuation() const
{
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        if (coefficients[i] != 0.0)
            return static_cast<int>(i);
    return -1;
}

RealPolynomial spanning_tree_polynomial(const Graph& g, const Netlist& stacks)
{
    require_pure(g, stacks);
    if (connected_components(g).size() > 1)
        throw std::invalid_argument("spanning_tree_polynomial needs a connected graph");
    SmallGraph s;
    s.vertices = static_cast<int>(g.vertex_count());
    for (const auto& e : g.edges()) {
        const auto& st = stack_of(stacks, e.id);
        s.edges.emplace_back(static_cast<int>(e.u), static_cast<int>(e.v));
        s.weights.push_back(st.L ? EdgeWeight{*st.L, 1} : EdgeWeight{1.0 / *st.C, 0});
    }
    return tree_polynomial(s);
}

GroundedTreePolynomial admittance_tree_polynomial(const Graph& g, const Netlist& stacks)
{
    require_pure(g, stacks);
    SmallGraph s = grounded(g);
    for (const auto& e : g.edges()) {
        const auto& st = stack_of(stacks, e.id);
        s.weights.push_back(st.C ? EdgeWeight{*st.C, 1} : EdgeWeight{1.0 / *st.L, 0});
    }
    GroundedTreePolynomial out;
    out.polynomial = tree_polynomial(s);
    out.n = std::max(0, s.vertices - 1);
    if (out.polynomial.coefficients.empty())
        throw std::invalid_argument("circuit has an interior part not connected to ground");
    return out;
}

Complex circuit_laplacian_det(const Graph& g, const Netlist& stacks, double omega)
{
    const SmallGraph s = grounded(g);
    const int n = std::max(0, s.vertices - 1);
    Eigen::MatrixXcd lap = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < s.edges.size(); ++i) {
        const auto [a, b] = s.edges[i];
        if (a == b)
            continue;
        const Complex y = 1.0 / impedance(stack_of(stacks, g.edges()[i].id), omega);
        if (a > 0)
            lap(a - 1, a - 1) += y;
        if (b > 0)
            lap(b - 1, b - 1) += y;
        if (a > 0 && b > 0) {
            lap(a - 1, b - 1) -= y;
            lap(b - 1, a - 1) -= y;
        }
    }
    return n > 0 ? lap.partialPivLu().determinant() : Complex{1.0};
}

std::vector<Complex> polynomial_roots(const RealPolynomial& p, double band)
{
    const int d = p.degree();
    if (d < 1)
        return {};
    if (p.coefficients.back() == 0.0)
        throw std::invalid_argument("polynomial has a zero leading coefficient");
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i)
        companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i)
        companion(i, d - 1) = -p.coefficients[static_cast<std::size_t>(i)] / p.coefficients.back();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("companion eigenvalue iteration failed");

    std::vector<Complex> roots;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        Complex r = solver.eigenvalues()(i);
        const double scale = std::max(1.0, std::abs(r));
        double x = r.real();
        for (int it = 0; it < 50; ++it) {
            const double d1 = derivative_at(p, x);
            if (d1 == 0.0)
                break;
            const double next = x - p.evaluate(x) / d1;
            if (!std::isfinite(next) || std::abs(p.evaluate(next)) >= std::abs(p.evaluate(x)))
                break;
            x = next;
        }
        // A cluster of repeated real roots splits into a small complex pair;
        // accept it when the polished real point is a root to rounding.
        const bool in_band = std::abs(r.imag()) <= band * scale;
        const bool repeated = std::abs(r.imag()) <= 1e-4 * scale && std::abs(p.evaluate(x)) <= 1e-10 * magnitude_bound(p, x);
        roots.push_back(in_band || repeated ? Complex(x, 0.0) : r);
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

ResonanceReport resonant_frequencies(const Graph& g, const Netlist& stacks)
{
    ResonanceReport out;
    out.polynomial = admittance_tree_polynomial(g, stacks);
    out.n = out.polynomial.n;

    // omega = 0 is excluded, so the factor z^j goes.
    RealPolynomial reduced;
    const auto& c = out.polynomial.polynomial.coefficients;
    reduced.coefficients.assign(c.begin() + out.polynomial.polynomial.valuation(), c.end());
    if (reduced.degree() < 1) {
        out.degenerate = true;
        out.all_roots_real_negative = true;
        return out;
    }
    out.roots = polynomial_roots(reduced);
    out.all_roots_real_negative = std::all_of(out.roots.begin(), out.roots.end(),
                                              [](Complex r) { return r.imag() == 0.0 && r.real() < 0.0; });
    for (const auto& r : out.roots) {
        if (r.imag() != 0.0 || !(r.real() < 0.0))
            continue;
        const double omega = std::sqrt(-r.real());
        if (!out.frequencies.empty() && std::abs(omega - out.frequencies.back()) <= 1e-7 * omega)
            continue;
        // independent check on the Laplacian itself, relative to the size of
        // its terms: Z(omega^2) / omega^n sums the tree magnitudes
        const double terms = out.polynomial.polynomial.evaluate(omega * omega) / std::pow(omega, out.n);
        const double det = std::abs(circuit_laplacian_det(g, stacks, omega));
        if (det <= 1e-7 * terms) {
            out.frequencies.push_back(omega);
        }
        else {
            std::ostringstream msg;
            msg << "root omega = " << omega << " rejected: |det| / terms = " << det / terms;
            out.warnings.push_back(msg.str());
        }
    }
    std::sort(out.frequencies.begin(), out.frequencies.end());
    return out;
}

}  // namespace chroma
