#pragma once

#include "chroma/dirichlet.hpp"
#include "chroma/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chroma {

/// Two adjacent vertices sit at the same position, so the reciprocal sum is
/// undefined there.
class CoincidentVerticesError : public std::domain_error {
public:
    CoincidentVerticesError(const std::string& what, EdgeId edge)
        : std::domain_error(what)
        , edge_(edge)
    {
    }
    EdgeId edge() const { return edge_; }

private:
    EdgeId edge_;
};

/// The point at infinity of the Riemann sphere.
Complex infinity();
bool is_infinite(Complex z);

/// Edge weights of a quadratic differential. Stored per unoriented edge, so
/// symmetric by construction. Real unless `complex_valued` is set.
struct QAssignment {
    EdgeMap<Complex> values;
    bool complex_valued = false;

    static QAssignment real(const EdgeMap<double>& q);
    Complex at(EdgeId e) const;
};

/// Vertex positions (indexed by vertex, possibly infinite) and the largest
/// reciprocal-sum residual over finite interior vertices, recomputed whenever
/// a Realization is produced by this module.
struct Realization {
    std::vector<Complex> z;
    double residual = 0.0;
};

struct ResidualReport {
    /// sum_v q_uv per finite interior vertex.
    VertexMap<Complex> balance;
    /// sum_v q_uv / (z_u - z_v) per finite interior vertex.
    VertexMap<Complex> reciprocal;
    double max_balance = 0.0;
    double max_reciprocal = 0.0;
    /// Interior vertices placed at infinity; no equation is checked there.
    std::vector<VertexIndex> skipped;
};

/// Terms with an infinite neighbour vanish. Parallel edges contribute one term
/// each, which equals the merged-edge value. Throws CoincidentVerticesError
/// on equal adjacent positions and std::invalid_argument on a self-loop.
ResidualReport residuals(const Graph& g, const QAssignment& q, const std::vector<Complex>& z);

Realization make_realization(const Graph& g, const QAssignment& q, std::vector<Complex> z);

bool is_balanced(const Graph& g, const QAssignment& q, double tol = 1e-12);

/// Interior-vertex by edge incidence matrix whose kernel is the balanced q.
Eigen::MatrixXd incidence_matrix(const Graph& g);

/// Dimension of the space of balanced q, by numerical rank.
std::size_t balanced_space_dimension(const Graph& g);

/// Free edges (off a wired spanning forest) uniform on [-1, 1]; forest edges
/// solved from the leaves inward so every interior vertex balances.
QAssignment sample_balanced_q(const Graph& g, std::uint64_t seed);

/// z -> (a z + b) / (c z + d) on the Riemann sphere.
class MobiusTransform {
public:
    MobiusTransform(Complex a, Complex b, Complex c, Complex d);

    static MobiusTransform identity();
    static MobiusTransform affine(Complex a, Complex b);
    static MobiusTransform inversion();
    /// w -> 1 / (w - z0): sends z0 to infinity.
    static MobiusTransform sending_to_infinity(Complex z0);

    Complex operator()(Complex z) const;
    /// this after other.
    MobiusTransform compose(const MobiusTransform& other) const;
    MobiusTransform inverse() const;
    /// Finite preimage of infinity, if any.
    std::optional<Complex> pole() const;

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }

private:
    Complex a_, b_, c_, d_;
};

/// Applies m to every position. A finite vertex landing on the pole is an
/// error unless `infinity_aware`.
Realization apply_mobius(const Graph& g, const MobiusTransform& m, const QAssignment& q, const Realization& z,
                         bool infinity_aware = false);

struct HqdInstance {
    Graph graph;
    QAssignment q;
    Realization z;
};

struct ReducedInstance {
    HqdInstance instance;
    /// Applied to the surviving positions.
    MobiusTransform transform = MobiusTransform::identity();
    /// Old vertex -> new vertex; nullopt for the removed one.
    std::vector<std::optional<VertexIndex>> vertex_map;
    std::string removed_name;
};

/// Moves boundary vertex v0 to infinity (w -> 1/(w - z(v0)), or nothing when
/// it already sits there) and drops it with its edges. The remaining
/// positions still satisfy the reciprocal sums, but no longer the balance.
ReducedInstance send_boundary_to_infinity(const Graph& g, const QAssignment& q, const Realization& z,
                                          VertexIndex v0);

/// Inverse of the reduction: adds boundary vertex `name` at infinity, joined
/// to every interior vertex with the q that restores the balance.
HqdInstance reattach_infinity(const Graph& g, const QAssignment& q, const Realization& z, const std::string& name);

struct SolveOptions {
    std::size_t starts = 200;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double residual_tol = 1e-10;
    double dedup_tol = 1e-6;
    /// Also required: |F_u| below this fraction of sum_e |q_e / (z_u - z_w)|,
    /// which rejects starts creeping off to infinity.
    double relative_tol = 1e-8;
    int max_iterations = 200;
    /// Starts wandering beyond this multiple of the boundary scale are dropped.
    double escape_factor = 1e6;
};

struct SolveResult {
    std::vector<Realization> solutions;
    /// Start index that first reached each solution.
    std::vector<std::size_t> found_by;
    std::size_t converged_starts = 0;
    std::vector<std::string> warnings;
};

struct NewtonResult {
    Realization realization;
    bool converged = false;
    int iterations = 0;
};

/// Damped complex Newton iteration on the reciprocal sums in the interior
/// positions, boundary positions held fixed.
NewtonResult newton_polish(const Graph& g, const QAssignment& q, std::vector<Complex> z,
                           const SolveOptions& options = {});

/// Jacobian of the reciprocal sums with respect to the interior positions.
Eigen::MatrixXcd reciprocal_jacobian(const Graph& g, const QAssignment& q, const std::vector<Complex>& z);

/// Multi-start Newton from random interior positions in the disk of radius
/// 2 max|boundary z| about the boundary centroid. Converged starts are
/// deduplicated in start order, so the output is fixed by the seed.
SolveResult solve_realizations(const Graph& g, const QAssignment& q, const VertexMap<Complex>& boundary,
                               const SolveOptions& options = {});

struct FamilyReport {
    std::size_t rank = 0;
    std::size_t corank = 0;
    std::vector<double> singular_values;
    bool family = false;
};

/// Numerical rank of the reciprocal-sum Jacobian at a solution; positive
/// corank flags a continuous family.
FamilyReport detect_solution_family(const Graph& g, const QAssignment& q, const Realization& solution,
                                    double rank_tol = 1e-9);

}  // namespace chroma
