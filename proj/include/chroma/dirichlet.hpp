#pragma once

#include "chroma/graph.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace chroma {

using Complex = std::complex<double>;

/// The interior block of a Laplacian could not be factorized reliably.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Harmonic extension of boundary data for edge conductances c.
/// Scalar is double for positive conductances, Complex for the complex mode
/// used by realizations and circuits (no positivity requirement there).
template <class Scalar>
struct HarmonicSolution {
    /// Indexed by vertex.
    std::vector<Scalar> values;
    /// q_e = c_e (h(u) - h(v))^2
    EdgeMap<Scalar> energies;
    Scalar total_energy{};
    /// Infinity norm of the Laplacian at interior vertices.
    double residual = 0.0;
    /// Reciprocal condition estimate of the interior Laplacian block, capped
    /// by its smallest LU pivot relative to the largest row weight.
    double rcond = 1.0;
};

template <class Scalar>
struct GreensFunction {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    std::vector<VertexIndex> interior;
    /// Vertex -> row of `matrix`; nullopt on the boundary.
    std::vector<std::optional<Eigen::Index>> row;
    Matrix matrix;

    /// Zero whenever v or w is a boundary vertex.
    Scalar at(VertexIndex v, VertexIndex w) const;
};

/// Solves Laplacian(h) = 0 at interior vertices with h = boundary on V_b.
/// Residual tolerance is 1e-12 (1 + |b|_inf) relative to the largest interior
/// row weight; failure raises SingularSystemError.
template <class Scalar>
HarmonicSolution<Scalar> solve_dirichlet(const Graph& g, const EdgeMap<Scalar>& c,
                                         const VertexMap<Scalar>& boundary);

/// Inverse of the interior Laplacian block.
template <class Scalar>
GreensFunction<Scalar> greens_function(const Graph& g, const EdgeMap<Scalar>& c);

/// d z_v / d q_e = (G_{v,v1} - G_{v,v2}) / (z_{v1} - z_{v2}) for e = v1 v2,
/// where c_e = q_e / (z_u - z_w)^2. Throws std::domain_error if z_{v1} = z_{v2}.
template <class Scalar>
Scalar dz_dq_edge(const Graph& g, const GreensFunction<Scalar>& green, const std::vector<Scalar>& z, VertexIndex v,
                  EdgeId e);

template <class Scalar>
Scalar dz_dq_edge(const Graph& g, const EdgeMap<Scalar>& c, const std::vector<Scalar>& z, VertexIndex v, EdgeId e);

/// c_e (G_{v,u2} - G_{v,u1}) for e = (u1, u2): the current through e from u2
/// to u1 when one unit enters at v and the boundary is grounded.
template <class Scalar>
Scalar transfer_current(const Graph& g, const EdgeMap<Scalar>& c, EdgeId e, VertexIndex v);

/// Conductances to energies of the harmonic extension.
EdgeMap<double> psi_map(const Graph& g, const EdgeMap<double>& c, const VertexMap<double>& boundary);

struct JacobianDeterminant {
    /// prod_e q_e / c_e, exactly 0 when some edge carries no energy.
    double magnitude = 0.0;
    /// +1 / -1 from a finite-difference Jacobian when requested, else 0.
    int sign = 0;
};

JacobianDeterminant psi_jacobian_det(const Graph& g, const EdgeMap<double>& c, const VertexMap<double>& boundary,
                                     bool with_sign = false);

extern template HarmonicSolution<double> solve_dirichlet(const Graph&, const EdgeMap<double>&,
                                                         const VertexMap<double>&);
extern template HarmonicSolution<Complex> solve_dirichlet(const Graph&, const EdgeMap<Complex>&,
                                                          const VertexMap<Complex>&);
extern template GreensFunction<double> greens_function(const Graph&, const EdgeMap<double>&);
extern template GreensFunction<Complex> greens_function(const Graph&, const EdgeMap<Complex>&);

}  // namespace chroma
