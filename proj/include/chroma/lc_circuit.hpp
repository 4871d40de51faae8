#pragma once

#include "chroma/dirichlet.hpp"
#include "chroma/graph.hpp"
#include "chroma/hqd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chroma {

/// Series combination of at most one inductor, capacitor and resistor.
struct ElementStack {
    std::optional<double> L;
    std::optional<double> C;
    std::optional<double> R;

    bool empty() const { return !L && !C && !R; }
    bool pure_inductor() const { return L && !C && !R; }
    bool pure_capacitor() const { return C && !L && !R; }
};

using Netlist = EdgeMap<ElementStack>;

/// i omega L + 1 / (i omega C) + R over the elements present.
Complex impedance(const ElementStack& e, double omega);

struct PhasorDrive {
    VertexMap<Complex> u;
    double omega = 1.0;
};

/// The interior Laplacian is singular at the drive frequency.
class ResonanceError : public SingularSystemError {
public:
    ResonanceError(const std::string& what, double omega)
        : SingularSystemError(what)
        , omega_(omega)
    {
    }
    double omega() const { return omega_; }

private:
    double omega_;
};

/// Per edge e = (v, w) as stored: current I = (u_w - u_v) / Z, so that
/// S = (u_w - u_v) conj(I) = |u_w - u_v|^2 / conj(Z).
struct EdgePower {
    Complex voltage_drop;
    Complex current;
    Complex complex_power;
    /// Average over a period, Re S / 2.
    double real_power = 0.0;
    /// Im S.
    double reactive_power = 0.0;
};

struct PowerReport {
    EdgeMap<EdgePower> edges;
    static constexpr const char* convention =
        "I(e_vw) = (u_w - u_v)/Z; S = (u_w - u_v) conj(I); real power = Re(S)/2 (period average); reactive power = Im(S)";
};

struct CircuitSolution {
    std::vector<Complex> u;
    PowerReport power;
    /// Largest net phasor current into an interior vertex.
    double kirchhoff_residual = 0.0;
};

/// Interior Laplacians with a smaller reciprocal condition estimate count as
/// resonant.
inline constexpr double resonance_rcond = 1e-10;

/// Throws ResonanceError when omega is resonant (or an edge impedance
/// vanishes), std::invalid_argument for bad data.
CircuitSolution solve_circuit(const Graph& g, const Netlist& stacks, const PhasorDrive& drive);

/// Re(u e^{i omega t}).
double time_voltage(Complex u, double omega, double t);

/// (U_w - U_v)(t) I(t) from the time-domain voltage and current.
double instantaneous_power(Complex voltage_drop, Complex z, double omega, double t);

/// (Re S (1 + cos(2 omega t + 2 phi)) + Im S sin(2 omega t + 2 phi)) / 2 with
/// phi = arg(voltage_drop).
double instantaneous_power_from_s(Complex s, Complex voltage_drop, double omega, double t);

struct ReactiveHqd {
    QAssignment q;
    Realization z;
    ResidualReport report;
};

/// q = Im S and z = u for a resistorless circuit. The reciprocal sums vanish;
/// the balance generally does not and is only reported.
ReactiveHqd reactive_power_as_hqd(const Graph& g, const Netlist& stacks, const PhasorDrive& drive);

/// Dense real polynomial, index = degree.
struct RealPolynomial {
    std::vector<double> coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    double evaluate(double x) const;
    Complex evaluate(Complex x) const;
    /// Lowest power of z with a nonzero coefficient.
    int valuation() const;
};

/// Spanning-tree generating polynomial of g (as a plain graph) with inductor
/// edges weighted L z and capacitor edges 1/C. Every edge must be a pure
/// inductor or a pure capacitor.
RealPolynomial spanning_tree_polynomial(const Graph& g, const Netlist& stacks);

/// The polynomial whose value at z = -omega^2, divided by (i omega)^n, is the
/// determinant of the interior circuit Laplacian: boundary vertices merged
/// into one ground (vertex 0 grounded when there is no boundary), capacitor
/// edges weighted C z and inductor edges 1/L. This is spanning_tree_polynomial
/// of the grounded graph with the roles of L and C exchanged.
struct GroundedTreePolynomial {
    RealPolynomial polynomial;
    /// Edges per spanning tree of the grounded graph.
    int n = 0;
};

GroundedTreePolynomial admittance_tree_polynomial(const Graph& g, const Netlist& stacks);

/// Determinant of the interior block of the circuit Laplacian with weights 1/Z.
Complex circuit_laplacian_det(const Graph& g, const Netlist& stacks, double omega);

struct ResonanceReport {
    /// Sorted, positive.
    std::vector<double> frequencies;
    /// Roots of the grounded polynomial with the zero roots removed.
    std::vector<Complex> roots;
    /// Vacuously true when there are no roots.
    bool all_roots_real_negative = false;
    /// Every spanning tree has the same inductor count: no resonance.
    bool degenerate = false;
    int n = 0;
    GroundedTreePolynomial polynomial;
    /// Roots dropped because the Laplacian determinant did not vanish there.
    std::vector<std::string> warnings;
};

ResonanceReport resonant_frequencies(const Graph& g, const Netlist& stacks);

/// Companion-matrix roots, with a Newton polish of each on the real axis when
/// its imaginary part is within `band` (relative).
std::vector<Complex> polynomial_roots(const RealPolynomial& p, double band = 1e-9);

}  // namespace chroma
