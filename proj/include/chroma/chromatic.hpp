#pragma once

#include "chroma/graph.hpp"
#include "chroma/polynomial.hpp"

#include <string>

namespace chroma {

/// Chromatic polynomial by memoized deletion-contraction. The boundary flag is
/// ignored, parallel edges are merged and any self-loop gives zero.
/// Throws std::length_error above 64 vertices.
IntPolynomial chromatic_polynomial(const Graph& g);

/// T_g(x, 0). Disconnected inputs give the product over components.
IntPolynomial tutte_x_slice(const Graph& g);

/// chi_g(-k), evaluated from the chromatic polynomial and cross-checked against
/// (-1)^{|V|} k T(1+k, 0) per component. Throws std::logic_error if the two
/// disagree.
BigInt chi_at_negative(const Graph& g, int k);

struct CountReport {
    std::string graph_id;
    /// Boundary size.
    int k = 0;
    /// chi of the interior graph at 2 - k.
    BigInt chi_value;
    BigInt predicted_realization_count;
};

/// (-1)^{|V_int|} chi_{G_int}(2 - k) for a boundary of size k >= 2 where every
/// interior vertex is adjacent to every boundary vertex. Throws
/// std::invalid_argument when that hypothesis fails.
BigInt predicted_realizations(const Graph& g);

CountReport count_report(const Graph& g, std::string graph_id);

}  // namespace chroma
