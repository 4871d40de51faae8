#pragma once

#include "chroma/hqd.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chroma {

struct Fixture {
    std::string name;
    Graph graph;
    /// Real boundary values, when the fixture carries them.
    VertexMap<double> boundary_values;
};

std::vector<std::string> fixture_names();

/// point, k2, path3, triangle, star_k (uses k; "star_3" also accepted) and
/// fig332. Throws std::invalid_argument for anything else.
Fixture make_fixture(const std::string& name, int k = 2);

/// The bipartite graph with boundary v1 v2 v3, interior v4..v8, and each of
/// v6, v7, v8 joined to each of v1..v5 (edges listed row by row).
Graph fig332();

/// q on fig332 summing to zero at every vertex, boundary included.
QAssignment fig332_balanced_q(const Graph& g, std::uint64_t seed);

/// The one-parameter family: z6 = z7 = z8 = b, with z4, z5 solved from the
/// equations at v6 and v7 (linear in 1/(b - z4), 1/(b - z5)).
Realization fig332_family_solution(const Graph& g, const QAssignment& q, Complex z1, Complex z2, Complex z3,
                                   Complex b);

}  // namespace chroma
