#pragma once

#include "chroma/graph.hpp"
#include "chroma/polynomial.hpp"

#include <cstdint>
#include <functional>

namespace chroma {

/// One direction bit per edge, indexed by position in Graph::edges(). A set bit
/// means the edge points from its lower to its higher vertex index.
struct Orientation {
    std::uint64_t bits = 0;

    bool forward(std::size_t edge_position) const { return (bits >> edge_position) & 1u; }
};

/// Real values on the boundary vertices; must be pairwise distinct.
using BoundaryValues = VertexMap<double>;

/// Acyclic, no interior source or sink, and every directed path between two
/// boundary vertices runs from the higher value to the lower one.
bool is_compatible(const Graph& g, Orientation o, const BoundaryValues& u);

struct OrientationCountOptions {
    std::size_t edge_cap = 30;
    unsigned threads = 1;
    /// Called as (finished_blocks, total_blocks) from worker threads, serialized.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Exact number of compatible orientations. Throws std::length_error when
/// the edge count exceeds the cap.
BigInt count_compatible(const Graph& g, const BoundaryValues& u, const OrientationCountOptions& options = {});

struct ValueIndependence {
    BigInt count_a;
    BigInt count_b;
    bool independent = false;
};

ValueIndependence value_independence_check(const Graph& g, const BoundaryValues& a, const BoundaryValues& b,
                                           const OrientationCountOptions& options = {});

}  // namespace chroma
