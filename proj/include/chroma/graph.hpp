#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chroma {

using VertexIndex = std::size_t;

/// Stable edge identifier; survives deletion of other edges.
struct EdgeId {
    int value = -1;

    friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

struct Edge {
    EdgeId id;
    VertexIndex u = 0;
    VertexIndex v = 0;

    bool is_loop() const { return u == v; }
    bool touches(VertexIndex x) const { return u == x || v == x; }
    VertexIndex other(VertexIndex x) const { return u == x ? v : u; }
};

template <class T>
using EdgeMap = std::map<EdgeId, T>;

template <class T>
using VertexMap = std::map<VertexIndex, T>;

/// Multigraph with a designated boundary vertex subset. Vertices are dense
/// indices carrying a display name; edges keep their id under deletion.
class Graph {
public:
    VertexIndex add_vertex(std::string name, bool boundary = false);
    EdgeId add_edge(VertexIndex u, VertexIndex v);
    /// Throws if `id` is already used.
    EdgeId add_edge(EdgeId id, VertexIndex u, VertexIndex v);

    std::size_t vertex_count() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::string& name(VertexIndex v) const { return names_.at(v); }
    bool is_boundary(VertexIndex v) const { return boundary_.at(v); }
    void set_boundary(VertexIndex v, bool boundary) { boundary_.at(v) = boundary; }
    std::optional<VertexIndex> find_vertex(const std::string& name) const;

    const std::vector<Edge>& edges() const { return edges_; }
    bool has_edge(EdgeId id) const;
    const Edge& edge(EdgeId id) const;
    /// Position of the edge in `edges()`.
    std::size_t edge_position(EdgeId id) const;
    EdgeId next_edge_id() const { return EdgeId{next_id_}; }

    std::vector<VertexIndex> boundary_vertices() const;
    std::vector<VertexIndex> interior_vertices() const;
    std::size_t boundary_count() const;
    std::size_t interior_count() const { return vertex_count() - boundary_count(); }

    /// Loops count twice.
    std::size_t degree(VertexIndex v) const;
    std::vector<EdgeId> incident_edges(VertexIndex v) const;
    bool adjacent(VertexIndex u, VertexIndex v) const;
    bool has_self_loops() const;
    std::vector<EdgeId> self_loops() const;

private:
    std::vector<std::string> names_;
    std::vector<bool> boundary_;
    std::vector<Edge> edges_;
    int next_id_ = 0;
};

std::vector<std::string> validate(const Graph& g);

/// Throws std::out_of_range for an unknown id.
Graph delete_edge(const Graph& g, EdgeId e);

/// Identifies the endpoints of `e` and removes it. The merged vertex takes the
/// place of the lower-indexed endpoint and is boundary iff either endpoint was.
/// Parallel edges and new self-loops are kept (see Graph::self_loops).
Graph contract_edge(const Graph& g, EdgeId e);

/// Classes of edges sharing the same unordered endpoint pair (loops excluded),
/// only classes of size >= 2.
std::vector<std::vector<EdgeId>> multi_edge_classes(const Graph& g);

/// Induced subgraph on `keep`, in the given order; edge ids preserved.
Graph induced_subgraph(const Graph& g, const std::vector<VertexIndex>& keep);

struct AugmentedGraph {
    Graph graph;
    VertexMap<double> boundary_values;
    /// New boundary vertices, in the order of the supplied values.
    std::vector<VertexIndex> terminals;
};

/// G_k: every vertex of g becomes interior and k+1 new boundary vertices are
/// attached to each of them. Original edge ids are kept.
AugmentedGraph augment_k(const Graph& g, int k, const std::vector<double>& values);

/// Values 0, 1, ..., k.
std::vector<double> default_boundary_values(int k);

struct MergedMultiEdges {
    Graph graph;
    EdgeMap<double> q;
    /// Surviving edges whose summed q is exactly zero.
    std::vector<EdgeId> zero_q;
};

/// Collapses each parallel class onto its lowest edge id, summing q.
MergedMultiEdges merge_multi_edges(const Graph& g, const EdgeMap<double>& q);

struct DegreeTwoReduction {
    Graph graph;
    /// Original vertex -> vertex of the reduced graph; nullopt for removed
    /// degree-2 vertices. Vertices sharing an image share a position in any
    /// realization.
    std::vector<std::optional<VertexIndex>> vertex_map;
};

DegreeTwoReduction reduce_degree2(const Graph& g);

/// Every vertex lies on a simple path joining two distinct boundary vertices.
bool is_two_connected_to_boundary(const Graph& g);

/// Spanning forest in which each tree holds exactly one boundary vertex.
std::vector<EdgeId> wired_spanning_forest(const Graph& g);

/// Vertices grouped by connected component, ignoring the boundary flag.
std::vector<std::vector<VertexIndex>> connected_components(const Graph& g);

}  // namespace chroma
