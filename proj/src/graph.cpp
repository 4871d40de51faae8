#include "chroma/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace chroma {

VertexIndex Graph::add_vertex(std::string name, bool boundary)
{
    names_.push_back(std::move(name));
    boundary_.push_back(boundary);
    return names_.size() - 1;
}

EdgeId Graph::add_edge(VertexIndex u, VertexIndex v)
{
    return add_edge(EdgeId{next_id_}, u, v);
}

EdgeId Graph::add_edge(EdgeId id, VertexIndex u, VertexIndex v)
{
    if (u >= vertex_count() || v >= vertex_count())
        throw std::out_of_range("edge endpoint out of range");
    if (id.value < 0)
        throw std::invalid_argument("negative edge id");
    if (has_edge(id))
        throw std::invalid_argument("duplicate edge id " + std::to_string(id.value));
    edges_.push_back(Edge{id, u, v});
    next_id_ = std::max(next_id_, id.value + 1);
    return id;
}

std::optional<VertexIndex> Graph::find_vertex(const std::string& name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        return std::nullopt;
    return static_cast<VertexIndex>(it - names_.begin());
}

bool Graph::has_edge(EdgeId id) const
{
    return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.id == id; });
}

std::size_t Graph::edge_position(EdgeId id) const
{
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].id == id)
            return i;
    throw std::out_of_range("unknown edge id " + std::to_string(id.value));
}

const Edge& Graph::edge(EdgeId id) const
{
    return edges_[edge_position(id)];
}

std::vector<VertexIndex> Graph::boundary_vertices() const
{
    std::vector<VertexIndex> out;
    for (VertexIndex v = 0; v < vertex_count(); ++v)
        if (boundary_[v])
            out.push_back(v);
    return out;
}

std::vector<VertexIndex> Graph::interior_vertices() const
{
    std::vector<VertexIndex> out;
    for (VertexIndex v = 0; v < vertex_count(); ++v)
        if (!boundary_[v])
            out.push_back(v);
    return out;
}

std::size_t Graph::boundary_count() const
{
    return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), true));
}

std::size_t Graph::degree(VertexIndex v) const
{
    std::size_t d = 0;
    for (const auto& e : edges_) {
        if (e.u == v)
            ++d;
        if (e.v == v)
            ++d;
    }
    return d;
}

std::vector<EdgeId> Graph::incident_edges(VertexIndex v) const
{
    std::vector<EdgeId> out;
    for (const auto& e : edges_)
        if (e.touches(v))
            out.push_back(e.id);
    return out;
}

bool Graph::adjacent(VertexIndex u, VertexIndex v) const
{
    return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
        return (e.u == u && e.v == v) || (e.u == v && e.v == u);
    });
}

bool Graph::has_self_loops() const
{
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); });
}

std::vector<EdgeId> Graph::self_loops() const
{
    std::vector<EdgeId> out;
    for (const auto& e : edges_)
        if (e.is_loop())
            out.push_back(e.id);
    return out;
}

std::vector<std::string> validate(const Graph& g)
{
    std::vector<std::string> violations;
    std::set<std::string> seen;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        if (!seen.insert(g.name(v)).second)
            violations.push_back("duplicate vertex name '" + g.name(v) + "'");

    for (const auto& e : g.edges()) {
        const auto tag = "edge " + std::to_string(e.id.value);
        if (e.u >= g.vertex_count() || e.v >= g.vertex_count()) {
            violations.push_back(tag + " has an endpoint outside the vertex set");
            continue;
        }
        if (g.is_boundary(e.u) && g.is_boundary(e.v))
            violations.push_back(tag + " joins boundary vertices '" + g.name(e.u) + "' and '" +
                                 g.name(e.v) + "' only");
        else if (e.is_loop())
            violations.push_back(tag + " is a self-loop at interior vertex '" + g.name(e.u) + "'");
    }
    return violations;
}

Graph delete_edge(const Graph& g, EdgeId e)
{
    if (!g.has_edge(e))
        throw std::out_of_range("unknown edge id " + std::to_string(e.value));
    Graph out;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        out.add_vertex(g.name(v), g.is_boundary(v));
    for (const auto& edge : g.edges())
        if (edge.id != e)
            out.add_edge(edge.id, edge.u, edge.v);
    return out;
}

namespace {

    // Redirects every edge at `drop` to `keep` and removes `drop`.
    Graph merge_vertices(const Graph& g, VertexIndex keep, VertexIndex drop)
    {
        auto shift = [&](VertexIndex x) {
            if (x == drop)
                x = keep;
            return x > drop ? x - 1 : x;
        };
        Graph out;
        for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
            if (v == drop)
                continue;
            if (v == keep)
                out.add_vertex(g.name(keep) + "+" + g.name(drop),
                               g.is_boundary(keep) || g.is_boundary(drop));
            else
                out.add_vertex(g.name(v), g.is_boundary(v));
        }
        for (const auto& e : g.edges())
            out.add_edge(e.id, shift(e.u), shift(e.v));
        return out;
    }

    Graph remove_vertex(const Graph& g, VertexIndex drop)
    {
        Graph out;
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            if (v != drop)
                out.add_vertex(g.name(v), g.is_boundary(v));
        for (const auto& e : g.edges()) {
            if (e.touches(drop))
                continue;
            out.add_edge(e.id, e.u > drop ? e.u - 1 : e.u, e.v > drop ? e.v - 1 : e.v);
        }
        return out;
    }

}  // namespace

Graph contract_edge(const Graph& g, EdgeId e)
{
    const Edge& edge = g.edge(e);
    if (edge.is_loop())
        throw std::invalid_argument("cannot contract self-loop " + std::to_string(e.value));
    const auto keep = std::min(edge.u, edge.v);
    const auto drop = std::max(edge.u, edge.v);
    return merge_vertices(delete_edge(g, e), keep, drop);
}

std::vector<std::vector<EdgeId>> multi_edge_classes(const Graph& g)
{
    std::map<std::pair<VertexIndex, VertexIndex>, std::vector<EdgeId>> classes;
    for (const auto& e : g.edges())
        if (!e.is_loop())
            classes[{std::min(e.u, e.v), std::max(e.u, e.v)}].push_back(e.id);
    std::vector<std::vector<EdgeId>> out;
    for (auto& [key, ids] : classes)
        if (ids.size() >= 2)
            out.push_back(std::move(ids));
    return out;
}

Graph induced_subgraph(const Graph& g, const std::vector<VertexIndex>& keep)
{
    std::vector<std::optional<VertexIndex>> image(g.vertex_count());
    Graph out;
    for (auto v : keep)
        image.at(v) = out.add_vertex(g.name(v), g.is_boundary(v));
    for (const auto& e : g.edges())
        if (image[e.u] && image[e.v])
            out.add_edge(e.id, *image[e.u], *image[e.v]);
    return out;
}

std::vector<double> default_boundary_values(int k)
{
    std::vector<double> values(static_cast<std::size_t>(k + 1));
    std::iota(values.begin(), values.end(), 0.0);
    return values;
}

AugmentedGraph augment_k(const Graph& g, int k, const std::vector<double>& values)
{
    if (k < 0)
        throw std::invalid_argument("k must be non-negative");
    if (values.size() != static_cast<std::size_t>(k) + 1)
        throw std::invalid_argument("augment_k needs exactly k+1 boundary values");
    if (std::set<double>(values.begin(), values.end()).size() != values.size())
        throw std::invalid_argument("augment_k boundary values must be distinct");

    AugmentedGraph out;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        out.graph.add_vertex(g.name(v), false);
    for (const auto& e : g.edges())
        out.graph.add_edge(e.id, e.u, e.v);
    for (std::size_t j = 0; j < values.size(); ++j) {
        auto t = out.graph.add_vertex("t" + std::to_string(j), true);
        out.terminals.push_back(t);
        out.boundary_values[t] = values[j];
    }
    for (auto t : out.terminals)
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            out.graph.add_edge(v, t);
    return out;
}

MergedMultiEdges merge_multi_edges(const Graph& g, const EdgeMap<double>& q)
{
    std::map<std::pair<VertexIndex, VertexIndex>, EdgeId> representative;
    EdgeMap<EdgeId> rep_of;
    for (const auto& e : g.edges()) {
        if (e.is_loop()) {
            rep_of[e.id] = e.id;
            continue;
        }
        auto [it, inserted] =
            representative.try_emplace({std::min(e.u, e.v), std::max(e.u, e.v)}, e.id);
        if (!inserted && e.id < it->second)
            it->second = e.id;
    }
    for (const auto& e : g.edges())
        if (!e.is_loop())
            rep_of[e.id] = representative.at({std::min(e.u, e.v), std::max(e.u, e.v)});

    MergedMultiEdges out;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        out.graph.add_vertex(g.name(v), g.is_boundary(v));
    for (const auto& e : g.edges()) {
        if (rep_of.at(e.id) == e.id)
            out.graph.add_edge(e.id, e.u, e.v);
        auto it = q.find(e.id);
        out.q[rep_of.at(e.id)] += it == q.end() ? 0.0 : it->second;
    }
    for (const auto& [id, value] : out.q)
        if (value == 0.0)
            out.zero_q.push_back(id);
    return out;
}

DegreeTwoReduction reduce_degree2(const Graph& g)
{
    DegreeTwoReduction out;
    out.graph = g;
    out.vertex_map.resize(g.vertex_count());
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        out.vertex_map[v] = v;

    auto relabel = [&](auto&& fn) {
        for (auto& image : out.vertex_map)
            if (image)
                image = fn(*image);
    };

    for (;;) {
        const Graph& cur = out.graph;
        std::optional<VertexIndex> found;
        for (auto v : cur.interior_vertices()) {
            auto inc = cur.incident_edges(v);
            if (inc.size() == 2 && !cur.edge(inc[0]).is_loop() && !cur.edge(inc[1]).is_loop()) {
                found = v;
                break;
            }
        }
        if (!found)
            break;

        const auto v = *found;
        auto inc = cur.incident_edges(v);
        auto a = cur.edge(inc[0]).other(v);
        auto b = cur.edge(inc[1]).other(v);

        Graph without = remove_vertex(cur, v);
        relabel([&](VertexIndex x) -> std::optional<VertexIndex> {
            if (x == v)
                return std::nullopt;
            return x > v ? x - 1 : x;
        });
        a = a > v ? a - 1 : a;
        b = b > v ? b - 1 : b;

        if (a != b) {
            const auto keep = std::min(a, b);
            const auto drop = std::max(a, b);
            without = merge_vertices(without, keep, drop);
            relabel([&](VertexIndex x) -> std::optional<VertexIndex> {
                if (x == drop)
                    x = keep;
                return x > drop ? x - 1 : x;
            });
        }
        out.graph = std::move(without);
    }
    return out;
}

namespace {

    // Unit-capacity max flow from interior `x` to the boundary set, capped at 2.
    int disjoint_boundary_paths(const Graph& g, VertexIndex x)
    {
        const std::size_t n = g.vertex_count();
        // node layout: v_in = 2v, v_out = 2v+1, sink = 2n
        const std::size_t nodes = 2 * n + 1;
        const std::size_t sink = 2 * n;
        std::vector<std::vector<int>> cap(nodes, std::vector<int>(nodes, 0));
        for (VertexIndex v = 0; v < n; ++v) {
            if (g.is_boundary(v))
                cap[2 * v][sink] = 1;
            else
                cap[2 * v][2 * v + 1] = 1;
        }
        for (const auto& e : g.edges()) {
            if (e.is_loop())
                continue;
            if (!g.is_boundary(e.u))
                cap[2 * e.u + 1][2 * e.v] = 1;
            if (!g.is_boundary(e.v))
                cap[2 * e.v + 1][2 * e.u] = 1;
        }

        const std::size_t source = 2 * x + 1;
        int flow = 0;
        while (flow < 2) {
            std::vector<std::optional<std::size_t>> parent(nodes);
            parent[source] = source;
            std::queue<std::size_t> frontier;
            frontier.push(source);
            while (!frontier.empty() && !parent[sink]) {
                auto a = frontier.front();
                frontier.pop();
                for (std::size_t b = 0; b < nodes; ++b)
                    if (cap[a][b] > 0 && !parent[b]) {
                        parent[b] = a;
                        frontier.push(b);
                    }
            }
            if (!parent[sink])
                break;
            for (auto b = sink; b != source; b = *parent[b]) {
                auto a = *parent[b];
                cap[a][b] -= 1;
                cap[b][a] += 1;
            }
            ++flow;
        }
        return flow;
    }

}  // namespace

bool is_two_connected_to_boundary(const Graph& g)
{
    const auto boundary = g.boundary_vertices();
    if (boundary.size() < 2)
        throw std::invalid_argument("2-connectivity to the boundary needs at least two boundary vertices");

    const auto components = connected_components(g);
    for (const auto& comp : components) {
        const auto nb = std::count_if(comp.begin(), comp.end(),
                                      [&](VertexIndex v) { return g.is_boundary(v); });
        if (nb < 2)
            return false;
    }
    for (auto v : g.interior_vertices())
        if (disjoint_boundary_paths(g, v) < 2)
            return false;
    return true;
}

std::vector<EdgeId> wired_spanning_forest(const Graph& g)
{
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<const Edge*>> incident(n);
    for (const auto& e : g.edges()) {
        if (e.is_loop())
            continue;
        incident[e.u].push_back(&e);
        incident[e.v].push_back(&e);
    }

    std::vector<bool> reached(n, false);
    std::queue<VertexIndex> frontier;
    for (auto b : g.boundary_vertices()) {
        reached[b] = true;
        frontier.push(b);
    }
    std::vector<EdgeId> forest;
    while (!frontier.empty()) {
        auto a = frontier.front();
        frontier.pop();
        for (const Edge* e : incident[a]) {
            auto b = e->other(a);
            if (reached[b] || g.is_boundary(b))
                continue;
            reached[b] = true;
            forest.push_back(e->id);
            frontier.push(b);
        }
    }
    for (VertexIndex v = 0; v < n; ++v)
        if (!reached[v])
            throw std::invalid_argument("interior vertex '" + g.name(v) + "' has no path to the boundary");
    return forest;
}

std::vector<std::vector<VertexIndex>> connected_components(const Graph& g)
{
    const std::size_t n = g.vertex_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : g.edges())
        parent[find(e.u)] = find(e.v);

    std::map<std::size_t, std::vector<VertexIndex>> groups;
    for (VertexIndex v = 0; v < n; ++v)
        groups[find(v)].push_back(v);
    std::vector<std::vector<VertexIndex>> out;
    for (auto& [root, members] : groups)
        out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace chroma
