#include "chroma/orientations.hpp"

#include "chroma/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>

namespace chroma {

namespace {

    using Mask = std::uint64_t;

    Mask bit(std::size_t v) { return Mask{1} << v; }

    void check_values(const Graph& g, const BoundaryValues& u)
    {
        std::set<double> seen;
        for (auto b : g.boundary_vertices()) {
            auto it = u.find(b);
            if (it == u.end())
                throw std::invalid_argument("no value for boundary vertex '" + g.name(b) + "'");
            if (!seen.insert(it->second).second)
                throw std::invalid_argument("boundary values must be distinct");
        }
    }

    std::vector<double> value_table(const Graph& g, const BoundaryValues& u)
    {
        std::vector<double> values(g.vertex_count(), 0.0);
        for (auto b : g.boundary_vertices())
            values[b] = u.at(b);
        return values;
    }

    struct Arc {
        int from = 0;
        int to = 0;
    };

    struct SearchState {
        std::array<Mask, 64> reach{};
        std::array<int, 64> in{};
        std::array<int, 64> out{};
        std::array<int, 64> remaining{};
    };

    // Depth-first enumeration of the direction bits, checking the cheap source
    // and sink conditions as vertices complete and maintaining the transitive
    // closure so cycles and boundary-order violations prune a whole subtree.
    class CompatibleCounter {
    public:
        CompatibleCounter(const Graph& g, const BoundaryValues& u)
            : n_(static_cast<int>(g.vertex_count()))
            , values_(value_table(g, u))
        {
            for (auto b : g.boundary_vertices())
                boundary_ |= bit(b);

            // Group edges by vertex so each vertex completes early.
            std::vector<bool> taken(g.edge_count(), false);
            std::vector<VertexIndex> order = g.interior_vertices();
            for (auto b : g.boundary_vertices())
                order.push_back(b);
            for (auto v : order)
                for (std::size_t i = 0; i < g.edge_count(); ++i) {
                    const auto& e = g.edges()[i];
                    if (!taken[i] && e.touches(v)) {
                        taken[i] = true;
                        edges_.push_back({static_cast<int>(std::min(e.u, e.v)), static_cast<int>(std::max(e.u, e.v))});
                    }
                }
            for (const auto& e : edges_) {
                initial_.remaining[e.from] += 1;
                initial_.remaining[e.to] += 1;
            }
            for (auto v : g.interior_vertices())
                if (initial_.remaining[v] == 0)
                    isolated_interior_ = true;
        }

        bool isolated_interior() const { return isolated_interior_; }

        std::size_t edge_count() const { return edges_.size(); }
        const SearchState& initial() const { return initial_; }

        bool apply(SearchState& s, std::size_t depth, bool forward) const
        {
            const auto& e = edges_[depth];
            const int from = forward ? e.from : e.to;
            const int to = forward ? e.to : e.from;
            if (from == to || (s.reach[to] & bit(from)))
                return false;

            Mask sources = bit(from);
            for (int x = 0; x < n_; ++x)
                if (s.reach[x] & bit(from))
                    sources |= bit(x);
            const Mask targets = s.reach[to] | bit(to);

            const Mask bs = sources & boundary_;
            const Mask bt = targets & boundary_;
            if (bs && bt) {
                double lowest_source = std::numeric_limits<double>::infinity();
                for (Mask f = bs; f; f &= f - 1)
                    lowest_source = std::min(lowest_source, values_[std::countr_zero(f)]);
                for (Mask f = bt; f; f &= f - 1)
                    if (values_[std::countr_zero(f)] >= lowest_source)
                        return false;
            }
            for (Mask f = sources; f; f &= f - 1)
                s.reach[std::countr_zero(f)] |= targets;

            s.out[from] += 1;
            s.in[to] += 1;
            for (int v : {from, to}) {
                if (--s.remaining[v] == 0 && !(boundary_ & bit(v)) && (s.in[v] == 0 || s.out[v] == 0))
                    return false;
            }
            return true;
        }

        std::uint64_t count_from(const SearchState& s, std::size_t depth) const
        {
            if (depth == edges_.size())
                return 1;
            std::uint64_t total = 0;
            for (bool forward : {true, false}) {
                SearchState next = s;
                if (apply(next, depth, forward))
                    total += count_from(next, depth + 1);
            }
            return total;
        }

    private:
        int n_;
        std::vector<double> values_;
        Mask boundary_ = 0;
        std::vector<Arc> edges_;
        SearchState initial_;
        bool isolated_interior_ = false;
    };

}  // namespace

bool is_compatible(const Graph& g, Orientation o, const BoundaryValues& u)
{
    check_values(g, u);
    const std::size_t n = g.vertex_count();
    if (g.edge_count() > 64)
        throw std::length_error("orientations support at most 64 edges");

    std::vector<std::vector<VertexIndex>> succ(n);
    std::vector<int> indeg(n, 0), outdeg(n, 0);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edges()[i];
        if (e.is_loop())
            return false;
        auto lo = std::min(e.u, e.v), hi = std::max(e.u, e.v);
        auto from = o.forward(i) ? lo : hi;
        auto to = o.forward(i) ? hi : lo;
        succ[from].push_back(to);
        outdeg[from] += 1;
        indeg[to] += 1;
    }

    // acyclic
    std::vector<int> pending = indeg;
    std::vector<VertexIndex> ready;
    for (VertexIndex v = 0; v < n; ++v)
        if (pending[v] == 0)
            ready.push_back(v);
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++visited;
        for (auto w : succ[v])
            if (--pending[w] == 0)
                ready.push_back(w);
    }
    if (visited != n)
        return false;

    for (auto v : g.interior_vertices())
        if (indeg[v] == 0 || outdeg[v] == 0)
            return false;

    for (auto a : g.boundary_vertices()) {
        std::vector<bool> seen(n, false);
        std::vector<VertexIndex> stack{a};
        seen[a] = true;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto w : succ[v]) {
                if (seen[w])
                    continue;
                seen[w] = true;
                stack.push_back(w);
                if (g.is_boundary(w) && u.at(w) >= u.at(a))
                    return false;
            }
        }
    }
    return true;
}

BigInt count_compatible(const Graph& g, const BoundaryValues& u, const OrientationCountOptions& options)
{
    check_values(g, u);
    if (g.edge_count() > options.edge_cap)
        throw std::length_error("graph has " + std::to_string(g.edge_count()) + " edges, above the enumeration cap of " +
                                std::to_string(options.edge_cap));
    if (g.vertex_count() > 64)
        throw std::length_error("orientations support at most 64 vertices");

    const CompatibleCounter counter(g, u);
    if (counter.isolated_interior())
        return 0;
    const unsigned threads = std::max(1u, options.threads);
    std::size_t split = 0;
    while (split < counter.edge_count() && (std::size_t{1} << split) < 8 * threads)
        ++split;
    if (threads == 1 && !options.progress)
        split = 0;
    const std::size_t blocks = std::size_t{1} << split;

    std::vector<std::uint64_t> partial(blocks, 0);
    std::mutex progress_mutex;
    std::size_t finished = 0;
    parallel_for(blocks, threads, [&](std::size_t block) {
        SearchState s = counter.initial();
        bool ok = true;
        for (std::size_t d = 0; d < split && ok; ++d)
            ok = counter.apply(s, d, ((block >> d) & 1u) == 0);
        if (ok)
            partial[block] = counter.count_from(s, split);
        if (options.progress) {
            std::lock_guard lock(progress_mutex);
            options.progress(++finished, blocks);
        }
    });

    BigInt total = 0;
    for (auto p : partial)
        total += p;
    return total;
}

ValueIndependence value_independence_check(const Graph& g, const BoundaryValues& a, const BoundaryValues& b,
                                           const OrientationCountOptions& options)
{
    ValueIndependence out;
    out.count_a = count_compatible(g, a, options);
    out.count_b = count_compatible(g, b, options);
    out.independent = out.count_a == out.count_b;
    return out;
}

}  // namespace chroma
