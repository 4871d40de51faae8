#include "chroma/chromatic.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace chroma {

namespace {

    using Mask = std::uint64_t;

    Mask bit(int v) { return Mask{1} << v; }

    // bits strictly above v
    Mask above(int v) { return v >= 63 ? Mask{0} : ~((Mask{1} << (v + 1)) - 1); }

    // Loopless simple graph on at most 64 vertices as adjacency bitmasks.
    struct SimpleGraph {
        std::vector<Mask> adj;

        int size() const { return static_cast<int>(adj.size()); }

        int degree(int v) const { return std::popcount(adj[v]); }

        int edge_count() const
        {
            int twice = 0;
            for (auto a : adj)
                twice += std::popcount(a);
            return twice / 2;
        }

        SimpleGraph without_edge(int a, int b) const
        {
            SimpleGraph out = *this;
            out.adj[a] &= ~bit(b);
            out.adj[b] &= ~bit(a);
            return out;
        }

        SimpleGraph without_vertex(int v) const
        {
            SimpleGraph out;
            out.adj.reserve(adj.size() - 1);
            const Mask low = bit(v) - 1;
            for (int x = 0; x < size(); ++x) {
                if (x == v)
                    continue;
                Mask a = adj[x];
                out.adj.push_back((a & low) | ((a >> 1) & ~low));
            }
            return out;
        }

        // Merges b into a, dropping b; neighbourhoods are unioned so parallel
        // edges collapse.
        SimpleGraph contracted(int a, int b) const
        {
            SimpleGraph merged = *this;
            Mask na = (adj[a] | adj[b]) & ~bit(a) & ~bit(b);
            merged.adj[a] = na;
            for (int x = 0; x < size(); ++x) {
                if (x == a || x == b)
                    continue;
                if (merged.adj[x] & bit(b)) {
                    merged.adj[x] &= ~bit(b);
                    merged.adj[x] |= bit(a);
                }
            }
            merged.adj[b] = 0;
            return merged.without_vertex(b);
        }

        std::vector<SimpleGraph> components() const
        {
            std::vector<SimpleGraph> out;
            Mask unseen = size() == 64 ? ~Mask{0} : bit(size()) - 1;
            while (unseen) {
                Mask comp = unseen & -unseen;
                Mask frontier = comp;
                while (frontier) {
                    Mask next = 0;
                    for (Mask f = frontier; f; f &= f - 1)
                        next |= adj[std::countr_zero(f)];
                    frontier = next & ~comp;
                    comp |= next;
                }
                unseen &= ~comp;
                out.push_back(restricted(comp));
            }
            return out;
        }

        SimpleGraph restricted(Mask keep) const
        {
            std::vector<int> index(adj.size(), -1);
            int next = 0;
            for (Mask f = keep; f; f &= f - 1)
                index[std::countr_zero(f)] = next++;
            SimpleGraph out;
            out.adj.assign(static_cast<std::size_t>(next), 0);
            for (Mask f = keep; f; f &= f - 1) {
                int x = std::countr_zero(f);
                for (Mask g = adj[x] & keep; g; g &= g - 1)
                    out.adj[index[x]] |= bit(index[std::countr_zero(g)]);
            }
            return out;
        }

        bool connected() const
        {
            if (adj.empty())
                return true;
            Mask comp = 1, frontier = 1;
            while (frontier) {
                Mask next = 0;
                for (Mask f = frontier; f; f &= f - 1)
                    next |= adj[std::countr_zero(f)];
                frontier = next & ~comp;
                comp |= next;
            }
            return std::popcount(comp) == size();
        }
    };

    struct Conversion {
        SimpleGraph graph;
        bool has_loop = false;
    };

    Conversion to_simple(const Graph& g)
    {
        if (g.vertex_count() > 64)
            throw std::length_error("chromatic computations support at most 64 vertices");
        Conversion out;
        out.graph.adj.assign(g.vertex_count(), 0);
        for (const auto& e : g.edges()) {
            if (e.is_loop()) {
                out.has_loop = true;
                continue;
            }
            out.graph.adj[e.u] |= bit(static_cast<int>(e.v));
            out.graph.adj[e.v] |= bit(static_cast<int>(e.u));
        }
        return out;
    }

    std::uint64_t mix(std::uint64_t h, std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return h ^ x;
    }

    // Colour refinement from the degree sequence. Colours are canonical (they
    // depend only on the isomorphism class), so equal graphs land in equal
    // buckets; the hash also folds in every round's signature list.
    struct Refinement {
        std::vector<int> colour;
        std::uint64_t hash = 0;
    };

    Refinement refine(const SimpleGraph& g)
    {
        const int n = g.size();
        Refinement r;
        r.colour.resize(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v)
            r.colour[v] = g.degree(v);
        r.hash = mix(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(g.edge_count()));

        int classes = -1;
        for (int round = 0; round <= n; ++round) {
            std::vector<std::vector<int>> signature(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) {
                auto& s = signature[v];
                s.push_back(r.colour[v]);
                std::vector<int> nb;
                for (Mask f = g.adj[v]; f; f &= f - 1)
                    nb.push_back(r.colour[std::countr_zero(f)]);
                std::sort(nb.begin(), nb.end());
                s.insert(s.end(), nb.begin(), nb.end());
            }
            auto sorted = signature;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (int v = 0; v < n; ++v)
                r.colour[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), signature[v]) -
                                               sorted.begin());
            std::vector<std::vector<int>> all = signature;
            std::sort(all.begin(), all.end());
            for (const auto& s : all)
                for (int x : s)
                    r.hash = mix(r.hash, static_cast<std::uint64_t>(x));
            if (static_cast<int>(sorted.size()) == classes)
                break;
            classes = static_cast<int>(sorted.size());
        }
        return r;
    }

    bool isomorphic(const SimpleGraph& a, const Refinement& ra, const SimpleGraph& b, const Refinement& rb)
    {
        const int n = a.size();
        if (n != b.size())
            return false;
        std::vector<int> map(static_cast<std::size_t>(n), -1);
        Mask used = 0;
        std::function<bool(int)> extend = [&](int v) -> bool {
            if (v == n)
                return true;
            for (int w = 0; w < n; ++w) {
                if ((used & bit(w)) || ra.colour[v] != rb.colour[w] || a.degree(v) != b.degree(w))
                    continue;
                bool ok = true;
                for (int u = 0; u < v && ok; ++u) {
                    bool ea = (a.adj[v] & bit(u)) != 0;
                    bool eb = (b.adj[w] & bit(map[u])) != 0;
                    ok = ea == eb;
                }
                if (!ok)
                    continue;
                map[v] = w;
                used |= bit(w);
                if (extend(v + 1))
                    return true;
                used &= ~bit(w);
                map[v] = -1;
            }
            return false;
        };
        return extend(0);
    }

    // Memo on isomorphism classes up to 12 vertices, on labelled adjacency above.
    class PolynomialMemo {
    public:
        static constexpr int iso_limit = 12;

        const IntPolynomial* find(const SimpleGraph& g)
        {
            if (g.size() > iso_limit) {
                auto it = exact_.find(g.adj);
                return it == exact_.end() ? nullptr : &it->second;
            }
            auto r = refine(g);
            auto it = buckets_.find(r.hash);
            if (it == buckets_.end())
                return nullptr;
            for (auto& entry : it->second)
                if (isomorphic(g, r, entry.graph, entry.refinement))
                    return &entry.value;
            return nullptr;
        }

        void insert(const SimpleGraph& g, const IntPolynomial& value)
        {
            if (g.size() > iso_limit) {
                exact_.emplace(g.adj, value);
                return;
            }
            auto r = refine(g);
            buckets_[r.hash].push_back(Entry{g, r, value});
        }

    private:
        struct Entry {
            SimpleGraph graph;
            Refinement refinement;
            IntPolynomial value;
        };
        std::unordered_map<std::uint64_t, std::vector<Entry>> buckets_;
        std::map<std::vector<Mask>, IntPolynomial> exact_;
    };

    const IntPolynomial& x_poly()
    {
        static const IntPolynomial x = IntPolynomial::monomial(1, 1);
        return x;
    }

    std::pair<int, int> edge_with_most_common_neighbours(const SimpleGraph& g)
    {
        std::pair<int, int> best{-1, -1};
        int best_common = -1;
        for (int a = 0; a < g.size(); ++a)
            for (Mask f = g.adj[a] & above(a); f; f &= f - 1) {
                int b = std::countr_zero(f);
                int common = std::popcount(g.adj[a] & g.adj[b]);
                if (common > best_common) {
                    best_common = common;
                    best = {a, b};
                }
            }
        return best;
    }

    int pendant_vertex(const SimpleGraph& g)
    {
        for (int v = 0; v < g.size(); ++v)
            if (g.degree(v) == 1)
                return v;
        return -1;
    }

    IntPolynomial chromatic_rec(const SimpleGraph& g, PolynomialMemo& memo)
    {
        const int n = g.size();
        if (n == 0)
            return IntPolynomial::constant(1);

        auto comps = g.components();
        if (comps.size() > 1) {
            IntPolynomial product = IntPolynomial::constant(1);
            for (const auto& c : comps)
                product *= chromatic_rec(c, memo);
            return product;
        }

        const int m = g.edge_count();
        if (m == n - 1)
            return x_poly() * IntPolynomial::linear_root(1).pow(static_cast<std::size_t>(n - 1));
        if (m == n * (n - 1) / 2) {
            IntPolynomial falling = IntPolynomial::constant(1);
            for (int i = 0; i < n; ++i)
                falling *= IntPolynomial::linear_root(i);
            return falling;
        }
        if (int v = pendant_vertex(g); v >= 0)
            return IntPolynomial::linear_root(1) * chromatic_rec(g.without_vertex(v), memo);

        if (const auto* hit = memo.find(g))
            return *hit;

        auto [a, b] = edge_with_most_common_neighbours(g);
        auto result = chromatic_rec(g.without_edge(a, b), memo) - chromatic_rec(g.contracted(a, b), memo);
        memo.insert(g, result);
        return result;
    }

    IntPolynomial tutte_rec(const SimpleGraph& g, PolynomialMemo& memo)
    {
        const int n = g.size();
        if (n <= 1)
            return IntPolynomial::constant(1);

        auto comps = g.components();
        if (comps.size() > 1) {
            IntPolynomial product = IntPolynomial::constant(1);
            for (const auto& c : comps)
                product *= tutte_rec(c, memo);
            return product;
        }

        const int m = g.edge_count();
        if (m == n - 1)
            return IntPolynomial::monomial(1, static_cast<std::size_t>(n - 1));
        if (int v = pendant_vertex(g); v >= 0)
            return x_poly() * tutte_rec(g.without_vertex(v), memo);

        if (const auto* hit = memo.find(g))
            return *hit;

        auto [a, b] = edge_with_most_common_neighbours(g);
        if (std::popcount(g.adj[a] & g.adj[b]) == 0) {
            // no triangle edge; find any edge whose removal keeps g connected
            bool found = false;
            for (int x = 0; x < n && !found; ++x)
                for (Mask f = g.adj[x] & above(x); f && !found; f &= f - 1) {
                    int y = std::countr_zero(f);
                    if (g.without_edge(x, y).connected()) {
                        a = x;
                        b = y;
                        found = true;
                    }
                }
            if (!found)
                throw std::logic_error("connected non-tree graph without a non-bridge edge");
        }
        // For y = 0 a parallel class contributes like a single edge, so the
        // simple contraction is exact.
        auto result = tutte_rec(g.without_edge(a, b), memo) + tutte_rec(g.contracted(a, b), memo);
        memo.insert(g, result);
        return result;
    }

    IntPolynomial sign_power(std::size_t n)
    {
        return IntPolynomial::constant(n % 2 == 0 ? 1 : -1);
    }

}  // namespace

IntPolynomial chromatic_polynomial(const Graph& g)
{
    auto conv = to_simple(g);
    if (conv.has_loop)
        return {};
    PolynomialMemo memo;
    return chromatic_rec(conv.graph, memo);
}

IntPolynomial tutte_x_slice(const Graph& g)
{
    auto conv = to_simple(g);
    if (conv.has_loop)
        return {};
    PolynomialMemo memo;
    return tutte_rec(conv.graph, memo);
}

BigInt chi_at_negative(const Graph& g, int k)
{
    if (k < 1)
        throw std::invalid_argument("chi_at_negative needs k >= 1");
    const BigInt minus_k = -BigInt(k);
    const BigInt direct = chromatic_polynomial(g).evaluate(minus_k);

    BigInt via_tutte = 1;
    auto conv = to_simple(g);
    if (conv.has_loop) {
        via_tutte = 0;
    }
    else {
        PolynomialMemo memo;
        for (const auto& comp : conv.graph.components()) {
            BigInt t = tutte_rec(comp, memo).evaluate(BigInt(1 + k));
            BigInt sign = comp.size() % 2 == 0 ? 1 : -1;
            via_tutte *= sign * BigInt(k) * t;
        }
    }
    if (direct != via_tutte)
        throw std::logic_error("chromatic and Tutte evaluations disagree at -" + std::to_string(k) + ": " +
                               direct.str() + " vs " + via_tutte.str());
    return direct;
}

BigInt predicted_realizations(const Graph& g)
{
    const auto boundary = g.boundary_vertices();
    const auto interior = g.interior_vertices();
    if (boundary.size() < 2)
        throw std::invalid_argument("realization count needs a boundary of size at least 2");
    for (auto v : interior)
        for (auto b : boundary)
            if (!g.adjacent(v, b))
                throw std::invalid_argument("interior vertex '" + g.name(v) + "' is not adjacent to boundary vertex '" +
                                            g.name(b) + "'");

    const auto k = static_cast<long>(boundary.size());
    const Graph inner = induced_subgraph(g, interior);
    const BigInt value = chromatic_polynomial(inner).evaluate(BigInt(2 - k));
    BigInt count = sign_power(interior.size()).coefficient(0) * value;
    if (count < 0)
        throw std::logic_error("negative realization count " + count.str());
    return count;
}

CountReport count_report(const Graph& g, std::string graph_id)
{
    CountReport report;
    report.graph_id = std::move(graph_id);
    report.k = static_cast<int>(g.boundary_count());
    report.predicted_realization_count = predicted_realizations(g);
    const Graph inner = induced_subgraph(g, g.interior_vertices());
    report.chi_value = chromatic_polynomial(inner).evaluate(BigInt(2 - report.k));
    return report;
}

}  // namespace chroma
