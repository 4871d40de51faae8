#include "chroma/integral.hpp"

#include "chroma/dirichlet.hpp"
#include "chroma/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace chroma {

namespace {

    constexpr std::size_t chunk_size = 4096;

    struct Moments {
        std::size_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();

        void add(double x)
        {
            ++n;
            const double delta = x - mean;
            mean += delta / static_cast<double>(n);
            m2 += delta * (x - mean);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }

        void merge(const Moments& o)
        {
            if (o.n == 0)
                return;
            if (n == 0) {
                *this = o;
                return;
            }
            const double total = static_cast<double>(n + o.n);
            const double delta = o.mean - mean;
            mean += delta * static_cast<double>(o.n) / total;
            m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
            n += o.n;
            lo = std::min(lo, o.lo);
            hi = std::max(hi, o.hi);
        }
    };

    // Change of variables for the fiber sampler. With rho(c) = exp(-Z(c)) the
    // homogeneous integral becomes |chi| = int prod_e dh_e^2 exp(-Z) dc over
    // the positive orthant; writing c as (h, free conductances) costs
    // det L / prod_v |h(v) - h(t(v))|, and sampling the free conductances
    // with rate dh_e^2 cancels their share of exp(-Z).
    class FiberSampler {
    public:
        FiberSampler(const Graph& g, const VertexMap<double>& boundary)
            : g_(g)
            , interior_(g.interior_vertices())
            , row_(g.vertex_count(), -1)
            , base_(g.vertex_count(), 0.0)
        {
            if (g.boundary_count() < 2)
                throw std::invalid_argument("fiber sampler needs at least two boundary vertices");
            for (auto b : g.boundary_vertices())
                base_[b] = boundary.at(b);
            for (std::size_t i = 0; i < interior_.size(); ++i)
                row_[interior_[i]] = static_cast<int>(i);
            for (auto v : interior_)
                for (auto b : g.boundary_vertices())
                    if (!g.adjacent(v, b))
                        throw std::invalid_argument("fiber sampler needs every interior vertex joined to every boundary vertex");
            for (auto b : g.boundary_vertices())
                levels_.push_back(base_[b]);
            std::sort(levels_.begin(), levels_.end());
            levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
            if (levels_.size() < 2)
                throw std::invalid_argument("fiber sampler needs two distinct boundary values");
            for (const auto& e : g.edges())
                has_loop_ = has_loop_ || e.is_loop();
        }

        double weight(std::uint64_t seed, std::uint64_t index) const
        {
            if (has_loop_)
                return 0.0;
            const std::size_t n = interior_.size();
            const std::size_t m = g_.edge_count();
            // Each potential picks a gap between consecutive boundary values
            // uniformly, then a uniform point in it; 1/density enters the
            // weight. Skewed values then still put mass in every gap.
            std::vector<double> h = base_;
            const std::size_t gaps = levels_.size() - 1;
            double log_w = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double u = counter_uniform(seed, index, i) * static_cast<double>(gaps);
                const std::size_t j = std::min(static_cast<std::size_t>(u), gaps - 1);
                const double width = levels_[j + 1] - levels_[j];
                h[interior_[i]] = levels_[j] + width * (u - static_cast<double>(j));
                log_w += std::log(static_cast<double>(gaps) * width);
            }

            // nearest terminal of each interior vertex, and the edge to it
            std::vector<VertexIndex> target(g_.vertex_count(), 0);
            for (auto v : interior_) {
                double best = std::numeric_limits<double>::infinity();
                for (auto b : g_.boundary_vertices())
                    if (std::abs(h[v] - h[b]) < best) {
                        best = std::abs(h[v] - h[b]);
                        target[v] = b;
                    }
            }
            std::vector<std::size_t> designated(g_.vertex_count(), m);
            std::vector<double> c(m, 0.0), pull(g_.vertex_count(), 0.0);
            std::uint64_t draw = n;
            for (std::size_t j = 0; j < m; ++j) {
                const auto& e = g_.edges()[j];
                bool fixed = false;
                for (auto v : {e.u, e.v})
                    if (row_[v] >= 0 && designated[v] == m && e.other(v) == target[v]) {
                        designated[v] = j;
                        fixed = true;
                        break;
                    }
                if (fixed)
                    continue;
                const double d = h[e.u] - h[e.v];
                if (d == 0.0)
                    return 0.0;
                c[j] = -std::log(counter_uniform(seed, index, draw++)) / (d * d);
                pull[e.u] -= c[j] * d;
                pull[e.v] += c[j] * d;
            }

            for (auto v : interior_) {
                const double gap = h[v] - h[target[v]];
                const double cd = pull[v] / gap;
                if (!(cd > 0.0) || !std::isfinite(cd))
                    return 0.0;
                c[designated[v]] = cd;
                log_w += std::log(std::abs(gap)) - cd * gap * gap;
            }
            if (n > 0) {
                Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
                for (std::size_t j = 0; j < m; ++j) {
                    const auto& e = g_.edges()[j];
                    const int a = row_[e.u], b = row_[e.v];
                    if (a >= 0)
                        lap(a, a) += c[j];
                    if (b >= 0)
                        lap(b, b) += c[j];
                    if (a >= 0 && b >= 0) {
                        lap(a, b) -= c[j];
                        lap(b, a) -= c[j];
                    }
                }
                const Eigen::LLT<Eigen::MatrixXd> llt(lap);
                if (llt.info() != Eigen::Success)
                    return 0.0;
                const auto& l = llt.matrixLLT();
                for (Eigen::Index i = 0; i < l.rows(); ++i)
                    log_w += 2.0 * std::log(l(i, i));
            }
            return std::exp(log_w);
        }

    private:
        const Graph& g_;
        std::vector<VertexIndex> interior_;
        std::vector<int> row_;
        std::vector<double> base_;
        std::vector<double> levels_;
        bool has_loop_ = false;
    };

}  // namespace

SimplexSample sample_simplex(std::size_t dimension, std::uint64_t seed, std::uint64_t index)
{
    SimplexSample s;
    s.stream = index;
    s.point.resize(dimension);
    double total = 0.0;
    for (std::size_t j = 0; j < dimension; ++j) {
        s.point[j] = -std::log(counter_uniform(seed, index, j));
        total += s.point[j];
    }
    for (auto& x : s.point)
        x /= total;
    return s;
}

double integrand(const Graph& g_k, const EdgeMap<double>& c, const VertexMap<double>& boundary)
{
    double total = 0.0;
    for (const auto& [id, value] : c) {
        if (!(value > 0.0))
            throw std::invalid_argument("integrand needs strictly positive conductances");
        total += value;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("integrand needs conductances normalized to sum 1");

    const auto h = solve_dirichlet(g_k, c, boundary);
    const double z = h.total_energy;
    if (!(z > 0.0))
        throw std::domain_error("total Dirichlet energy vanishes (all boundary values equal?)");
    double product = 1.0;
    for (const auto& e : g_k.edges()) {
        const double d = h.values[e.u] - h.values[e.v];
        product *= d * d / z;
    }
    return product;
}

double fiber_weight(const Graph& g_k, const VertexMap<double>& boundary, std::uint64_t seed, std::uint64_t index)
{
    return FiberSampler(g_k, boundary).weight(seed, index);
}

IntegralEstimate estimate_chi(const Graph& g, int k, std::size_t samples, std::uint64_t seed,
                              const EstimateOptions& options)
{
    if (k < 1)
        throw std::invalid_argument("estimate_chi needs k >= 1");
    if (samples < 1)
        throw std::invalid_argument("estimate_chi needs at least one sample");

    const auto values = options.values.value_or(default_boundary_values(k));
    const auto aug = augment_k(g, k, values);
    const Graph& gk = aug.graph;
    const std::size_t m = gk.edge_count();

    std::optional<FiberSampler> fiber;
    if (options.sampler == Sampler::fiber)
        fiber.emplace(gk, aug.boundary_values);

    const std::size_t chunks = (samples + chunk_size - 1) / chunk_size;
    std::vector<Moments> partial(chunks);
    parallel_for(chunks, options.threads, [&](std::size_t chunk) {
        Moments acc;
        EdgeMap<double> c;
        const std::size_t end = std::min(samples, (chunk + 1) * chunk_size);
        for (std::size_t i = chunk * chunk_size; i < end; ++i) {
            if (fiber) {
                acc.add(fiber->weight(seed, i));
                continue;
            }
            const auto s = sample_simplex(m, seed, i);
            for (std::size_t j = 0; j < m; ++j)
                c[gk.edges()[j].id] = s.point[j];
            acc.add(integrand(gk, c, aug.boundary_values));
        }
        partial[chunk] = acc;
    });

    Moments total;
    for (const auto& p : partial)
        total.merge(p);

    IntegralEstimate out;
    out.mean = total.mean;
    out.samples = total.n;
    out.standard_error = total.n > 1
        ? std::sqrt(total.m2 / static_cast<double>(total.n - 1)) / std::sqrt(static_cast<double>(total.n))
        : 0.0;
    out.k = k;
    out.boundary_values = values;
    out.seed = seed;
    out.sampler = options.sampler;
    out.min_value = total.lo;
    out.max_value = total.hi;
    return out;
}

InvarianceReport boundary_value_invariance(const Graph& g, int k, const std::vector<double>& values_a,
                                           const std::vector<double>& values_b, std::size_t samples,
                                           std::uint64_t seed, unsigned threads, Sampler sampler)
{
    InvarianceReport r;
    r.a = estimate_chi(g, k, samples, seed, EstimateOptions{threads, sampler, values_a});
    r.b = estimate_chi(g, k, samples, seed, EstimateOptions{threads, sampler, values_b});
    const double se = std::hypot(r.a.standard_error, r.b.standard_error);
    const double diff = std::abs(r.a.mean - r.b.mean);
    r.difference_sigmas = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    r.consistent = r.difference_sigmas <= 3.0;
    r.variance_flag = r.a.standard_error > 2.0 * r.b.standard_error || r.b.standard_error > 2.0 * r.a.standard_error;
    return r;
}

}  // namespace chroma
