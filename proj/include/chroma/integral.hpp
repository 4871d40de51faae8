#pragma once

#include "chroma/graph.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace chroma {

/// Point of the open standard simplex (positive coordinates summing to 1).
struct SimplexSample {
    std::vector<double> point;
    std::uint64_t stream = 0;
    double weight = 1.0;
};

/// Uniform sample from normalized standard exponentials drawn from the
/// counter-based stream (seed, index); identical for identical keys.
SimplexSample sample_simplex(std::size_t dimension, std::uint64_t seed, std::uint64_t index);

/// prod_{e=uv} (h(u) - h(v))^2 / Z for the harmonic extension h with
/// conductances c (normalized to sum 1) and total energy Z. Throws
/// std::domain_error when Z = 0.
double integrand(const Graph& g_k, const EdgeMap<double>& c, const VertexMap<double>& boundary);

enum class Sampler {
    /// Uniform points of the conductance simplex, weighted by the integrand.
    simplex,
    /// Same integral after the change of variables c -> (h, fiber
    /// conductances): each interior potential uniform in a uniformly chosen
    /// gap between consecutive boundary values, conductances exponential
    /// with rate (h(u) - h(v))^2
    /// except one edge per interior vertex (to its nearest terminal), which is
    /// fixed by harmonicity. Unbiased with far lighter tails.
    fiber,
};

struct IntegralEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
    int k = 0;
    std::vector<double> boundary_values;
    std::uint64_t seed = 0;
    Sampler sampler = Sampler::simplex;
    /// Smallest and largest integrand values seen.
    double min_value = 0.0;
    double max_value = 0.0;
};

struct EstimateOptions {
    unsigned threads = 1;
    Sampler sampler = Sampler::simplex;
    /// k+1 distinct boundary values; defaults to 0, 1, ..., k.
    std::optional<std::vector<double>> values;
};

/// Fiber-sampler weight for sample `index`. Its expectation over all indices
/// is |chi(-k)| whenever g_k is an augmented graph.
double fiber_weight(const Graph& g_k, const VertexMap<double>& boundary, std::uint64_t seed, std::uint64_t index);

/// Monte-Carlo estimate of |chi_g(-k)|: by default the uniform mean of the
/// integrand over the conductance simplex of G_k. Bitwise reproducible for a fixed
/// (seed, samples) whatever the thread count.
IntegralEstimate estimate_chi(const Graph& g, int k, std::size_t samples, std::uint64_t seed,
                              const EstimateOptions& options = {});

struct InvarianceReport {
    IntegralEstimate a;
    IntegralEstimate b;
    /// |mean_a - mean_b| / sqrt(se_a^2 + se_b^2)
    double difference_sigmas = 0.0;
    bool consistent = false;
    /// One run's standard error exceeds twice the other's.
    bool variance_flag = false;
};

InvarianceReport boundary_value_invariance(const Graph& g, int k, const std::vector<double>& values_a,
                                           const std::vector<double>& values_b, std::size_t samples,
                                           std::uint64_t seed, unsigned threads = 1,
                                           Sampler sampler = Sampler::simplex);

}  // namespace chroma
