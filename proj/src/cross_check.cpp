#include "chroma/cross_check.hpp"

#include "chroma/chromatic.hpp"
#include "chroma/orientations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chroma {

double z_score(double estimate, double standard_error, double exact)
{
    const double floor = 1e-12 * std::max(1.0, std::abs(exact));
    return (estimate - exact) / std::max(standard_error, floor);
}

CrossCheckReport cross_check(const Graph& g, int k, const CrossCheckOptions& options)
{
    if (g.vertex_count() > options.max_vertices)
        throw std::length_error("cross_check is limited to " + std::to_string(options.max_vertices) +
                                " vertices; got " + std::to_string(g.vertex_count()));
    if (k < 1)
        throw std::invalid_argument("k must be at least 1");

    CrossCheckReport out;
    out.k = k;
    out.exact = abs(chi_at_negative(g, k));

    const auto values = default_boundary_values(k);
    const auto aug = augment_k(g, k, values);
    OrientationCountOptions count_options;
    count_options.threads = options.threads;
    out.orientations = count_compatible(aug.graph, aug.boundary_values, count_options);
    out.exact_routes_agree = out.exact == out.orientations;

    EstimateOptions estimate_options;
    estimate_options.threads = options.threads;
    estimate_options.sampler = options.sampler;
    estimate_options.values = values;
    out.estimate = estimate_chi(g, k, options.samples, options.seed, estimate_options);

    out.z_score = z_score(out.estimate.mean, out.estimate.standard_error, out.exact.convert_to<double>());
    out.estimate_within = std::abs(out.z_score) <= options.sigmas;
    return out;
}

}  // namespace chroma
