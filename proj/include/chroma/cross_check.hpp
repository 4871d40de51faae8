#pragma once

#include "chroma/integral.hpp"
#include "chroma/polynomial.hpp"

#include <cstdint>
#include <string>

namespace chroma {

struct CrossCheckOptions {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    Sampler sampler = Sampler::fiber;
    /// Allowed |estimate - exact| in standard errors.
    double sigmas = 4.0;
    std::size_t max_vertices = 8;
};

/// |chi(-k)| three ways: deletion-contraction, compatible orientations of G_k,
/// and the Monte-Carlo integral.
struct CrossCheckReport {
    int k = 0;
    BigInt exact;
    BigInt orientations;
    IntegralEstimate estimate;
    /// See z_score.
    double z_score = 0.0;
    bool exact_routes_agree = false;
    bool estimate_within = false;

    bool passed() const { return exact_routes_agree && estimate_within; }
};

/// (estimate - exact) / standard error, with the error floored at 1e-12 of
/// max(1, |exact|) so that an integrand constant up to rounding does not
/// produce a spurious score.
double z_score(double estimate, double standard_error, double exact);

/// Throws std::length_error when g exceeds max_vertices.
CrossCheckReport cross_check(const Graph& g, int k, const CrossCheckOptions& options = {});

}  // namespace chroma
