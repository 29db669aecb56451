#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cgtex/signal.hpp"

namespace cgtex {

/// Model family tags. Each compound model is named after its texture law.
enum class Family { cge, cgg, cgig };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Exponential texture with mean lambda (density (1/lambda) exp(-z/lambda)).
struct Exponential {
    double lambda;
};

/// Gamma texture with shape alpha and *rate* beta.
struct Gamma {
    double alpha;
    double beta;
};

/// Inverse-gamma texture with shape alpha and *scale* beta.
struct InverseGamma {
    double alpha;
    double beta;
};

using TextureParams = std::variant<Exponential, Gamma, InverseGamma>;

/// Throws std::invalid_argument unless all parameters are strictly positive.
void validate(const TextureParams& params);

Family family_of(const TextureParams& params);

/// Log density of the texture law at z > 0.
double texture_log_pdf(const TextureParams& params, double z);

/// E[z]. Throws std::domain_error for inverse-gamma with alpha <= 1.
double texture_mean(const TextureParams& params);

/// E[z^2]; finite for inverse-gamma only when alpha > 2.
double texture_second_moment(const TextureParams& params);

/// count i.i.d. draws, deterministic for a fixed seed.
std::vector<double> sample_texture(const TextureParams& params, std::size_t count,
                                   std::uint64_t seed);

/// Compound-Gaussian generator: per segment k draw z_k from the texture law
/// once, then N samples mu + sqrt(z_k) * x with x ~ N(0, sigma). Each segment
/// uses its own counter-derived stream so output is independent of any
/// parallel partitioning and deterministic per seed.
SegmentedSignal simulate_cg(const TextureParams& params, const Eigen::VectorXd& mu,
                            const Eigen::MatrixXd& sigma, int segment_count,
                            int samples_per_segment, std::uint64_t seed);

/// Same generator with the texture pinned to a constant z (z = 1 gives exact
/// Gaussian output). Used by diagnostics and tests.
SegmentedSignal simulate_fixed_texture(double z, const Eigen::VectorXd& mu,
                                       const Eigen::MatrixXd& sigma, int segment_count,
                                       int samples_per_segment, std::uint64_t seed);

}  // namespace cgtex
