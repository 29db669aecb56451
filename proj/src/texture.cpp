#include "cgtex/texture.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cgtex/special_functions.hpp"

namespace cgtex {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double draw_texture(const TextureParams& params, std::mt19937_64& eng) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return std::exponential_distribution<double>(1.0 / p.lambda)(eng);
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return std::gamma_distribution<double>(p.alpha, 1.0 / p.beta)(eng);
            } else {
                // 1/z ~ Gamma(alpha, rate beta) when z ~ InvGamma(alpha, scale beta)
                return 1.0 / std::gamma_distribution<double>(p.alpha, 1.0 / p.beta)(eng);
            }
        },
        params);
}

SegmentedSignal simulate_impl(const TextureParams* params, double fixed_z,
                              const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                              int K, int N, std::uint64_t seed) {
    if (K < 1 || N < 1)
        throw std::invalid_argument("simulate_cg: K and N must be positive");
    const int d = static_cast<int>(mu.size());
    if (sigma.rows() != d || sigma.cols() != d)
        throw std::invalid_argument("simulate_cg: mu/sigma dimension mismatch");
    const auto llt = chol_spd(sigma);
    const Eigen::MatrixXd L = llt.matrixL();

    Eigen::MatrixXd data(static_cast<long>(K) * N, d);
    for (int k = 0; k < K; ++k) {
        std::mt19937_64 eng(mix_seed(seed, static_cast<std::uint64_t>(k)));
        const double z = params ? draw_texture(*params, eng) : fixed_z;
        const double sqrt_z = std::sqrt(z);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int n = 0; n < N; ++n) {
            Eigen::VectorXd xi(d);
            for (int j = 0; j < d; ++j) xi[j] = normal(eng);
            data.row(static_cast<long>(k) * N + n) = (mu + sqrt_z * (L * xi)).transpose();
        }
    }
    return SegmentedSignal(std::move(data), K, N);
}

}  // namespace

std::string to_string(Family family) {
    switch (family) {
        case Family::cge: return "cge";
        case Family::cgg: return "cgg";
        case Family::cgig: return "cgig";
    }
    throw std::logic_error("to_string: unknown family");
}

Family family_from_string(const std::string& name) {
    if (name == "cge") return Family::cge;
    if (name == "cgg") return Family::cgg;
    if (name == "cgig") return Family::cgig;
    throw std::invalid_argument("unknown family '" + name + "' (expected cge, cgg or cgig)");
}

void validate(const TextureParams& params) {
    const bool ok = std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return std::isfinite(p.lambda) && p.lambda > 0.0;
            else
                return std::isfinite(p.alpha) && p.alpha > 0.0 && std::isfinite(p.beta) &&
                       p.beta > 0.0;
        },
        params);
    if (!ok)
        throw std::invalid_argument("texture parameters must be finite and strictly positive");
}

Family family_of(const TextureParams& params) {
    if (std::holds_alternative<Exponential>(params)) return Family::cge;
    if (std::holds_alternative<Gamma>(params)) return Family::cgg;
    return Family::cgig;
}

double texture_log_pdf(const TextureParams& params, double z) {
    validate(params);
    if (!(z > 0.0))
        throw std::domain_error("texture_log_pdf: requires z > 0");
    return std::visit(
        [z](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log(p.lambda) - z / p.lambda;
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return p.alpha * std::log(p.beta) - sf::log_gamma(p.alpha) +
                       (p.alpha - 1.0) * std::log(z) - p.beta * z;
            } else {
                return p.alpha * std::log(p.beta) - sf::log_gamma(p.alpha) -
                       (p.alpha + 1.0) * std::log(z) - p.beta / z;
            }
        },
        params);
}

double texture_mean(const TextureParams& params) {
    validate(params);
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return p.lambda;
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return p.alpha / p.beta;
            } else {
                if (p.alpha <= 1.0)
                    throw std::domain_error(
                        "texture_mean: inverse-gamma mean undefined for alpha <= 1");
                return p.beta / (p.alpha - 1.0);
            }
        },
        params);
}

double texture_second_moment(const TextureParams& params) {
    validate(params);
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return 2.0 * p.lambda * p.lambda;
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return p.alpha * (p.alpha + 1.0) / (p.beta * p.beta);
            } else {
                if (p.alpha <= 2.0)
                    throw std::domain_error(
                        "texture_second_moment: undefined for inverse-gamma alpha <= 2");
                return p.beta * p.beta / ((p.alpha - 1.0) * (p.alpha - 2.0));
            }
        },
        params);
}

std::vector<double> sample_texture(const TextureParams& params, std::size_t count,
                                   std::uint64_t seed) {
    validate(params);
    std::vector<double> draws(count);
    std::mt19937_64 eng(mix_seed(seed, 0));
    for (auto& z : draws) z = draw_texture(params, eng);
    return draws;
}

SegmentedSignal simulate_cg(const TextureParams& params, const Eigen::VectorXd& mu,
                            const Eigen::MatrixXd& sigma, int segment_count,
                            int samples_per_segment, std::uint64_t seed) {
    validate(params);
    return simulate_impl(&params, 0.0, mu, sigma, segment_count, samples_per_segment, seed);
}

SegmentedSignal simulate_fixed_texture(double z, const Eigen::VectorXd& mu,
                                       const Eigen::MatrixXd& sigma, int segment_count,
                                       int samples_per_segment, std::uint64_t seed) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::invalid_argument("simulate_fixed_texture: z must be positive");
    return simulate_impl(nullptr, z, mu, sigma, segment_count, samples_per_segment, seed);
}

}  // namespace cgtex
