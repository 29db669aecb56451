#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cgtex/evaluation.hpp"
#include "cgtex/texture.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cgtex;

TEST_CASE("texture_log_pdf formulas") {
    SUBCASE("exponential") {
        CHECK(texture_log_pdf(Exponential{1.0}, 1e-12) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(texture_log_pdf(Exponential{1.0}, 1.0) == doctest::Approx(-1.0));
        CHECK(texture_log_pdf(Exponential{2.5}, 3.0) ==
              doctest::Approx(-std::log(2.5) - 3.0 / 2.5));
        CHECK_THROWS_AS(texture_log_pdf(Exponential{1.0}, 0.0), std::domain_error);
        CHECK_THROWS_AS(texture_log_pdf(Exponential{-1.0}, 1.0), std::invalid_argument);
    }
    SUBCASE("gamma with alpha = 1 is exponential") {
        for (const double z : {0.1, 0.9, 4.2}) {
            CHECK(texture_log_pdf(Gamma{1.0, 1.0 / 3.0}, z) ==
                  doctest::Approx(texture_log_pdf(Exponential{3.0}, z)).epsilon(1e-14));
        }
    }
    SUBCASE("each density integrates to 1") {
        const TextureParams all[] = {Exponential{2.0}, Gamma{2.5, 1.3}, InverseGamma{2.0, 3.0}};
        for (const auto& params : all) {
            // in u = ln z the integrand is z * pdf(z), well behaved at 0
            const auto f = [&](double u) {
                const double z = std::exp(u);
                return std::exp(texture_log_pdf(params, z) + u);
            };
            const double total = oracle::integrate(f, -60.0, 60.0, 1e-10);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("texture_mean") {
    CHECK(texture_mean(Exponential{2.5}) == 2.5);
    CHECK(texture_mean(Gamma{4.0, 2.0}) == 2.0);
    CHECK(texture_mean(InverseGamma{3.0, 4.0}) == 2.0);
    CHECK_THROWS_AS(texture_mean(InverseGamma{1.0, 4.0}), std::domain_error);
    CHECK_THROWS_AS(texture_mean(InverseGamma{0.8, 4.0}), std::domain_error);

    SUBCASE("Monte-Carlo agreement within 3 standard errors") {
        const std::size_t n = 1000000;
        const TextureParams all[] = {Exponential{2.0}, Gamma{3.0, 1.5}, InverseGamma{4.0, 6.0}};
        for (const auto& params : all) {
            const auto draws = sample_texture(params, n, 99);
            const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
            const double var = texture_second_moment(params) - texture_mean(params) * texture_mean(params);
            const double se = std::sqrt(var / n);
            CHECK(std::abs(mean - texture_mean(params)) < 3.0 * se);
        }
    }
}

TEST_CASE("sample_texture") {
    CHECK(sample_texture(Exponential{1.0}, 0, 1).empty());

    SUBCASE("deterministic per seed") {
        const auto a = sample_texture(Gamma{2.0, 1.0}, 100, 5);
        const auto b = sample_texture(Gamma{2.0, 1.0}, 100, 5);
        const auto c = sample_texture(Gamma{2.0, 1.0}, 100, 6);
        CHECK(a == b);
        CHECK(a != c);
    }
    SUBCASE("exponential mean lands in the CLT window") {
        const auto draws = sample_texture(Exponential{2.0}, 1000000, 123);
        const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
        CHECK(mean > 1.994);
        CHECK(mean < 2.006);
    }
    SUBCASE("inverse-gamma reciprocals are gamma (KS check)") {
        const double alpha = 3.0, beta = 2.0;  // z ~ IG(alpha, scale beta)
        const std::size_t n = 20000;
        auto draws = sample_texture(InverseGamma{alpha, beta}, n, 7);
        for (auto& z : draws) z = 1.0 / z;  // should be Gamma(alpha, rate beta)
        std::sort(draws.begin(), draws.end());
        // regularized lower incomplete gamma via series/continued fraction-free
        // quadrature of the density
        const auto cdf = [&](double x) {
            const auto f = [&](double t) {
                return std::exp(alpha * std::log(beta) - std::lgamma(alpha) +
                                (alpha - 1.0) * std::log(t) - beta * t);
            };
            return oracle::integrate(f, 1e-12, x, 1e-10);
        };
        double ks = 0.0;
        for (std::size_t i = 0; i < n; i += 97) {
            const double empirical = (i + 1.0) / n;
            ks = std::max(ks, std::abs(empirical - cdf(draws[i])));
        }
        // 1% critical value 1.63/sqrt(n) ~ 0.0115
        CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("simulate_cg") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);

    SUBCASE("fixed z = 1 gives Gaussian data") {
        const auto sig = simulate_fixed_texture(1.0, mu, eye, 5000, 40, 11);
        const double kurt = mardia_kurtosis(sig.samples());
        CHECK(kurt == doctest::Approx(8.0).epsilon(0.025));  // d(d+2) = 8
    }
    SUBCASE("pooled covariance approaches E[z] * sigma") {
        const auto sig = simulate_cg(Exponential{2.0}, mu, eye, 5000, 40, 13);
        const Eigen::MatrixXd& y = sig.samples();
        const Eigen::RowVectorXd mean = y.colwise().mean();
        const Eigen::MatrixXd centered = y.rowwise() - mean;
        const Eigen::MatrixXd cov = centered.transpose() * centered / y.rows();
        CHECK((cov - 2.0 * eye).cwiseAbs().maxCoeff() < 0.05 * 2.0);
    }
    SUBCASE("same seed reproduces byte-identical data") {
        const auto a = simulate_cg(Gamma{3.0, 1.5}, mu, eye, 10, 5, 42);
        const auto b = simulate_cg(Gamma{3.0, 1.5}, mu, eye, 10, 5, 42);
        CHECK((a.samples() - b.samples()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("non-SPD sigma rejected") {
        Eigen::MatrixXd bad(2, 2);
        bad << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(simulate_cg(Exponential{1.0}, mu, bad, 2, 2, 1), std::invalid_argument);
    }
    SUBCASE("shared z within segments inflates the spread of per-segment variances") {
        // Same marginal scale: Exponential(2) vs constant z = 2.
        const int K = 2000, N = 40;
        const auto cg = simulate_cg(Exponential{2.0}, mu, eye, K, N, 99);
        const auto fixed = simulate_fixed_texture(2.0, mu, eye, K, N, 99);
        const auto segment_var_spread = [&](const SegmentedSignal& sig) {
            std::vector<double> vars(K);
            for (int k = 0; k < K; ++k) {
                const auto block = sig.segment(k);
                const Eigen::RowVectorXd m = block.colwise().mean();
                vars[k] = (block.rowwise() - m).squaredNorm() / (N * 2.0);
            }
            const double mean = std::accumulate(vars.begin(), vars.end(), 0.0) / K;
            double ss = 0.0;
            for (const double v : vars) ss += (v - mean) * (v - mean);
            return ss / K;
        };
        CHECK(segment_var_spread(cg) > 2.0 * segment_var_spread(fixed));
    }
}
