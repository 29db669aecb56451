#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cgtex/em.hpp"
#include "cgtex/marginal.hpp"
#include "cgtex/texture.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cgtex;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

double gaussian_log_pdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                        const Eigen::MatrixXd& cov) {
    const double d = static_cast<double>(y.size());
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::MatrixXd l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const double q = llt.matrixL().solve(y - mu).squaredNorm();
    return -0.5 * d * std::log(2.0 * 3.14159265358979323846) - 0.5 * log_det - 0.5 * q;
}

}  // namespace

TEST_CASE("cgig marginal approaches the Gaussian in the large-alpha limit") {
    const double s = 1.7;  // limiting covariance scale
    const double alpha = 1e4;
    const MarginalModel model(vec2(0.3, -0.2), mat2(2.0, 0.4, 0.4, 1.0),
                              InverseGamma{alpha, alpha * s});
    std::mt19937_64 eng(3);
    std::normal_distribution<double> normal(0.0, 1.5);
    for (int i = 0; i < 30; ++i) {
        const Eigen::VectorXd y = vec2(normal(eng), normal(eng));
        const double want = gaussian_log_pdf(y, vec2(0.3, -0.2),
                                             s * mat2(2.0, 0.4, 0.4, 1.0));
        CHECK(model.log_pdf(y) == doctest::Approx(want).epsilon(1e-3));
    }
}

TEST_CASE("cge marginal at d = 1 matches direct quadrature of the mixture") {
    const double lambda = 1.6, sigma = 0.8, mu = 0.25;
    Eigen::VectorXd mv(1);
    mv << mu;
    Eigen::MatrixXd sv(1, 1);
    sv << sigma;
    const MarginalModel model(mv, sv, Exponential{lambda});
    for (const double y : {0.3, 1.0, -2.0, 4.5}) {
        const double q = (y - mu) * (y - mu) / sigma;
        // int p(y|z) p(z) dz = (2 pi sigma)^{-1/2} / lambda *
        //                      int z^{-1/2} exp(-(q/2)/z - z/lambda) dz
        const double want = -0.5 * std::log(2.0 * 3.14159265358979323846 * sigma) -
                            std::log(lambda) +
                            oracle::gig_log_normalizer_quadrature(0.5, 0.5 * q, 1.0 / lambda);
        Eigen::VectorXd yv(1);
        yv << y;
        CHECK(model.log_pdf(yv) == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("cgg with alpha = 1 coincides with cge") {
    const double lambda = 2.3;
    const Eigen::VectorXd mu = vec2(0.1, -0.6);
    const Eigen::MatrixXd sigma = mat2(1.5, -0.2, -0.2, 0.9);
    const MarginalModel ce(mu, sigma, Exponential{lambda});
    const MarginalModel cg(mu, sigma, Gamma{1.0, 1.0 / lambda});
    std::mt19937_64 eng(5);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd y = vec2(normal(eng), normal(eng));
        CHECK(ce.log_pdf(y) == doctest::Approx(cg.log_pdf(y)).epsilon(1e-10));
    }
}

TEST_CASE("log_pdf rejects non-finite points and dimension mismatch") {
    const MarginalModel model(vec2(0, 0), mat2(1, 0, 0, 1), Exponential{1.0});
    CHECK_THROWS_AS(model.log_pdf(vec2(std::nan(""), 0.0)), std::domain_error);
    Eigen::VectorXd y3(3);
    y3.setZero();
    CHECK_THROWS_AS(model.log_pdf(y3), std::invalid_argument);
}

TEST_CASE("log_pdf stays finite at the mean despite the cge singularity") {
    const MarginalModel model(vec2(0, 0), mat2(1, 0, 0, 1), Exponential{1.0});
    CHECK(std::isfinite(model.log_pdf(vec2(0.0, 0.0))));
}

TEST_CASE("log_likelihood additivity") {
    const MarginalModel model(vec2(0, 0), mat2(2, 0.3, 0.3, 1), Exponential{2.0});
    Eigen::MatrixXd one(1, 2);
    one << 0.7, -0.4;
    const SegmentedSignal single(one, 1, 1);
    CHECK(model.log_likelihood(single) == doctest::Approx(model.log_pdf(vec2(0.7, -0.4))));

    const auto sig = simulate_cg(Exponential{2.0}, vec2(0, 0), mat2(2, 0.3, 0.3, 1), 10, 4, 3);
    Eigen::MatrixXd doubled(sig.samples().rows() * 2, 2);
    doubled << sig.samples(), sig.samples();
    const SegmentedSignal twice(doubled, 20, 4);
    CHECK(model.log_likelihood(twice) ==
          doctest::Approx(2.0 * model.log_likelihood(sig)).epsilon(1e-14));
}

TEST_CASE("matched family attains higher per-sample llv than a mismatched one") {
    int wins = 0;
    for (int seed = 0; seed < 6; ++seed) {
        const auto sig = simulate_cg(Exponential{2.0}, vec2(0, 0), mat2(2, 0.3, 0.3, 1), 150,
                                     30, 60 + seed);
        const CgFit fe = fit(sig, Family::cge);
        const CgFit fig = fit(sig, Family::cgig);
        const double le = MarginalModel(fe.mu, fe.sigma, fe.texture).log_likelihood(sig);
        const double lig = MarginalModel(fig.mu, fig.sigma, fig.texture).log_likelihood(sig);
        if (le > lig) ++wins;
    }
    CHECK(wins >= 5);
}

TEST_CASE("pdf_grid") {
    const Eigen::VectorXd mu = vec2(0, 0);
    const Eigen::MatrixXd sigma = mat2(1.2, 0.0, 0.0, 0.7);

    const auto edges = [](double lo, double hi, int bins) {
        std::vector<double> e(bins + 1);
        for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
        return e;
    };

    SUBCASE("wide grids carry almost all the mass, every family") {
        // Bins fine relative to the density scale: midpoint mass converges
        // at O(width^2), so +-20 pooled std needs a few hundred bins.
        const TextureParams all[] = {TextureParams{Exponential{1.5}},
                                     TextureParams{Gamma{2.0, 1.0}},
                                     TextureParams{InverseGamma{3.0, 4.0}}};
        for (const auto& texture : all) {
            const MarginalModel model(mu, sigma, texture);
            const double spread = 20.0 * std::sqrt(2.0 * 1.2);
            const auto mass = model.pdf_grid(edges(-spread, spread, 640),
                                             edges(-spread, spread, 640));
            CHECK(mass.sum() == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
    SUBCASE("point symmetry for centered diagonal models") {
        const MarginalModel model(mu, sigma, Exponential{1.0});
        const auto mass = model.pdf_grid(edges(-4, 4, 21), edges(-4, 4, 21));
        for (long i = 0; i < mass.rows(); ++i)
            for (long j = 0; j < mass.cols(); ++j)
                CHECK(mass(i, j) ==
                      doctest::Approx(mass(mass.rows() - 1 - i, mass.cols() - 1 - j))
                          .epsilon(1e-12));
    }
    SUBCASE("cgig grid mass over a patch matches 2-D quadrature") {
        const MarginalModel model(mu, sigma, InverseGamma{3.0, 4.0});
        const auto mass = model.pdf_grid(edges(0.3, 0.9, 24), edges(-0.2, 0.5, 24));
        const auto inner = [&](double x) {
            return oracle::integrate(
                [&](double y) { return std::exp(model.log_pdf(vec2(x, y))); }, -0.2, 0.5,
                1e-10);
        };
        const double want = oracle::integrate(inner, 0.3, 0.9, 1e-8);
        CHECK(mass.sum() == doctest::Approx(want).epsilon(1e-4));
    }
    SUBCASE("d != 2 or bad edges rejected") {
        Eigen::VectorXd m1(1);
        m1 << 0.0;
        Eigen::MatrixXd s1(1, 1);
        s1 << 1.0;
        const MarginalModel model1(m1, s1, Exponential{1.0});
        CHECK_THROWS_AS(model1.pdf_grid({0, 1}, {0, 1}), std::invalid_argument);
        const MarginalModel model(mu, sigma, Exponential{1.0});
        CHECK_THROWS_AS(model.pdf_grid({0, 1, 0.5}, {0, 1}), std::invalid_argument);
    }
}

TEST_CASE("density rises toward the mean and decays along rays") {
    const Eigen::VectorXd mu = vec2(0.5, -0.3);
    const Eigen::MatrixXd sigma = mat2(2.0, 0.3, 0.3, 1.0);
    const TextureParams all[] = {TextureParams{Exponential{2.0}},
                                 TextureParams{Gamma{3.0, 1.5}},
                                 TextureParams{InverseGamma{4.0, 6.0}}};
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (const auto& texture : all) {
        const MarginalModel model(mu, sigma, texture);
        const double scale =
            std::sqrt(texture_mean(texture) *
                      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma).eigenvalues().maxCoeff());
        for (int trial = 0; trial < 12; ++trial) {
            const double a = angle(eng);
            const Eigen::VectorXd dir = vec2(std::cos(a), std::sin(a));
            // increasing toward mu inside, decreasing beyond 3 * scale
            double prev = model.log_pdf(mu + 0.9 * scale * dir);
            CHECK(model.log_pdf(mu + 0.5 * scale * dir) > prev);
            prev = model.log_pdf(mu + 3.0 * scale * dir);
            for (double r = 3.5; r < 9.0; r += 0.5) {
                const double cur = model.log_pdf(mu + r * scale * dir);
                CHECK(cur < prev);
                prev = cur;
            }
        }
    }
}

TEST_CASE("segment_log_likelihood agrees with direct quadrature per segment") {
    const Eigen::VectorXd mu = vec2(0, 0);
    const Eigen::MatrixXd sigma = mat2(2, 0.3, 0.3, 1);
    const auto sig = simulate_cg(Exponential{2.0}, mu, sigma, 3, 6, 77);
    const TextureParams all[] = {TextureParams{Exponential{1.7}},
                                 TextureParams{Gamma{2.2, 1.1}},
                                 TextureParams{InverseGamma{3.5, 5.0}}};
    const int n = 6, d = 2;
    for (const auto& texture : all) {
        const MarginalModel model(mu, sigma, texture);
        const auto stats = segment_stats(sig, mu, sigma);
        const double log_det = std::log(sigma.determinant());
        double want = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double t1 = stats.t1[k];
            // texture kernel z^{-Nd/2 - (prior power)} with the prior's own
            // normalizer split off, peak-aware quadrature in log z
            double prior_norm, p, a, b;
            if (const auto* e = std::get_if<Exponential>(&texture)) {
                prior_norm = -std::log(e->lambda);
                p = -0.5 * n * d + 1.0;
                a = t1;
                b = 1.0 / e->lambda;
            } else if (const auto* g = std::get_if<Gamma>(&texture)) {
                prior_norm = g->alpha * std::log(g->beta) - std::lgamma(g->alpha);
                p = -0.5 * n * d + g->alpha;
                a = t1;
                b = g->beta;
            } else {
                const auto& ig = std::get<InverseGamma>(texture);
                prior_norm = ig.alpha * std::log(ig.beta) - std::lgamma(ig.alpha);
                p = -(0.5 * n * d + ig.alpha);
                a = t1 + ig.beta;
                b = 0.0;
            }
            want += -0.5 * n * d * std::log(2.0 * 3.14159265358979323846) -
                    0.5 * n * log_det + prior_norm +
                    oracle::gig_log_normalizer_quadrature(p, a, b);
        }
        CHECK(model.segment_log_likelihood(sig) == doctest::Approx(want).epsilon(1e-8));
    }
}
