#include "cgtex/marginal.hpp"

#include <cmath>
#include <stdexcept>

#include "cgtex/parallel.hpp"
#include "cgtex/special_functions.hpp"

namespace cgtex {

namespace {
constexpr double kLog2Pi = 1.837877066409345483560659472811;
constexpr double kQuadFloor = 1e-300;
}  // namespace

MarginalModel::MarginalModel(Eigen::VectorXd mu, Eigen::MatrixXd sigma, TextureParams texture)
    : family_(family_of(texture)),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      texture_(std::move(texture)),
      llt_(chol_spd(sigma_)) {
    validate(texture_);
    if (mu_.size() != sigma_.rows())
        throw std::invalid_argument("MarginalModel: mu/sigma dimension mismatch");
    const Eigen::MatrixXd L = llt_.matrixL();
    log_det_sigma_ = 2.0 * L.diagonal().array().log().sum();
}

double MarginalModel::quad_form(const Eigen::VectorXd& y) const {
    if (y.size() != mu_.size())
        throw std::invalid_argument("MarginalModel: point dimension mismatch");
    if (!y.allFinite())
        throw std::domain_error("MarginalModel: non-finite evaluation point");
    return llt_.matrixL().solve(y - mu_).squaredNorm();
}

double MarginalModel::log_pdf_from_quad(double q) const {
    q = std::max(q, kQuadFloor);
    const double d = static_cast<double>(mu_.size());
    const double base = -0.5 * d * kLog2Pi - 0.5 * log_det_sigma_;
    switch (family_) {
        case Family::cge: {
            const double lambda = std::get<Exponential>(texture_).lambda;
            const double order = 0.5 * d - 1.0;
            const double arg = std::sqrt(2.0 * q / lambda);
            return base + std::log(2.0) - std::log(lambda) + sf::log_bessel_k(order, arg) -
                   order * 0.5 * std::log(0.5 * lambda * q);
        }
        case Family::cgg: {
            const auto& g = std::get<Gamma>(texture_);
            const double order = g.alpha - 0.5 * d;
            const double arg = std::sqrt(2.0 * g.beta * q);
            return base + std::log(2.0) + g.alpha * std::log(g.beta) - sf::log_gamma(g.alpha) +
                   0.5 * order * std::log(0.5 * q / g.beta) + sf::log_bessel_k(order, arg);
        }
        case Family::cgig: {
            const auto& ig = std::get<InverseGamma>(texture_);
            return sf::log_gamma(ig.alpha + 0.5 * d) - sf::log_gamma(ig.alpha) -
                   0.5 * d * (kLog2Pi + std::log(ig.beta)) - 0.5 * log_det_sigma_ -
                   (ig.alpha + 0.5 * d) * std::log1p(0.5 * q / ig.beta);
        }
    }
    throw std::logic_error("MarginalModel: unknown family");
}

double MarginalModel::log_pdf(const Eigen::VectorXd& y) const {
    return log_pdf_from_quad(quad_form(y));
}

double MarginalModel::log_likelihood(const SegmentedSignal& sig) const {
    if (sig.channels() != dimension())
        throw std::invalid_argument("log_likelihood: signal dimension mismatch");
    const long total = sig.total_samples();
    const Eigen::MatrixXd& samples = sig.samples();
    // Whiten all samples at once, then per-sample density from the quadratic
    // form. Per-sample terms accumulate into a buffer so the reduction order
    // is independent of the worker count.
    std::vector<double> terms(static_cast<std::size_t>(total));
    parallel_for(total, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            const double q = llt_.matrixL()
                                 .solve((samples.row(i).transpose() - mu_).eval())
                                 .squaredNorm();
            terms[static_cast<std::size_t>(i)] = log_pdf_from_quad(q);
        }
    });
    double sum = 0.0;
    for (const double t : terms) sum += t;
    return sum;
}

double MarginalModel::segment_log_likelihood(const SegmentedSignal& sig) const {
    if (sig.channels() != dimension())
        throw std::invalid_argument("segment_log_likelihood: signal dimension mismatch");
    const int K = sig.segment_count();
    const int N = sig.samples_per_segment();
    const double d = dimension();
    const SegmentStat stats = segment_stats(sig, mu_, sigma_);
    const Eigen::VectorXd t1 = floor_degenerate_t1(stats.t1);

    // Per segment: -(Nd/2) ln(2 pi) - (N/2) ln|Sigma| + ln int z^{-Nd/2}
    // exp(-t1/z) p(z) dz, the texture integral via the GIG normalizer
    // 2 (a/b)^{p/2} K_p(2 sqrt(ab)).
    const double base = K * (-0.5 * N * d * kLog2Pi - 0.5 * N * log_det_sigma_);
    std::vector<double> terms(static_cast<std::size_t>(K));
    switch (family_) {
        case Family::cge: {
            const double lambda = std::get<Exponential>(texture_).lambda;
            const double p = -0.5 * N * d + 1.0;
            parallel_for(K, [&](long lo, long hi) {
                for (long k = lo; k < hi; ++k) {
                    const double arg = 2.0 * std::sqrt(t1[k] / lambda);
                    terms[k] = -std::log(lambda) + std::log(2.0) +
                               0.5 * p * std::log(t1[k] * lambda) +
                               sf::log_bessel_k(p, arg);
                }
            });
            break;
        }
        case Family::cgg: {
            const auto& g = std::get<Gamma>(texture_);
            const double p = -0.5 * N * d + g.alpha;
            const double prior_norm = g.alpha * std::log(g.beta) - sf::log_gamma(g.alpha);
            parallel_for(K, [&](long lo, long hi) {
                for (long k = lo; k < hi; ++k) {
                    const double arg = 2.0 * std::sqrt(g.beta * t1[k]);
                    terms[k] = prior_norm + std::log(2.0) +
                               0.5 * p * (std::log(t1[k]) - std::log(g.beta)) +
                               sf::log_bessel_k(p, arg);
                }
            });
            break;
        }
        case Family::cgig: {
            const auto& ig = std::get<InverseGamma>(texture_);
            const double alpha_star = 0.5 * N * d + ig.alpha;
            const double prior_norm = ig.alpha * std::log(ig.beta) - sf::log_gamma(ig.alpha) +
                                      sf::log_gamma(alpha_star);
            for (long k = 0; k < K; ++k)
                terms[static_cast<std::size_t>(k)] =
                    prior_norm - alpha_star * std::log(ig.beta + t1[k]);
            break;
        }
    }
    double sum = base;
    for (const double t : terms) sum += t;
    return sum;
}

Eigen::MatrixXd MarginalModel::pdf_grid(const std::vector<double>& x_edges,
                                        const std::vector<double>& y_edges) const {
    if (dimension() != 2)
        throw std::invalid_argument("pdf_grid: only defined for d = 2 models");
    if (x_edges.size() < 2 || y_edges.size() < 2)
        throw std::invalid_argument("pdf_grid: need at least one bin per axis");
    for (std::size_t i = 1; i < x_edges.size(); ++i)
        if (!(x_edges[i] > x_edges[i - 1]))
            throw std::invalid_argument("pdf_grid: x_edges must be strictly increasing");
    for (std::size_t i = 1; i < y_edges.size(); ++i)
        if (!(y_edges[i] > y_edges[i - 1]))
            throw std::invalid_argument("pdf_grid: y_edges must be strictly increasing");

    // The cge/cgg marginal diverges (integrably) at mu when the Bessel order
    // is <= 0; the bin holding mu gets sub-center averaging instead of a
    // single center evaluation.
    bool singular_at_mean = false;
    if (family_ == Family::cge) singular_at_mean = (0.5 * dimension() - 1.0) <= 0.0;
    if (family_ == Family::cgg)
        singular_at_mean = (std::get<Gamma>(texture_).alpha - 0.5 * dimension()) <= 0.0;

    const long nx = static_cast<long>(x_edges.size()) - 1;
    const long ny = static_cast<long>(y_edges.size()) - 1;
    Eigen::MatrixXd mass(nx, ny);
    parallel_for(nx, [&](long lo, long hi) {
        Eigen::VectorXd point(2);
        for (long i = lo; i < hi; ++i) {
            const double x_lo = x_edges[i], x_hi = x_edges[i + 1];
            const double wx = x_hi - x_lo;
            for (long j = 0; j < ny; ++j) {
                const double y_lo = y_edges[j], y_hi = y_edges[j + 1];
                const double wy = y_hi - y_lo;
                const bool contains_mu = singular_at_mean && mu_[0] >= x_lo && mu_[0] < x_hi &&
                                         mu_[1] >= y_lo && mu_[1] < y_hi;
                if (contains_mu) {
                    double acc = 0.0;
                    for (int a = 0; a < 5; ++a)
                        for (int b = 0; b < 5; ++b) {
                            point[0] = x_lo + (a + 0.5) / 5.0 * wx;
                            point[1] = y_lo + (b + 0.5) / 5.0 * wy;
                            acc += std::exp(log_pdf(point));
                        }
                    mass(i, j) = acc / 25.0 * wx * wy;
                } else {
                    point[0] = 0.5 * (x_lo + x_hi);
                    point[1] = 0.5 * (y_lo + y_hi);
                    mass(i, j) = std::exp(log_pdf(point)) * wx * wy;
                }
            }
        }
    });
    return mass;
}

}  // namespace cgtex
