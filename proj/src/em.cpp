#include "cgtex/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cgtex/evaluation.hpp"
#include "cgtex/marginal.hpp"
#include "cgtex/parallel.hpp"
#include "cgtex/special_functions.hpp"

namespace cgtex {

namespace {

// Moments of the generalized inverse Gaussian kernel z^{p-1} e^{-a/z - b z}:
//   <z>    = sqrt(a/b) K_{p+1}(w) / K_p(w)
//   <1/z>  = sqrt(b/a) K_{p-1}(w) / K_p(w)
//   <ln z> = ln(a/b)/2 + d/dp ln K_p(w)          with w = 2 sqrt(ab).
PosteriorMoments gig_moments(const Eigen::VectorXd& a_vals, double b, double order,
                             long* floored) {
    const long K = a_vals.size();
    PosteriorMoments m;
    m.e_z.resize(K);
    m.e_inv_z.resize(K);
    m.e_ln_z.resize(K);
    const Eigen::VectorXd a = floor_degenerate_t1(a_vals, floored);
    parallel_for(K, [&](long lo, long hi) {
        for (long k = lo; k < hi; ++k) {
            const double w = 2.0 * std::sqrt(a[k] * b);
            const double half_log_ab = 0.5 * (std::log(a[k]) - std::log(b));
            m.e_z[k] = std::exp(half_log_ab + sf::log_bessel_k_ratio(order, w, +1));
            m.e_inv_z[k] = std::exp(-half_log_ab + sf::log_bessel_k_ratio(order, w, -1));
            m.e_ln_z[k] = half_log_ab + sf::dlog_bessel_k_dorder(order, w);
        }
    });
    return m;
}

double texture_param_change(const TextureParams& a, const TextureParams& b) {
    if (family_of(a) != family_of(b))
        throw std::logic_error("texture_param_change: family mismatch");
    if (std::holds_alternative<Exponential>(a))
        return std::abs(std::get<Exponential>(a).lambda - std::get<Exponential>(b).lambda);
    if (std::holds_alternative<Gamma>(a)) {
        const auto &ga = std::get<Gamma>(a), &gb = std::get<Gamma>(b);
        return std::abs(ga.alpha - gb.alpha) + std::abs(ga.beta - gb.beta);
    }
    const auto &ia = std::get<InverseGamma>(a), &ib = std::get<InverseGamma>(b);
    return std::abs(ia.alpha - ib.alpha) + std::abs(ia.beta - ib.beta);
}

TextureParams initial_texture(Family family, double mean_scale) {
    switch (family) {
        case Family::cge: return Exponential{mean_scale};
        case Family::cgg: return Gamma{1.0, 1.0 / mean_scale};
        case Family::cgig: return InverseGamma{2.0, mean_scale};
    }
    throw std::logic_error("initial_texture: unknown family");
}

}  // namespace

PosteriorMoments e_step_cge(const SegmentStat& stats, double lambda, int samples_per_segment,
                            int channels, long* floored_segments) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("e_step_cge: lambda must be positive");
    const double varsigma = -0.5 * samples_per_segment * channels + 1.0;
    return gig_moments(stats.t1, 1.0 / lambda, varsigma, floored_segments);
}

PosteriorMoments e_step_cgg(const SegmentStat& stats, double alpha, double beta,
                            int samples_per_segment, int channels, long* floored_segments) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("e_step_cgg: alpha and beta must be positive");
    const double nu = -0.5 * samples_per_segment * channels + alpha;
    return gig_moments(stats.t1, beta, nu, floored_segments);
}

PosteriorMoments e_step_cgig(const SegmentStat& stats, double alpha, double beta,
                             int samples_per_segment, int channels) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("e_step_cgig: alpha and beta must be positive");
    const long K = stats.t1.size();
    const double alpha_star = 0.5 * samples_per_segment * channels + alpha;
    const double psi_alpha_star = sf::digamma(alpha_star);
    PosteriorMoments m;
    m.e_z.resize(K);
    m.e_inv_z.resize(K);
    m.e_ln_z.resize(K);
    for (long k = 0; k < K; ++k) {
        const double beta_star = beta + stats.t1[k];
        m.e_inv_z[k] = alpha_star / beta_star;
        m.e_ln_z[k] = std::log(beta_star) - psi_alpha_star;
        m.e_z[k] = beta_star / (alpha_star - 1.0);  // defined: alpha* > Nd/2 >= 1
    }
    return m;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> m_step_common(const SegmentedSignal& sig,
                                                          const PosteriorMoments& moments,
                                                          std::vector<std::string>* warnings) {
    const int K = sig.segment_count();
    const int N = sig.samples_per_segment();
    const int d = sig.channels();
    if (moments.e_inv_z.size() != K)
        throw std::invalid_argument("m_step_common: moment/segment count mismatch");

    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    double eta_sum = 0.0;
    for (int k = 0; k < K; ++k) {
        const double eta = moments.e_inv_z[k];
        mu += eta * sig.segment(k).colwise().mean().transpose();
        eta_sum += eta;
    }
    mu /= eta_sum;

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXd centered = sig.segment(k).rowwise() - mu.transpose();
        sigma += moments.e_inv_z[k] * (centered.transpose() * centered);
    }
    sigma /= static_cast<double>(K) * N;
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    // Ridge repair when the scatter collapses along some direction.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const double floor = 1e-10 * sigma.trace() / d;
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < floor) {
        sigma += (floor - min_eig) * Eigen::MatrixXd::Identity(d, d);
        if (warnings)
            warnings->push_back("m_step_common: scatter eigenvalue " + std::to_string(min_eig) +
                                " below floor, ridge applied");
    }
    return {mu, sigma};
}

double m_step_lambda(const PosteriorMoments& moments) {
    if (moments.e_z.size() < 1)
        throw std::invalid_argument("m_step_lambda: empty moments");
    return moments.e_z.mean();
}

double solve_alpha_newton(double sum_ln_z, long segment_count, double companion_moment_sum,
                          Family family) {
    if (segment_count < 1 || !(companion_moment_sum > 0.0))
        throw std::invalid_argument("solve_alpha_newton: invalid moment sums");
    const double mean_ln_z = sum_ln_z / segment_count;
    const double log_mean_companion = std::log(companion_moment_sum / segment_count);
    // gamma:          psi(a) - ln a = mean<ln z> - ln(mean<z>)    = -D
    // inverse-gamma:  psi(a) - ln a = -mean<ln z> - ln(mean<1/z>) = -D
    double target;
    if (family == Family::cgg)
        target = mean_ln_z - log_mean_companion;
    else if (family == Family::cgig)
        target = -mean_ln_z - log_mean_companion;
    else
        throw std::invalid_argument("solve_alpha_newton: family must be cgg or cgig");

    constexpr double kAlphaMin = 1e-6, kAlphaMax = 1e6;
    // Jensen guarantees target <= 0; a nonnegative value can only be floating
    // point noise from a near-degenerate posterior, where the root runs away.
    if (target >= 0.0) return kAlphaMax;

    const double s = -target;
    // Moment-matched start, then Newton on g(a) = psi(a) - ln(a) - target.
    double alpha = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    alpha = std::clamp(alpha, kAlphaMin, kAlphaMax);
    bool newton_ok = false;
    for (int it = 0; it < 200; ++it) {
        const double g = sf::digamma(alpha) - std::log(alpha) - target;
        const double gp = sf::trigamma(alpha) - 1.0 / alpha;
        const double step = g / gp;
        double next = alpha - step;
        if (!std::isfinite(next) || next <= 0.0) next = 0.5 * alpha;
        next = std::clamp(next, kAlphaMin, kAlphaMax);
        const bool done = std::abs(next - alpha) <= 1e-13 * std::max(1.0, alpha);
        alpha = next;
        if (done) {
            newton_ok = true;
            break;
        }
    }
    if (newton_ok && std::abs(sf::digamma(alpha) - std::log(alpha) - target) < 1e-9)
        return alpha;

    // Bisection fallback on the spec bracket.
    double lo = 1e-3, hi = 1e3;
    auto g_at = [&](double a) { return sf::digamma(a) - std::log(a) - target; };
    if (g_at(lo) > 0.0) return kAlphaMin;  // root below bracket
    if (g_at(hi) < 0.0) return kAlphaMax;  // root above bracket
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g_at(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

CgFit fit(const SegmentedSignal& sig, Family family, const std::optional<CgFit>& init,
          const FitOptions& opts) {
    const int K = sig.segment_count();
    const int N = sig.samples_per_segment();
    const int d = sig.channels();
    if (K < 2)
        throw std::invalid_argument("fit: need at least 2 segments");
    if (N * d < 2)
        throw std::invalid_argument("fit: need N*d >= 2");

    // Reject degenerate input before iterating.
    const Eigen::MatrixXd& all = sig.samples();
    const Eigen::RowVectorXd grand_mean = all.colwise().mean();
    const Eigen::MatrixXd centered = all.rowwise() - grand_mean;
    for (int j = 0; j < d; ++j) {
        if (centered.col(j).squaredNorm() <= 0.0)
            throw std::invalid_argument("fit: channel " + std::to_string(j) +
                                        " has zero variance");
    }

    CgFit result;
    result.family = family;
    result.segment_count = K;
    result.samples_per_segment = N;

    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    TextureParams texture = initial_texture(family, 1.0);
    if (init) {
        mu = init->mu;
        sigma = init->sigma;
        texture = init->texture;
        if (family_of(texture) != family)
            throw std::invalid_argument("fit: init texture family mismatch");
    } else {
        // Moment matching: grand mean, pooled covariance split so that
        // tr(sigma0) = d and the texture carries the remaining scale.
        mu = grand_mean.transpose();
        Eigen::MatrixXd pooled = centered.transpose() * centered / static_cast<double>(all.rows());
        const double mean_scale = pooled.trace() / d;
        sigma = pooled * (d / pooled.trace());
        texture = initial_texture(family, mean_scale);
    }
    if (opts.fixed_gamma_alpha) {
        if (family != Family::cgg)
            throw std::invalid_argument("fit: fixed_gamma_alpha only applies to cgg");
        auto g = std::get<Gamma>(texture);
        g.alpha = *opts.fixed_gamma_alpha;
        texture = g;
    }

    long floored_total = 0;
    PosteriorMoments moments;
    bool converged = false;
    double phi = std::numeric_limits<double>::infinity();
    int iter = 0;
    while (iter < opts.max_iter) {
        ++iter;
        const SegmentStat stats = segment_stats(sig, mu, sigma);
        switch (family) {
            case Family::cge:
                moments = e_step_cge(stats, std::get<Exponential>(texture).lambda, N, d,
                                     &floored_total);
                break;
            case Family::cgg: {
                const auto& g = std::get<Gamma>(texture);
                moments = e_step_cgg(stats, g.alpha, g.beta, N, d, &floored_total);
                break;
            }
            case Family::cgig: {
                const auto& ig = std::get<InverseGamma>(texture);
                moments = e_step_cgig(stats, ig.alpha, ig.beta, N, d);
                break;
            }
        }

        auto [mu_next, sigma_next] = m_step_common(sig, moments, &result.warnings);
        TextureParams texture_next = texture;
        switch (family) {
            case Family::cge:
                texture_next = Exponential{m_step_lambda(moments)};
                break;
            case Family::cgg: {
                const double sum_z = moments.e_z.sum();
                double alpha = opts.fixed_gamma_alpha
                                   ? *opts.fixed_gamma_alpha
                                   : solve_alpha_newton(moments.e_ln_z.sum(), K, sum_z,
                                                        Family::cgg);
                texture_next = Gamma{alpha, K * alpha / sum_z};
                break;
            }
            case Family::cgig: {
                const double sum_inv_z = moments.e_inv_z.sum();
                const double alpha =
                    solve_alpha_newton(moments.e_ln_z.sum(), K, sum_inv_z, Family::cgig);
                texture_next = InverseGamma{alpha, K * alpha / sum_inv_z};
                break;
            }
        }

        phi = texture_param_change(texture, texture_next) +
              (mu_next - mu).cwiseAbs().sum() + (sigma_next - sigma).cwiseAbs().sum();

        mu = std::move(mu_next);
        sigma = std::move(sigma_next);
        texture = texture_next;

        const double llv = MarginalModel(mu, sigma, texture).segment_log_likelihood(sig);
        result.trace.push_back({iter, phi, llv});
        if (phi <= opts.phi_o) {
            converged = true;
            break;
        }
    }

    if (floored_total > 0)
        result.warnings.push_back("e_step: floored " + std::to_string(floored_total) +
                                  " degenerate segment statistics");

    // Posterior moments consistent with the returned parameters.
    const SegmentStat stats = segment_stats(sig, mu, sigma);
    switch (family) {
        case Family::cge:
            result.posterior = e_step_cge(stats, std::get<Exponential>(texture).lambda, N, d);
            break;
        case Family::cgg: {
            const auto& g = std::get<Gamma>(texture);
            result.posterior = e_step_cgg(stats, g.alpha, g.beta, N, d);
            break;
        }
        case Family::cgig: {
            const auto& ig = std::get<InverseGamma>(texture);
            result.posterior = e_step_cgig(stats, ig.alpha, ig.beta, N, d);
            break;
        }
    }
    result.mu = std::move(mu);
    result.sigma = std::move(sigma);
    result.texture = texture;
    result.iterations = iter;
    result.converged = converged;
    result.final_phi = phi;
    result.final_log_likelihood = result.trace.empty() ? 0.0 : result.trace.back().log_likelihood;
    return result;
}

GridSearchResult grid_search_kn(const MultichannelRecord& record, Family family,
                                const std::vector<int>& k_candidates,
                                const std::vector<int>& n_candidates, int bins,
                                const FitOptions& opts) {
    if (k_candidates.empty() || n_candidates.empty())
        throw std::invalid_argument("grid_search_kn: empty candidate list");

    GridSearchResult res;
    res.k_candidates = k_candidates;
    res.n_candidates = n_candidates;
    res.kld_table.setConstant(k_candidates.size(), n_candidates.size(),
                              std::numeric_limits<double>::quiet_NaN());

    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < k_candidates.size(); ++i) {
        for (std::size_t j = 0; j < n_candidates.size(); ++j) {
            const int K = k_candidates[i];
            const int N = n_candidates[j];
            if (static_cast<long>(K) * N > record.total_samples()) continue;
            const SegmentedSignal sig = segment(record, K, N);
            const CgFit f = fit(sig, family, {}, opts);
            const EmpiricalDensity emp = build_empdf(sig, bins);
            const MarginalModel model(f.mu, f.sigma, f.texture);
            const Eigen::MatrixXd grid = model.pdf_grid(emp.x_edges, emp.y_edges);
            const double score = kld(emp, grid);
            res.kld_table(i, j) = score;
            const bool better =
                !any || score < best ||
                (score == best && (K > res.best_k || (K == res.best_k && N > res.best_n)));
            if (better) {
                best = score;
                res.best_k = K;
                res.best_n = N;
                any = true;
            }
        }
    }
    if (!any)
        throw std::invalid_argument("grid_search_kn: no feasible (K, N) pair");
    return res;
}

}  // namespace cgtex
